"""Read-only HTTP service over a store: window, search, focus, stats, birdview.

Window responses are newline-delimited JSON: row chunks followed by a
terminal summary line. Bodies are byte-deterministic for identical
requests; per-request timings travel in X-Query-Ms / X-Serialize-Ms
headers so replays stay byte-identical. Handlers are synchronous and run
in the framework's thread pool; the store is immutable, so concurrent
requests need no locking.
"""

from __future__ import annotations

import json
import math
import time

import numpy as np
from fastapi import FastAPI, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .errors import GraphAtlasError, NotFoundError
from .store import LayerTable, Store

DEFAULT_CHUNK_SIZE = 500

Rect = tuple[float, float, float, float]


def effective_window(center: tuple[float, float], width: float, height: float, zoom: float) -> Rect:
    """Query rectangle for a viewport: center +- (size / (2 * zoom)).

    Zooming in (zoom > 1) shrinks the requested window proportionally.
    """
    if not (zoom > 0) or not math.isfinite(zoom):
        raise ValueError(f"zoom must be positive, got {zoom!r}")
    hw = width / (2.0 * zoom)
    hh = height / (2.0 * zoom)
    cx, cy = center
    return (cx - hw, cy - hh, cx + hw, cy + hh)


def focus_window(store: Store, layer: int, node_id: int, client_size: tuple[float, float]) -> Rect:
    """Client-sized rectangle centered on the node's stored position."""
    x, y = store.table(layer).node_position(node_id)
    w, h = client_size
    return (x - w / 2.0, y - h / 2.0, x + w / 2.0, y + h / 2.0)


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _row_dicts(t: LayerTable, idx: np.ndarray) -> list[dict]:
    if idx.shape[0] == 0:
        return []
    pos1 = np.searchsorted(t.node_ids, t.r_node1[idx])
    out = []
    for j, i in enumerate(idx):
        degen = bool(t.r_degenerate[i])
        g = t.geom[i]
        out.append({
            "node1_id": int(t.r_node1[i]),
            "node1_label": t.node_labels[pos1[j]],
            "geometry": [float(g[0]), float(g[1]), float(g[2]), float(g[3])],
            "edge_label": None if degen else t.edge_labels[t.r_elabel[i]],
            "node2_id": None if degen else int(t.r_node2[i]),
            "node2_label": None if degen else t.node_label(int(t.r_node2[i])),
        })
    return out


def create_app(store: Store, chunk_size: int = DEFAULT_CHUNK_SIZE) -> FastAPI:
    app = FastAPI(title="graphatlas", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def _bad_params(request, exc):
        return JSONResponse(status_code=400, content={"error": "malformed parameters"})

    @app.exception_handler(NotFoundError)
    async def _not_found(request, exc):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(ValueError)
    async def _bad_value(request, exc):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(GraphAtlasError)
    async def _atlas_error(request, exc):
        return JSONResponse(status_code=500, content={"error": "internal error"})

    @app.exception_handler(Exception)
    async def _opaque(request, exc):
        return JSONResponse(status_code=500, content={"error": "internal error"})

    @app.get("/api/manifest")
    def manifest():
        body = _dump(store.manifest() | {"chunk_size": chunk_size})
        return Response(content=body, media_type="application/json")

    @app.get("/api/window")
    def window(layer: int, x1: float, y1: float, x2: float, y2: float, labels: str | None = None):
        label_filter = set(labels.split(",")) if labels is not None else None
        if label_filter == {""}:
            label_filter = set()
        t0 = time.perf_counter()
        table = store.table(layer)
        idx = table.window_indices((x1, y1, x2, y2), label_filter)
        t_query = time.perf_counter() - t0
        t0 = time.perf_counter()
        lines = []
        for c, s in enumerate(range(0, idx.shape[0], chunk_size)):
            chunk = idx[s : s + chunk_size]
            lines.append(_dump({
                "chunk": c,
                "count": int(chunk.shape[0]),
                "rows": _row_dicts(table, chunk),
            }))
        lines.append(_dump({"total_rows": int(idx.shape[0]), "chunks": len(lines)}))
        body = "\n".join(lines) + "\n"
        t_ser = time.perf_counter() - t0
        return Response(
            content=body,
            media_type="application/x-ndjson",
            headers={
                "X-Query-Ms": f"{t_query * 1000.0:.3f}",
                "X-Serialize-Ms": f"{t_ser * 1000.0:.3f}",
            },
        )

    @app.get("/api/search")
    def search(layer: int, q: str, limit: int = 100):
        table = store.table(layer)
        hits = store.keyword_search(layer, q, limit)
        body = _dump({
            "hits": [
                {
                    "id": nid,
                    "label": label,
                    "x": table.node_position(nid)[0],
                    "y": table.node_position(nid)[1],
                }
                for nid, label in hits
            ],
            "count": len(hits),
        })
        return Response(content=body, media_type="application/json")

    @app.get("/api/node")
    def node(layer: int, id: int):
        info = store.node_lookup(layer, id)
        table = store.table(layer)
        neighbour_ids = sorted({
            r.node2_id if r.node1_id == info.node_id else r.node1_id
            for r in info.rows
            if (r.node2_id if r.node1_id == info.node_id else r.node1_id) != info.node_id
        })
        body = _dump({
            "id": info.node_id,
            "label": info.label,
            "x": info.position[0],
            "y": info.position[1],
            "rows": [
                {
                    "node1_id": r.node1_id,
                    "node1_label": r.node1_label,
                    "geometry": list(r.geometry),
                    "edge_label": r.edge_label,
                    "node2_id": r.node2_id,
                    "node2_label": r.node2_label,
                }
                for r in info.rows
            ],
            "neighbours": [
                {
                    "id": nid,
                    "label": table.node_label(nid),
                    "x": table.node_position(nid)[0],
                    "y": table.node_position(nid)[1],
                }
                for nid in neighbour_ids
            ],
        })
        return Response(content=body, media_type="application/json")

    @app.get("/api/stats")
    def stats(layer: int):
        s = store.stats(layer)
        body = _dump({
            "node_count": s.node_count,
            "edge_count": s.edge_count,
            "avg_degree": s.avg_degree,
            "density": s.density,
        })
        return Response(content=body, media_type="application/json")

    @app.get("/api/birdview")
    def birdview(layer: int, max_points: int = 2000):
        if max_points < 1:
            raise ValueError("max_points must be >= 1")
        table = store.table(layer)
        n = table.node_count
        if n == 0:
            pts = []
        else:
            stride = max(1, math.ceil(n / max_points))
            sel = np.arange(0, n, stride)
            pts = [[float(x), float(y)] for x, y in table.node_xy[sel]]
        body = _dump({"total": n, "bounds": list(table.bounds()), "points": pts})
        return Response(content=body, media_type="application/json")

    return app


def serve(store: Store, bind: str = "127.0.0.1:8420", chunk_size: int = DEFAULT_CHUNK_SIZE,
          ui_dir=None):
    """Run the service (blocking). ui_dir, when given, is mounted at /."""
    import uvicorn

    app = create_app(store, chunk_size=chunk_size)
    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    host, _, port = bind.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"bind address must be host:port, got {bind!r}")
    uvicorn.run(app, host=host, port=int(port), log_level="warning")
