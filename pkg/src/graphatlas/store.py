"""Multi-layer triple store with spatial, id, and label indexes.

Every layer is persisted as rows of (node1 id/label, edge geometry, edge
label, node2 id/label); for directed graphs node1 is always the source.
Isolated nodes get degenerate rows (empty node2 side, zero-length
geometry at the node position) so window queries can return them. Rows
are kept pre-sorted ascending by (node1_id, node2_id) with node rows
first, which doubles as the node1 lookup index; an argsort over node2
covers the other role. Edge geometries feed an STR-packed R-tree whose
candidates are refined with an exact segment/rectangle test, and node
labels feed a suffix trie for contains-style keyword search.

The store is immutable once built or loaded; any number of threads may
query it concurrently.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .abstraction import Layer
from .errors import NotFoundError, StoreError, StoreLoadError
from .labelindex import SuffixTrie
from .model import Graph, GraphStats, graph_stats
from .rtree import STRtree

MAGIC = b"GVDB"
FORMAT_VERSION = 1

Rect = tuple[float, float, float, float]


@dataclass(frozen=True)
class TripleRow:
    node1_id: int
    node1_label: str
    geometry: tuple[float, float, float, float]   # (x1, y1, x2, y2); node1 end first
    edge_label: str | None
    node2_id: int | None
    node2_label: str | None

    @property
    def is_node_row(self) -> bool:
        return self.node2_id is None


@dataclass(frozen=True)
class NodeInfo:
    node_id: int
    label: str
    position: tuple[float, float]
    rows: tuple[TripleRow, ...]   # incident edge rows (degenerate row excluded)


def _check_rect(rect) -> Rect:
    x1, y1, x2, y2 = (float(v) for v in rect)
    if not all(math.isfinite(v) for v in (x1, y1, x2, y2)):
        raise ValueError(f"non-finite rectangle {rect!r}")
    if x1 > x2 or y1 > y2:
        raise ValueError(f"inverted rectangle {rect!r}")
    return (x1, y1, x2, y2)


class LayerTable:
    """One abstraction layer: node registry, triple rows, indexes."""

    def __init__(self, layer_index, directed, node_ids, node_xy, node_labels,
                 r_node1, r_node2, r_degenerate, geom, r_elabel, edge_labels,
                 tree=None):
        self.layer_index = int(layer_index)
        self.directed = bool(directed)
        self.node_ids = node_ids            # uint64, sorted ascending
        self.node_xy = node_xy              # float64 (n, 2)
        self.node_labels = list(node_labels)
        self.r_node1 = r_node1              # uint64 per row (canonical order)
        self.r_node2 = r_node2              # uint64 per row (0 where degenerate)
        self.r_degenerate = r_degenerate    # bool per row
        self.geom = geom                    # float64 (r, 4)
        self.r_elabel = r_elabel            # int32 per row, -1 for node rows
        self.edge_labels = list(edge_labels)
        self.tree = tree if tree is not None else STRtree(self._geom_bounds())

    def _geom_bounds(self) -> np.ndarray:
        if self.geom.shape[0] == 0:
            return np.zeros((0, 4))
        return np.column_stack([
            np.minimum(self.geom[:, 0], self.geom[:, 2]),
            np.minimum(self.geom[:, 1], self.geom[:, 3]),
            np.maximum(self.geom[:, 0], self.geom[:, 2]),
            np.maximum(self.geom[:, 1], self.geom[:, 3]),
        ])

    @classmethod
    def from_layer(cls, layer: Layer) -> "LayerTable":
        g = layer.graph
        n = g.node_count
        ns_order = np.argsort(g.node_ids, kind="stable")
        node_ids = g.node_ids[ns_order]
        node_xy = layer.xy[ns_order]
        node_labels = [g.node_labels[i] for i in ns_order]

        src_i, dst_i = g.edge_index
        m = g.edge_count
        elabel_ids: dict[str, int] = {}
        e_lab = np.empty(m, np.int32)
        for e, lab in enumerate(g.edge_labels):
            e_lab[e] = elabel_ids.setdefault(lab, len(elabel_ids))

        deg = np.zeros(n, np.int64)
        if m:
            deg += np.bincount(src_i, minlength=n)
            deg += np.bincount(dst_i, minlength=n)
        isolated = np.flatnonzero(deg == 0)

        r_node1 = np.concatenate([g.edge_src, g.node_ids[isolated]])
        r_node2 = np.concatenate([g.edge_dst, np.zeros(isolated.shape[0], np.uint64)])
        r_degen = np.concatenate([np.zeros(m, np.bool_), np.ones(isolated.shape[0], np.bool_)])
        exy = np.column_stack([layer.xy[src_i], layer.xy[dst_i]]) if m else np.zeros((0, 4))
        ixy = np.column_stack([layer.xy[isolated], layer.xy[isolated]]) if isolated.shape[0] else np.zeros((0, 4))
        geom = np.concatenate([exy, ixy])
        r_elabel = np.concatenate([e_lab, np.full(isolated.shape[0], -1, np.int32)])

        # canonical order: node1 asc, node rows first, node2 asc, insertion-stable
        rank = (~r_degen).astype(np.int8)
        order = np.lexsort((r_node2, rank, r_node1))
        return cls(
            layer.index, g.directed, node_ids, node_xy, node_labels,
            r_node1[order], r_node2[order], r_degen[order],
            np.ascontiguousarray(geom[order]), r_elabel[order], list(elabel_ids),
        )

    # -- node registry ----------------------------------------------------

    @property
    def node_count(self) -> int:
        return int(self.node_ids.shape[0])

    @property
    def row_count(self) -> int:
        return int(self.r_node1.shape[0])

    def _node_pos(self, node_id: int) -> int:
        i = int(np.searchsorted(self.node_ids, np.uint64(node_id)))
        if i >= self.node_count or self.node_ids[i] != np.uint64(node_id):
            raise NotFoundError(f"node {node_id} not in layer {self.layer_index}")
        return i

    def node_position(self, node_id: int) -> tuple[float, float]:
        i = self._node_pos(node_id)
        return float(self.node_xy[i, 0]), float(self.node_xy[i, 1])

    def node_label(self, node_id: int) -> str:
        return self.node_labels[self._node_pos(node_id)]

    # -- secondary indexes -------------------------------------------------

    @cached_property
    def _n2_perm(self) -> np.ndarray:
        rows = np.flatnonzero(~self.r_degenerate)
        return rows[np.argsort(self.r_node2[rows], kind="stable")]

    @cached_property
    def _trie(self) -> SuffixTrie:
        return SuffixTrie(self._distinct_labels[0])

    @cached_property
    def _distinct_labels(self) -> tuple[list[str], list[np.ndarray]]:
        by_label: dict[str, list[int]] = {}
        for i, lab in enumerate(self.node_labels):
            by_label.setdefault(lab, []).append(i)
        labels = list(by_label)
        return labels, [np.asarray(by_label[lab], np.int64) for lab in labels]

    # -- queries -----------------------------------------------------------

    def window_indices(self, rect: Rect, label_filter=None) -> np.ndarray:
        """Row indices (canonical order) whose segment overlaps the rect."""
        rect = _check_rect(rect)
        cand = self.tree.query(rect, np.zeros(self.row_count, np.bool_))
        idx = np.flatnonzero(cand)
        if idx.shape[0]:
            hit = kernels.segment_rect_mask(
                self.geom[idx, 0], self.geom[idx, 1],
                self.geom[idx, 2], self.geom[idx, 3], rect,
            )
            idx = idx[hit]
        if label_filter is not None and idx.shape[0]:
            allowed = {i for i, lab in enumerate(self.edge_labels) if lab in label_filter}
            keep = self.r_degenerate[idx] | np.isin(
                self.r_elabel[idx], np.asarray(sorted(allowed), np.int32)
            )
            idx = idx[keep]
        return idx

    def row(self, i: int) -> TripleRow:
        n1 = int(self.r_node1[i])
        if self.r_degenerate[i]:
            n2 = lab2 = elab = None
        else:
            n2 = int(self.r_node2[i])
            lab2 = self.node_label(n2)
            elab = self.edge_labels[self.r_elabel[i]]
        return TripleRow(
            n1, self.node_label(n1),
            tuple(float(v) for v in self.geom[i]),
            elab, n2, lab2,
        )

    def incident_rows(self, node_id: int) -> np.ndarray:
        """Rows mentioning the id as node1 or node2, degenerate rows excluded."""
        self._node_pos(node_id)  # raises NotFoundError for unknown ids
        nid = np.uint64(node_id)
        lo = int(np.searchsorted(self.r_node1, nid, side="left"))
        hi = int(np.searchsorted(self.r_node1, nid, side="right"))
        as_n1 = np.arange(lo, hi)[~self.r_degenerate[lo:hi]]
        perm = self._n2_perm
        n2_sorted = self.r_node2[perm]
        lo2 = int(np.searchsorted(n2_sorted, nid, side="left"))
        hi2 = int(np.searchsorted(n2_sorted, nid, side="right"))
        as_n2 = perm[lo2:hi2]
        return np.unique(np.concatenate([as_n1, as_n2]))

    def keyword_matches(self, keyword: str) -> list[tuple[int, str]]:
        """(node id, label) pairs whose label contains keyword, unsorted."""
        labels, id_lists = self._distinct_labels
        out = []
        for li in self._trie.find(keyword):
            for pos in id_lists[li]:
                out.append((int(self.node_ids[pos]), labels[li]))
        return out

    def bounds(self) -> Rect:
        if self.node_count == 0:
            return (0.0, 0.0, 0.0, 0.0)
        return (
            float(self.node_xy[:, 0].min()), float(self.node_xy[:, 1].min()),
            float(self.node_xy[:, 0].max()), float(self.node_xy[:, 1].max()),
        )

    def to_graph(self) -> Graph:
        e_mask = ~self.r_degenerate
        return Graph(
            self.node_ids,
            tuple(self.node_labels),
            self.r_node1[e_mask],
            self.r_node2[e_mask],
            tuple(self.edge_labels[i] for i in self.r_elabel[e_mask]),
            self.directed,
            _skip_checks=True,
        )


class Store:
    """Ordered layer tables plus the dataset manifest."""

    def __init__(self, layers: list[LayerTable], dataset: str = "dataset",
                 criterion: str | None = None, build_params: dict | None = None,
                 directed: bool = True):
        self.layers = list(layers)
        self.dataset = dataset
        self.criterion = criterion
        self.build_params = dict(build_params or {})
        self.directed = directed
        self._stats_cache: dict[int, GraphStats] = {}

    # -- access ------------------------------------------------------------

    @property
    def layer_count(self) -> int:
        return len(self.layers)

    def table(self, layer: int) -> LayerTable:
        if not isinstance(layer, (int, np.integer)) or layer < 0 or layer >= len(self.layers):
            raise NotFoundError(f"unknown layer {layer!r}")
        return self.layers[layer]

    def manifest(self) -> dict:
        return {
            "dataset": self.dataset,
            "format_version": FORMAT_VERSION,
            "directed": self.directed,
            "criterion": self.criterion,
            "layer_count": self.layer_count,
            "build_params": self.build_params,
            "layers": [
                {
                    "index": t.layer_index,
                    "bounds": list(t.bounds()),
                    "nodes": t.node_count,
                    "rows": t.row_count,
                    "edges": t.row_count - int(t.r_degenerate.sum()),
                }
                for t in self.layers
            ],
        }

    # -- the three online query kinds ---------------------------------------

    def window_query(self, layer: int, rect, label_filter=None) -> list[TripleRow]:
        """Rows whose geometry overlaps the closed rect, ascending (node1, node2)."""
        t = self.table(layer)
        return [t.row(int(i)) for i in t.window_indices(rect, label_filter)]

    def keyword_search(self, layer: int, keyword: str, limit: int = 100) -> list[tuple[int, str]]:
        """Nodes whose label contains the keyword, sorted by (label, id)."""
        if not keyword:
            raise ValueError("keyword must be non-empty")
        if limit < 0:
            raise ValueError("limit must be >= 0")
        hits = self.table(layer).keyword_matches(keyword)
        hits.sort(key=lambda h: (h[1], h[0]))
        return hits[:limit]

    def node_lookup(self, layer: int, node_id: int) -> NodeInfo:
        """Position, label, and incident edge rows of one node."""
        t = self.table(layer)
        pos = t.node_position(node_id)
        rows = tuple(t.row(int(i)) for i in t.incident_rows(node_id))
        return NodeInfo(int(node_id), t.node_label(node_id), pos, rows)

    def stats(self, layer: int) -> GraphStats:
        if layer not in self._stats_cache:
            self._stats_cache[layer] = graph_stats(self.table(layer).to_graph())
        return self._stats_cache[layer]

    # -- persistence ---------------------------------------------------------

    def save(self, path):
        buf = io.BytesIO()
        buf.write(MAGIC)
        buf.write(struct.pack("<H", FORMAT_VERSION))
        _w_bytes(buf, json.dumps(self.manifest(), sort_keys=True).encode("utf-8"))
        for t in self.layers:
            _w_u32(buf, t.layer_index)
            _w_u32(buf, 1 if t.directed else 0)
            _w_array(buf, t.node_ids)
            _w_array(buf, t.node_xy)
            _w_strlist(buf, t.node_labels)
            _w_array(buf, t.r_node1)
            _w_array(buf, t.r_node2)
            _w_array(buf, t.r_degenerate)
            _w_array(buf, t.geom)
            _w_array(buf, t.r_elabel)
            _w_strlist(buf, t.edge_labels)
            arrays = t.tree.to_arrays()
            _w_u32(buf, len(arrays))
            for name, arr in arrays.items():
                _w_str(buf, name)
                _w_array(buf, arr)
        payload = buf.getvalue()
        digest = hashlib.sha256(payload).digest()
        with open(path, "wb") as fh:
            fh.write(payload)
            fh.write(digest)

    @classmethod
    def load(cls, path) -> "Store":
        with open(path, "rb") as fh:
            blob = fh.read()
        if len(blob) < len(MAGIC) + 2 + 32:
            raise StoreLoadError("truncated store file")
        payload, digest = blob[:-32], blob[-32:]
        if hashlib.sha256(payload).digest() != digest:
            raise StoreLoadError("checksum mismatch: store file is corrupt")
        rd = _Reader(payload)
        if rd.take(len(MAGIC)) != MAGIC:
            raise StoreLoadError("not a graphatlas store file (bad magic)")
        (version,) = struct.unpack("<H", rd.take(2))
        if version != FORMAT_VERSION:
            raise StoreLoadError(f"unsupported format version {version}")
        manifest = json.loads(rd.bytes_().decode("utf-8"))
        layers = []
        for _ in range(manifest["layer_count"]):
            layer_index = rd.u32()
            directed = bool(rd.u32())
            node_ids = rd.array()
            node_xy = rd.array()
            node_labels = rd.strlist()
            r_node1 = rd.array()
            r_node2 = rd.array()
            r_degen = rd.array()
            geom = rd.array()
            r_elabel = rd.array()
            edge_labels = rd.strlist()
            n_arr = rd.u32()
            tree_arrays = {}
            for _a in range(n_arr):
                name = rd.str_()
                tree_arrays[name] = rd.array()
            tree = STRtree.from_arrays(tree_arrays)
            layers.append(LayerTable(
                layer_index, directed, node_ids, node_xy, node_labels,
                r_node1, r_node2, r_degen, geom, r_elabel, edge_labels, tree,
            ))
        if rd.remaining():
            raise StoreLoadError("trailing bytes after last layer")
        return cls(
            layers,
            dataset=manifest["dataset"],
            criterion=manifest.get("criterion"),
            build_params=manifest.get("build_params", {}),
            directed=manifest.get("directed", True),
        )


def build_store(layers: list[Layer], dataset: str = "dataset",
                criterion: str | None = None, build_params: dict | None = None) -> Store:
    """Materialize triple rows and indexes for every layer."""
    if not layers:
        raise StoreError("no layers to store")
    if criterion is None:
        criterion = next((l.provenance for l in layers if l.provenance), None)
    tables = [LayerTable.from_layer(layer) for layer in layers]
    return Store(tables, dataset=dataset, criterion=criterion,
                 build_params=build_params, directed=layers[0].graph.directed)


# -- module-level aliases matching the operation names ----------------------

def window_query(store: Store, layer: int, rect, label_filter=None):
    return store.window_query(layer, rect, label_filter)


def keyword_search(store: Store, layer: int, keyword: str, limit: int = 100):
    return store.keyword_search(layer, keyword, limit)


def node_lookup(store: Store, layer: int, node_id: int):
    return store.node_lookup(layer, node_id)


def save(store: Store, path):
    store.save(path)


def load(path) -> Store:
    return Store.load(path)


# -- binary encoding helpers (little-endian throughout) ----------------------

def _w_u32(buf, v: int):
    buf.write(struct.pack("<I", v))


def _w_bytes(buf, blob: bytes):
    buf.write(struct.pack("<Q", len(blob)))
    buf.write(blob)


def _w_str(buf, s: str):
    _w_bytes(buf, s.encode("utf-8"))


def _w_strlist(buf, items: list[str]):
    encoded = [s.encode("utf-8") for s in items]
    offsets = np.zeros(len(items) + 1, np.uint64)
    for i, b in enumerate(encoded):
        offsets[i + 1] = offsets[i] + len(b)
    _w_u32(buf, len(items))
    _w_array(buf, offsets)
    _w_bytes(buf, b"".join(encoded))


def _w_array(buf, arr: np.ndarray):
    arr = np.ascontiguousarray(arr)
    dt = arr.dtype.newbyteorder("<")
    arr = arr.astype(dt, copy=False)
    _w_str(buf, dt.str)
    _w_u32(buf, arr.ndim)
    for d in arr.shape:
        buf.write(struct.pack("<Q", d))
    _w_bytes(buf, arr.tobytes())


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.blob):
            raise StoreLoadError("truncated store file")
        out = self.blob[self.pos : self.pos + n]
        self.pos += n
        return out

    def remaining(self) -> int:
        return len(self.blob) - self.pos

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def bytes_(self) -> bytes:
        return self.take(self.u64())

    def str_(self) -> str:
        return self.bytes_().decode("utf-8")

    def strlist(self) -> list[str]:
        count = self.u32()
        offsets = self.array()
        blob = self.bytes_()
        if offsets.shape != (count + 1,) or (count and int(offsets[-1]) != len(blob)):
            raise StoreLoadError("corrupt string table")
        return [
            blob[int(offsets[i]) : int(offsets[i + 1])].decode("utf-8")
            for i in range(count)
        ]

    def array(self) -> np.ndarray:
        dtype = np.dtype(self.str_())
        ndim = self.u32()
        if ndim > 4:
            raise StoreLoadError("corrupt array header")
        shape = tuple(self.u64() for _ in range(ndim))
        n_items = 1
        for d in shape:
            n_items *= d
        raw = self.bytes_()
        if len(raw) != n_items * dtype.itemsize:
            raise StoreLoadError("corrupt array payload")
        return np.frombuffer(raw, dtype=dtype).reshape(shape).copy()
