"""Offline preprocessing: partition, lay out, arrange, abstract, index.

Runs the five-step pipeline over a parsed graph and reports wall-clock
seconds per step (labels match the classic preprocessing breakdown:
Step 1 partitioning ... Step 5 indexing & storage). Parsing happens
before Step 1 and is reported separately.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .abstraction import (
    DEGREE, HITS_AUTHORITY, PAGERANK, AbstractionCriterion, build_hierarchy, layer_zero,
)
from .arrange import arrange, crossing_edges
from .errors import PipelineError
from .layout import LayoutAlgorithm, layout_partition
from .model import Graph, parse_edge_list, parse_ntriples_subset
from .partition import PartitionConfig, aligned_parts, default_partition_count, partition
from .store import Store, build_store

log = logging.getLogger(__name__)

STEP_NAMES = {
    "Step 1": "partitioning",
    "Step 2": "layout",
    "Step 3": "partition organizing",
    "Step 4": "abstraction layers",
    "Step 5": "indexing & storage",
}

CRITERION_ALIASES = {"degree": DEGREE, "pagerank": PAGERANK, "hits": HITS_AUTHORITY,
                     "hits_authority": HITS_AUTHORITY}
LAYOUT_ALIASES = {"force": "force_directed", "force_directed": "force_directed",
                  "circular": "circular", "grid": "grid"}


@dataclass
class PreprocessReport:
    steps: dict[str, float] = field(default_factory=dict)   # "Step 1".."Step 5" -> seconds
    total_seconds: float = 0.0       # wall clock across the five steps
    parse_seconds: float = 0.0
    node_count: int = 0
    edge_count: int = 0
    partitions: int = 0
    layer_sizes: list[int] = field(default_factory=list)
    store_path: str | None = None

    def to_dict(self) -> dict:
        return {
            "steps": {k: round(v, 6) for k, v in self.steps.items()},
            "step_names": STEP_NAMES,
            "total_seconds": round(self.total_seconds, 6),
            "parse_seconds": round(self.parse_seconds, 6),
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "partitions": self.partitions,
            "layer_sizes": self.layer_sizes,
            "store_path": self.store_path,
        }

    def format_table(self) -> str:
        lines = [f"{'step':28s}{'seconds':>10s}"]
        for key in sorted(self.steps):
            lines.append(f"{key + ' (' + STEP_NAMES[key] + ')':28s}{self.steps[key]:>10.2f}")
        lines.append(f"{'total':28s}{self.total_seconds:>10.2f}")
        return "\n".join(lines)


@contextmanager
def _stage(report: "PreprocessReport", name: str):
    t0 = time.perf_counter()
    try:
        yield
    except Exception as exc:
        report.steps[name] = time.perf_counter() - t0
        if isinstance(exc, PipelineError):
            raise
        raise PipelineError(f"{name} ({STEP_NAMES[name]}) failed: {exc}") from exc
    report.steps[name] = time.perf_counter() - t0


def preprocess_graph(
    g: Graph,
    partitions: int | None = None,
    seed: int = 0,
    balance: float = 1.1,
    layout: str = "force_directed",
    iterations: int = 300,
    edge_length: float = 60.0,
    gap: float = 40.0,
    criterion: str = "degree",
    layers: int = 5,
    keep_fraction: float | None = None,
    threshold: float | None = None,
    dataset: str = "dataset",
    output=None,
) -> tuple[Store, PreprocessReport]:
    """Run Steps 1-5 on an already-parsed graph."""
    report = PreprocessReport(node_count=g.node_count, edge_count=g.edge_count)
    if g.node_count == 0:
        raise PipelineError("Step 1 (partitioning) failed: input graph is empty")
    k = partitions if partitions is not None else min(default_partition_count(g.edge_count), g.node_count)
    report.partitions = k
    crit_kind = CRITERION_ALIASES.get(criterion)
    if crit_kind is None:
        raise PipelineError(f"Step 4 ({STEP_NAMES['Step 4']}) failed: unknown criterion {criterion!r}")
    if keep_fraction is None and threshold is None:
        keep_fraction = 0.5
    crit = AbstractionCriterion(crit_kind, keep_fraction=keep_fraction, threshold=threshold)
    alg = LayoutAlgorithm(LAYOUT_ALIASES.get(layout, layout), iterations, edge_length)

    t_start = time.perf_counter()
    with _stage(report, "Step 1"):
        asg = partition(g, PartitionConfig(k=k, balance_tolerance=balance, seed=seed))
        log.info("Step 1: %d partitions, cut=%d", k, asg.cut_edges)

    with _stage(report, "Step 2"):
        parts = aligned_parts(g, asg)
        src, dst = g.edge_index
        internal = parts[src] == parts[dst] if src.shape[0] else np.zeros(0, np.bool_)
        subs = []
        for p in range(k):
            np_pos = np.flatnonzero(parts == p)
            e_sel = np.flatnonzero(internal & (parts[src] == p)) if src.shape[0] else np.zeros(0, np.int64)
            subs.append(Graph(
                g.node_ids[np_pos],
                tuple(g.node_labels[i] for i in np_pos),
                g.edge_src[e_sel],
                g.edge_dst[e_sel],
                tuple(g.edge_labels[int(e)] for e in e_sel),
                g.directed,
                _skip_checks=True,
            ))
        workers = min(k, os.cpu_count() or 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            layouts = list(pool.map(
                lambda pi: layout_partition(subs[pi], alg, seed=seed + pi), range(k)
            ))
        log.info("Step 2: laid out %d partitions (%s)", k, alg.kind)

    with _stage(report, "Step 3"):
        crossings = crossing_edges(g, asg)
        global_layout = arrange(layouts, crossings, gap=gap)
        log.info("Step 3: arranged %d boxes, %d crossing edges", k, len(crossings))

    with _stage(report, "Step 4"):
        layer0 = layer_zero(g, global_layout.node_ids, global_layout.xy)
        hierarchy = build_hierarchy(layer0, crit, num_layers=layers)
        report.layer_sizes = [layer.graph.node_count for layer in hierarchy]
        log.info("Step 4: %d layers, sizes %s", len(hierarchy), report.layer_sizes)

    with _stage(report, "Step 5"):
        store = build_store(
            hierarchy,
            dataset=dataset,
            criterion=crit.describe(),
            build_params={
                "partitions": k, "seed": seed, "balance": balance,
                "layout": alg.kind, "iterations": iterations,
                "edge_length": edge_length, "gap": gap,
                "criterion": crit.describe(), "layers": layers,
            },
        )
        if output is not None:
            store.save(output)
            report.store_path = str(output)
        log.info("Step 5: indexed %d layers", store.layer_count)

    report.total_seconds = time.perf_counter() - t_start
    return store, report


def preprocess(input_path, fmt: str = "edgelist", **kwargs) -> tuple[Store, PreprocessReport]:
    """Parse the input file, then run preprocess_graph. fmt: edgelist | ntriples."""
    t0 = time.perf_counter()
    try:
        with open(input_path, "r", encoding="utf-8") as fh:
            text = fh.read()
        if fmt == "edgelist":
            g = parse_edge_list(text)
        elif fmt == "ntriples":
            g = parse_ntriples_subset(text)
        else:
            raise ValueError(f"unknown input format {fmt!r}")
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(f"parsing failed: {exc}") from exc
    parse_seconds = time.perf_counter() - t0
    kwargs.setdefault("dataset", os.path.splitext(os.path.basename(str(input_path)))[0])
    store, report = preprocess_graph(g, **kwargs)
    report.parse_seconds = parse_seconds
    return store, report
