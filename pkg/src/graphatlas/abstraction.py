"""Node ranking criteria and bottom-up abstraction layers.

Layer 0 is the input graph with its global layout; layer i > 0 keeps the
top-ranked nodes of layer i-1 (by degree, PageRank, or HITS authority),
their induced edges, and their exact layer i-1 coordinates. Coordinates
are never recomputed, so zooming across layers stays spatially stable.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EmptyLayerError
from .model import Graph

log = logging.getLogger(__name__)

DEGREE = "degree"
PAGERANK = "pagerank"
HITS_AUTHORITY = "hits_authority"
_KINDS = (DEGREE, PAGERANK, HITS_AUTHORITY)


class ScoreMap(dict):
    """Node id -> score, with a convergence flag for iterative criteria."""

    converged: bool = True


@dataclass(frozen=True)
class AbstractionCriterion:
    kind: str
    keep_fraction: float | None = None
    threshold: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown abstraction criterion {self.kind!r}")
        if self.keep_fraction is not None and self.threshold is not None:
            raise ConfigError("keep_fraction and threshold are mutually exclusive")
        if self.keep_fraction is None and self.threshold is None:
            object.__setattr__(self, "keep_fraction", 0.5)
        if self.keep_fraction is not None and not (0.0 < self.keep_fraction <= 1.0):
            raise ConfigError("keep_fraction must be in (0, 1]")

    def describe(self) -> str:
        if self.threshold is not None:
            return f"{self.kind} threshold={self.threshold:g}"
        return f"{self.kind} keep={self.keep_fraction:g}"


@dataclass(frozen=True)
class Layer:
    """One abstraction level: graph plus per-node coordinates (aligned arrays)."""

    index: int
    graph: Graph
    xy: np.ndarray                 # float64 (n, 2), aligned with graph.node_ids
    provenance: str | None = None  # criterion that produced this layer; None for layer 0

    def __post_init__(self):
        object.__setattr__(self, "xy", np.ascontiguousarray(self.xy, dtype=np.float64))
        if self.xy.shape[0] != self.graph.node_count:
            raise ValueError("layout misaligned with graph nodes")

    def position_of(self, node_id: int) -> tuple[float, float]:
        i = self.graph.index_of(node_id)
        return float(self.xy[i, 0]), float(self.xy[i, 1])


def layer_zero(g: Graph, node_ids: np.ndarray, xy: np.ndarray) -> Layer:
    """Build layer 0 from a global layout given as parallel (ids, xy) arrays."""
    order = np.argsort(node_ids, kind="stable")
    sorted_ids = node_ids[order]
    pos = np.searchsorted(sorted_ids, g.node_ids)
    ok = (pos < sorted_ids.shape[0]) & (sorted_ids[np.minimum(pos, len(sorted_ids) - 1)] == g.node_ids) if sorted_ids.shape[0] else np.zeros(g.node_count, np.bool_)
    if g.node_count and not np.asarray(ok).all():
        missing = g.node_ids[~np.asarray(ok)][0]
        raise KeyError(f"no position for node {int(missing)}")
    aligned = xy[order][pos] if g.node_count else np.zeros((0, 2))
    return Layer(0, g, aligned, None)


def _degree_array(g: Graph) -> np.ndarray:
    src, dst = g.edge_index
    deg = np.zeros(g.node_count, np.float64)
    if src.shape[0]:
        deg += np.bincount(src, minlength=g.node_count)
        deg += np.bincount(dst, minlength=g.node_count)
    return deg


def degree_scores(g: Graph) -> ScoreMap:
    """Undirected degree (in + out); a self-loop contributes 2."""
    out = ScoreMap(zip((int(n) for n in g.node_ids), _degree_array(g)))
    return out


def _pagerank_array(g: Graph, damping: float, eps: float, max_iter: int) -> tuple[np.ndarray, bool]:
    n = g.node_count
    src, dst = g.edge_index
    outdeg = np.bincount(src, minlength=n).astype(np.float64)
    dangling = outdeg == 0
    r = np.full(n, 1.0 / n)
    converged = False
    for _ in range(max_iter):
        contrib = np.divide(r, outdeg, out=np.zeros_like(r), where=~dangling)
        flow = np.bincount(dst, weights=contrib[src], minlength=n) if src.shape[0] else np.zeros(n)
        r_new = (1.0 - damping) / n + damping * (flow + r[dangling].sum() / n)
        delta = np.abs(r_new - r).sum()
        r = r_new
        if delta < eps:
            converged = True
            break
    return r, converged


def pagerank(g: Graph, damping: float = 0.85, eps: float = 1e-10, max_iter: int = 200) -> ScoreMap:
    """Power iteration with uniform teleport; dangling mass spread uniformly.

    Stops when the L1 change drops below eps; scores sum to 1.
    """
    if g.node_count == 0:
        raise ValueError("pagerank of an empty graph")
    scores, converged = _pagerank_array(g, damping, eps, max_iter)
    out = ScoreMap(zip((int(n) for n in g.node_ids), scores))
    out.converged = converged
    if not converged:
        log.warning("pagerank did not converge in %d iterations", max_iter)
    return out


def _hits_arrays(g: Graph, eps: float, max_iter: int) -> tuple[np.ndarray, np.ndarray, bool]:
    n = g.node_count
    src, dst = g.edge_index
    hubs = np.full(n, 1.0 / math.sqrt(n))
    auth = np.full(n, 1.0 / math.sqrt(n))
    if src.shape[0] == 0:
        log.warning("hits on a graph with no edges: returning uniform scores")
        return hubs, auth, True
    converged = False
    for _ in range(max_iter):
        a_new = np.bincount(dst, weights=hubs[src], minlength=n)
        norm = np.linalg.norm(a_new)
        a_new = a_new / norm if norm > 0 else np.full(n, 1.0 / math.sqrt(n))
        h_new = np.bincount(src, weights=a_new[dst], minlength=n)
        norm = np.linalg.norm(h_new)
        h_new = h_new / norm if norm > 0 else np.full(n, 1.0 / math.sqrt(n))
        delta = max(np.linalg.norm(a_new - auth), np.linalg.norm(h_new - hubs))
        hubs, auth = h_new, a_new
        if delta < eps:
            converged = True
            break
    if not converged:
        log.warning("hits did not converge in %d iterations", max_iter)
    return hubs, auth, converged


def hits(g: Graph, eps: float = 1e-10, max_iter: int = 200) -> tuple[ScoreMap, ScoreMap]:
    """Mutual-reinforcement hub/authority scores, L2-normalized each step."""
    if g.node_count == 0:
        raise ValueError("hits of an empty graph")
    h, a, converged = _hits_arrays(g, eps, max_iter)
    ids = [int(n) for n in g.node_ids]
    hm, am = ScoreMap(zip(ids, h)), ScoreMap(zip(ids, a))
    hm.converged = am.converged = converged
    return hm, am


def score_array(g: Graph, kind: str) -> np.ndarray:
    if kind == DEGREE:
        return _degree_array(g)
    if kind == PAGERANK:
        return _pagerank_array(g, 0.85, 1e-10, 200)[0]
    if kind == HITS_AUTHORITY:
        return _hits_arrays(g, 1e-10, 200)[1]
    raise ConfigError(f"unknown abstraction criterion {kind!r}")


def build_layer(prev: Layer, crit: AbstractionCriterion) -> Layer:
    """Filter the previous layer down to its top-ranked nodes.

    Survivors are the top ceil(keep_fraction * n) nodes by score (cutoff
    ties keep the lower node id) or all nodes with score >= threshold.
    Edges survive when both endpoints do; coordinates are sliced, never
    recomputed.
    """
    g = prev.graph
    n = g.node_count
    if n == 0:
        raise EmptyLayerError("previous layer has no nodes")
    scores = score_array(g, crit.kind)
    if crit.threshold is not None:
        kept_mask = scores >= crit.threshold
        if not kept_mask.any():
            raise EmptyLayerError(
                f"threshold {crit.threshold:g} leaves no nodes at layer {prev.index + 1}"
            )
    else:
        m = math.ceil(crit.keep_fraction * n)
        order = np.lexsort((g.node_ids, -scores))
        kept_mask = np.zeros(n, np.bool_)
        kept_mask[order[:m]] = True

    kept_pos = np.flatnonzero(kept_mask)
    src, dst = g.edge_index
    e_mask = kept_mask[src] & kept_mask[dst] if src.shape[0] else np.zeros(0, np.bool_)
    new_graph = Graph(
        g.node_ids[kept_pos],
        tuple(g.node_labels[i] for i in kept_pos),
        g.edge_src[e_mask],
        g.edge_dst[e_mask],
        tuple(lab for lab, keep in zip(g.edge_labels, e_mask) if keep),
        g.directed,
        _skip_checks=True,
    )
    return Layer(prev.index + 1, new_graph, prev.xy[kept_pos], crit.describe())


def build_hierarchy(layer0: Layer, crit: AbstractionCriterion, num_layers: int = 5) -> list[Layer]:
    """Layers 0..num_layers-1, stopping early if a layer would be empty."""
    if num_layers < 1:
        raise ConfigError("num_layers must be >= 1")
    layers = [layer0]
    for _ in range(num_layers - 1):
        if layers[-1].graph.node_count == 0:
            log.info("stopping at %d layers: previous layer is empty", len(layers))
            break
        try:
            layers.append(build_layer(layers[-1], crit))
        except EmptyLayerError as exc:
            log.info("stopping at %d layers: %s", len(layers), exc)
            break
    return layers
