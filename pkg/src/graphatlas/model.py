"""Directed labeled multigraph: construction, text ingestion, statistics.

Graphs are immutable after construction and safe to share across threads.
Node ids are unsigned 64-bit integers; labels are arbitrary Unicode text.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ParseError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GraphStats:
    node_count: int
    edge_count: int
    avg_degree: float
    density: float


@dataclass(frozen=True)
class Graph:
    """Directed labeled multigraph. Parallel edges and self-loops allowed.

    `node_ids` keeps first-appearance order; `node_labels` is aligned with
    it. Edges reference node ids (not positions) and keep input order.
    """

    node_ids: np.ndarray            # uint64
    node_labels: tuple[str, ...]
    edge_src: np.ndarray            # uint64
    edge_dst: np.ndarray            # uint64
    edge_labels: tuple[str, ...]
    directed: bool = True
    _skip_checks: bool = field(default=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "node_ids", np.ascontiguousarray(self.node_ids, dtype=np.uint64))
        object.__setattr__(self, "edge_src", np.ascontiguousarray(self.edge_src, dtype=np.uint64))
        object.__setattr__(self, "edge_dst", np.ascontiguousarray(self.edge_dst, dtype=np.uint64))
        for arr in (self.node_ids, self.edge_src, self.edge_dst):
            arr.flags.writeable = False
        if not self._skip_checks:
            self._validate()

    def _validate(self):
        if len(self.node_labels) != self.node_ids.shape[0]:
            raise ValueError("node_labels misaligned with node_ids")
        if self.edge_src.shape[0] != self.edge_dst.shape[0] or self.edge_src.shape[0] != len(self.edge_labels):
            raise ValueError("edge arrays misaligned")
        if np.unique(self.node_ids).shape[0] != self.node_ids.shape[0]:
            raise ValueError("duplicate node ids")
        for arr in (self.edge_src, self.edge_dst):
            if arr.shape[0] and not np.isin(arr, self.node_ids).all():
                missing = arr[~np.isin(arr, self.node_ids)][0]
                raise ValueError(f"edge endpoint {int(missing)} not in node set")

    @property
    def node_count(self) -> int:
        return int(self.node_ids.shape[0])

    @property
    def edge_count(self) -> int:
        return int(self.edge_src.shape[0])

    @cached_property
    def _sorted_ids(self) -> tuple[np.ndarray, np.ndarray]:
        order = np.argsort(self.node_ids, kind="stable")
        return self.node_ids[order], order

    def index_of(self, ids: np.ndarray | int) -> np.ndarray | int:
        """Positions of node ids in `node_ids` (KeyError if absent)."""
        scalar = np.isscalar(ids) or isinstance(ids, int)
        arr = np.atleast_1d(np.asarray(ids, dtype=np.uint64))
        sids, order = self._sorted_ids
        if sids.shape[0] == 0:
            if arr.shape[0]:
                raise KeyError(f"node id {int(arr[0])} not in graph")
            return np.zeros(0, np.int64)
        pos = np.searchsorted(sids, arr)
        bad = (pos >= sids.shape[0]) | (sids[np.minimum(pos, sids.shape[0] - 1)] != arr)
        if bad.any():
            raise KeyError(f"node id {int(arr[bad][0])} not in graph")
        out = order[pos]
        return int(out[0]) if scalar else out

    def has_node(self, node_id: int) -> bool:
        sids, _ = self._sorted_ids
        pos = int(np.searchsorted(sids, np.uint64(node_id)))
        return pos < sids.shape[0] and sids[pos] == np.uint64(node_id)

    def label_of(self, node_id: int) -> str:
        return self.node_labels[self.index_of(node_id)]

    @cached_property
    def edge_index(self) -> tuple[np.ndarray, np.ndarray]:
        """Edges as int64 positions into the node arrays."""
        if self.edge_count == 0:
            z = np.zeros(0, np.int64)
            return z, z.copy()
        return (
            np.asarray(self.index_of(self.edge_src), dtype=np.int64),
            np.asarray(self.index_of(self.edge_dst), dtype=np.int64),
        )


def _empty_graph(directed: bool = True) -> Graph:
    z = np.zeros(0, np.uint64)
    return Graph(z, (), z.copy(), z.copy(), (), directed)


def graph_from_triples(triples, directed: bool = True) -> Graph:
    """Build a Graph from (src_id, src_label, edge_label, dst_id, dst_label)
    tuples. First-seen node label wins; later conflicts are logged."""
    labels: dict[int, str] = {}
    order: list[int] = []
    src, dst, elabels = [], [], []
    for s_id, s_lab, e_lab, d_id, d_lab in triples:
        for nid, lab in ((s_id, s_lab), (d_id, d_lab)):
            if nid not in labels:
                labels[nid] = lab
                order.append(nid)
            elif labels[nid] != lab:
                log.warning("node %d label conflict: keeping %r, ignoring %r", nid, labels[nid], lab)
        src.append(s_id)
        dst.append(d_id)
        elabels.append(e_lab)
    return Graph(
        np.array(order, np.uint64),
        tuple(labels[n] for n in order),
        np.array(src, np.uint64),
        np.array(dst, np.uint64),
        tuple(elabels),
        directed,
    )


def parse_edge_list(text: str) -> Graph:
    """Parse TSV lines `src_id<TAB>src_label<TAB>edge_label<TAB>dst_id<TAB>dst_label`.

    Lines starting with `#` and blank lines are ignored. Malformed lines
    raise ParseError with the 1-based line number.
    """
    triples = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw[:-1] if raw.endswith("\r") else raw
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise ParseError(lineno, f"expected 5 tab-separated fields, got {len(fields)}")
        try:
            s_id = int(fields[0])
            d_id = int(fields[3])
        except ValueError as exc:
            raise ParseError(lineno, f"non-integer node id: {exc}") from None
        if s_id < 0 or d_id < 0:
            raise ParseError(lineno, "node ids must be non-negative")
        triples.append((s_id, fields[1], fields[2], d_id, fields[4]))
    if not triples:
        return _empty_graph()
    return graph_from_triples(triples)


def serialize_edge_list(g: Graph) -> str:
    """Inverse of parse_edge_list for labels free of tabs/newlines."""
    src_i, dst_i = g.edge_index
    lines = []
    for e in range(g.edge_count):
        si, di = int(src_i[e]), int(dst_i[e])
        lines.append(
            f"{int(g.edge_src[e])}\t{g.node_labels[si]}\t{g.edge_labels[e]}"
            f"\t{int(g.edge_dst[e])}\t{g.node_labels[di]}"
        )
    # isolated nodes cannot be expressed as edge lines; emit self-descriptive comments
    deg = np.zeros(g.node_count, np.int64)
    if g.edge_count:
        deg += np.bincount(src_i, minlength=g.node_count)
        deg += np.bincount(dst_i, minlength=g.node_count)
    for i in np.flatnonzero(deg == 0):
        lines.append(f"# isolated\t{int(g.node_ids[i])}\t{g.node_labels[i]}")
    return "\n".join(lines) + ("\n" if lines else "")


def _scan_term(line: str, pos: int, lineno: int) -> tuple[str, str, int]:
    """Read one N-Triples term at `pos`; returns (kind, text, next_pos)."""
    n = len(line)
    while pos < n and line[pos] in " \t":
        pos += 1
    if pos >= n:
        raise ParseError(lineno, "unexpected end of line")
    ch = line[pos]
    if ch == "<":
        end = line.find(">", pos + 1)
        if end == -1:
            raise ParseError(lineno, "unterminated IRI")
        return "iri", line[pos + 1 : end], end + 1
    if ch == '"':
        out = []
        i = pos + 1
        while i < n:
            c = line[i]
            if c == "\\":
                if i + 1 >= n:
                    raise ParseError(lineno, "dangling escape in literal")
                esc = line[i + 1]
                out.append({"n": "\n", "t": "\t", "r": "\r"}.get(esc, esc))
                i += 2
                continue
            if c == '"':
                i += 1
                # tolerated, non-semantic suffixes: @lang or ^^<datatype>
                if i < n and line[i] == "@":
                    while i < n and line[i] not in " \t":
                        i += 1
                elif line.startswith("^^<", i):
                    end = line.find(">", i + 3)
                    if end == -1:
                        raise ParseError(lineno, "unterminated datatype IRI")
                    i = end + 1
                return "literal", "".join(out), i
            out.append(c)
            i += 1
        raise ParseError(lineno, "unterminated literal")
    if ch == ".":
        return "dot", ".", pos + 1
    raise ParseError(lineno, f"unexpected character {ch!r}")


def parse_ntriples_subset(text: str) -> Graph:
    """Parse `<s> <p> <o> .` lines; objects may be quoted literals.

    Terms become nodes keyed by (kind, text) and are assigned fresh ids in
    first-appearance order starting at 0; the predicate IRI text becomes
    the edge label. Duplicate triples yield parallel edges.
    """
    key_to_id: dict[tuple[str, str], int] = {}
    labels: list[str] = []
    src, dst, elabels = [], [], []

    def intern(kind: str, text_: str) -> int:
        key = (kind, text_)
        if key not in key_to_id:
            key_to_id[key] = len(labels)
            labels.append(text_)
        return key_to_id[key]

    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        s_kind, s_text, pos = _scan_term(line, 0, lineno)
        if s_kind != "iri":
            raise ParseError(lineno, "subject must be an IRI")
        p_kind, p_text, pos = _scan_term(line, pos, lineno)
        if p_kind != "iri":
            raise ParseError(lineno, "predicate must be an IRI")
        o_kind, o_text, pos = _scan_term(line, pos, lineno)
        if o_kind == "dot":
            raise ParseError(lineno, "missing object term")
        d_kind, _, pos = _scan_term(line, pos, lineno)
        if d_kind != "dot":
            raise ParseError(lineno, "missing trailing dot")
        if line[pos:].strip():
            raise ParseError(lineno, "trailing characters after dot")
        src.append(intern(s_kind, s_text))
        dst.append(intern(o_kind, o_text))
        elabels.append(p_text)

    if not labels and not src:
        return _empty_graph()
    return Graph(
        np.arange(len(labels), dtype=np.uint64),
        tuple(labels),
        np.array(src, np.uint64),
        np.array(dst, np.uint64),
        tuple(elabels),
    )


def graph_stats(g: Graph) -> GraphStats:
    """Node/edge counts, undirected average degree, directed density.

    Density is non-loop edges over n*(n-1); the raw ratio is reported, so
    parallel edges can push it past 1.
    """
    n = g.node_count
    m = g.edge_count
    if n == 0:
        return GraphStats(0, 0, 0.0, 0.0)
    avg_degree = 2.0 * m / n
    if n == 1:
        density = 0.0
    else:
        non_loop = int((g.edge_src != g.edge_dst).sum())
        density = non_loop / (n * (n - 1))
    return GraphStats(n, m, avg_degree, density)
