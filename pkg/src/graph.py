# src/graph.py
"""
Directed graph and directed multigraph views of the category network.
"""
import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

import networkx as nx
import numpy as np
import pandas as pd

from .ingest import MetaphorRecord, CategorySizeTable

Pair = Tuple[int, int]


@dataclass(frozen=True)
class DirectedMultigraph:
    """Vertices 0..n-1; ``edges`` maps an ordered pair to its multiplicity."""
    n: int
    edges: Mapping[Pair, int]
    words: Optional[Mapping[Pair, Tuple[str, ...]]] = None

    def __post_init__(self):
        for (u, v), w in self.edges.items():
            if u == v:
                raise ValueError(f"self-pair ({u},{v}) in multigraph")
            if w < 1:
                raise ValueError(f"multiplicity of ({u},{v}) must be >= 1, got {w}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"pair ({u},{v}) outside 0..{self.n - 1}")

    @property
    def total_edges(self) -> int:
        return sum(self.edges.values())

    def edge_list(self) -> List[Pair]:
        """Every parallel edge listed once, pairs in sorted order."""
        out = []
        for pair in sorted(self.edges):
            out.extend([pair] * self.edges[pair])
        return out


@dataclass(frozen=True)
class DirectedGraph:
    n: int
    edges: FrozenSet[Pair]

    def __post_init__(self):
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-pair ({u},{v}) in graph")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"pair ({u},{v}) outside 0..{self.n - 1}")

    @property
    def total_edges(self) -> int:
        return len(self.edges)

    def edge_list(self) -> List[Pair]:
        return sorted(self.edges)


AnyGraph = Union[DirectedGraph, DirectedMultigraph]


@dataclass(frozen=True)
class DegreeRecord:
    category: int
    in_degree: int
    out_degree: int
    size: int
    in_density: float
    out_density: float


@dataclass(frozen=True)
class BinSpec:
    width: float = 1.0
    start: float = 0.0

    def __post_init__(self):
        if not (self.width > 0 and math.isfinite(self.width)):
            raise ValueError(f"bin width must be positive, got {self.width}")

    def left_edge(self, x: float) -> float:
        k = math.floor((x - self.start) / self.width)
        return self.start + k * self.width


@dataclass(frozen=True)
class Histogram:
    """Occupied bins only, keyed by left edge."""
    counts: Mapping[float, int]
    bins: BinSpec

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_frame(self) -> pd.DataFrame:
        keys = sorted(self.counts)
        return pd.DataFrame({"bin": keys, "count": [self.counts[k] for k in keys]})


def histogram(values: Iterable[float], bins: BinSpec) -> Histogram:
    counts = Counter(bins.left_edge(x) for x in values)
    return Histogram(dict(sorted(counts.items())), bins)


def build_multigraph(records: List[MetaphorRecord], n: Optional[int] = None) -> DirectedMultigraph:
    """
    One parallel edge per record. ``n`` defaults to one past the largest
    category id seen; pass the category count to keep edge-free categories.
    """
    mult: Counter = Counter()
    words: Dict[Pair, List[str]] = {}
    for r in records:
        pair = (r.source, r.target)
        mult[pair] += 1
        words.setdefault(pair, []).append(r.word)
    if n is None:
        n = 1 + max((max(p) for p in mult), default=-1)
    return DirectedMultigraph(n, dict(sorted(mult.items())),
                              {p: tuple(ws) for p, ws in sorted(words.items())})


def multigraph_from_pairs(n: int, pairs: Iterable[Pair]) -> DirectedMultigraph:
    return DirectedMultigraph(n, dict(sorted(Counter(pairs).items())))


def project_simple(g: AnyGraph) -> DirectedGraph:
    if isinstance(g, DirectedGraph):
        return g
    return DirectedGraph(g.n, frozenset(g.edges))


def as_multigraph(g: AnyGraph) -> DirectedMultigraph:
    if isinstance(g, DirectedMultigraph):
        return g
    return DirectedMultigraph(g.n, {p: 1 for p in sorted(g.edges)})


def degree_arrays(g: AnyGraph) -> Tuple[np.ndarray, np.ndarray]:
    """(in_degree, out_degree) integer arrays; multigraphs count multiplicity."""
    indeg = np.zeros(g.n, dtype=np.int64)
    outdeg = np.zeros(g.n, dtype=np.int64)
    if isinstance(g, DirectedMultigraph):
        items = g.edges.items()
    else:
        items = ((p, 1) for p in g.edges)
    for (u, v), w in items:
        outdeg[u] += w
        indeg[v] += w
    return indeg, outdeg


def degrees(g: AnyGraph, sizes: CategorySizeTable) -> List[DegreeRecord]:
    missing = [v for v in range(g.n) if v not in sizes]
    if missing:
        raise KeyError(f"no category size for vertices {missing}")
    indeg, outdeg = degree_arrays(g)
    out = []
    for v in range(g.n):
        s = sizes[v]
        out.append(DegreeRecord(v, int(indeg[v]), int(outdeg[v]), s,
                                indeg[v] / s, outdeg[v] / s))
    return out


def degree_histogram(records: List[DegreeRecord], which: str = "out",
                     mode: str = "count", bins: Optional[BinSpec] = None) -> Histogram:
    if which not in ("in", "out"):
        raise ValueError(f"which must be 'in' or 'out', got {which!r}")
    if mode not in ("count", "density"):
        raise ValueError(f"mode must be 'count' or 'density', got {mode!r}")
    attr = f"{which}_{'degree' if mode == 'count' else 'density'}"
    return histogram((getattr(r, attr) for r in records), bins or BinSpec())


def degrees_frame(records: List[DegreeRecord], names: Optional[List[str]] = None) -> pd.DataFrame:
    return pd.DataFrame({
        "category": [names[r.category] if names else r.category for r in records],
        "in": [r.in_degree for r in records],
        "out": [r.out_degree for r in records],
        "size": [r.size for r in records],
        "in_density": [r.in_density for r in records],
        "out_density": [r.out_density for r in records],
    })


def to_networkx(g: AnyGraph) -> nx.DiGraph:
    """Simple projection as a DiGraph holding every vertex, edge-free ones included."""
    G = nx.DiGraph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(sorted(project_simple(g).edges))
    return G
