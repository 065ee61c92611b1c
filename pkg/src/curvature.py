# src/curvature.py
"""
Discrete Ricci curvature of the directed multigraph.

Forman curvature of a connected pair (v_i, v_j) is ``2 - #in(v_i) - #out(v_j)``
with multiplicities counted. Ollivier curvature is ``1 - W1(mu_i, mu_j)``, where
mu_i spreads mass over the outer endpoints of edges entering v_i and mu_j over
the outer endpoints of edges leaving v_j, and the ground cost is the directed
hop count on the simple projection.
"""
import logging, time
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import ot
import pandas as pd
from scipy.optimize import linprog

from .graph import AnyGraph, BinSpec, Histogram, as_multigraph, degree_arrays, histogram, to_networkx
from .stats import CorrelationResult, correlation
from .logging_config import log_stage

logger = logging.getLogger("metnet.curvature")

MASS_TOL = 1e-12

EMPTY_IN = "empty_in"
EMPTY_OUT = "empty_out"
UNREACHABLE = "unreachable"
NOT_COMPUTED = "not_computed"


class UnreachableTransportError(ValueError):
    """Some mass has no finite-cost destination."""


@dataclass(frozen=True)
class EdgeCurvature:
    source: int
    target: int
    multiplicity: int
    forman: int
    ollivier: Optional[float] = None
    ollivier_flag: str = ""

    @property
    def ollivier_defined(self) -> bool:
        return self.ollivier is not None


@dataclass(frozen=True)
class TransportProblem:
    sources: Tuple[int, ...]
    source_mass: np.ndarray
    targets: Tuple[int, ...]
    target_mass: np.ndarray
    cost: np.ndarray             # len(sources) x len(targets), np.inf when unreachable

    def __post_init__(self):
        a, b, M = self.source_mass, self.target_mass, self.cost
        if M.shape != (len(a), len(b)) or len(a) != len(self.sources) or len(b) != len(self.targets):
            raise ValueError(f"cost shape {M.shape} does not match supports ({len(a)}, {len(b)})")
        if (a < 0).any() or (b < 0).any():
            raise ValueError("masses must be non-negative")
        if abs(a.sum() - 1.0) > MASS_TOL or abs(b.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"masses must sum to 1, got {a.sum()!r} and {b.sum()!r}")
        if (M < 0).any():
            raise ValueError("costs must be non-negative")


def forman_all(g: AnyGraph) -> List[EdgeCurvature]:
    mg = as_multigraph(g)
    indeg, outdeg = degree_arrays(mg)
    return [EdgeCurvature(u, v, w, int(2 - indeg[u] - outdeg[v]), None, NOT_COMPUTED)
            for (u, v), w in sorted(mg.edges.items())]


class HopCache:
    """Directed BFS hop counts on the simple projection, one BFS per source."""

    def __init__(self, g: AnyGraph):
        self._G = to_networkx(g)
        self._dist: Dict[int, Dict[int, int]] = {}

    def hops(self, u: int, v: int) -> float:
        if u not in self._dist:
            self._dist[u] = nx.single_source_shortest_path_length(self._G, u)
        return float(self._dist[u].get(v, np.inf))


def shortest_hops(g: AnyGraph, sources: Iterable[int], targets: Iterable[int],
                  cache: Optional[HopCache] = None) -> np.ndarray:
    """len(sources) x len(targets) hop counts; np.inf where unreachable."""
    cache = cache or HopCache(g)
    sources, targets = list(sources), list(targets)
    M = np.empty((len(sources), len(targets)))
    for a, u in enumerate(sources):
        for b, v in enumerate(targets):
            M[a, b] = cache.hops(u, v)
    return M


def w1(tp: TransportProblem) -> float:
    """
    Exact Wasserstein-1 optimum of the balanced transportation problem.

    Finite costs go to POT's network simplex. With unreachable cells the LP is
    solved over the finite cells only; infeasibility raises
    UnreachableTransportError.
    """
    a = np.ascontiguousarray(tp.source_mass, dtype=np.float64)
    b = np.ascontiguousarray(tp.target_mass, dtype=np.float64)
    M = np.ascontiguousarray(tp.cost, dtype=np.float64)
    finite = np.isfinite(M)
    if finite.all():
        return max(float(ot.emd2(a, b, M)), 0.0)
    return _w1_partial_support(a, b, M, finite)


def _w1_partial_support(a: np.ndarray, b: np.ndarray, M: np.ndarray, finite: np.ndarray) -> float:
    cells = np.argwhere(finite)
    if len(cells) == 0:
        raise UnreachableTransportError("no source atom reaches any target atom")
    n_a, n_b = M.shape
    A_eq = np.zeros((n_a + n_b, len(cells)))
    for k, (i, j) in enumerate(cells):
        A_eq[i, k] = 1.0
        A_eq[n_a + j, k] = 1.0
    b_eq = np.concatenate([a, b])
    c = np.array([M[i, j] for i, j in cells])
    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status == 2:
        raise UnreachableTransportError("mass must travel between unreachable atoms")
    if not res.success:
        raise RuntimeError(f"transport LP failed: {res.message}")
    return max(float(res.fun), 0.0)


def edge_measures(g: AnyGraph, u: int, v: int) -> Tuple[Dict[int, float], Dict[int, float]]:
    """(mu_u over in-neighbors of u, mu_v over out-neighbors of v), multiplicity weighted."""
    mg = as_multigraph(g)
    ins: Counter = Counter()
    outs: Counter = Counter()
    for (a, b), w in mg.edges.items():
        if b == u:
            ins[a] += w
        if a == v:
            outs[b] += w
    return _normalize(ins), _normalize(outs)


def _normalize(c: Counter) -> Dict[int, float]:
    total = sum(c.values())
    return {k: c[k] / total for k in sorted(c)} if total else {}


def transport_problem(mu: Dict[int, float], nu: Dict[int, float], cache: HopCache) -> TransportProblem:
    sources, targets = tuple(mu), tuple(nu)
    cost = np.array([[cache.hops(x, y) for y in targets] for x in sources])
    return TransportProblem(sources, np.array([mu[x] for x in sources]),
                            targets, np.array([nu[y] for y in targets]), cost)


def ollivier_all(g: AnyGraph) -> List[EdgeCurvature]:
    """Forman and Ollivier curvature of every connected ordered pair."""
    t0 = time.time()
    mg = as_multigraph(g)
    indeg, outdeg = degree_arrays(mg)
    in_adj: Dict[int, Counter] = {}
    out_adj: Dict[int, Counter] = {}
    for (a, b), w in mg.edges.items():
        in_adj.setdefault(b, Counter())[a] += w
        out_adj.setdefault(a, Counter())[b] += w
    cache = HopCache(mg)
    out = []
    for (u, v), w in sorted(mg.edges.items()):
        forman = int(2 - indeg[u] - outdeg[v])
        mu = _normalize(in_adj.get(u, Counter()))
        nu = _normalize(out_adj.get(v, Counter()))
        if not mu:
            out.append(EdgeCurvature(u, v, w, forman, None, EMPTY_IN))
            continue
        if not nu:
            out.append(EdgeCurvature(u, v, w, forman, None, EMPTY_OUT))
            continue
        try:
            value = 1.0 - w1(transport_problem(mu, nu, cache))
        except UnreachableTransportError:
            out.append(EdgeCurvature(u, v, w, forman, None, UNREACHABLE))
            continue
        out.append(EdgeCurvature(u, v, w, forman, value, ""))
    flags = Counter(r.ollivier_flag for r in out if r.ollivier is None)
    if flags:
        logger.info(f"Ollivier curvature undefined for {sum(flags.values())} pairs: {dict(sorted(flags.items()))}",
                    extra={"count": sum(flags.values())})
    log_stage(logger, "curvature", int((time.time() - t0) * 1000), n_vertices=mg.n, n_edges=mg.total_edges,
              count=len(out))
    return out


@dataclass
class CurvatureHistograms:
    forman: Histogram
    ollivier: Histogram
    undefined: Dict[str, int]
    joint: pd.DataFrame
    correlation: CorrelationResult

    @property
    def undefined_total(self) -> int:
        return sum(self.undefined.values())


def curvature_histograms(records: Sequence[EdgeCurvature], forman_bins: Optional[BinSpec] = None,
                         ollivier_bins: Optional[BinSpec] = None, method: str = "pearson") -> CurvatureHistograms:
    forman_bins = forman_bins or BinSpec(1.0)
    ollivier_bins = ollivier_bins or BinSpec(0.1)
    defined = [r for r in records if r.ollivier is not None]
    undefined = Counter(r.ollivier_flag for r in records if r.ollivier is None)
    joint = pd.DataFrame({
        "source": [r.source for r in defined],
        "target": [r.target for r in defined],
        "forman": [r.forman for r in defined],
        "ollivier": [r.ollivier for r in defined],
    })
    return CurvatureHistograms(
        histogram((r.forman for r in records), forman_bins),
        histogram((r.ollivier for r in defined), ollivier_bins),
        dict(sorted(undefined.items())),
        joint,
        correlation(joint["forman"], joint["ollivier"], method),
    )


def count_modes(hist: Histogram, smooth: int = 1) -> int:
    """
    Local maxima of the histogram after a moving-average of half-width
    ``smooth`` over contiguous bins; plateaus count once.
    """
    if not hist.counts:
        return 0
    width, start = hist.bins.width, hist.bins.start
    idx = {int(round((edge - start) / width)): c for edge, c in hist.counts.items()}
    lo, hi = min(idx), max(idx)
    dense = np.array([idx.get(k, 0) for k in range(lo, hi + 1)], dtype=float)
    if smooth > 0:
        kernel = np.ones(2 * smooth + 1) / (2 * smooth + 1)
        dense = np.convolve(np.pad(dense, smooth), kernel, mode="valid")
    runs = [dense[0]]
    for x in dense[1:]:
        if not np.isclose(x, runs[-1]):
            runs.append(x)
    modes = 0
    for k, x in enumerate(runs):
        left = runs[k - 1] if k > 0 else -np.inf
        right = runs[k + 1] if k + 1 < len(runs) else -np.inf
        if x > left and x > right:
            modes += 1
    return modes


def curvature_frame(records: Sequence[EdgeCurvature], names: Optional[List[str]] = None) -> pd.DataFrame:
    label = (lambda v: names[v]) if names else (lambda v: v)
    return pd.DataFrame({
        "source": [label(r.source) for r in records],
        "target": [label(r.target) for r in records],
        "multiplicity": [r.multiplicity for r in records],
        "forman": [r.forman for r in records],
        "ollivier": [r.ollivier for r in records],
        "ollivier_flag": [r.ollivier_flag for r in records],
    })
