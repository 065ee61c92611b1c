# src/null_models.py
"""
Random graph null models and seeded ensembles.

Replicate ``i`` of an ensemble with master seed ``s`` draws from
``numpy.random.default_rng([s, i])``, so every replicate is reproducible on
its own and results do not depend on how replicates are scheduled.
"""
import logging, time
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from .graph import (AnyGraph, DirectedGraph, DirectedMultigraph, Pair,
                    as_multigraph, multigraph_from_pairs, project_simple)
from .logging_config import log_stage

logger = logging.getLogger("metnet.null_models")

MODELS = ("er", "config-simple", "config-multi")

SeedLike = Union[int, Sequence[int], np.random.Generator]
MetricValue = Union[float, Mapping[Hashable, float]]
MetricFn = Callable[[AnyGraph], MetricValue]


class EnsembleError(RuntimeError):
    """A metric failed on one replicate."""

    def __init__(self, replicate: int, cause: str):
        super().__init__(replicate, cause)
        self.replicate = replicate
        self.cause = cause

    def __str__(self):
        return f"metric failed on replicate {self.replicate}: {self.cause}"


@dataclass(frozen=True)
class SwapConfig:
    k: Optional[int] = None      # attempted swaps; None means swaps_per_edge * N
    simple: bool = True
    seed: int = 0
    swaps_per_edge: int = 10

    def __post_init__(self):
        if self.k is not None and self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")

    def attempts(self, n_edges: int) -> int:
        return self.k if self.k is not None else self.swaps_per_edge * n_edges


@dataclass
class EnsembleStats:
    metric: str
    model: str
    replicates: int
    seed: int
    k: Optional[int]
    domain: List[Hashable]
    mean: np.ndarray
    std: np.ndarray
    samples: np.ndarray          # replicates x len(domain)
    ddof: int = 0

    def as_mapping(self) -> Dict[Hashable, Tuple[float, float]]:
        return {d: (float(m), float(s)) for d, m, s in zip(self.domain, self.mean, self.std)}

    def mean_of(self, key: Hashable) -> float:
        return self.as_mapping().get(key, (0.0, 0.0))[0]

    def std_of(self, key: Hashable) -> float:
        return self.as_mapping().get(key, (0.0, 0.0))[1]

    def rebin(self, key_fn: Callable[[Hashable], Hashable], metric: Optional[str] = None) -> "EnsembleStats":
        """Sum domain columns that share ``key_fn(key)``, then re-aggregate per replicate."""
        new_domain = sorted({key_fn(d) for d in self.domain})
        index = {d: i for i, d in enumerate(new_domain)}
        samples = np.zeros((self.samples.shape[0], len(new_domain)))
        for j, d in enumerate(self.domain):
            samples[:, index[key_fn(d)]] += self.samples[:, j]
        return replace(self, metric=metric or f"{self.metric}:rebinned", domain=new_domain,
                       mean=samples.mean(axis=0), std=samples.std(axis=0, ddof=self.ddof),
                       samples=samples)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "metric": self.metric, "model": self.model, "R": self.replicates,
            "seed": self.seed, "k": self.k, "ddof": self.ddof,
            "domain": [_jsonable(d) for d in self.domain],
            "mean": [float(x) for x in self.mean],
            "std": [float(x) for x in self.std],
        }


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, tuple):
        return list(x)
    return x


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def _decode_pair(idx: int, n: int) -> Pair:
    u, r = divmod(idx, n - 1)
    return (u, r if r < u else r + 1)


def sample_er(n: int, N: int, seed: SeedLike = 0) -> DirectedGraph:
    """
    Uniform directed graph with exactly N non-loop edges on n vertices.

    Distinct pair indices are drawn by rejection from the n(n-1) pair space;
    above half density the complement is drawn instead.
    """
    space = n * (n - 1)
    if not (0 <= N <= space):
        raise ValueError(f"N must lie in [0, {space}] for n={n}, got {N}")
    rng = _rng(seed)
    complement = N > space // 2
    want = space - N if complement else N
    chosen: set = set()
    while len(chosen) < want:
        batch = rng.integers(0, space, size=max(16, 2 * (want - len(chosen))))
        for idx in batch.tolist():
            if idx not in chosen:
                chosen.add(idx)
                if len(chosen) == want:
                    break
    indices = set(range(space)) - chosen if complement else chosen
    return DirectedGraph(n, frozenset(_decode_pair(i, n) for i in indices))


def swap_edges(edges: List[Pair], attempts, simple: bool) -> int:
    """
    Apply swap attempts in place: (a,b),(c,d) -> (a,d),(c,b).

    ``attempts`` yields index pairs into ``edges``. Attempts that would make a
    self-loop, or in simple mode a parallel edge, are rejected but still
    consumed. Returns the number of accepted swaps.
    """
    present = set(edges) if simple else None
    if simple and len(present) != len(edges):
        raise ValueError("simple swap mode needs an edge list without parallel edges")
    accepted = 0
    for i, j in attempts:
        if i == j:
            continue
        a, b = edges[i]
        c, d = edges[j]
        if a == d or c == b:
            continue
        if simple:
            if (a, d) in present or (c, b) in present:
                continue
            present.discard((a, b))
            present.discard((c, d))
            present.add((a, d))
            present.add((c, b))
        edges[i] = (a, d)
        edges[j] = (c, b)
        accepted += 1
    return accepted


def swap_randomize(g: AnyGraph, cfg: SwapConfig, rng: Optional[np.random.Generator] = None) -> AnyGraph:
    """
    Degree-preserving randomization by edge swaps.

    ``cfg.simple`` returns a DirectedGraph and rejects swaps creating parallel
    edges; otherwise a DirectedMultigraph is returned. Self-loops are never
    created. ``rng`` overrides ``cfg.seed``.
    """
    if cfg.simple:
        if isinstance(g, DirectedMultigraph) and any(w > 1 for w in g.edges.values()):
            raise ValueError("simple swap mode on a multigraph with parallel edges")
        edges = project_simple(g).edge_list()
    else:
        edges = as_multigraph(g).edge_list()

    k = cfg.attempts(len(edges))
    if k > 0 and len(edges) >= 2:
        gen = rng if rng is not None else _rng(cfg.seed)
        attempts = gen.integers(0, len(edges), size=(k, 2)).tolist()
        accepted = swap_edges(edges, attempts, cfg.simple)
        logger.debug(f"{accepted}/{k} swaps accepted", extra={"count": accepted})

    if cfg.simple:
        return DirectedGraph(g.n, frozenset(edges))
    return multigraph_from_pairs(g.n, edges)


def sample_null(template: AnyGraph, model: str, rng: np.random.Generator,
                k: Optional[int] = None, swaps_per_edge: int = 10) -> AnyGraph:
    """One draw from a null model matched to ``template``."""
    if model == "er":
        sg = project_simple(template)
        return sample_er(sg.n, len(sg.edges), rng)
    if model == "config-simple":
        return swap_randomize(project_simple(template),
                              SwapConfig(k=k, simple=True, swaps_per_edge=swaps_per_edge), rng=rng)
    if model == "config-multi":
        return swap_randomize(as_multigraph(template),
                              SwapConfig(k=k, simple=False, swaps_per_edge=swaps_per_edge), rng=rng)
    raise ValueError(f"unknown null model {model!r}; expected one of {MODELS}")


def _replicate(template, model, index, seed, k, swaps_per_edge, metric):
    g = sample_null(template, model, replicate_rng(seed, index), k, swaps_per_edge)
    try:
        return metric(g)
    except Exception as e:
        raise EnsembleError(index, f"{type(e).__name__}: {e}") from e


def run_ensemble(template: AnyGraph, model: str, R: int, metric: MetricFn, seed: int = 0,
                 k: Optional[int] = None, swaps_per_edge: int = 10, ddof: int = 0,
                 n_jobs: int = 1, metric_name: Optional[str] = None,
                 progress: bool = False) -> EnsembleStats:
    """
    Mean and std of ``metric`` over R null-model replicates.

    Metrics return a number or a mapping (e.g. a histogram); mapping domains
    are unioned across replicates with missing keys counted as 0.
    """
    if R < 1:
        raise ValueError(f"R must be >= 1, got {R}")
    if model not in MODELS:
        raise ValueError(f"unknown null model {model!r}; expected one of {MODELS}")
    t0 = time.time()
    indices = tqdm(range(R), disable=not progress, desc=f"{model} ensemble")
    values = Parallel(n_jobs=n_jobs)(
        delayed(_replicate)(template, model, i, seed, k, swaps_per_edge, metric) for i in indices
    )

    if all(isinstance(v, Mapping) for v in values):
        domain = sorted(set().union(*(v.keys() for v in values)))
        samples = np.array([[float(v.get(d, 0.0)) for d in domain] for v in values], dtype=float)
    else:
        domain = ["value"]
        samples = np.array([[float(v)] for v in values], dtype=float)
    samples = samples.reshape(R, len(domain))

    name = metric_name or getattr(metric, "__name__", "metric")
    log_stage(logger, f"ensemble:{name}", int((time.time() - t0) * 1000),
              seed=seed, count=R, n_vertices=template.n)
    return EnsembleStats(name, model, R, seed, k, domain,
                         samples.mean(axis=0) if len(domain) else np.zeros(0),
                         samples.std(axis=0, ddof=ddof) if len(domain) else np.zeros(0),
                         samples, ddof)
