# src/persistence.py
"""
Edge-multiplicity distribution of the multigraph against multigraph swap
ensembles. Sustained excess of high-multiplicity pairs over the ensemble is
the signature of words travelling along already established mappings.
"""
import logging, math, time
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional

import pandas as pd

from .graph import AnyGraph, DirectedGraph, as_multigraph
from .null_models import EnsembleStats, SwapConfig, run_ensemble
from .logging_config import log_stage

logger = logging.getLogger("metnet.persistence")


@dataclass(frozen=True)
class MultiplicityDistribution:
    counts: Dict[int, int]       # multiplicity -> number of ordered pairs

    @property
    def total_edges(self) -> int:
        return sum(m * c for m, c in self.counts.items())

    @property
    def connected_pairs(self) -> int:
        return sum(self.counts.values())


def multiplicity_distribution(g: AnyGraph) -> MultiplicityDistribution:
    counts = Counter(as_multigraph(g).edges.values())
    return MultiplicityDistribution(dict(sorted(counts.items())))


def _multiplicity_metric(g: AnyGraph) -> Dict[int, int]:
    return multiplicity_distribution(g).counts


def log_bin(m: int, base: float = 2) -> int:
    """Left edge of the logarithmic bin [base**j, base**(j+1)) holding m."""
    j = int(math.floor(math.log(m, base) + 1e-12))
    return int(round(base ** j))


@dataclass
class PersistenceReport:
    data: MultiplicityDistribution
    ensemble: EnsembleStats
    sigma: float
    onset: Optional[int]          # smallest m from which every occupied bin exceeds mean + sigma*std
    log_base: float = 2

    def rows(self, log_binned: bool = False) -> pd.DataFrame:
        if log_binned:
            data: Dict[int, int] = Counter()
            for m, c in self.data.counts.items():
                data[log_bin(m, self.log_base)] += c
            ens = self.ensemble.rebin(lambda m: log_bin(m, self.log_base), metric="multiplicity_log")
        else:
            data, ens = self.data.counts, self.ensemble
        stats = ens.as_mapping()
        domain = sorted(set(data) | set(stats))
        return pd.DataFrame({
            "multiplicity": domain,
            "data_count": [int(data.get(m, 0)) for m in domain],
            "rand_mean": [stats.get(m, (0.0, 0.0))[0] for m in domain],
            "rand_std": [stats.get(m, (0.0, 0.0))[1] for m in domain],
        })

    def exceeds(self) -> Dict[int, bool]:
        stats = self.ensemble.as_mapping()
        return {m: c > _band(stats, m, self.sigma) for m, c in self.data.counts.items()}


def _band(stats, m: int, sigma: float) -> float:
    mean, std = stats.get(m, (0.0, 0.0))
    return mean + sigma * std


def exceedance_onset(data: MultiplicityDistribution, ensemble: EnsembleStats, sigma: float = 2.0) -> Optional[int]:
    stats = ensemble.as_mapping()
    onset = None
    for m in sorted(data.counts, reverse=True):
        if data.counts[m] > _band(stats, m, sigma):
            onset = m
        else:
            break
    return onset


def persistence_test(g: AnyGraph, R: int = 1000, cfg: Optional[SwapConfig] = None,
                     sigma: float = 2.0, log_base: float = 2, ddof: int = 0,
                     n_jobs: int = 1, progress: bool = False) -> PersistenceReport:
    if R < 2:
        raise ValueError(f"R must be >= 2, got {R}")
    cfg = cfg or SwapConfig(simple=False)
    # a simple graph has nothing to persist: keep replicates simple too
    model = "config-simple" if isinstance(g, DirectedGraph) else "config-multi"
    if cfg.simple and model == "config-multi":
        logger.warning("persistence needs multiplicity-preserving swaps; using the multigraph variant")
    t0 = time.time()
    mg = as_multigraph(g)
    data = multiplicity_distribution(mg)
    template = g if model == "config-simple" else mg
    ens = run_ensemble(template, model, R, _multiplicity_metric, seed=cfg.seed, k=cfg.k,
                       swaps_per_edge=cfg.swaps_per_edge, ddof=ddof, n_jobs=n_jobs,
                       metric_name="multiplicity", progress=progress)
    onset = exceedance_onset(data, ens, sigma)
    log_stage(logger, "persistence", int((time.time() - t0) * 1000), seed=cfg.seed, count=R,
              n_edges=mg.total_edges)
    return PersistenceReport(data, ens, sigma, onset, log_base)


def ensemble_edge_mass(ens: EnsembleStats) -> List[float]:
    """Per-replicate sum of m * count(m); equals N for every replicate."""
    weights = [float(m) for m in ens.domain]
    return [float(sum(w * c for w, c in zip(weights, row))) for row in ens.samples]
