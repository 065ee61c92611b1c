# src/degree_stats.py
"""
Degree-level analyses: data histograms against null-model bands, in/out
degree correlation above an out-degree threshold, and the in/out density
trade-off among the densest categories.
"""
import logging, time
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .graph import AnyGraph, BinSpec, DegreeRecord, as_multigraph, degree_arrays, project_simple
from .null_models import EnsembleStats, run_ensemble
from .stats import CorrelationResult, correlation
from .logging_config import log_stage

logger = logging.getLogger("metnet.degree_stats")

_MAX_KEY = ("max", 0.0)


def _degree_values(g: AnyGraph, which: str, sizes: Optional[np.ndarray]) -> np.ndarray:
    indeg, outdeg = degree_arrays(g)
    values = (indeg if which == "in" else outdeg).astype(float)
    return values / sizes if sizes is not None else values


def _degree_metric(g: AnyGraph, which: str, sizes: Optional[np.ndarray], bins: BinSpec) -> Dict[tuple, float]:
    values = _degree_values(g, which, sizes)
    out: Dict[tuple, float] = {}
    for x in values.tolist():
        key = ("bin", bins.left_edge(x))
        out[key] = out.get(key, 0) + 1
    out[_MAX_KEY] = float(values.max()) if len(values) else 0.0
    return out


@dataclass
class NullbandReport:
    which: str
    mode: str
    model: str
    sigma: float
    frame: pd.DataFrame          # bin, data_count, rand_mean, rand_std, exceeds
    data_max: float
    rand_max_mean: float
    rand_max_std: float
    ensemble: EnsembleStats

    @property
    def max_ratio(self) -> Optional[float]:
        return self.data_max / self.rand_max_mean if self.rand_max_mean > 0 else None

    @property
    def exceeding_bins(self) -> List[float]:
        return self.frame.loc[self.frame["exceeds"], "bin"].tolist()

    def summary(self) -> Dict[str, object]:
        return {
            "which": self.which, "mode": self.mode, "model": self.model, "sigma": self.sigma,
            "data_max": self.data_max, "rand_max_mean": self.rand_max_mean,
            "rand_max_std": self.rand_max_std, "max_ratio": self.max_ratio,
            "exceeding_bins": len(self.exceeding_bins), "bins": len(self.frame),
        }


def degree_nullband(g: AnyGraph, model: str = "er", R: int = 1000, seed: int = 0,
                    which: str = "out", mode: str = "count", bins: Optional[BinSpec] = None,
                    sizes: Optional[Sequence[int]] = None, sigma: float = 2.0,
                    k: Optional[int] = None, swaps_per_edge: int = 10, ddof: int = 0,
                    n_jobs: int = 1, progress: bool = False) -> NullbandReport:
    """
    Degree histogram of ``g`` next to the per-bin mean and std over R null
    replicates, plus data maximum against the ensemble maximum.

    Degrees are taken on the simple projection except for ``config-multi``,
    which keeps multiplicities. ``mode="density"`` divides degrees by
    category size and needs ``sizes``.
    """
    if which not in ("in", "out"):
        raise ValueError(f"which must be 'in' or 'out', got {which!r}")
    if mode not in ("count", "density"):
        raise ValueError(f"mode must be 'count' or 'density', got {mode!r}")
    if mode == "density" and sizes is None:
        raise ValueError("density mode needs category sizes")
    t0 = time.time()
    bins = bins or BinSpec()
    size_arr = np.asarray(sizes, dtype=float) if mode == "density" else None
    # data and replicates are compared on the same graph type
    template = as_multigraph(g) if model == "config-multi" else project_simple(g)
    metric = partial(_degree_metric, which=which, sizes=size_arr, bins=bins)
    data = metric(template)
    ens = run_ensemble(template, model, R, metric, seed=seed, k=k, swaps_per_edge=swaps_per_edge,
                       ddof=ddof, n_jobs=n_jobs, metric_name=f"{which}_degree_{mode}", progress=progress)
    stats = ens.as_mapping()
    keys = sorted({key for key in list(data) + list(stats) if key[0] == "bin"})
    rows = []
    for key in keys:
        count = int(data.get(key, 0))
        mean, std = stats.get(key, (0.0, 0.0))
        rows.append((key[1], count, mean, std, count > mean + sigma * std))
    frame = pd.DataFrame(rows, columns=["bin", "data_count", "rand_mean", "rand_std", "exceeds"])
    max_mean, max_std = stats.get(_MAX_KEY, (0.0, 0.0))
    report = NullbandReport(which, mode, model, sigma, frame, float(data[_MAX_KEY]), max_mean, max_std, ens)
    if report.max_ratio is not None and report.max_ratio > 1:
        logger.info(f"data max {which}-degree {report.data_max:g} is {report.max_ratio:.2f}x the ensemble mean max")
    log_stage(logger, f"nullband:{which}:{mode}", int((time.time() - t0) * 1000), seed=seed, count=R,
              n_vertices=g.n)
    return report


@dataclass
class DegreeScatterReport:
    threshold: int
    overall: CorrelationResult
    subset: CorrelationResult
    frame: pd.DataFrame          # category, in, out, above

    def summary(self) -> Dict[str, object]:
        return {"threshold": self.threshold, "overall": self.overall.to_dict(), "subset": self.subset.to_dict()}


def degree_scatter_stats(records: Sequence[DegreeRecord], threshold: int = 90, method: str = "pearson",
                         names: Optional[List[str]] = None) -> DegreeScatterReport:
    """In/out degree correlation over all categories and over those with out-degree > threshold."""
    frame = pd.DataFrame({
        "category": [names[r.category] if names else r.category for r in records],
        "in": [r.in_degree for r in records],
        "out": [r.out_degree for r in records],
    })
    frame["above"] = frame["out"] > threshold
    sub = frame[frame["above"]]
    subset = correlation(sub["in"], sub["out"], method)
    if not subset.defined:
        logger.warning(f"subset correlation at out-degree > {threshold} undefined: {subset.flag}")
    return DegreeScatterReport(threshold, correlation(frame["in"], frame["out"], method), subset, frame)


@dataclass
class DensityReport:
    frac: float
    correlation: CorrelationResult
    subset: List[object]
    both_high: List[object] = field(default_factory=list)
    frame: pd.DataFrame = None   # category, in_density, out_density, in_subset

    def summary(self) -> Dict[str, object]:
        return {"frac": self.frac, "correlation": self.correlation.to_dict(),
                "subset_size": len(self.subset), "both_high": list(self.both_high)}


def density_anticorrelation(records: Sequence[DegreeRecord], frac: float = 0.5, method: str = "pearson",
                            names: Optional[List[str]] = None) -> DensityReport:
    """
    Correlation of in- and out-density over categories where either density
    exceeds ``frac`` times its maximum. Categories above the cut on both sides
    are listed as ``both_high``.
    """
    if not (0 < frac <= 1):
        raise ValueError(f"frac must lie in (0, 1], got {frac}")
    label = (lambda v: names[v]) if names else (lambda v: v)
    ind = np.array([r.in_density for r in records], dtype=float)
    outd = np.array([r.out_density for r in records], dtype=float)
    if len(records) == 0:
        return DensityReport(frac, correlation([], [], method), [], [], pd.DataFrame())
    in_high = ind > frac * ind.max()
    out_high = outd > frac * outd.max()
    chosen = in_high | out_high
    frame = pd.DataFrame({
        "category": [label(r.category) for r in records],
        "in_density": ind,
        "out_density": outd,
        "in_subset": chosen,
    })
    result = correlation(ind[chosen], outd[chosen], method)
    if not result.defined:
        logger.warning(f"density correlation undefined: {result.flag}")
    subset = [label(r.category) for r, c in zip(records, chosen) if c]
    both = [label(r.category) for r, a, b in zip(records, in_high, out_high) if a and b]
    return DensityReport(frac, result, subset, both, frame)
