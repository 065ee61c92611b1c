# src/stats.py
"""Correlation kernel shared by the degree, transitivity, curvature and embedding reports."""
import math
from dataclasses import dataclass, asdict
from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy import stats

METHODS = ("pearson", "spearman")


@dataclass(frozen=True)
class CorrelationResult:
    r: Optional[float]
    n: int
    method: str = "pearson"
    flag: str = ""               # "" when defined, else why not

    @property
    def defined(self) -> bool:
        return self.r is not None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def correlation(x: Sequence[float], y: Sequence[float], method: str = "pearson") -> CorrelationResult:
    """Pearson (default) or Spearman coefficient; undefined for n < 2 or a constant column."""
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    n = int(x.size)
    if n < 2:
        return CorrelationResult(None, n, method, "fewer than 2 samples")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return CorrelationResult(None, n, method, "zero variance")
    if method == "pearson":
        r = stats.pearsonr(x, y).statistic
    else:
        r = stats.spearmanr(x, y).statistic
    r = float(np.clip(r, -1.0, 1.0))
    if math.isnan(r):
        return CorrelationResult(None, n, method, "undefined")
    return CorrelationResult(r, n, method)
