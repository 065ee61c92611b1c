# src/embedding.py
"""
Role distances against word-vector distances: Pearson correlation and
mutual information after equal-frequency discretization.
"""
import logging, math, re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.spatial import distance
from sklearn.metrics import mutual_info_score

from .ingest import EmbeddingTable
from .roles import RoleDistanceMatrix
from .stats import CorrelationResult, correlation

logger = logging.getLogger("metnet.embedding")

DEFAULT_STOP_WORDS = ("and", "of", "the", "or", "in", "to", "a", "an", "for", "with", "by", "on")
_TOKEN = re.compile(r"[^\W_]+(?:['-][^\W_]+)*")


def tokenize(name: str) -> List[str]:
    return _TOKEN.findall(name)


def category_vector(name: str, emb: EmbeddingTable,
                    stop_words: Iterable[str] = DEFAULT_STOP_WORDS) -> Tuple[Optional[np.ndarray], str]:
    """
    Resolve a category label to a vector.

    Tries the exact label, then its lowercase form, then the mean of the
    resolvable tokens with stop words dropped. Returns ``(vector, how)`` with
    ``how`` in {"exact", "lowercase", "tokens", "missing"}.
    """
    if name in emb:
        return emb.get(name), "exact"
    if name.lower() in emb:
        return emb.get(name.lower()), "lowercase"
    stops = {w.lower() for w in stop_words}
    found = []
    for tok in tokenize(name):
        if tok.lower() in stops:
            continue
        vec = emb.get(tok)
        if vec is None:
            vec = emb.get(tok.lower())
        if vec is not None:
            found.append(vec)
    if not found:
        return None, "missing"
    return np.mean(found, axis=0), "tokens"


@dataclass
class PairedDistanceSample:
    frame: pd.DataFrame          # a, b, role_distance, euclidean, cosine
    excluded: List[str] = field(default_factory=list)
    resolution: Dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.frame)


def build_paired_sample(dist: RoleDistanceMatrix, emb: EmbeddingTable,
                        names: Optional[Sequence[str]] = None,
                        stop_words: Iterable[str] = DEFAULT_STOP_WORDS) -> PairedDistanceSample:
    """One row per unordered category pair with a vector on both sides."""
    names = list(names) if names is not None else list(dist.labels)
    if len(names) != len(dist.labels):
        raise ValueError(f"{len(names)} names for {len(dist.labels)} categories")
    stop_words = list(stop_words)
    vectors: Dict[int, np.ndarray] = {}
    resolution: Dict[str, str] = {}
    excluded: List[str] = []
    for i, name in enumerate(names):
        vec, how = category_vector(name, emb, stop_words)
        resolution[name] = how
        if vec is None:
            excluded.append(name)
        else:
            vectors[i] = vec
    if excluded:
        logger.warning(f"{len(excluded)} categories without a resolvable vector excluded: {', '.join(excluded)}",
                       extra={"count": len(excluded)})

    rows = []
    kept = sorted(vectors)
    for x, i in enumerate(kept):
        for j in kept[x + 1:]:
            rows.append((names[i], names[j], float(dist.matrix[i, j]),
                         float(distance.euclidean(vectors[i], vectors[j])),
                         float(np.clip(distance.cosine(vectors[i], vectors[j]), 0.0, 2.0))))
    frame = pd.DataFrame(rows, columns=["a", "b", "role_distance", "euclidean", "cosine"])
    return PairedDistanceSample(frame, excluded, resolution)


def equal_frequency_bins(x: Sequence[float], bins: int) -> np.ndarray:
    """
    Quantile bin labels starting at 0. Equal values always share a bin, so
    heavily tied data yields fewer than ``bins`` bins.
    """
    values = pd.Series(np.asarray(x, dtype=float))
    if values.nunique() < 2:
        return np.zeros(len(values), dtype=int)
    return pd.qcut(values, bins, labels=False, duplicates="drop").to_numpy(dtype=int)


def mutual_information(x: Sequence[float], y: Sequence[float], bins: int = 32) -> float:
    """MI in nats between the equal-frequency discretizations of x and y."""
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    contingency = pd.crosstab(equal_frequency_bins(x, bins), equal_frequency_bins(y, bins)).to_numpy()
    return max(float(mutual_info_score(None, None, contingency=contingency)), 0.0)


@dataclass
class EmbeddingReport:
    n_pairs: int
    excluded: List[str]
    bins: int
    pearson_cos: CorrelationResult
    pearson_euc: CorrelationResult
    mi_cos: Optional[float]
    mi_euc: Optional[float]
    log_base: str = "e"

    def to_dict(self) -> Dict[str, object]:
        return {
            "n_pairs": self.n_pairs,
            "excluded": list(self.excluded),
            "bins": self.bins,
            "log_base": self.log_base,
            "pearson_cos": self.pearson_cos.r,
            "pearson_cos_flag": self.pearson_cos.flag,
            "pearson_euc": self.pearson_euc.r,
            "pearson_euc_flag": self.pearson_euc.flag,
            "mi_cos": self.mi_cos,
            "mi_euc": self.mi_euc,
            "mi_max": math.log(self.bins),
        }


def compare(sample: PairedDistanceSample, bins: int = 32, method: str = "pearson") -> EmbeddingReport:
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    if len(sample) < 2:
        raise ValueError(f"need at least 2 category pairs, got {len(sample)}")
    f = sample.frame
    report = EmbeddingReport(
        n_pairs=len(f),
        excluded=list(sample.excluded),
        bins=bins,
        pearson_cos=correlation(f["role_distance"], f["cosine"], method),
        pearson_euc=correlation(f["role_distance"], f["euclidean"], method),
        mi_cos=mutual_information(f["role_distance"], f["cosine"], bins),
        mi_euc=mutual_information(f["role_distance"], f["euclidean"], bins),
    )
    logger.info(f"Embedding comparison over {report.n_pairs} pairs", extra={"count": report.n_pairs})
    return report
