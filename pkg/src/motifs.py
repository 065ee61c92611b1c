# src/motifs.py
"""
Exact census of connected directed subgraphs on 2 and 3 vertices, Z-scores
against degree-preserving randomizations, and outward transitivity.

Counting follows the induced-subgraph convention: each vertex set whose
induced subgraph is connected contributes once, to its isomorphism class.
"""
import itertools, logging, time
from dataclasses import dataclass
from functools import partial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import pandas as pd

from .graph import AnyGraph, Pair, as_multigraph, degree_arrays, project_simple, to_networkx
from .null_models import SwapConfig, run_ensemble
from .stats import CorrelationResult, correlation
from .logging_config import log_stage

logger = logging.getLogger("metnet.motifs")


def canonical_code(edges: Iterable[Pair], k: int) -> int:
    """Adjacency bits ``sum 2**(i*k+j)`` minimized over vertex relabelings of 0..k-1."""
    edges = list(edges)
    best = None
    for perm in itertools.permutations(range(k)):
        code = sum(1 << (perm[u] * k + perm[v]) for u, v in edges)
        if best is None or code < best:
            best = code
    return best


@dataclass(frozen=True, order=True)
class MotifClass:
    size: int
    canonical_code: int
    man: str
    label: str


# representative edges on vertices A=0, B=1, C=2
_DYADS = [
    ("asym", "single arc A→B", [(0, 1)]),
    ("mutual", "mutual dyad A↔B", [(0, 1), (1, 0)]),
]
_TRIADS = [
    ("021D", "diverging A←B→C", [(1, 0), (1, 2)]),
    ("021U", "converging A→B←C", [(0, 1), (2, 1)]),
    ("021C", "chain A→B→C", [(0, 1), (1, 2)]),
    ("111D", "mutual with in-arc A↔B←C", [(0, 1), (1, 0), (2, 1)]),
    ("111U", "mutual with out-arc A↔B→C", [(0, 1), (1, 0), (1, 2)]),
    ("030T", "feed-forward triangle A→B, B→C, A→C", [(0, 1), (1, 2), (0, 2)]),
    ("030C", "cycle C3 A→B→C→A", [(0, 1), (1, 2), (2, 0)]),
    ("201", "double mutual A↔B↔C", [(0, 1), (1, 0), (1, 2), (2, 1)]),
    ("120D", "out-star with mutual A←B→C, A↔C", [(1, 0), (1, 2), (0, 2), (2, 0)]),
    ("120U", "in-star with mutual A→B←C, A↔C", [(0, 1), (2, 1), (0, 2), (2, 0)]),
    ("120C", "chain with mutual A→B→C, A↔C", [(0, 1), (1, 2), (0, 2), (2, 0)]),
    ("210", "mutual pair plus triangle A→B↔C, A↔C", [(0, 1), (1, 2), (2, 1), (0, 2), (2, 0)]),
    ("300", "complete A↔B↔C↔A", [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]),
]

DYAD_CLASSES: Tuple[MotifClass, ...] = tuple(
    MotifClass(2, canonical_code(e, 2), man, label) for man, label, e in _DYADS)
TRIAD_CLASSES: Tuple[MotifClass, ...] = tuple(
    MotifClass(3, canonical_code(e, 3), man, label) for man, label, e in _TRIADS)
SINGLE_ARC, MUTUAL_DYAD = DYAD_CLASSES
CLASS_BY_CODE: Dict[Tuple[int, int], MotifClass] = {
    (c.size, c.canonical_code): c for c in DYAD_CLASSES + TRIAD_CLASSES}
CLASS_BY_MAN: Dict[str, MotifClass] = {c.man: c for c in DYAD_CLASSES + TRIAD_CLASSES}


def classes_for(size: int) -> Tuple[MotifClass, ...]:
    if size == 2:
        return DYAD_CLASSES
    if size == 3:
        return TRIAD_CLASSES
    raise ValueError(f"motif size must be 2 or 3, got {size}")


def census(g: AnyGraph, size: int) -> Dict[MotifClass, int]:
    """Counts per connected class (zero counts included)."""
    classes = classes_for(size)
    sg = project_simple(g)
    if size == 2:
        mutual = sum(1 for (u, v) in sg.edges if u < v and (v, u) in sg.edges)
        single = len(sg.edges) - 2 * mutual
        return {SINGLE_ARC: single, MUTUAL_DYAD: mutual}
    counts = nx.triadic_census(to_networkx(sg))
    return {c: int(counts.get(c.man, 0)) for c in classes}


def _census_metric(g: AnyGraph, sizes: Sequence[int]) -> Dict[MotifClass, int]:
    out: Dict[MotifClass, int] = {}
    for size in sizes:
        out.update(census(g, size))
    return out


@dataclass(frozen=True)
class MotifRow:
    motif: MotifClass
    n_real: int
    rand_mean: float
    rand_std: float
    z: Optional[float]
    flag: str


@dataclass
class MotifReport:
    rows: List[MotifRow]
    replicates: int
    seed: int
    k: Optional[int]
    model: str
    z_threshold: float

    def row(self, motif: MotifClass) -> MotifRow:
        return next(r for r in self.rows if r.motif == motif)

    def motifs(self) -> List[MotifClass]:
        return [r.motif for r in self.rows if r.flag == "motif"]

    def antimotifs(self) -> List[MotifClass]:
        return [r.motif for r in self.rows if r.flag == "antimotif"]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "class_code": [r.motif.canonical_code for r in self.rows],
            "label": [f"{r.motif.label} ({r.motif.man})" for r in self.rows],
            "n_real": [r.n_real for r in self.rows],
            "rand_mean": [r.rand_mean for r in self.rows],
            "rand_std": [r.rand_std for r in self.rows],
            "z": [r.z for r in self.rows],
            "flag": [r.flag for r in self.rows],
        })


def z_flag(z: Optional[float], threshold: float) -> str:
    if z is None:
        return "undefined"
    if z > threshold:
        return "motif"
    if z < -threshold:
        return "antimotif"
    return ""


def motif_significance(g: AnyGraph, R: int = 1000, cfg: Optional[SwapConfig] = None,
                       sizes: Sequence[int] = (2, 3), z_threshold: float = 2.0,
                       ddof: int = 0, n_jobs: int = 1, progress: bool = False) -> MotifReport:
    """
    Z-score of every connected class against R swap randomizations of ``g``.

    Classes whose ensemble std is zero keep their row with ``z=None`` and
    flag ``"undefined"``.
    """
    if R < 2:
        raise ValueError(f"R must be >= 2, got {R}")
    cfg = cfg or SwapConfig()
    for size in sizes:
        classes_for(size)
    t0 = time.time()
    sg = project_simple(g)
    real = _census_metric(sg, sizes)
    model = "config-simple" if cfg.simple else "config-multi"
    template = sg if cfg.simple else as_multigraph(g)
    stats = run_ensemble(template, model, R, partial(_census_metric, sizes=tuple(sizes)), seed=cfg.seed,
                         k=cfg.k, swaps_per_edge=cfg.swaps_per_edge, ddof=ddof, n_jobs=n_jobs,
                         metric_name="motif_census", progress=progress)
    by_class = stats.as_mapping()
    rows = []
    for motif in sorted(real):
        mean, std = by_class.get(motif, (0.0, 0.0))
        z = (real[motif] - mean) / std if std > 0 else None
        rows.append(MotifRow(motif, real[motif], mean, std, z, z_flag(z, z_threshold)))
    undefined = sum(1 for r in rows if r.z is None)
    if undefined:
        logger.warning(f"{undefined} motif classes with zero ensemble std", extra={"count": undefined})
    log_stage(logger, "motifs", int((time.time() - t0) * 1000), seed=cfg.seed, count=R,
              n_vertices=sg.n, n_edges=len(sg.edges))
    return MotifReport(rows, R, cfg.seed, cfg.k, model, z_threshold)


@dataclass(frozen=True)
class TransitivityRecord:
    vertex: int
    paths: int
    closed: int
    T: Optional[float]


def outward_transitivity(g: AnyGraph, closure: str = "return") -> List[TransitivityRecord]:
    """
    Per vertex v: share of 2-paths v→h→w (w ≠ v) closed by w→v.

    ``closure="forward"`` counts v→w closures instead. T is None when v has
    no such path.
    """
    if closure not in ("return", "forward"):
        raise ValueError(f"closure must be 'return' or 'forward', got {closure!r}")
    sg = project_simple(g)
    succ: List[List[int]] = [[] for _ in range(sg.n)]
    for u, v in sorted(sg.edges):
        succ[u].append(v)
    out = []
    for v in range(sg.n):
        paths = closed = 0
        for h in succ[v]:
            for w in succ[h]:
                if w == v:
                    continue
                paths += 1
                closing = (w, v) if closure == "return" else (v, w)
                if closing in sg.edges:
                    closed += 1
        out.append(TransitivityRecord(v, paths, closed, closed / paths if paths else None))
    return out


def transitivity_frame(records: List[TransitivityRecord], names: Optional[List[str]] = None) -> pd.DataFrame:
    return pd.DataFrame({
        "category": [names[r.vertex] if names else r.vertex for r in records],
        "paths": [r.paths for r in records],
        "closed": [r.closed for r in records],
        "T": [r.T for r in records],
    })


def symmetry_fraction(g: AnyGraph) -> Optional[float]:
    """Share of connected unordered pairs that are mutual."""
    counts = census(g, 2)
    connected = counts[SINGLE_ARC] + counts[MUTUAL_DYAD]
    return counts[MUTUAL_DYAD] / connected if connected else None


def transitivity_vs_out_degree(g: AnyGraph, records: List[TransitivityRecord],
                               method: str = "pearson") -> Tuple[CorrelationResult, pd.DataFrame]:
    """Out-degree (simple graph) against T over vertices where T is defined."""
    _, outdeg = degree_arrays(project_simple(g))
    defined = [r for r in records if r.T is not None]
    frame = pd.DataFrame({
        "category": [r.vertex for r in defined],
        "out_degree": [int(outdeg[r.vertex]) for r in defined],
        "T": [r.T for r in defined],
    })
    return correlation(frame["out_degree"], frame["T"], method), frame
