# src/roles.py
"""
Structural-role distance between categories and Ward agglomeration with
every dendrogram that ties in proximity allow.

Role distance is the sum of the Jaccard distances of in-neighborhoods and of
out-neighborhoods. Cluster distances are updated with the Lance-Williams
recursion using Ward coefficients.
"""
import hashlib, logging, time
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
import pandas as pd

from .graph import AnyGraph, project_simple
from .logging_config import log_stage

logger = logging.getLogger("metnet.roles")

Tree = Union[str, tuple]         # leaf label or (left, right)


@dataclass
class RoleDistanceMatrix:
    labels: List[str]
    matrix: np.ndarray
    empty_in: List[int] = field(default_factory=list)
    empty_out: List[int] = field(default_factory=list)

    def __post_init__(self):
        n = len(self.labels)
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match {n} labels")
        if len(set(self.labels)) != n:
            raise ValueError("labels must be unique")

    def permuted(self, order: Sequence[int]) -> "RoleDistanceMatrix":
        idx = np.asarray(order)
        position = {old: new for new, old in enumerate(order)}
        return RoleDistanceMatrix([self.labels[i] for i in order], self.matrix[np.ix_(idx, idx)].copy(),
                                  sorted(position[v] for v in self.empty_in),
                                  sorted(position[v] for v in self.empty_out))


def jaccard_distance(a: Set[int], b: Set[int]) -> float:
    """|a ⊖ b| / |a ∪ b|, with 0 for two empty sets."""
    union = len(a | b)
    return len(a ^ b) / union if union else 0.0


def role_distance(g: AnyGraph, labels: Optional[List[str]] = None) -> RoleDistanceMatrix:
    sg = project_simple(g)
    n = sg.n
    labels = list(labels) if labels is not None else [str(v) for v in range(n)]
    n_in: List[Set[int]] = [set() for _ in range(n)]
    n_out: List[Set[int]] = [set() for _ in range(n)]
    for u, v in sg.edges:
        n_out[u].add(v)
        n_in[v].add(u)
    D = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            D[a, b] = D[b, a] = jaccard_distance(n_in[a], n_in[b]) + jaccard_distance(n_out[a], n_out[b])
    empty_in = [v for v in range(n) if not n_in[v]]
    empty_out = [v for v in range(n) if not n_out[v]]
    if empty_in or empty_out:
        logger.info(f"{len(empty_in)} categories without in-neighbors, {len(empty_out)} without out-neighbors; "
                    f"empty-union Jaccard terms set to 0", extra={"count": len(empty_in) + len(empty_out)})
    return RoleDistanceMatrix(labels, D, empty_in, empty_out)


def lance_williams_ward(d_ik: float, d_jk: float, d_ij: float, n_i: int, n_j: int, n_k: int) -> float:
    """Distance from C_i ∪ C_j to C_k."""
    t = n_i + n_j + n_k
    return ((n_i + n_k) * d_ik + (n_j + n_k) * d_jk - n_k * d_ij) / t


def _min_leaf(t: Tree) -> str:
    while not isinstance(t, str):
        t = t[0]
    return t


def _join(a: Tree, b: Tree) -> tuple:
    # children ordered by smallest leaf label; the left child then holds the minimum
    return (a, b) if _min_leaf(a) <= _min_leaf(b) else (b, a)


def tree_leaves(t: Tree) -> FrozenSet[str]:
    if isinstance(t, str):
        return frozenset([t])
    return tree_leaves(t[0]) | tree_leaves(t[1])


@dataclass(frozen=True)
class Merge:
    left: Tree
    right: Tree
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    leaves: Tuple[str, ...]
    merges: Tuple[Merge, ...]

    @property
    def root(self) -> Tree:
        if not self.merges:
            return self.leaves[0]
        last = self.merges[-1]
        return _join(last.left, last.right)

    def clusters(self) -> List[Tree]:
        """Internal nodes in merge order."""
        return [_join(m.left, m.right) for m in self.merges]

    def heights(self) -> Dict[Tree, float]:
        return {_join(m.left, m.right): m.height for m in self.merges}


@dataclass
class DendrogramSet:
    dendrograms: List[Dendrogram]
    truncated: bool
    subtree_fraction: Dict[Tree, float]
    leafset_fraction: Dict[FrozenSet[str], float]
    cap: int


class _WardState:
    """Replayable agglomeration state; the new cluster keeps the lower slot."""

    def __init__(self, D0: np.ndarray, labels: List[str]):
        self.D = D0.copy()
        self.sizes = np.ones(len(labels))
        self.active = np.ones(len(labels), dtype=bool)
        self.trees: List[Optional[Tree]] = list(labels)
        self.path: Tuple[Tuple[int, int], ...] = ()
        self.merges: List[Merge] = []

    @property
    def n_active(self) -> int:
        return int(self.active.sum())

    def key(self) -> FrozenSet[Tree]:
        return frozenset(t for t in self.trees if t is not None)

    def tied_pairs(self, rel_eps: float, abs_eps: float = 1e-15) -> List[Tuple[int, int]]:
        m = float(self.D.min())
        tol = max(abs_eps, rel_eps * abs(m))
        mask = np.triu(self.D <= m + tol, k=1)
        return [(int(i), int(j)) for i, j in np.argwhere(mask)]

    def merge(self, i: int, j: int) -> None:
        D, sizes = self.D, self.sizes
        d_ij = float(D[i, j])
        n_i, n_j = sizes[i], sizes[j]
        with np.errstate(invalid="ignore"):
            new = ((n_i + sizes) * D[i] + (n_j + sizes) * D[j] - sizes * d_ij) / (n_i + n_j + sizes)
        self.active[j] = False
        new[~self.active] = np.inf
        new[i] = np.inf
        D[i, :] = new
        D[:, i] = new
        D[j, :] = np.inf
        D[:, j] = np.inf
        left, right = self.trees[i], self.trees[j]
        self.merges.append(Merge(*_join(left, right), d_ij, int(n_i + n_j)))
        self.trees[i] = _join(left, right)
        self.trees[j] = None
        sizes[i] = n_i + n_j
        self.path = self.path + ((i, j),)


def ward_hca_all(dist: RoleDistanceMatrix, cap: int = 10000, tie_eps: float = 1e-12) -> DendrogramSet:
    """
    Enumerate every Ward dendrogram reachable by breaking ties differently.

    Depth-first over merge choices; states reached again through a different
    order of independent merges are skipped. Stops with ``truncated=True``
    once ``cap`` distinct dendrograms are found and branches remain.
    """
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    t0 = time.time()
    labels = list(dist.labels)
    n = len(labels)
    if n == 0:
        raise ValueError("cannot cluster an empty distance matrix")
    D0 = dist.matrix.astype(float).copy()
    np.fill_diagonal(D0, np.inf)

    def replay(path):
        st = _WardState(D0, labels)
        for i, j in path:
            st.merge(i, j)
        return st

    found: Dict[Tree, Dendrogram] = {}
    seen: Set[FrozenSet[Tree]] = set()
    stack: List[Tuple[Tuple[int, int], ...]] = [()]
    truncated = False
    while stack:
        st = replay(stack.pop())
        while st.n_active > 1:
            key = st.key()
            if key in seen:
                break
            seen.add(key)
            ties = st.tied_pairs(tie_eps)
            for pair in reversed(ties[1:]):
                stack.append(st.path + (pair,))
            st.merge(*ties[0])
        else:
            dendro = Dendrogram(tuple(labels), tuple(st.merges))
            found.setdefault(dendro.root, dendro)
        if len(found) >= cap and stack:
            truncated = True
            logger.warning(f"dendrogram enumeration truncated at cap={cap}", extra={"count": len(found)})
            break

    dendrograms = list(found.values())
    subtree_counts: Counter = Counter()
    leafset_counts: Counter = Counter()
    for d in dendrograms:
        for c in d.clusters():
            subtree_counts[c] += 1
            leafset_counts[tree_leaves(c)] += 1
    total = len(dendrograms)
    log_stage(logger, "ward_hca_all", int((time.time() - t0) * 1000), n_vertices=n, count=total)
    return DendrogramSet(dendrograms, truncated,
                         {c: k / total for c, k in subtree_counts.items()},
                         {s: k / total for s, k in leafset_counts.items()}, cap)


def leafset_hash(members: FrozenSet[str]) -> str:
    return hashlib.sha1("\x1f".join(sorted(members)).encode("utf-8")).hexdigest()[:12]


def cluster_stability(ds: DendrogramSet) -> pd.DataFrame:
    """One row per distinct cluster (subtree), sorted by size then subtree fraction."""
    if not ds.dendrograms:
        raise ValueError("empty dendrogram set")
    rows = []
    for tree, frac in ds.subtree_fraction.items():
        members = tree_leaves(tree)
        rows.append({
            "leafset_hash": leafset_hash(members),
            "size": len(members),
            "subtree_fraction": frac,
            "leafset_fraction": ds.leafset_fraction[members],
            "members": "|".join(sorted(members)),
        })
    df = pd.DataFrame(rows, columns=["leafset_hash", "size", "subtree_fraction", "leafset_fraction", "members"])
    return df.sort_values(["size", "subtree_fraction", "members"], kind="mergesort").reset_index(drop=True)


def stability_summary(ds: DendrogramSet) -> Dict[str, object]:
    return {
        "dendrograms": len(ds.dendrograms),
        "distinct_clusters": len(ds.subtree_fraction),
        "clusters_in_all_as_subtree": sum(1 for f in ds.subtree_fraction.values() if f == 1.0),
        "clusters_in_all_as_leafset": sum(1 for t in ds.subtree_fraction
                                          if ds.leafset_fraction[tree_leaves(t)] == 1.0),
        "truncated": ds.truncated,
        "cap": ds.cap,
    }


def _newick_label(label: str) -> str:
    if any(ch in label for ch in " ():;,[]'\t"):
        return "'" + label.replace("'", "''") + "'"
    return label


def to_newick(d: Dendrogram) -> str:
    """Newick text; branch length = parent height - child height (leaves at 0)."""
    heights = d.heights()

    def render(t: Tree, parent_height: float) -> str:
        h = 0.0 if isinstance(t, str) else heights[t]
        length = f":{parent_height - h:.12g}"
        if isinstance(t, str):
            return _newick_label(t) + length
        return f"({render(t[0], h)},{render(t[1], h)})" + length

    root = d.root
    if isinstance(root, str):
        return _newick_label(root) + ";"
    h = heights[root]
    return f"({render(root[0], h)},{render(root[1], h)});"


def to_merge_list(d: Dendrogram) -> List[Dict[str, object]]:
    return [{
        "left": sorted(tree_leaves(m.left)),
        "right": sorted(tree_leaves(m.right)),
        "height": m.height,
        "size": m.size,
    } for m in d.merges]
