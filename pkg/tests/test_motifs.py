"""
Unit tests for the motif census, motif significance and outward transitivity.
"""
import itertools
import os
import sys
import pytest
import numpy as np
from collections import Counter

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.graph import DirectedGraph, DirectedMultigraph
from src.motifs import (CLASS_BY_CODE, CLASS_BY_MAN, MUTUAL_DYAD, SINGLE_ARC, TRIAD_CLASSES,
                        canonical_code, census, classes_for, motif_significance, outward_transitivity,
                        symmetry_fraction, transitivity_vs_out_degree, z_flag)
from src.null_models import SwapConfig


def brute_census(g, size):
    """Induced connected subgraphs classified by canonical code."""
    counts = Counter()
    for combo in itertools.combinations(range(g.n), size):
        local = {v: i for i, v in enumerate(combo)}
        edges = [(local[u], local[v]) for u, v in g.edges if u in local and v in local]
        touched = {x for e in edges for x in e}
        if size == 2 and not edges:
            continue
        if size == 3:
            # connected on 3 vertices iff at least two distinct unordered pairs are linked
            pairs = {frozenset(e) for e in edges}
            if len(pairs) < 2 or len(touched) < 3:
                continue
        counts[CLASS_BY_CODE[(size, canonical_code(edges, size))]] += 1
    return counts


def brute_transitivity(g):
    out = {}
    for v in range(g.n):
        paths = closed = 0
        for h in range(g.n):
            if (v, h) not in g.edges:
                continue
            for w in range(g.n):
                if w != v and (h, w) in g.edges:
                    paths += 1
                    closed += (w, v) in g.edges
        out[v] = (paths, closed)
    return out


@pytest.mark.unit
class TestMotifClasses:
    """Class catalogue and canonical codes."""

    def test_catalogue_sizes(self):
        assert len(classes_for(2)) == 2
        assert len(TRIAD_CLASSES) == 13
        assert len({c.canonical_code for c in TRIAD_CLASSES}) == 13
        with pytest.raises(ValueError):
            classes_for(4)

    def test_canonical_code_is_relabeling_invariant(self):
        assert canonical_code([(0, 1), (1, 2)], 3) == canonical_code([(2, 0), (0, 1)], 3)
        assert canonical_code([(0, 1), (1, 2)], 3) != canonical_code([(0, 1), (2, 1)], 3)

    def test_named_classes(self):
        assert "cycle" in CLASS_BY_MAN["030C"].label
        assert "feed-forward" in CLASS_BY_MAN["030T"].label


@pytest.mark.unit
class TestCensus:
    """Exact subgraph counts."""

    def test_chain(self, chain):
        tri = census(chain, 3)
        assert tri[CLASS_BY_MAN["021C"]] == 2
        assert sum(tri.values()) == 2
        assert census(chain, 2) == {SINGLE_ARC: 3, MUTUAL_DYAD: 0}

    def test_cycle(self, cycle3):
        assert census(cycle3, 3)[CLASS_BY_MAN["030C"]] == 1

    def test_multigraph_counts_like_projection(self):
        g = DirectedMultigraph(3, {(0, 1): 4, (1, 0): 1, (1, 2): 2})
        assert census(g, 2) == {SINGLE_ARC: 1, MUTUAL_DYAD: 1}
        assert census(g, 3)[CLASS_BY_MAN["111U"]] == 1

    def test_matches_brute_force(self, make_simple_graph):
        gen = np.random.default_rng(11)
        for _ in range(50):
            g = make_simple_graph(int(gen.integers(3, 31)), float(gen.uniform(0.05, 0.4)), gen)
            for size in (2, 3):
                expected = brute_census(g, size)
                got = census(g, size)
                assert {c: n for c, n in got.items() if n} == dict(expected)

    def test_symmetry_fraction(self, mutual_pair, chain):
        assert symmetry_fraction(mutual_pair) == 1.0
        assert symmetry_fraction(chain) == 0.0
        assert symmetry_fraction(DirectedGraph(3, frozenset())) is None


@pytest.mark.unit
class TestSignificance:
    """Z-scores against swap ensembles."""

    def test_z_flag(self):
        assert z_flag(None, 2) == "undefined"
        assert z_flag(2.5, 2) == "motif"
        assert z_flag(-2.5, 2) == "antimotif"
        assert z_flag(1.0, 2) == ""

    def test_frozen_ensemble_gives_undefined(self, cycle3):
        report = motif_significance(cycle3, R=5, cfg=SwapConfig(seed=0), sizes=(2, 3))
        assert all(r.z is None and r.flag == "undefined" for r in report.rows)
        assert len(report.rows) == 15

    def test_report_frame(self, make_simple_graph):
        g = make_simple_graph(20, 0.15, np.random.default_rng(5))
        report = motif_significance(g, R=10, cfg=SwapConfig(seed=3), sizes=(3,))
        df = report.to_frame()
        assert list(df.columns) == ["class_code", "label", "n_real", "rand_mean", "rand_std", "z", "flag"]
        assert len(df) == 13

    def test_deterministic(self, make_simple_graph):
        g = make_simple_graph(20, 0.15, np.random.default_rng(5))
        a = motif_significance(g, R=10, cfg=SwapConfig(seed=3)).to_frame()
        b = motif_significance(g, R=10, cfg=SwapConfig(seed=3)).to_frame()
        assert a.equals(b)

    def test_needs_two_replicates(self, chain):
        with pytest.raises(ValueError):
            motif_significance(chain, R=1)

    @pytest.mark.slow
    def test_planted_mutual_dyads(self, make_simple_graph):
        gen = np.random.default_rng(99)
        base = make_simple_graph(100, 0.05, gen)
        edges = set(base.edges)
        singles = sorted(e for e in edges if (e[1], e[0]) not in edges)
        for i in gen.choice(len(singles), size=30, replace=False):
            u, v = singles[i]
            edges.add((v, u))
        g = DirectedGraph(100, frozenset(edges))
        report = motif_significance(g, R=500, cfg=SwapConfig(seed=1), sizes=(2,))
        z_mutual = report.row(MUTUAL_DYAD).z
        z_single = report.row(SINGLE_ARC).z
        assert z_mutual > 2
        assert np.sign(z_mutual) == -np.sign(z_single)
        assert MUTUAL_DYAD in report.motifs()


@pytest.mark.unit
class TestTransitivity:
    """Outward transitivity T(v)."""

    def test_cycle(self, cycle3):
        recs = outward_transitivity(cycle3)
        assert all(r.paths == 1 and r.closed == 1 and r.T == 1.0 for r in recs)

    def test_chain(self, chain):
        recs = outward_transitivity(chain)
        assert (recs[0].paths, recs[0].closed, recs[0].T) == (1, 0, 0.0)
        assert recs[2].T is None and recs[3].T is None

    def test_forward_closure(self):
        g = DirectedGraph(3, frozenset({(0, 1), (1, 2), (0, 2)}))
        assert outward_transitivity(g, "forward")[0].T == 1.0
        assert outward_transitivity(g, "return")[0].T == 0.0
        with pytest.raises(ValueError):
            outward_transitivity(g, "both")

    def test_matches_path_enumeration(self, make_simple_graph):
        gen = np.random.default_rng(21)
        for _ in range(50):
            g = make_simple_graph(int(gen.integers(2, 26)), float(gen.uniform(0.05, 0.5)), gen)
            oracle = brute_transitivity(g)
            for r in outward_transitivity(g):
                assert (r.paths, r.closed) == oracle[r.vertex]
                if r.T is not None:
                    assert 0.0 <= r.T <= 1.0

    def test_out_degree_correlation(self, make_simple_graph):
        g = make_simple_graph(30, 0.2, np.random.default_rng(8))
        recs = outward_transitivity(g)
        corr, frame = transitivity_vs_out_degree(g, recs)
        assert list(frame.columns) == ["category", "out_degree", "T"]
        assert len(frame) == sum(1 for r in recs if r.T is not None)
        assert corr.n == len(frame)


if __name__ == '__main__':
    pytest.main([__file__])
