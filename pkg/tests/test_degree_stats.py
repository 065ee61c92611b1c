"""
Unit tests for degree null bands, degree scatter and the density trade-off.
"""
import os
import sys
import pytest
import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.graph import DegreeRecord, DirectedGraph, DirectedMultigraph, degrees, project_simple
from src.ingest import CategorySizeTable
from src.null_models import sample_er
from src.degree_stats import degree_nullband, degree_scatter_stats, density_anticorrelation


def circulant(n, k):
    """Every vertex points at its next k neighbours: in = out = k everywhere."""
    return DirectedGraph(n, frozenset((v, (v + d) % n) for v in range(n) for d in range(1, k + 1)))


def record(cid, ind, outd, size=1):
    return DegreeRecord(cid, ind, outd, size, ind / size, outd / size)


@pytest.mark.unit
class TestNullband:
    """Degree histograms against null ensembles."""

    def test_regular_graph_under_swaps_is_frozen(self):
        report = degree_nullband(circulant(30, 3), model="config-simple", R=20, seed=1)
        assert report.frame["bin"].tolist() == [3.0]
        assert report.frame["rand_std"].tolist() == [0.0]
        assert not report.frame["exceeds"].any()
        assert report.max_ratio == pytest.approx(1.0)

    def test_er_sample_sits_inside_its_band(self):
        g = sample_er(200, 1000, 11)
        report = degree_nullband(g, model="er", R=200, seed=3)
        f = report.frame
        within = (f["data_count"] - f["rand_mean"]).abs() <= 3 * f["rand_std"]
        assert f.loc[within, "data_count"].sum() >= 0.95 * g.n
        assert f["data_count"].sum() == g.n
        assert f["rand_mean"].sum() == pytest.approx(g.n)

    def test_hub_exceeds(self, make_simple_graph):
        base = make_simple_graph(100, 0.02, np.random.default_rng(6))
        g = DirectedGraph(100, base.edges | {(0, v) for v in range(1, 61)})
        report = degree_nullband(g, model="er", R=50, seed=0)
        assert report.data_max >= 60
        assert report.max_ratio > 2
        assert max(report.exceeding_bins) >= 60
        summary = report.summary()
        assert summary["exceeding_bins"] >= 1 and summary["model"] == "er"

    def test_in_degree_density_mode(self):
        g = circulant(10, 2)
        report = degree_nullband(g, model="config-simple", R=5, which="in", mode="density",
                                 sizes=[4] * 10, seed=0)
        assert report.frame["bin"].tolist() == [0.0]
        assert report.data_max == pytest.approx(0.5)

    def test_multigraph_model_keeps_multiplicity(self):
        g = DirectedMultigraph(3, {(0, 1): 3, (1, 2): 1, (2, 0): 1})
        assert degree_nullband(g, model="config-multi", R=5).data_max == 3.0
        assert degree_nullband(g, model="config-simple", R=5).data_max == 1.0

    def test_argument_checks(self, chain):
        with pytest.raises(ValueError):
            degree_nullband(chain, which="both", R=5)
        with pytest.raises(ValueError):
            degree_nullband(chain, mode="density", R=5)


@pytest.mark.unit
class TestScatter:
    """In/out degree correlation above an out-degree threshold."""

    def test_overall_and_subset(self):
        recs = [record(0, 1, 100), record(1, 5, 120), record(2, 9, 140), record(3, 50, 2)]
        report = degree_scatter_stats(recs, threshold=90, names=list("abcd"))
        assert report.subset.n == 3
        assert report.subset.r == pytest.approx(1.0)
        assert report.overall.n == 4
        assert report.frame["above"].tolist() == [True, True, True, False]
        assert report.frame["category"].tolist() == list("abcd")

    def test_empty_subset_undefined(self):
        report = degree_scatter_stats([record(0, 1, 2), record(1, 2, 3)], threshold=90)
        assert not report.subset.defined
        assert report.summary()["subset"]["flag"] == "fewer than 2 samples"

    def test_category_connections_not_word_counts(self):
        g = DirectedMultigraph(3, {(0, 1): 100, (1, 0): 1, (2, 1): 1})
        sizes = CategorySizeTable({0: 1, 1: 1, 2: 1})
        words = degree_scatter_stats(degrees(g, sizes), threshold=90)
        cats = degree_scatter_stats(degrees(project_simple(g), sizes), threshold=90)
        assert words.frame["out"].tolist() == [100, 1, 1]
        assert cats.frame["out"].tolist() == [1, 1, 1]
        assert not cats.frame["above"].any()
        assert cats.frame["in"].tolist() == [1, 2, 0]


@pytest.mark.unit
class TestDensity:
    """In/out density trade-off among the densest categories."""

    def test_subset_and_sign(self):
        recs = [record(0, 10, 1, 10), record(1, 1, 10, 10), record(2, 8, 2, 10), record(3, 1, 1, 20)]
        report = density_anticorrelation(recs, frac=0.5, names=list("ABCD"))
        assert report.subset == ["A", "B", "C"]
        assert report.both_high == []
        assert report.correlation.r < 0
        assert report.frame["in_subset"].tolist() == [True, True, True, False]

    def test_both_high_listed(self):
        recs = [record(0, 10, 1, 10), record(1, 1, 10, 10), record(2, 9, 9, 10)]
        assert density_anticorrelation(recs, frac=0.5).both_high == [2]

    def test_frac_range(self):
        with pytest.raises(ValueError):
            density_anticorrelation([record(0, 1, 1)], frac=0)


if __name__ == '__main__':
    pytest.main([__file__])
