"""
Unit tests for graph construction, degrees and histograms.
"""
import os
import sys
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.graph import (BinSpec, DirectedGraph, DirectedMultigraph, as_multigraph, build_multigraph,
                       degree_arrays, degree_histogram, degrees, degrees_frame, histogram,
                       project_simple, to_networkx)
from src.ingest import CategorySizeTable, MetaphorRecord


@pytest.mark.unit
class TestGraphTypes:
    """Multigraph and simple graph construction."""

    def test_build_multigraph_counts_parallel_edges(self):
        recs = [MetaphorRecord("a", 0, 1), MetaphorRecord("b", 0, 1), MetaphorRecord("c", 1, 2)]
        g = build_multigraph(recs, n=4)
        assert g.n == 4
        assert g.edges[(0, 1)] == 2
        assert g.total_edges == 3
        assert g.words[(0, 1)] == ("a", "b")

    def test_toy_graph(self, toy_corpus):
        g = build_multigraph(toy_corpus.records, toy_corpus.n)
        assert g.total_edges == 50
        # Light -> Knowledge carries six words
        assert g.edges[(0, 1)] == 6

    def test_validation(self):
        with pytest.raises(ValueError):
            DirectedMultigraph(2, {(0, 0): 1})
        with pytest.raises(ValueError):
            DirectedMultigraph(2, {(0, 1): 0})
        with pytest.raises(ValueError):
            DirectedGraph(2, frozenset({(0, 2)}))

    def test_projection(self):
        g = DirectedMultigraph(3, {(0, 1): 3, (1, 2): 1})
        sg = project_simple(g)
        assert sg.edges == frozenset({(0, 1), (1, 2)})
        assert as_multigraph(sg).edges == {(0, 1): 1, (1, 2): 1}

    def test_edge_list_expands_multiplicity(self):
        g = DirectedMultigraph(3, {(1, 2): 1, (0, 1): 2})
        assert g.edge_list() == [(0, 1), (0, 1), (1, 2)]

    def test_to_networkx_keeps_isolated_vertices(self):
        G = to_networkx(DirectedGraph(5, frozenset({(0, 1)})))
        assert G.number_of_nodes() == 5
        assert G.number_of_edges() == 1


@pytest.mark.unit
class TestDegrees:
    """Degree records, densities and histograms."""

    def test_degree_arrays_weighted(self):
        g = DirectedMultigraph(3, {(0, 1): 3, (2, 1): 1})
        indeg, outdeg = degree_arrays(g)
        assert indeg.tolist() == [0, 4, 0]
        assert outdeg.tolist() == [3, 0, 1]
        indeg, _ = degree_arrays(project_simple(g))
        assert indeg.tolist() == [0, 2, 0]

    def test_degree_records(self):
        g = DirectedMultigraph(2, {(0, 1): 4})
        recs = degrees(g, CategorySizeTable({0: 2, 1: 8}))
        assert recs[0].out_degree == 4 and recs[0].out_density == 2.0
        assert recs[1].in_degree == 4 and recs[1].in_density == 0.5

    def test_degree_sums_match(self, toy_corpus):
        g = build_multigraph(toy_corpus.records, toy_corpus.n)
        indeg, outdeg = degree_arrays(g)
        assert indeg.sum() == outdeg.sum() == g.total_edges

    def test_missing_size(self):
        with pytest.raises(KeyError):
            degrees(DirectedGraph(2, frozenset({(0, 1)})), CategorySizeTable({0: 1}))

    def test_frame_columns(self):
        g = DirectedGraph(2, frozenset({(0, 1)}))
        df = degrees_frame(degrees(g, CategorySizeTable({0: 1, 1: 1})), ["x", "y"])
        assert list(df.columns) == ["category", "in", "out", "size", "in_density", "out_density"]
        assert df["category"].tolist() == ["x", "y"]

    def test_histogram_bins(self):
        h = histogram([0, 1, 1, 2.5, 7], BinSpec(2.0))
        assert h.counts == {0.0: 3, 2.0: 1, 6.0: 1}
        assert h.total == 5

    def test_degree_histogram_total(self, toy_corpus):
        g = build_multigraph(toy_corpus.records, toy_corpus.n)
        recs = degrees(g, CategorySizeTable({i: 10 for i in range(g.n)}))
        assert degree_histogram(recs, "out").total == g.n
        assert degree_histogram(recs, "in", "density", BinSpec(0.5)).total == g.n

    def test_bad_bin_width(self):
        with pytest.raises(ValueError):
            BinSpec(0)


if __name__ == '__main__':
    pytest.main([__file__])
