"""
Pytest configuration and shared fixtures.
"""
import os
import sys
import pytest
import numpy as np

# Repository root on the path so analysis modules import as src.<module>
ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
sys.path.insert(0, ROOT)

from src.graph import DirectedGraph, multigraph_from_pairs
from src.ingest import parse_corpus, read_text

DATA_DIR = os.path.join(ROOT, 'data')


def random_simple_graph(n, p, rng):
    """Directed simple graph with each non-loop pair present with probability p."""
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    return DirectedGraph(n, frozenset((int(u), int(v)) for u, v in zip(*np.nonzero(mask))))


def random_multigraph(n, n_edges, rng):
    """Multigraph with n_edges parallel-allowed non-loop edges drawn uniformly."""
    pairs = []
    while len(pairs) < n_edges:
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        if u != v:
            pairs.append((u, v))
    return multigraph_from_pairs(n, pairs)


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR


@pytest.fixture(scope="session")
def toy_corpus_path():
    return os.path.join(DATA_DIR, 'toy_corpus.csv')


@pytest.fixture(scope="session")
def toy_sizes_path():
    return os.path.join(DATA_DIR, 'toy_sizes.csv')


@pytest.fixture(scope="session")
def toy_vectors_path():
    return os.path.join(DATA_DIR, 'toy_vectors.txt')


@pytest.fixture
def toy_corpus(toy_corpus_path):
    return parse_corpus(read_text(toy_corpus_path))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def chain():
    """a→b→c→d"""
    return DirectedGraph(4, frozenset({(0, 1), (1, 2), (2, 3)}))


@pytest.fixture
def cycle3():
    """a→b→c→a"""
    return DirectedGraph(3, frozenset({(0, 1), (1, 2), (2, 0)}))


@pytest.fixture
def mutual_pair():
    return DirectedGraph(2, frozenset({(0, 1), (1, 0)}))


@pytest.fixture
def sample_config():
    """Small analysis config for fast tests."""
    return {
        "version": "analysis@test",
        "null_models": {"replicates": 20, "swaps_per_edge": 10, "ddof": 0, "n_jobs": 1},
        "roles": {"cap": 100},
    }


@pytest.fixture
def make_simple_graph():
    return random_simple_graph


@pytest.fixture
def make_multigraph():
    return random_multigraph
