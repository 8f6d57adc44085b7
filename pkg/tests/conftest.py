import numpy as np
import pytest

from config import settings
from models.graph import CombinatorialGraph, MetricGraph
from services.graph_service import graph_service


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path):
    """Logs under the test directory; command-line overrides never leak between tests"""
    snapshot = settings.model_dump()
    settings.log_dir = tmp_path / "logs"
    settings.cache = None
    yield settings
    for name, value in snapshot.items():
        setattr(settings, name, value)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def random_graph(rng):
    """Factory of random connected graphs with a degree cap and a few boundary vertices"""

    def factory(n=20, max_degree=4, extra_edges=10, boundary_count=3, weight_range=(1.0, 1.0)):
        return graph_service.build_random(n, max_degree, extra_edges, boundary_count, rng, weight_range)

    return factory


@pytest.fixture
def k2_dirichlet():
    """Single edge a-b with g = 2, b on the boundary"""
    return CombinatorialGraph(n_vertices=2, edges=np.array([[0, 1]]), boundary=frozenset({1}),
                              labels=("a", "b"), weights=np.array([2.0]))


@pytest.fixture
def pi_edge():
    """Interval (0, pi) with Dirichlet ends"""
    return MetricGraph(n_vertices=2, edges=np.array([[0, 1]]), boundary=frozenset({0, 1}),
                       lengths=np.array([np.pi]))


@pytest.fixture
def metric_star():
    return graph_service.build_metric_star([1.0, 1.0, 1.0])


@pytest.fixture
def metric_tree():
    """Binary tree of depth 3 with unit edges; leaves on the boundary, inner degree 3"""
    tree = graph_service.build_tree(2, 3)
    return graph_service.to_metric(tree, np.ones(tree.n_edges))
