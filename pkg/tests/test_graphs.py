import numpy as np
import pytest

from errors import GraphSizeError, GraphValidationError, InvalidParameterError, UnknownIdError
from models.graph import CombinatorialGraph, MetricGraph
from services.graph_service import GraphService, graph_service


def path_graph(n, boundary):
    return CombinatorialGraph(n_vertices=n, edges=np.array([(i, i + 1) for i in range(n - 1)]),
                              boundary=frozenset(boundary), weights=np.ones(n - 1))


def test_path_with_boundary_ends_is_valid():
    assert graph_service.validate(path_graph(3, {0, 2})).passed


def test_multiple_edge_is_reported():
    graph = CombinatorialGraph(n_vertices=3, edges=np.array([[0, 1], [0, 1], [1, 2]]),
                               boundary=frozenset({0, 1, 2}), weights=np.ones(3))
    report = graph_service.validate(graph)
    assert any("multiple edge" in v for v in report.violations)


def test_disjoint_triangles_are_not_connected():
    edges = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]
    graph = CombinatorialGraph(n_vertices=6, edges=np.array(edges), weights=np.ones(6))
    report = graph_service.validate(graph)
    assert "not connected" in report.violations


def test_low_degree_interior_vertex_and_bad_weight():
    graph = CombinatorialGraph(n_vertices=3, edges=np.array([[0, 1], [1, 2]]),
                               boundary=frozenset({0}), weights=np.array([1.0, -1.0]))
    report = graph_service.validate(graph)
    assert not report.passed
    assert any("degree" in v for v in report.violations)
    assert "nonpositive edge weight" in report.violations
    with pytest.raises(GraphValidationError) as excinfo:
        graph_service.ensure_valid(graph)
    assert excinfo.value.details["violations"] == list(report.violations)


def test_loop_is_reported():
    graph = CombinatorialGraph(n_vertices=2, edges=np.array([[0, 0], [0, 1]]),
                               boundary=frozenset({0, 1}), weights=np.ones(2))
    assert any("loop" in v for v in graph_service.validate(graph).violations)


def test_associated_combinatorial_inverts_lengths():
    metric = graph_service.build_metric_path([0.25, 4.0])
    combinatorial = graph_service.associated_combinatorial(metric)
    np.testing.assert_allclose(combinatorial.weights, [4.0, 0.25])
    np.testing.assert_array_equal(combinatorial.edges, metric.edges)
    assert combinatorial.boundary == metric.boundary
    assert graph_service.stats(metric).g_zero == 4.0
    assert graph_service.stats(combinatorial).g_zero == 4.0


def test_unit_and_half_lengths():
    half = graph_service.associated_combinatorial(graph_service.build_metric_path([0.5]))
    unit = graph_service.associated_combinatorial(graph_service.build_metric_path([1.0]))
    assert half.weights[0] == 2.0
    assert unit.weights[0] == 1.0


def test_stars():
    star = graph_service.build_metric_star([1.0, 1.0, 1.0])
    assert graph_service.star(star, 0) == {0, 1, 2}

    path = path_graph(4, {0, 3})
    assert graph_service.edge_star(path, 1) == {0, 1, 2}

    cycle = CombinatorialGraph(n_vertices=4, edges=np.array([[0, 1], [1, 2], [2, 3], [3, 0]]),
                               weights=np.ones(4))
    assert graph_service.edge_star(cycle, 0) == {0, 1, 3}


def test_star_of_unknown_vertex():
    with pytest.raises(UnknownIdError):
        graph_service.star(path_graph(3, {0, 2}), 7)


def test_stars_intersect_through_adjacent_endpoints():
    path = path_graph(5, {0, 4})
    assert graph_service.stars_intersect(path, 0, 2)
    assert not graph_service.stars_intersect(path, 0, 3)


def test_lattice_counts():
    cube = graph_service.build_lattice(3, 2)
    assert cube.n_vertices == 125
    interior_degrees = cube.degrees[cube.interior_vertices]
    assert set(interior_degrees.tolist()) == {6}

    line = graph_service.build_lattice(1, 1)
    assert line.n_vertices == 3
    assert line.n_edges == 2
    assert line.boundary == frozenset({0, 2})
    assert line.labels == ("-1", "0", "1")


def test_tree_counts():
    tree = graph_service.build_tree(2, 3)
    assert tree.n_vertices == 15
    assert len(tree.boundary) == 8


def test_metric_builders():
    star = graph_service.build_metric_star([1.0, 2.0, 0.5])
    assert isinstance(star, MetricGraph)
    assert star.l_minus == 0.5 and star.l_plus == 2.0
    lattice = graph_service.build_metric_lattice(2, 2, length=0.5)
    assert np.all(lattice.lengths == 0.5)


def test_builder_parameters_are_checked():
    with pytest.raises(InvalidParameterError):
        graph_service.build_lattice(0, 3)
    with pytest.raises(InvalidParameterError):
        graph_service.build_metric_star([1.0])
    with pytest.raises(GraphSizeError):
        GraphService(max_vertices=100).build_lattice(3, 3)


def test_random_graphs_respect_degree_cap(random_graph):
    for _ in range(10):
        graph = random_graph(n=30, max_degree=5, extra_edges=20)
        assert graph_service.validate(graph).passed
        assert graph.degrees.max() <= 5
        assert len(graph.boundary) == 3
