import asyncio

import numpy as np
import pytest
import scipy.linalg as la

from config import settings
from errors import IncompleteSpectrumError, InvalidParameterError
from models.potential import VertexPotential
from models.reports import SpectralReport
from services.assembly_service import assembly_service
from services.graph_service import graph_service
from services.linalg import inertia
from services.potential_service import potential_service
from services.spectral_service import SpectralService, spectral_service
from utils.sweep import SweepRunner


def k2_pair(k2_dirichlet):
    return assembly_service.assemble_combinatorial(k2_dirichlet, VertexPotential(np.array([6.0, 0.0])))


def random_pair(graph, rng):
    potential = potential_service.random_vertex(graph, rng, scale=5.0, density=0.6)
    return assembly_service.assemble_combinatorial(graph, potential)


def test_one_by_one_pencil(k2_dirichlet):
    report = spectral_service.pencil_eigenvalues(k2_pair(k2_dirichlet))
    np.testing.assert_allclose(report.eigenvalues, [3.0])
    assert report.complete


def test_vanishing_potential_has_empty_spectrum(k2_dirichlet):
    pair = assembly_service.assemble_combinatorial(k2_dirichlet, VertexPotential(np.zeros(2)))
    report = spectral_service.pencil_eigenvalues(pair)
    assert len(report) == 0
    assert report.count(1.0).value == 0


def test_iterative_matches_dense(random_graph, rng):
    pair = random_pair(random_graph(n=20), rng)
    dense = spectral_service.pencil_eigenvalues(pair)
    settings.dense_limit = 5
    iterative = spectral_service.pencil_eigenvalues(pair, count=4)
    assert iterative.solver == "arpack"
    np.testing.assert_allclose(iterative.eigenvalues, dense.eigenvalues[:4], rtol=1e-8)


def test_threshold_mode_counts_exactly(random_graph, rng):
    pair = random_pair(random_graph(n=40, extra_edges=20), rng)
    full = spectral_service.pencil_eigenvalues(pair)
    s = float(full.eigenvalues[2] + full.eigenvalues[3]) / 2
    partial = spectral_service.pencil_eigenvalues(pair, threshold=s)
    assert partial.valid_above == pytest.approx(s * (1 - settings.count_guard))
    assert partial.count(s) == full.count(s)
    with pytest.raises(IncompleteSpectrumError):
        partial.count(s / 2)


def test_threshold_mode_keeps_the_guard_band(k2_dirichlet):
    s = 3.0 * (1 + 1e-10)
    partial = spectral_service.pencil_eigenvalues(k2_pair(k2_dirichlet), threshold=s)
    np.testing.assert_allclose(partial.eigenvalues, [3.0])
    count = partial.count(s)
    assert count.value == 0 and count.ambiguous


def test_counting_is_strict_with_guard_band():
    report = SpectralReport(np.array([3.0, 1.0, 0.5]))
    assert spectral_service.counting(report, 1.0).value == 1
    assert spectral_service.counting(report, 1.0).ambiguous
    assert spectral_service.counting(report, 10.0).value == 0
    near = SpectralReport(np.array([1.0]))
    count = near.count(0.999999)
    assert count.value == 1 and not count.ambiguous
    with pytest.raises(InvalidParameterError):
        near.count(0.0)


def test_negative_count(k2_dirichlet):
    pair = k2_pair(k2_dirichlet)
    assert spectral_service.negative_count(pair, 0.5).value == 1
    assert spectral_service.negative_count(pair, 0.0).value == 0
    with pytest.raises(InvalidParameterError):
        spectral_service.negative_count(pair, -1.0)


def test_threshold_coupling_is_flagged(k2_dirichlet):
    pair = assembly_service.assemble_combinatorial(k2_dirichlet, VertexPotential(np.array([4.0, 0.0])))
    count = spectral_service.negative_count(pair, 0.5)
    assert count.ambiguous


def test_negative_count_matches_dense_eigenvalues(random_graph, rng):
    for _ in range(10):
        pair = random_pair(random_graph(n=25, extra_edges=12), rng)
        alpha = float(rng.uniform(0.5, 5.0))
        dense = la.eigvalsh((pair.A - alpha * pair.B).toarray())
        assert spectral_service.negative_count(pair, alpha).value == int(np.sum(dense < 0))


def test_sparse_inertia_matches_dense(random_graph, rng):
    pair = random_pair(random_graph(n=60, extra_edges=40), rng)
    matrix = pair.A - 2.0 * pair.B
    assert inertia(matrix, dense_limit=10) == inertia(matrix, dense_limit=10000)


def test_birman_schwinger(k2_dirichlet):
    check = spectral_service.birman_schwinger_check(k2_pair(k2_dirichlet), 0.5)
    assert (check.lhs, check.rhs, check.equal) == (1, 1, True)
    small = spectral_service.birman_schwinger_check(k2_pair(k2_dirichlet), 1e-6)
    assert (small.lhs, small.rhs) == (0, 0)


def test_birman_schwinger_on_random_triples(random_graph, rng):
    for _ in range(30):
        pair = random_pair(random_graph(n=15, extra_edges=8), rng)
        check = spectral_service.birman_schwinger_check(pair, float(rng.uniform(0.1, 10.0)))
        assert check.equal or check.ambiguous


def test_coupling_sweep_keeps_grid_order(random_graph, rng):
    pair = random_pair(random_graph(n=30), rng)
    alphas = [10.0, 0.1, 1.0, 5.0]
    sweep = asyncio.run(spectral_service.coupling_sweep(pair, alphas, SweepRunner(jobs=3)))
    assert [alpha for alpha, _ in sweep] == alphas
    assert [c.value for _, c in sweep] == [spectral_service.negative_count(pair, a).value for a in alphas]


def test_quasi_norms():
    report = SpectralReport(np.array([1.0, 1 / 4, 1 / 9]))
    assert spectral_service.quasi_norms(report, 0.5).weak == pytest.approx(1.0)
    single = SpectralReport(np.array([2.5]))
    assert spectral_service.quasi_norms(single, 0.7).schatten == pytest.approx(2.5)
    n = np.arange(1, 51)
    assert spectral_service.quasi_norms(SpectralReport(n ** -2.0), 1).schatten == pytest.approx(1.6251, abs=1e-4)


def test_trace_identity(random_graph, rng):
    pair = random_pair(random_graph(n=20), rng)
    report = spectral_service.pencil_eigenvalues(pair)
    assert spectral_service.trace_identity(pair, report).relative_error <= 1e-10


def test_edge_dirichlet_eigenvalues(pi_edge):
    pair = assembly_service.edge_dirichlet_pair(pi_edge, potential_service.constant_edge(pi_edge, 1.0), 0, (400,))
    report = spectral_service.pencil_eigenvalues(pair, count=5)
    k = np.arange(1, 6)
    np.testing.assert_allclose(report.eigenvalues, 1.0 / k ** 2, rtol=1e-3)


def test_edge_dirichlet_scaling():
    edge = graph_service.build_metric_path([1.0])
    pair = assembly_service.edge_dirichlet_pair(edge, potential_service.constant_edge(edge, 3.0), 0, (400,))
    report = spectral_service.pencil_eigenvalues(pair, count=3)
    k = np.arange(1, 4)
    np.testing.assert_allclose(report.eigenvalues, 3.0 / (k * np.pi) ** 2, rtol=1e-3)


def test_enlarging_the_window_is_monotone():
    small = graph_service.build_lattice(2, 3)
    large = graph_service.build_lattice(2, 5)
    reports = []
    for graph in (small, large):
        values = np.zeros(graph.n_vertices)
        for label in ("0,0", "1,0", "0,1", "-1,-1"):
            values[graph.label_index[label]] = 2.0
        pair = assembly_service.assemble_combinatorial(graph, VertexPotential(values))
        reports.append(spectral_service.pencil_eigenvalues(pair))
    n = len(reports[0])
    assert np.all(reports[1].eigenvalues[:n] >= reports[0].eigenvalues[:n] - 1e-12)


def test_seed_is_recorded(k2_dirichlet):
    report = SpectralService(seed=7).pencil_eigenvalues(k2_pair(k2_dirichlet))
    assert report.seed == 7


def random_metric_pair(rng, n=12):
    graph = graph_service.build_random(n, 4, n // 2, 2, rng)
    graph = graph_service.to_metric(graph, rng.uniform(0.5, 1.5, size=graph.n_edges))
    potential = potential_service.random_edge(graph, rng, scale=10.0, samples=5)
    mesh = assembly_service.default_mesh(graph, potential, h_fraction=0.125)
    return graph, assembly_service.assemble_metric_fem(graph, potential, mesh)


def test_birman_schwinger_on_metric_graphs(rng):
    for _ in range(10):
        _, pair = random_metric_pair(rng)
        report = spectral_service.pencil_eigenvalues(pair)
        for alpha in (0.5, 5.0, 50.0, 500.0):
            check = spectral_service.birman_schwinger_check(pair, alpha, report)
            assert check.equal or check.ambiguous, check


def test_sparse_inertia_on_metric_forms(rng):
    _, pair = random_metric_pair(rng, n=10)
    for alpha in (5.0, 50.0, 500.0):
        matrix = pair.A - alpha * pair.B
        sparse = inertia(matrix, dense_limit=10)
        assert sparse == inertia(matrix, dense_limit=10000)
        assert sparse.negative == int(np.sum(la.eigvalsh(matrix.toarray()) < 0))


def test_negative_count_grows_with_coupling(random_graph, rng):
    alphas = np.geomspace(0.01, 1000.0, 25)
    combinatorial = random_pair(random_graph(n=30, extra_edges=15), rng)
    _, metric = random_metric_pair(rng)
    for pair in (combinatorial, metric):
        counts = [spectral_service.negative_count(pair, float(a)).value for a in alphas]
        assert all(np.diff(counts) >= 0)
        assert counts[-1] > counts[0]


def test_split_blocks_lie_below_the_full_pencil(metric_tree, rng):
    potential = potential_service.random_edge(metric_tree, rng, scale=10.0, samples=5)
    mesh = assembly_service.default_mesh(metric_tree, potential, h_fraction=0.125)
    pair = assembly_service.assemble_metric_fem(metric_tree, potential, mesh)
    split = assembly_service.split_pl_dirichlet(pair, metric_tree)
    full = spectral_service.pencil_eigenvalues(pair).eigenvalues
    for block in (split.pl_pair, split.dirichlet_pair):
        restricted = spectral_service.pencil_eigenvalues(block).eigenvalues
        assert restricted.size <= full.size
        assert np.all(restricted <= full[:restricted.size] * (1 + 1e-8) + 1e-12)
