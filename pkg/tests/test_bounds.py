import numpy as np
import pytest

from errors import AssumptionError, PotentialError, ProvenanceMismatchError
from models.potential import EdgePotential, EdgeProfile, VertexPotential
from models.reports import BirmanSchwingerCheck, Count, RatioTable
from services.assembly_service import assembly_service
from services.bounds_service import bounds_service
from services.graph_service import graph_service
from services.potential_service import potential_service
from services.spectral_service import spectral_service


def sine_bump(graph, edges, height=1.0, samples=33):
    chosen = set(edges)
    return potential_service.edge_from_function(
        graph, lambda e, x: (height if e in chosen else 0.0) * np.sin(np.pi * x / graph.lengths[e]) ** 2, samples)


def random_metric_graph(rng):
    graph = graph_service.build_random(12, 4, 6, 2, rng)
    return graph_service.to_metric(graph, rng.uniform(0.5, 1.5, size=graph.n_edges))


# Combinatorial lower bound

def test_zero_potential_passes(random_graph):
    graph = random_graph()
    report = bounds_service.lower_bound_combinatorial(graph, VertexPotential(np.zeros(graph.n_vertices)), 0.1)
    assert report.passed
    assert report.lhs == 0 and report.rhs == 0
    assert report.witness is None


def test_point_potential_on_square_lattice():
    lattice = graph_service.build_lattice(2, 3)
    potential = potential_service.point_vertex(lattice, lattice.label_index["0,0"], 10.0)
    report = bounds_service.lower_bound_combinatorial(lattice, potential, 1.0)
    assert report.parameters["degree_bound"] == 4
    assert report.parameters["nu"] == 1
    assert report.rhs == pytest.approx(0.2)
    assert report.lhs >= 1
    assert report.passed
    assert report.witness["min_quotient"] == pytest.approx(2.5)


def test_random_combinatorial_instances(random_graph, rng):
    for _ in range(30):
        graph = random_graph(n=20, max_degree=5, extra_edges=12, weight_range=(0.5, 2.0))
        potential = potential_service.random_vertex(graph, rng, scale=20.0, density=0.7)
        s = float(rng.uniform(0.05, 1.0))
        report = bounds_service.lower_bound_combinatorial(graph, potential, s)
        assert report.passed, report.to_dict()
        if report.witness is not None:
            assert report.witness["min_pencil"] > s


def test_weak_class_table(random_graph, rng):
    graph = random_graph()
    potential = potential_service.random_vertex(graph, rng, scale=3.0)
    report = spectral_service.pencil_eigenvalues(assembly_service.assemble_combinatorial(graph, potential))
    table = bounds_service.weak_class_lower_bound(graph, potential, report, 1.5)
    assert table.column("ratio")[0] > 0


# Single edges

def test_per_edge_bound_on_pi_interval(pi_edge):
    potential = potential_service.constant_edge(pi_edge, 1.0)
    for lam in (0.3, 0.05, 0.03):
        report = bounds_service.per_edge_dirichlet_bound(pi_edge, potential, 0, lam, mesh=(400,))
        assert report.lhs == np.floor(lam ** -0.5)
        assert report.rhs == pytest.approx(np.pi * lam ** -0.5)
        assert report.passed


def test_per_edge_weyl_ratio_tends_to_one(pi_edge):
    potential = potential_service.constant_edge(pi_edge, 1.0)
    report = bounds_service.per_edge_dirichlet_bound(pi_edge, potential, 0, 1e-3, mesh=(400,))
    assert report.parameters["weyl_ratio"] == pytest.approx(1.0, abs=0.1)


def test_per_edge_zero_potential(pi_edge):
    report = bounds_service.per_edge_dirichlet_bound(pi_edge, potential_service.constant_edge(pi_edge, 0.0), 0, 0.1)
    assert report.lhs == 0 and report.passed
    assert report.parameters["weyl_ratio"] is None


def test_calibrated_constant_covers_random_edges(rng):
    constant = bounds_service.calibrate_edge_constant(rng, instances=10, intervals=32)
    assert np.isfinite(constant) and constant > 0
    edge = graph_service.build_metric_path([2.0])
    potential = potential_service.random_edge(edge, rng, scale=5.0, samples=9)
    report = bounds_service.per_edge_dirichlet_bound(edge, potential, 0, 0.01, mesh=(32,), constant=constant)
    assert report.parameters["constant"] >= constant


# Metric decomposition checks

def test_bracketing_zero_potential(metric_star):
    report = bounds_service.bracketing_check(metric_star, potential_service.constant_edge(metric_star, 0.0), 0.1)
    assert report.passed
    assert (report.parameters["lower"], report.lhs, report.parameters["upper"]) == (0, 0, 0)


def test_bracketing_on_random_star(rng):
    star = graph_service.build_metric_star([1.0, 0.7, 1.3, 0.9])
    potential = potential_service.random_edge(star, rng, scale=30.0, samples=9)
    for s in np.geomspace(1e-3, 1.0, 10):
        report = bounds_service.bracketing_check(star, potential, float(s))
        assert report.passed, report.to_dict()


def test_bracketing_with_interior_support(metric_tree):
    potential = sine_bump(metric_tree, [0], height=50.0)
    for s in (0.01, 0.05, 0.2):
        report = bounds_service.bracketing_check(metric_tree, potential, s)
        assert report.passed, report.to_dict()
        assert report.parameters["lower"] <= report.lhs <= report.parameters["upper"]


def test_bracketing_rejects_mixed_meshes(metric_star):
    potential = potential_service.constant_edge(metric_star, 1.0)
    coarse = assembly_service.assemble_metric_fem(metric_star, potential, (8, 8, 8))
    fine = assembly_service.assemble_metric_fem(metric_star, potential, (16, 16, 16))
    split = assembly_service.split_pl_dirichlet(coarse, metric_star)
    with pytest.raises(ProvenanceMismatchError):
        bounds_service.bracketing_check(
            metric_star, potential, 0.1,
            full=spectral_service.pencil_eigenvalues(fine),
            pl=spectral_service.pencil_eigenvalues(split.pl_pair),
            dirichlet=spectral_service.pencil_eigenvalues(split.dirichlet_pair),
        )


def test_domination_with_edgewise_constants(metric_tree):
    values = np.linspace(0.5, 3.0, metric_tree.n_edges)
    potential = EdgePotential(tuple(EdgeProfile(constant=float(v)) for v in values))
    report = bounds_service.domination_check(metric_tree, potential)
    assert report.passed
    assert report.parameters["compared"] == metric_tree.interior_vertices.size


def test_domination_zero_potential(metric_tree):
    report = bounds_service.domination_check(metric_tree, potential_service.constant_edge(metric_tree, 0.0))
    assert report.passed
    assert report.margin == 0.0


def test_domination_on_random_instances(rng):
    for _ in range(20):
        graph = random_metric_graph(rng)
        potential = potential_service.random_edge(graph, rng, scale=10.0, samples=5)
        mesh = assembly_service.default_mesh(graph, potential, h_fraction=0.125)
        assert bounds_service.domination_check(graph, potential, mesh=mesh).passed


def test_metric_lower_bound_zero_potential(metric_tree):
    report = bounds_service.metric_lower_bound(metric_tree, potential_service.constant_edge(metric_tree, 0.0), 0.1)
    assert report.passed
    assert report.rhs == 0


def test_metric_lower_bound_single_loaded_edge(metric_tree):
    potential = potential_service.restrict_edges(potential_service.constant_edge(metric_tree, 40.0), [0])
    report = bounds_service.metric_lower_bound(metric_tree, potential, 0.5)
    assert report.parameters["nu"] == 1
    assert report.passed
    witness = report.witness
    assert witness["checked_edges"] == [0]
    assert witness["edge_ratios"][0] >= witness["edge_claims"][0]
    assert witness["min_pencil"] > 0.5


def test_metric_lower_bound_on_random_instances(rng):
    for _ in range(20):
        graph = random_metric_graph(rng)
        potential = potential_service.random_edge(graph, rng, scale=40.0, samples=9, edges=graph.interior_edges)
        pair = assembly_service.assemble_metric_fem(
            graph, potential, assembly_service.default_mesh(graph, potential, h_fraction=0.125))
        eta = potential_service.eta(graph, potential, pair.dof_map.mesh)
        stats = graph_service.stats(graph)
        c_second = 2 * (stats.degree_bound - 1) * stats.l_plus / stats.l_minus
        s = float(np.max(eta)) / (2 * c_second)
        report = bounds_service.metric_lower_bound(graph, potential, s, pair=pair)
        assert report.passed, report.to_dict()


def test_metric_lower_bound_needs_branching():
    path = graph_service.build_metric_path([1.0])
    with pytest.raises(AssumptionError):
        bounds_service.metric_lower_bound(path, potential_service.constant_edge(path, 1.0), 0.1)


def test_norm_lower_bound(metric_tree, rng):
    potential = potential_service.random_edge(metric_tree, rng, scale=10.0, samples=5)
    report = bounds_service.norm_lower_bound(metric_tree, potential)
    assert report.passed
    assert report.lhs >= report.rhs > 0


# Ratio diagnostics

def test_rlc_ratio_vanishes_for_zero_potential():
    table = bounds_service.rlc_ratio(np.zeros(5), [(1.0, Count(0)), (10.0, Count(0))], dimension=3.0)
    assert table.column("R_q=1.5") == [0.0, 0.0]


def test_rlc_scaling(random_graph, rng):
    graph = random_graph(n=30, extra_edges=15)
    potential = potential_service.random_vertex(graph, rng, scale=2.0)
    pair = assembly_service.assemble_combinatorial(graph, potential)
    doubled = assembly_service.assemble_combinatorial(graph, potential.scaled(2.0))
    for alpha in (0.5, 2.0, 8.0):
        assert spectral_service.negative_count(pair, alpha) == spectral_service.negative_count(doubled, alpha / 2)
    first = bounds_service.rlc_ratio(potential.values, [(2.0, Count(4))], dimension=2.0)
    second = bounds_service.rlc_ratio(2 * potential.values, [(1.0, Count(4))], dimension=2.0)
    assert first.column("R_q=1")[0] == pytest.approx(second.column("R_q=1")[0])


def test_rlc_ratio_on_cubic_window(rng):
    graph = graph_service.build_lattice(3, 3)
    potential = potential_service.random_vertex(graph, rng, scale=2.0)
    pair = assembly_service.assemble_combinatorial(graph, potential)
    alphas = np.geomspace(1.0, 100.0, 9)
    sweep = [(float(a), spectral_service.negative_count(pair, float(a))) for a in alphas]
    table = bounds_service.rlc_ratio(potential.values, sweep, dimension=3.0)
    ratios = np.array(table.column("R_q=1.5"))
    mass = float(np.sum(potential.values ** 1.5))
    support = np.count_nonzero(potential.values)
    assert np.all(np.isfinite(ratios))
    assert np.all(ratios >= 0)
    assert ratios[0] > 0
    assert np.all(ratios <= support / (alphas ** 1.5 * mass) * (1 + 1e-12))
    assert ratios[-1] < ratios[0]
    assert np.all(np.diff(table.column("n_minus")) >= 0)


def test_weyl_ratio_on_pi_interval(pi_edge):
    potential = potential_service.constant_edge(pi_edge, 1.0)
    pair = assembly_service.assemble_metric_fem(pi_edge, potential, (400,))
    sweep = [(50.0, spectral_service.negative_count(pair, 50.0))]
    table = bounds_service.weyl_ratio(pi_edge, potential, sweep, (400,))
    assert table.column("n_minus") == [7]
    assert table.column("W")[0] == pytest.approx(7 / np.sqrt(50.0))


def test_weyl_ratio_needs_nonzero_potential(pi_edge):
    with pytest.raises(PotentialError):
        bounds_service.weyl_ratio(pi_edge, potential_service.constant_edge(pi_edge, 0.0), [(1.0, Count(0))])


@pytest.mark.slow
def test_weyl_ratio_on_star_at_large_coupling():
    star = graph_service.build_metric_star([1.0] * 5)
    potential = sine_bump(star, range(5))
    mesh = assembly_service.refine(assembly_service.default_mesh(star, potential), 16)
    pair = assembly_service.assemble_metric_fem(star, potential, mesh)
    alpha = 1e4
    table = bounds_service.weyl_ratio(star, potential, [(alpha, spectral_service.negative_count(pair, alpha))], mesh)
    assert table.column("W")[0] == pytest.approx(1.0, abs=0.05)


def test_summary_manifest():
    results = [
        BirmanSchwingerCheck(1.0, 2, 2, True),
        BirmanSchwingerCheck(2.0, 3, 2, False, ambiguous=True),
        RatioTable("weyl", ("alpha", "W"), ((1.0, 0.9),)),
    ]
    summary = bounds_service.summary_manifest(results)
    assert [c["status"] for c in summary["checks"]] == ["pass", "ambiguous", "diagnostic"]
    assert (summary["passed"], summary["failed"], summary["diagnostics"]) == (1, 0, 1)
