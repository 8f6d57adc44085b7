import numpy as np
import pytest
import scipy.linalg as la

from errors import InvalidParameterError, MeshTooCoarseError, NotPositiveDefiniteError, WindowError
from models.graph import CombinatorialGraph
from models.potential import VertexPotential
from services.assembly_service import assembly_service
from services.graph_service import graph_service
from services.potential_service import potential_service


def test_single_edge_dirichlet(k2_dirichlet):
    pair = assembly_service.assemble_combinatorial(k2_dirichlet, VertexPotential(np.array([6.0, 0.0])))
    np.testing.assert_allclose(pair.A.toarray(), [[2.0]])
    np.testing.assert_allclose(pair.B.toarray(), [[6.0]])
    assert pair.M is None
    assert pair.provenance["kind"] == "combinatorial"


def test_path_interior_vertex():
    path = CombinatorialGraph(n_vertices=3, edges=np.array([[0, 1], [1, 2]]), boundary=frozenset({0, 2}),
                              weights=np.ones(2))
    pair = assembly_service.assemble_combinatorial(path, potential_service.constant_vertex(path, 1.0))
    np.testing.assert_allclose(pair.A.toarray(), [[2.0]])


def test_lattice_stencil():
    lattice = graph_service.build_lattice(2, 2)
    pair = assembly_service.assemble_combinatorial(lattice, potential_service.constant_vertex(lattice, 1.0))
    assert pair.size == 9
    center = int(pair.dof_map.vertex_dofs[lattice.label_index["0,0"]])
    row = pair.A.toarray()[center]
    assert row[center] == 4.0
    assert sorted(row[np.arange(9) != center].tolist()) == [-1.0] * 4 + [0.0] * 4


def test_window_errors(k2_dirichlet):
    potential = VertexPotential(np.array([1.0, 0.0]))
    with pytest.raises(WindowError):
        assembly_service.assemble_combinatorial(k2_dirichlet, potential, window=[])
    with pytest.raises(NotPositiveDefiniteError):
        assembly_service.assemble_combinatorial(k2_dirichlet, potential, window=[0, 1])


def test_potential_outside_window_is_recorded():
    lattice = graph_service.build_lattice(2, 2)
    values = np.zeros(lattice.n_vertices)
    values[lattice.label_index["2,2"]] = 1.0
    pair = assembly_service.assemble_combinatorial(lattice, VertexPotential(values))
    assert pair.provenance["potential_outside_window"] == 1


def test_fem_dirichlet_ground_state(pi_edge):
    pair = assembly_service.assemble_metric_fem(pi_edge, potential_service.constant_edge(pi_edge, 1.0), (200,))
    lowest = la.eigh(pair.A.toarray(), pair.M.toarray(), eigvals_only=True)[0]
    assert abs(lowest - 1.0) <= 1e-4


def test_fem_refinement_is_second_order(pi_edge):
    potential = potential_service.constant_edge(pi_edge, 1.0)

    def lowest(m):
        pair = assembly_service.assemble_metric_fem(pi_edge, potential, (m,))
        return la.eigh(pair.A.toarray(), pair.M.toarray(), eigvals_only=True)[0]

    coarse, middle, fine = lowest(20), lowest(40), lowest(80)
    assert (coarse - middle) / (middle - fine) == pytest.approx(4.0, rel=0.05)


def test_zero_potential_gives_zero_form(metric_star):
    pair = assembly_service.assemble_metric_fem(metric_star, potential_service.constant_edge(metric_star, 0.0))
    assert pair.B.count_nonzero() == 0


def test_mesh_checks(metric_star, rng):
    potential = potential_service.random_edge(metric_star, rng, samples=9)
    with pytest.raises(InvalidParameterError):
        assembly_service.assemble_metric_fem(metric_star, potential, (1, 8, 8))
    with pytest.raises(MeshTooCoarseError):
        assembly_service.assemble_metric_fem(metric_star, potential, (4, 8, 8))


def test_default_mesh_aligns_with_samples(rng):
    star = graph_service.build_metric_star([1.0, 2.0])
    potential = potential_service.random_edge(star, rng, samples=7)
    mesh = assembly_service.default_mesh(star, potential)
    assert mesh == (66, 132)
    assert assembly_service.refine(mesh) == (132, 264)


def test_split_interpolates_linearly(metric_star):
    pair = assembly_service.assemble_metric_fem(metric_star, potential_service.constant_edge(metric_star, 1.0),
                                                (4, 4, 4))
    split = assembly_service.split_pl_dirichlet(pair, metric_star)
    column = split.pl_basis[:, 0].toarray().ravel()
    for e in range(3):
        np.testing.assert_allclose(column[pair.dof_map.interior_dofs(e)], [0.75, 0.5, 0.25])
    assert split.pl_dimension == 1
    assert split.dirichlet_dimension == 9


def test_split_blocks_are_a_orthogonal(metric_tree, rng):
    potential = potential_service.random_edge(metric_tree, rng, samples=5)
    pair = assembly_service.assemble_metric_fem(metric_tree, potential)
    split = assembly_service.split_pl_dirichlet(pair, metric_tree)
    assert split.cross_max <= 1e-9
    assert split.pl_dimension == metric_tree.interior_vertices.size
    assert split.dirichlet_dimension == sum(m - 1 for m in pair.dof_map.mesh)
    assert split.pl_pair.provenance["mesh_signature"] == pair.mesh_signature


def test_pl_stiffness_is_the_associated_laplacian(metric_tree):
    potential = potential_service.constant_edge(metric_tree, 1.0)
    pair = assembly_service.assemble_metric_fem(metric_tree, potential)
    split = assembly_service.split_pl_dirichlet(pair, metric_tree)
    combinatorial = graph_service.associated_combinatorial(metric_tree)
    reference = assembly_service.assemble_combinatorial(combinatorial, potential_service.constant_vertex(combinatorial, 1.0))
    np.testing.assert_allclose(split.pl_pair.A.toarray(), reference.A.toarray(), atol=1e-12)


def test_edge_dirichlet_pair_keeps_one_edge(metric_star):
    potential = potential_service.constant_edge(metric_star, 2.0)
    pair = assembly_service.edge_dirichlet_pair(metric_star, potential, 1, (16, 16, 16))
    assert pair.size == 15
    assert pair.provenance["subspace"] == "edge-dirichlet"
    assert pair.provenance["edge"] == 1


def test_form_evaluation(k2_dirichlet):
    pair = assembly_service.assemble_combinatorial(k2_dirichlet, VertexPotential(np.array([6.0, 0.0])))
    assert assembly_service.evaluate(pair, np.array([2.0])) == (8.0, 24.0)
