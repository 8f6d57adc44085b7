"""Quadratic-form assembly for combinatorial and metric graphs"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from config import settings
from errors import InvalidParameterError, MeshTooCoarseError, PotentialError, UnknownIdError, WindowError
from models.forms import DofMap, FormPair, Splitting
from models.graph import CombinatorialGraph, MetricGraph
from models.potential import EdgePotential, VertexPotential
from services.linalg import certify_positive_definite

logger = logging.getLogger(__name__)


class _Triplets:
    """COO accumulator that drops entries touching Dirichlet (-1) DOFs"""

    def __init__(self):
        self.rows: List[np.ndarray] = []
        self.cols: List[np.ndarray] = []
        self.vals: List[np.ndarray] = []

    def add(self, rows: np.ndarray, cols: np.ndarray, vals: np.ndarray) -> None:
        keep = (rows >= 0) & (cols >= 0)
        self.rows.append(rows[keep])
        self.cols.append(cols[keep])
        self.vals.append(vals[keep])

    def add_local(self, left: np.ndarray, right: np.ndarray, aa, ab, bb) -> None:
        """Add a batch of symmetric 2x2 interval matrices [[aa, ab], [ab, bb]]"""
        self.add(left, left, np.broadcast_to(aa, left.shape).astype(np.float64))
        self.add(right, right, np.broadcast_to(bb, left.shape).astype(np.float64))
        self.add(left, right, np.broadcast_to(ab, left.shape).astype(np.float64))
        self.add(right, left, np.broadcast_to(ab, left.shape).astype(np.float64))

    def matrix(self, n: int) -> sp.csr_matrix:
        if not self.rows:
            return sp.csr_matrix((n, n))
        return sp.coo_matrix(
            (np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(n, n),
        ).tocsr()


class AssemblyService:
    """Builds (A, B[, M]) form pairs and the piecewise-linear / Dirichlet splitting"""

    # Meshes

    @staticmethod
    def default_mesh(
        graph: MetricGraph,
        potential: Optional[EdgePotential] = None,
        h_fraction: Optional[float] = None,
        min_intervals: Optional[int] = None,
    ) -> Tuple[int, ...]:
        """m_e = max(min_intervals, ceil(l_e / h_target)), h_target = h_fraction * l_minus.

        Sampled edges get a multiple of their sample intervals so the samples are mesh nodes.
        """
        h_fraction = h_fraction or settings.mesh_h_fraction
        min_intervals = min_intervals or settings.mesh_min_intervals
        h_target = h_fraction * graph.l_minus
        mesh = []
        for e, length in enumerate(graph.lengths):
            m = max(min_intervals, math.ceil(float(length) / h_target - 1e-9))
            if potential is not None and not potential.profiles[e].is_constant:
                step = potential.profiles[e].sample_count - 1
                m = step * math.ceil(m / step)
            mesh.append(int(m))
        return tuple(mesh)

    @staticmethod
    def refine(mesh: Sequence[int], factor: int = 2) -> Tuple[int, ...]:
        return tuple(int(m) * factor for m in mesh)

    # Combinatorial graphs

    def assemble_combinatorial(
        self,
        graph: CombinatorialGraph,
        potential: VertexPotential,
        window: Optional[Sequence[int]] = None,
    ) -> FormPair:
        """A[u] = sum_e g_e |u(v) - u(v')|^2 with zero exterior values; B = diag(V) on the window"""
        if potential.values.shape != (graph.n_vertices,):
            raise PotentialError("vertex potential does not match the graph",
                                 {"values": int(potential.values.size), "vertices": graph.n_vertices})
        window = graph.interior_vertices if window is None else np.unique(np.asarray(window, dtype=np.int64))
        if window.size == 0:
            raise WindowError("window is empty")
        if window.min() < 0 or window.max() >= graph.n_vertices:
            raise UnknownIdError("window references unknown vertices")

        u, v = graph.edges[:, 0], graph.edges[:, 1]
        n = graph.n_vertices
        adjacency = sp.coo_matrix(
            (np.concatenate((graph.weights, graph.weights)), (np.concatenate((u, v)), np.concatenate((v, u)))),
            shape=(n, n),
        ).tocsr()
        laplacian = sp.diags(np.asarray(adjacency.sum(axis=1)).ravel()) - adjacency
        A = laplacian.tocsr()[window][:, window].tocsr()
        B = sp.diags(potential.values[window]).tocsr()

        outside = np.setdiff1d(np.flatnonzero(potential.values), window)
        certify_positive_definite(A, "A")
        dof_map = DofMap.for_window(n, window)
        logger.debug(f"Assembled combinatorial pair: {window.size} DOFs, {graph.n_edges} edges")
        return FormPair(A, B, dof_map, provenance={
            "kind": "combinatorial",
            "window_size": int(window.size),
            "mesh_signature": dof_map.signature,
            "potential_outside_window": int(outside.size),
        })

    # Metric graphs

    def assemble_metric_fem(
        self,
        graph: MetricGraph,
        potential: EdgePotential,
        mesh: Optional[Sequence[int]] = None,
    ) -> FormPair:
        """P1 elements per edge; continuity through shared vertex DOFs, Kirchhoff is natural.

        A is the exact stiffness of piecewise-linear functions, M the consistent mass
        matrix, B the quadrature (trapezoid or Simpson) of V against hat products.
        """
        if len(potential) != graph.n_edges:
            raise PotentialError("edge potential does not match the graph",
                                 {"potential_edges": len(potential), "graph_edges": graph.n_edges})
        mesh = self.default_mesh(graph, potential) if mesh is None else tuple(int(m) for m in mesh)
        if len(mesh) != graph.n_edges:
            raise InvalidParameterError("mesh must give an interval count for every edge")
        for e, m in enumerate(mesh):
            if m < 2:
                raise InvalidParameterError(f"edge {e} mesh has {m} < 2 intervals", {"edge": e, "intervals": m})
            profile = potential.profiles[e]
            if not profile.is_constant and m < profile.sample_count - 1:
                raise MeshTooCoarseError(
                    f"edge {e}: {m} intervals cannot resolve {profile.sample_count} samples",
                    {"edge": e, "intervals": m, "samples": profile.sample_count},
                )

        dof_map = DofMap.for_window(graph.n_vertices, graph.interior_vertices, mesh)
        n = dof_map.n_dofs
        if n == 0:
            raise WindowError("metric graph has no degrees of freedom")
        stiffness, mass, pot = _Triplets(), _Triplets(), _Triplets()

        for e, ((u, v), length, m) in enumerate(zip(graph.edges.tolist(), graph.lengths, mesh)):
            length = float(length)
            h = length / m
            nodes = np.concatenate((
                [dof_map.vertex_dofs[u]],
                dof_map.interior_dofs(e),
                [dof_map.vertex_dofs[v]],
            )).astype(np.int64)
            left, right = nodes[:-1], nodes[1:]
            stiffness.add_local(left, right, 1.0 / h, -1.0 / h, 1.0 / h)
            mass.add_local(left, right, h / 3.0, h / 6.0, h / 3.0)

            profile = potential.profiles[e]
            x = np.linspace(0.0, length, m + 1)
            values = profile.evaluate(length, x)
            if potential.rule == "trapezoid":
                weights = np.full(m + 1, h)
                weights[[0, -1]] = h / 2
                pot.add(nodes, nodes, weights * values)
            else:
                mid = profile.evaluate(length, (x[:-1] + x[1:]) / 2)
                pot.add_local(left, right, h / 6 * (values[:-1] + mid), h / 6 * mid, h / 6 * (values[1:] + mid))

        A, M, B = stiffness.matrix(n), mass.matrix(n), pot.matrix(n)
        certify_positive_definite(A, "A")
        logger.info(f"Assembled metric FEM pair: {n} DOFs ({dof_map.n_vertex_dofs} vertex), "
                    f"{graph.n_edges} edges, rule={potential.rule}")
        return FormPair(A, B, dof_map, M, provenance={
            "kind": "metric",
            "rule": potential.rule,
            "mesh": list(mesh),
            "mesh_signature": dof_map.signature,
            "subspace": "full",
        })

    def split_pl_dirichlet(self, pair: FormPair, graph: MetricGraph) -> Splitting:
        """Interpolants J(delta_v) span the pl block; interior DOFs span the Dirichlet block"""
        if pair.provenance.get("kind") != "metric":
            raise InvalidParameterError("splitting needs a pair from assemble_metric_fem")
        dof_map = pair.dof_map
        if len(dof_map.mesh) != graph.n_edges:
            raise InvalidParameterError("pair was not assembled on this graph")
        n_vertex = dof_map.n_vertex_dofs
        rows: List[np.ndarray] = [np.arange(n_vertex)]
        cols: List[np.ndarray] = [np.arange(n_vertex)]
        vals: List[np.ndarray] = [np.ones(n_vertex)]
        for e, m in enumerate(dof_map.mesh):
            interior = dof_map.interior_dofs(e)
            k = np.arange(1, m)
            u, v = graph.edges[e]
            u_dof, v_dof = int(dof_map.vertex_dofs[u]), int(dof_map.vertex_dofs[v])
            if u_dof >= 0:
                rows.append(interior)
                cols.append(np.full(m - 1, u_dof))
                vals.append(1.0 - k / m)
            if v_dof >= 0:
                rows.append(interior)
                cols.append(np.full(m - 1, v_dof))
                vals.append(k / m)
        P = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dof_map.n_dofs, n_vertex),
        ).tocsr()
        dirichlet = dof_map.interior_dofs()

        parent = pair.mesh_signature
        A_pl = (P.T @ pair.A @ P).tocsr()
        B_pl = (P.T @ pair.B @ P).tocsr()
        M_pl = (P.T @ pair.M @ P).tocsr() if pair.M is not None else None
        pl_map = DofMap.for_window(dof_map.vertex_dofs.size, dof_map.window)
        pl_pair = FormPair(A_pl, B_pl, pl_map, M_pl, {**pair.provenance, "subspace": "pl", "mesh_signature": parent})

        d_map = DofMap.for_window(dof_map.vertex_dofs.size, np.zeros(0, dtype=np.int64), dof_map.mesh)
        d_pair = FormPair(
            pair.A[dirichlet][:, dirichlet].tocsr(),
            pair.B[dirichlet][:, dirichlet].tocsr(),
            d_map,
            pair.M[dirichlet][:, dirichlet].tocsr() if pair.M is not None else None,
            {**pair.provenance, "subspace": "dirichlet", "mesh_signature": parent},
        )
        cross = (P.T @ pair.A)[:, dirichlet]
        cross_max = float(np.max(np.abs(cross.data))) if cross.nnz else 0.0
        logger.debug(f"Split pair: pl={n_vertex}, dirichlet={dirichlet.size}, cross_max={cross_max:.3e}")
        return Splitting(P, dirichlet, pl_pair, d_pair, cross_max)

    def edge_dirichlet_pair(
        self,
        graph: MetricGraph,
        potential: EdgePotential,
        edge: int,
        mesh: Optional[Sequence[int]] = None,
    ) -> FormPair:
        """Forms on H^{1,0}(e): the interval (0, l_e) with zero endpoint values"""
        if not 0 <= edge < graph.n_edges:
            raise UnknownIdError(f"unknown edge id {edge}", {"edge": edge})
        mesh = self.default_mesh(graph, potential) if mesh is None else tuple(mesh)
        single = MetricGraph(
            n_vertices=2,
            edges=np.array([[0, 1]]),
            boundary=frozenset({0, 1}),
            lengths=np.array([graph.lengths[edge]]),
        )
        single_potential = EdgePotential((potential.profiles[edge],), potential.rule)
        pair = self.assemble_metric_fem(single, single_potential, (int(mesh[edge]),))
        return FormPair(pair.A, pair.B, pair.dof_map, pair.M,
                        {**pair.provenance, "subspace": "edge-dirichlet", "edge": int(edge)})

    # Form evaluation

    @staticmethod
    def evaluate(pair: FormPair, vector: np.ndarray) -> Tuple[float, float]:
        """(a[u], b[u]) for a coefficient vector in the DOF basis"""
        return float(vector @ (pair.A @ vector)), float(vector @ (pair.B @ vector))

    @staticmethod
    def galerkin(pair: FormPair, basis: sp.spmatrix) -> Tuple[np.ndarray, np.ndarray]:
        """Dense restrictions (P^T A P, P^T B P) to the span of the basis columns"""
        basis = sp.csr_matrix(basis)
        return (basis.T @ pair.A @ basis).toarray(), (basis.T @ pair.B @ basis).toarray()


# Create global instance
assembly_service = AssemblyService()
