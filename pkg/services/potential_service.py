"""Potentials and their scalar reductions"""
import logging
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import simpson

from errors import InvalidParameterError, MeshTooCoarseError, PotentialError, QuadratureError
from models.graph import GraphStructure, MetricGraph
from models.potential import EdgePotential, EdgeProfile, SequenceSummary, VertexPotential

logger = logging.getLogger(__name__)

EdgeFunction = Callable[[int, np.ndarray], np.ndarray]


def mesh_quadrature(length: float, intervals: int, rule: str) -> Tuple[np.ndarray, np.ndarray]:
    """Points and weights integrating over [0, length] split into equal intervals.

    Trapezoid uses the mesh nodes; Simpson adds the interval midpoints. The FEM
    potential form uses the same points, so mesh integrals and assembled forms agree.
    """
    h = length / intervals
    nodes = np.linspace(0.0, length, intervals + 1)
    if rule == "trapezoid":
        weights = np.full(intervals + 1, h)
        weights[[0, -1]] = h / 2
        return nodes, weights
    if rule == "simpson":
        node_weights = np.full(intervals + 1, h / 3)
        node_weights[[0, -1]] = h / 6
        midpoints = (nodes[:-1] + nodes[1:]) / 2
        return (np.concatenate((nodes, midpoints)),
                np.concatenate((node_weights, np.full(intervals, 2 * h / 3))))
    raise InvalidParameterError(f"unknown quadrature rule: {rule}")


class PotentialService:
    """Edge integrals eta_V, vertex aggregates kappa_V, distribution functions and quasi-norms"""

    # Quadrature

    @staticmethod
    def edge_integral(
        profile: EdgeProfile,
        length: float,
        rule: str,
        intervals: Optional[int] = None,
        transform: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ) -> float:
        """Integral of transform(V) over one edge, on the native samples or on a FEM mesh"""
        transform = transform or (lambda values: values)
        if intervals is not None:
            if not profile.is_constant and intervals < profile.sample_count - 1:
                raise MeshTooCoarseError(
                    f"mesh of {intervals} intervals is coarser than {profile.sample_count} samples",
                    {"intervals": intervals, "samples": profile.sample_count},
                )
            points, weights = mesh_quadrature(length, intervals, rule)
            return float(np.dot(weights, transform(profile.evaluate(length, points))))
        if profile.is_constant:
            return float(transform(np.array([profile.constant]))[0] * length)
        values = transform(profile.samples)
        dx = length / (values.size - 1)
        if rule == "trapezoid":
            return float(np.trapezoid(values, dx=dx))
        if values.size < 3 or values.size % 2 == 0:
            raise QuadratureError(
                f"Simpson rule needs an odd sample count >= 3, got {values.size}",
                {"samples": int(values.size)},
            )
        return float(simpson(values, dx=dx))

    def integrals(self, graph: MetricGraph, potential: EdgePotential,
                  mesh: Optional[Sequence[int]] = None) -> np.ndarray:
        """Integral of V over each edge"""
        self._check_edges(graph, potential)
        return np.array([
            self.edge_integral(profile, float(length), potential.rule,
                               None if mesh is None else int(mesh[e]))
            for e, (profile, length) in enumerate(zip(potential.profiles, graph.lengths))
        ])

    def eta(self, graph: MetricGraph, potential: EdgePotential,
            mesh: Optional[Sequence[int]] = None) -> np.ndarray:
        """eta_V(e) = l_e * integral of V over e, indexed by edge id"""
        return graph.lengths * self.integrals(graph, potential, mesh)

    def kappa(self, graph: MetricGraph, potential: EdgePotential,
              mesh: Optional[Sequence[int]] = None) -> VertexPotential:
        """kappa_V(v) = integral of V over the star S(v) = sum over e at v of eta_V(e) / l_e"""
        per_edge = self.integrals(graph, potential, mesh)
        values = np.zeros(graph.n_vertices)
        np.add.at(values, graph.edges[:, 0], per_edge)
        np.add.at(values, graph.edges[:, 1], per_edge)
        return VertexPotential(values)

    def sqrt_integral(self, graph: MetricGraph, potential: EdgePotential,
                      mesh: Optional[Sequence[int]] = None) -> float:
        """Integral of sqrt(V) over the whole graph"""
        self._check_edges(graph, potential)
        return float(sum(
            self.edge_integral(profile, float(length), potential.rule,
                               None if mesh is None else int(mesh[e]), transform=np.sqrt)
            for e, (profile, length) in enumerate(zip(potential.profiles, graph.lengths))
        ))

    # Distribution function and quasi-norms

    @staticmethod
    def distribution(values: Iterable[float], tau: float) -> int:
        return SequenceSummary.of(list(values)).distribution(tau)

    @staticmethod
    def quasi_norms(values: Iterable[float], q: float) -> Tuple[float, float]:
        """(l^q norm, weak l^q quasi-norm)"""
        summary = SequenceSummary.of(list(values))
        return summary.lq_norm(q), summary.weak_norm(q)

    # Builders

    @staticmethod
    def constant_vertex(graph: GraphStructure, value: float) -> VertexPotential:
        """value on every non-boundary vertex, zero on the boundary"""
        values = np.zeros(graph.n_vertices)
        values[graph.interior_vertices] = value
        return VertexPotential(values)

    @staticmethod
    def point_vertex(graph: GraphStructure, vertex: int, value: float) -> VertexPotential:
        values = np.zeros(graph.n_vertices)
        values[vertex] = value
        return VertexPotential(values)

    @staticmethod
    def random_vertex(graph: GraphStructure, rng: np.random.Generator,
                      scale: float = 1.0, density: float = 1.0) -> VertexPotential:
        """Uniform values on a random share of the non-boundary vertices"""
        values = np.zeros(graph.n_vertices)
        interior = graph.interior_vertices
        chosen = interior[rng.random(interior.size) < density]
        values[chosen] = rng.uniform(0.0, scale, size=chosen.size)
        return VertexPotential(values)

    @staticmethod
    def constant_edge(graph: MetricGraph, value: float, rule: str = "trapezoid") -> EdgePotential:
        return EdgePotential(tuple(EdgeProfile(constant=value) for _ in range(graph.n_edges)), rule)

    @staticmethod
    def edge_from_function(graph: MetricGraph, func: EdgeFunction, samples: int,
                           rule: str = "trapezoid") -> EdgePotential:
        """Sample func(edge_id, x) on a uniform mesh of each edge"""
        if samples < 2:
            raise PotentialError("an edge needs at least 2 samples")
        profiles = []
        for edge_id, length in enumerate(graph.lengths):
            x = np.linspace(0.0, float(length), samples)
            profiles.append(EdgeProfile(samples=np.asarray(func(edge_id, x), dtype=np.float64)))
        return EdgePotential(tuple(profiles), rule)

    @staticmethod
    def random_edge(graph: MetricGraph, rng: np.random.Generator, scale: float = 1.0,
                    samples: int = 9, edges: Optional[Iterable[int]] = None,
                    rule: str = "trapezoid") -> EdgePotential:
        """Random nonnegative samples on the chosen edges (all by default), zero elsewhere"""
        chosen = set(range(graph.n_edges) if edges is None else (int(e) for e in edges))
        profiles = [
            EdgeProfile(samples=rng.uniform(0.0, scale, size=samples)) if e in chosen
            else EdgeProfile(constant=0.0)
            for e in range(graph.n_edges)
        ]
        return EdgePotential(tuple(profiles), rule)

    @staticmethod
    def restrict_edges(potential: EdgePotential, edges: Iterable[int]) -> EdgePotential:
        keep = set(int(e) for e in edges)
        profiles = tuple(p if e in keep else EdgeProfile(constant=0.0) for e, p in enumerate(potential.profiles))
        return EdgePotential(profiles, potential.rule)

    @staticmethod
    def _check_edges(graph: MetricGraph, potential: EdgePotential) -> None:
        if len(potential) != graph.n_edges:
            raise PotentialError(
                f"potential covers {len(potential)} edges, graph has {graph.n_edges}",
                {"potential_edges": len(potential), "graph_edges": graph.n_edges},
            )


# Create global instance
potential_service = PotentialService()
