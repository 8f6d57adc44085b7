"""Graph validation, association and builders"""
import itertools
import logging
from collections import Counter
from typing import Iterable, List, Optional, Sequence, Set, Union

import networkx as nx
import numpy as np

from config import settings
from errors import GraphSizeError, GraphValidationError, InvalidParameterError, UnknownIdError
from models.graph import (
    CombinatorialGraph,
    EdgeId,
    GraphStats,
    GraphStructure,
    MetricGraph,
    ValidationReport,
    VertexId,
)

logger = logging.getLogger(__name__)

AnyGraph = Union[CombinatorialGraph, MetricGraph]


class GraphService:
    """Structural checks, stars and builders for combinatorial and metric graphs"""

    def __init__(self, max_vertices: Optional[int] = None):
        self.max_vertices = max_vertices or settings.max_vertices

    # Validation

    def validate(self, graph: AnyGraph) -> ValidationReport:
        """Report every violated structural invariant; never raises"""
        violations: List[str] = []
        edges = graph.edges.tolist()

        out_of_range = [e for e in edges if not (0 <= e[0] < graph.n_vertices and 0 <= e[1] < graph.n_vertices)]
        if out_of_range:
            violations.append(f"edge endpoint out of range: {out_of_range[0]}")
            return ValidationReport(tuple(violations))

        loops = [i for i, (u, v) in enumerate(edges) if u == v]
        if loops:
            violations.append(f"loop at edge {loops[0]}")

        seen: Set[tuple] = set()
        for u, v in edges:
            key = (min(u, v), max(u, v))
            if key in seen:
                violations.append(f"multiple edge ({graph.labels[u]}, {graph.labels[v]})")
                break
            seen.add(key)

        low_degree = [
            v for v in range(graph.n_vertices)
            if graph.degrees[v] < 2 and v not in graph.boundary
        ]
        if low_degree:
            violations.append(f"vertex {graph.labels[low_degree[0]]} has degree {graph.degrees[low_degree[0]]} < 2")

        if graph.n_vertices == 0:
            violations.append("empty graph")
        elif not nx.is_connected(graph.to_networkx()):
            violations.append("not connected")

        if isinstance(graph, CombinatorialGraph):
            if graph.weights.shape != (graph.n_edges,):
                violations.append("weight count differs from edge count")
            elif np.any(~(graph.weights > 0)) or not np.all(np.isfinite(graph.weights)):
                violations.append("nonpositive edge weight")
        else:
            if graph.lengths.shape != (graph.n_edges,):
                violations.append("length count differs from edge count")
            elif np.any(~(graph.lengths > 0)) or not np.all(np.isfinite(graph.lengths)):
                violations.append("nonpositive edge length")

        report = ValidationReport(tuple(violations))
        if not report.passed:
            logger.debug(f"Validation found {len(violations)} violations: {violations}")
        return report

    def ensure_valid(self, graph: AnyGraph) -> AnyGraph:
        report = self.validate(graph)
        if not report.passed:
            raise GraphValidationError("graph violates structural invariants",
                                       {"violations": list(report.violations)})
        return graph

    def stats(self, graph: AnyGraph) -> GraphStats:
        degrees = graph.degrees
        histogram = dict(sorted(Counter(degrees.tolist()).items()))
        if isinstance(graph, MetricGraph):
            return GraphStats(
                degree_bound=int(degrees.max()),
                g_zero=float(1.0 / graph.lengths.min()),
                l_minus=graph.l_minus,
                l_plus=graph.l_plus,
                degree_histogram=histogram,
            )
        return GraphStats(
            degree_bound=int(degrees.max()),
            g_zero=float(graph.weights.max()),
            degree_histogram=histogram,
        )

    # Association and stars

    @staticmethod
    def associated_combinatorial(metric: MetricGraph) -> CombinatorialGraph:
        """Same vertices and edges, weights g_e = 1 / l_e"""
        return CombinatorialGraph(
            n_vertices=metric.n_vertices,
            edges=metric.edges,
            boundary=metric.boundary,
            labels=metric.labels,
            weights=1.0 / metric.lengths,
        )

    @staticmethod
    def star(graph: GraphStructure, vertex: VertexId) -> Set[EdgeId]:
        if not 0 <= vertex < graph.n_vertices:
            raise UnknownIdError(f"unknown vertex id {vertex}", {"vertex": vertex})
        return set(graph.incidence[vertex])

    def edge_star(self, graph: GraphStructure, edge: EdgeId) -> Set[EdgeId]:
        if not 0 <= edge < graph.n_edges:
            raise UnknownIdError(f"unknown edge id {edge}", {"edge": edge})
        u, v = graph.edges[edge]
        return self.star(graph, int(u)) | self.star(graph, int(v))

    @staticmethod
    def stars_intersect(graph: GraphStructure, first: EdgeId, second: EdgeId) -> bool:
        """S(e) and S(e') share an edge iff the edges share a vertex or join adjacent vertices"""
        a = set(graph.edges[first].tolist())
        b = set(graph.edges[second].tolist())
        if a & b:
            return True
        return any(w in b for x in a for w in graph.neighbors[x])

    # Builders

    def build_lattice(self, d: int, radius: int) -> CombinatorialGraph:
        """Box {-radius..radius}^d of Z^d with unit weights; the faces form the boundary"""
        if d < 1 or radius < 1:
            raise InvalidParameterError("lattice needs d >= 1 and radius >= 1", {"d": d, "radius": radius})
        side = 2 * radius + 1
        self._check_size(side ** d)
        coords = list(itertools.product(range(-radius, radius + 1), repeat=d))
        index = {c: i for i, c in enumerate(coords)}
        edges = []
        for c in coords:
            for axis in range(d):
                if c[axis] < radius:
                    n = c[:axis] + (c[axis] + 1,) + c[axis + 1:]
                    edges.append((index[c], index[n]))
        boundary = [i for i, c in enumerate(coords) if any(abs(x) == radius for x in c)]
        labels = tuple(",".join(str(x) for x in c) for c in coords)
        graph = CombinatorialGraph(
            n_vertices=len(coords),
            edges=np.array(edges, dtype=np.int64).reshape(-1, 2),
            boundary=frozenset(boundary),
            labels=labels,
            weights=np.ones(len(edges)),
        )
        logger.info(f"Built Z^{d} lattice window: radius={radius}, vertices={graph.n_vertices}, edges={graph.n_edges}")
        return self.ensure_valid(graph)

    def build_tree(self, branching: int, depth: int) -> CombinatorialGraph:
        """Balanced tree with unit weights; leaves form the boundary"""
        if branching < 2 or depth < 1:
            raise InvalidParameterError("tree needs branching >= 2 and depth >= 1",
                                        {"branching": branching, "depth": depth})
        self._check_size(sum(branching ** k for k in range(depth + 1)))
        tree = nx.balanced_tree(branching, depth)
        edges = sorted((min(u, v), max(u, v)) for u, v in tree.edges())
        leaves = [v for v in tree.nodes() if tree.degree(v) == 1]
        graph = CombinatorialGraph(
            n_vertices=tree.number_of_nodes(),
            edges=np.array(edges, dtype=np.int64),
            boundary=frozenset(leaves),
            weights=np.ones(len(edges)),
        )
        return self.ensure_valid(graph)

    def build_metric_lattice(self, d: int, radius: int, length: float = 1.0) -> MetricGraph:
        lattice = self.build_lattice(d, radius)
        return self.to_metric(lattice, np.full(lattice.n_edges, float(length)))

    def build_metric_star(self, lengths: Sequence[float]) -> MetricGraph:
        """Star K_{1,k}: center 0, leaves 1..k marked boundary"""
        k = len(lengths)
        if k < 2:
            raise InvalidParameterError("metric star needs at least 2 edges", {"edges": k})
        graph = MetricGraph(
            n_vertices=k + 1,
            edges=np.array([(0, i) for i in range(1, k + 1)], dtype=np.int64),
            boundary=frozenset(range(1, k + 1)),
            lengths=np.asarray(lengths, dtype=np.float64),
        )
        return self.ensure_valid(graph)

    def build_metric_path(self, lengths: Sequence[float]) -> MetricGraph:
        """Path with the given edge lengths; both ends marked boundary"""
        k = len(lengths)
        if k < 1:
            raise InvalidParameterError("metric path needs at least one edge")
        graph = MetricGraph(
            n_vertices=k + 1,
            edges=np.array([(i, i + 1) for i in range(k)], dtype=np.int64),
            boundary=frozenset({0, k}),
            lengths=np.asarray(lengths, dtype=np.float64),
        )
        return self.ensure_valid(graph)

    def build_random(
        self,
        n: int,
        max_degree: int,
        extra_edges: int,
        boundary_count: int,
        rng: np.random.Generator,
        weight_range: tuple = (1.0, 1.0),
    ) -> CombinatorialGraph:
        """Hamiltonian cycle plus uniformly sampled chords under a degree cap"""
        if n < 3 or max_degree < 2:
            raise InvalidParameterError("random graph needs n >= 3 and max_degree >= 2")
        self._check_size(n)
        order = rng.permutation(n)
        edges = {tuple(sorted((int(order[i]), int(order[(i + 1) % n])))) for i in range(n)}
        degree = np.full(n, 2)
        attempts = 0
        added = 0
        while added < extra_edges and attempts < 50 * (extra_edges + 1):
            attempts += 1
            u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
            key = (min(u, v), max(u, v))
            if key in edges or degree[u] >= max_degree or degree[v] >= max_degree:
                continue
            edges.add(key)
            degree[u] += 1
            degree[v] += 1
            added += 1
        edge_list = sorted(edges)
        low, high = weight_range
        weights = rng.uniform(low, high, size=len(edge_list)) if high > low else np.full(len(edge_list), low)
        boundary = rng.choice(n, size=min(boundary_count, n - 1), replace=False) if boundary_count else []
        graph = CombinatorialGraph(
            n_vertices=n,
            edges=np.array(edge_list, dtype=np.int64),
            boundary=frozenset(int(v) for v in boundary),
            weights=weights,
        )
        return self.ensure_valid(graph)

    def to_metric(self, graph: GraphStructure, lengths: Iterable[float]) -> MetricGraph:
        metric = MetricGraph(
            n_vertices=graph.n_vertices,
            edges=graph.edges,
            boundary=graph.boundary,
            labels=graph.labels,
            lengths=np.asarray(list(lengths), dtype=np.float64),
        )
        return self.ensure_valid(metric)

    def _check_size(self, count: int) -> None:
        if count > self.max_vertices:
            raise GraphSizeError(f"graph would have {count} vertices, cap is {self.max_vertices}",
                                 {"vertices": count, "cap": self.max_vertices})


# Create global instance
graph_service = GraphService()
