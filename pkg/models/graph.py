"""Graph data model"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Tuple

import networkx as nx
import numpy as np

VertexId = int
EdgeId = int


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class GraphStructure:
    """Vertices 0..n-1, edges in insertion order, Dirichlet boundary set"""

    n_vertices: int
    edges: np.ndarray
    boundary: FrozenSet[VertexId] = frozenset()
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        edges = _frozen_array(self.edges, np.int64).reshape(-1, 2)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "boundary", frozenset(int(v) for v in self.boundary))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(v) for v in range(self.n_vertices)))

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def incidence(self) -> List[List[EdgeId]]:
        """Edge ids incident to each vertex, in edge order"""
        incident: List[List[EdgeId]] = [[] for _ in range(self.n_vertices)]
        for edge_id, (u, v) in enumerate(self.edges.tolist()):
            incident[u].append(edge_id)
            if v != u:
                incident[v].append(edge_id)
        return incident

    @cached_property
    def degrees(self) -> np.ndarray:
        return _frozen_array([len(edges) for edges in self.incidence], np.int64)

    @cached_property
    def neighbors(self) -> List[List[VertexId]]:
        result: List[List[VertexId]] = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges.tolist():
            result[u].append(v)
            result[v].append(u)
        return result

    @cached_property
    def interior_vertices(self) -> np.ndarray:
        """Non-boundary vertex ids in increasing order"""
        mask = np.ones(self.n_vertices, dtype=bool)
        mask[list(self.boundary)] = False
        return _frozen_array(np.flatnonzero(mask), np.int64)

    @cached_property
    def interior_edges(self) -> np.ndarray:
        """Edges with both endpoints off the boundary"""
        mask = np.ones(self.n_vertices, dtype=bool)
        mask[list(self.boundary)] = False
        keep = mask[self.edges[:, 0]] & mask[self.edges[:, 1]] if self.n_edges else np.zeros(0, dtype=bool)
        return _frozen_array(np.flatnonzero(keep), np.int64)

    @cached_property
    def label_index(self) -> Dict[str, VertexId]:
        return {label: vertex for vertex, label in enumerate(self.labels)}

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_vertices))
        graph.add_edges_from(self.edges.tolist())
        return graph

    def edge_label(self, edge_id: EdgeId) -> str:
        u, v = self.edges[edge_id]
        return f"{self.labels[u]}~{self.labels[v]}"


@dataclass(frozen=True, eq=False)
class CombinatorialGraph(GraphStructure):
    """Weighted combinatorial graph, weights g_e > 0 (units 1/length)"""

    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "weights", _frozen_array(self.weights, np.float64))

    @property
    def kind(self) -> str:
        return "combinatorial"


@dataclass(frozen=True, eq=False)
class MetricGraph(GraphStructure):
    """Metric graph: every edge is an interval of length l_e > 0"""

    lengths: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "lengths", _frozen_array(self.lengths, np.float64))

    @property
    def kind(self) -> str:
        return "metric"

    @property
    def l_minus(self) -> float:
        return float(self.lengths.min())

    @property
    def l_plus(self) -> float:
        return float(self.lengths.max())


@dataclass(frozen=True)
class GraphStats:
    """Degree bound, weight bound and length bounds of a graph"""

    degree_bound: int
    g_zero: float
    l_minus: Optional[float] = None
    l_plus: Optional[float] = None
    degree_histogram: Dict[int, int] = field(default_factory=dict)


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations
