"""Greedy colorings for the lower-bound constructions"""
import logging
from dataclasses import dataclass
from typing import Dict, List

import networkx as nx

from models.graph import EdgeId, GraphStructure, VertexId

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VertexColoring:
    color: Dict[VertexId, int]
    class_count: int

    def classes(self) -> List[List[VertexId]]:
        groups: List[List[VertexId]] = [[] for _ in range(self.class_count)]
        for vertex, c in sorted(self.color.items()):
            groups[c].append(vertex)
        return groups


@dataclass(frozen=True)
class EdgeStarColoring:
    color: Dict[EdgeId, int]
    class_count: int

    def classes(self) -> List[List[EdgeId]]:
        groups: List[List[EdgeId]] = [[] for _ in range(self.class_count)]
        for edge, c in sorted(self.color.items()):
            groups[c].append(edge)
        return groups


def _in_order(order):
    return lambda graph, colors: iter(order)


class ColoringService:
    """Vertex colorings into independent sets, edge colorings into star-disjoint families"""

    @staticmethod
    def greedy_vertex_coloring(graph: GraphStructure) -> VertexColoring:
        """Proper coloring with at most deg_max + 1 classes, vertices taken in id order"""
        color = nx.greedy_color(graph.to_networkx(), strategy=_in_order(range(graph.n_vertices)))
        count = max(color.values()) + 1 if color else 0
        logger.debug(f"Vertex coloring: {graph.n_vertices} vertices in {count} classes")
        return VertexColoring({int(v): int(c) for v, c in color.items()}, count)

    @staticmethod
    def star_conflict_graph(graph: GraphStructure) -> nx.Graph:
        """Edges of the input become vertices; two are joined when their stars intersect.

        S(e) and S(e') intersect iff e' has an endpoint in the closed neighborhood of
        an endpoint of e, so the conflicts of e are the edges incident to that set.
        """
        conflicts = nx.Graph()
        conflicts.add_nodes_from(range(graph.n_edges))
        for edge_id, (u, v) in enumerate(graph.edges.tolist()):
            reach = {u, v, *graph.neighbors[u], *graph.neighbors[v]}
            for w in reach:
                for other in graph.incidence[w]:
                    if other > edge_id:
                        conflicts.add_edge(edge_id, other)
        return conflicts

    def greedy_edge_star_coloring(self, graph: GraphStructure) -> EdgeStarColoring:
        """Star-disjoint classes, at most 2 deg_max^2 + 1 of them, edges in insertion order"""
        conflicts = self.star_conflict_graph(graph)
        color = nx.greedy_color(conflicts, strategy=_in_order(range(graph.n_edges)))
        count = max(color.values()) + 1 if color else 0
        logger.debug(f"Edge-star coloring: {graph.n_edges} edges in {count} classes")
        return EdgeStarColoring({int(e): int(c) for e, c in color.items()}, count)


# Create global instance
coloring_service = ColoringService()
