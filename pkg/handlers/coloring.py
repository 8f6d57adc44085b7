"""Coloring handlers"""

import argparse
import logging

from handlers.common import load_graph
from handlers.router import Router, arg
from services.coloring_service import coloring_service
from storage.artifacts import ArtifactWriter

router = Router(name="coloring")
logger = logging.getLogger(__name__)


@router.command(
    "color", "greedy vertex coloring (independent classes) or edge-star coloring (star-disjoint classes)",
    arg("target", choices=("vertices", "edge-stars"), help="what to color"),
)
async def color(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    graph = await load_graph(args)
    if args.target == "vertices":
        coloring = coloring_service.greedy_vertex_coloring(graph)
        rows = [(v, graph.labels[v], c) for v, c in sorted(coloring.color.items())]
        await writer.write_csv("coloring_vertices.csv", ("vertex", "label", "class"), rows)
    else:
        coloring = coloring_service.greedy_edge_star_coloring(graph)
        rows = [(e, graph.edge_label(e), c) for e, c in sorted(coloring.color.items())]
        await writer.write_csv("coloring_edge_stars.csv", ("edge", "label", "class"), rows)
    logger.info(f"{args.target} coloring uses {coloring.class_count} classes")
