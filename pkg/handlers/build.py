"""Graph and potential builders"""

import argparse
import logging

import numpy as np

from config import settings
from handlers.common import load_problem
from handlers.router import Router, arg
from services.graph_service import graph_service
from storage.artifacts import ArtifactWriter
from storage.graph_files import dumps_graph, dumps_potential
from utils.grids import parse_numbers

router = Router(name="build")
logger = logging.getLogger(__name__)

GRAPH_FILE = "graph.txt"
POTENTIAL_FILE = "potential.txt"


async def _write_graph(writer: ArtifactWriter, graph) -> None:
    stats = graph_service.stats(graph)
    logger.info(f"Built {graph.kind} graph: {graph.n_vertices} vertices, {graph.n_edges} edges, "
                f"degree bound {stats.degree_bound}")
    await writer.write_text(GRAPH_FILE, dumps_graph(graph))


@router.command(
    "lattice", "box window {-R..R}^d of Z^d with unit weights, faces as boundary",
    arg("--d", type=int, default=2, help="lattice dimension (default: 2)"),
    arg("--radius", type=int, default=4, help="half side R in lattice steps (default: 4)"),
    group="build", shortcut=True,
)
async def build_lattice(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    await _write_graph(writer, graph_service.build_lattice(args.d, args.radius))


@router.command(
    "tree", "balanced tree with unit weights, leaves as boundary",
    arg("--branching", type=int, default=2, help="children per vertex (default: 2)"),
    arg("--depth", type=int, default=4, help="levels below the root (default: 4)"),
    group="build", shortcut=True,
)
async def build_tree(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    await _write_graph(writer, graph_service.build_tree(args.branching, args.depth))


@router.command(
    "metric-lattice", "Z^d lattice window with equal edge lengths",
    arg("--d", type=int, default=2, help="lattice dimension (default: 2)"),
    arg("--radius", type=int, default=4, help="half side R in lattice steps (default: 4)"),
    arg("--length", type=float, default=1.0, help="edge length (default: 1)"),
    group="build", shortcut=True,
)
async def build_metric_lattice(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    await _write_graph(writer, graph_service.build_metric_lattice(args.d, args.radius, args.length))


@router.command(
    "metric-star", "star K_{1,k}: center 0, leaves as boundary",
    arg("--lengths", required=True, help="comma-separated edge lengths, e.g. 1,1,0.5"),
    group="build", shortcut=True,
)
async def build_metric_star(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    await _write_graph(writer, graph_service.build_metric_star(parse_numbers(args.lengths)))


@router.command(
    "metric-path", "path with the given edge lengths, both ends as boundary",
    arg("--lengths", required=True, help="comma-separated edge lengths, e.g. 1,1,1,1"),
    group="build", shortcut=True,
)
async def build_metric_path(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    await _write_graph(writer, graph_service.build_metric_path(parse_numbers(args.lengths)))


@router.command(
    "random", "random connected graph with a degree cap",
    arg("--n", type=int, default=50, help="vertex count (default: 50)"),
    arg("--max-degree", type=int, default=4, help="degree cap, at least 2 (default: 4)"),
    arg("--extra-edges", type=int, default=25, help="chords added to the spanning cycle (default: 25)"),
    arg("--boundary", type=int, default=5, help="vertices marked boundary (default: 5)"),
    arg("--weights", default="1:1", help="edge weight range lo:hi (default: 1:1)"),
    arg("--metric-lengths", help="length range lo:hi; builds a metric graph when given"),
    group="build", shortcut=True,
)
async def build_random(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    rng = np.random.default_rng(settings.seed)
    low, high = parse_numbers(args.weights.replace(":", ","))
    graph = graph_service.build_random(args.n, args.max_degree, args.extra_edges, args.boundary, rng, (low, high))
    if args.metric_lengths:
        lo, hi = parse_numbers(args.metric_lengths.replace(":", ","))
        graph = graph_service.to_metric(graph, rng.uniform(lo, hi, size=graph.n_edges))
    await _write_graph(writer, graph)


@router.command("potential", "write the potential selected by --potential-gen for --graph", group="build")
async def build_potential(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    problem = await load_problem(args)
    await writer.write_text(POTENTIAL_FILE, dumps_potential(problem.graph, problem.potential))
