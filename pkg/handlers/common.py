"""Shared input loading for the subcommands"""
import argparse
import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from config import settings
from database.models import EigenCacheRepository, pair_digest
from errors import InvalidParameterError, UnknownIdError
from models.forms import FormPair
from models.graph import CombinatorialGraph, MetricGraph
from models.potential import EdgePotential, VertexPotential
from models.reports import Eigenpairs
from services.assembly_service import assembly_service
from services.heat_service import heat_service
from services.potential_service import potential_service
from storage.graph_files import STDIO, read_graph, read_potential

logger = logging.getLogger(__name__)

AnyGraph = Union[CombinatorialGraph, MetricGraph]
AnyPotential = Union[VertexPotential, EdgePotential]

DEFAULT_POTENTIAL = "constant:1"
DEFAULT_SAMPLES = 33


def common_parser() -> argparse.ArgumentParser:
    """Flags shared by every subcommand"""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--graph", default=STDIO, metavar="PATH",
                        help="graph file, '-' for stdin (default: -)")
    parser.add_argument("--potential", metavar="PATH", help="potential file (vpot / epot records)")
    parser.add_argument("--potential-gen", metavar="SPEC",
                        help="generated potential: constant:C | point:LABEL:C | random:SCALE[:DENSITY_OR_SAMPLES]"
                             " | sine:C[:SAMPLES]; V in units of 1/length^2 (default: constant:1)")
    parser.add_argument("--out", metavar="DIR", help="output directory with manifest.json (default: stdout)")
    parser.add_argument("--mesh-h", type=float, metavar="FRACTION",
                        help="target FEM mesh width as a fraction of l_minus (default: config mesh_h_fraction)")
    parser.add_argument("--refine", type=int, default=0, metavar="N",
                        help="uniform mesh halvings (weyl: refinement levels 0..N) (default: 0)")
    parser.add_argument("--rule", choices=("trapezoid", "simpson"), help="quadrature rule override")
    parser.add_argument("--seed", type=int, help="seed for random instances and iterative solver starts")
    parser.add_argument("--jobs", type=int, help="worker count for grid sweeps")
    parser.add_argument("--rtol", type=float, help="relative eigenvalue tolerance (dimensionless)")
    return parser


def apply_overrides(args: argparse.Namespace) -> None:
    """Command-line flags win over environment and experiment settings"""
    for name in ("seed", "jobs", "rtol"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(settings, name, value)


@dataclass(frozen=True)
class Problem:
    graph: AnyGraph
    potential: AnyPotential
    mesh: Optional[Tuple[int, ...]] = None

    @property
    def metric(self) -> bool:
        return isinstance(self.graph, MetricGraph)


def generate_potential(spec: str, graph: AnyGraph, rng: np.random.Generator) -> AnyPotential:
    kind, *params = spec.split(":")
    try:
        if isinstance(graph, MetricGraph):
            if kind == "constant" and len(params) == 1:
                return potential_service.constant_edge(graph, float(params[0]))
            if kind == "random" and len(params) in (1, 2):
                samples = int(params[1]) if len(params) == 2 else DEFAULT_SAMPLES
                return potential_service.random_edge(graph, rng, float(params[0]), samples)
            if kind == "sine" and len(params) in (1, 2):
                samples = int(params[1]) if len(params) == 2 else DEFAULT_SAMPLES
                height = float(params[0])
                return potential_service.edge_from_function(
                    graph, lambda e, x: height * np.sin(np.pi * x / graph.lengths[e]) ** 2, samples)
        else:
            if kind == "constant" and len(params) == 1:
                return potential_service.constant_vertex(graph, float(params[0]))
            if kind == "point" and len(params) == 2:
                if params[0] not in graph.label_index:
                    raise UnknownIdError(f"unknown vertex {params[0]!r}", {"vertex": params[0]})
                return potential_service.point_vertex(graph, graph.label_index[params[0]], float(params[1]))
            if kind == "random" and len(params) in (1, 2):
                density = float(params[1]) if len(params) == 2 else 1.0
                return potential_service.random_vertex(graph, rng, float(params[0]), density)
    except ValueError:
        pass
    raise InvalidParameterError(f"bad potential spec for a {graph.kind} graph: {spec}", {"spec": spec})


async def load_graph(args: argparse.Namespace) -> AnyGraph:
    return await read_graph(args.graph)


async def load_problem(args: argparse.Namespace, graph: Optional[AnyGraph] = None) -> Problem:
    """Graph, potential and (metric graphs) the FEM mesh selected by the flags"""
    graph = graph or await load_graph(args)
    if getattr(args, "potential", None):
        potential = await read_potential(args.potential, graph)
    else:
        rng = np.random.default_rng(settings.seed)
        potential = generate_potential(getattr(args, "potential_gen", None) or DEFAULT_POTENTIAL, graph, rng)
    if isinstance(potential, EdgePotential) and getattr(args, "rule", None):
        potential = potential.with_rule(args.rule)
    mesh = None
    if isinstance(graph, MetricGraph):
        mesh = assembly_service.default_mesh(graph, potential, h_fraction=getattr(args, "mesh_h", None))
        if getattr(args, "refine", 0) and args.command.name != "weyl":
            mesh = assembly_service.refine(mesh, 2 ** args.refine)
    logger.info(f"Loaded {graph.kind} graph with {graph.n_vertices} vertices and {graph.n_edges} edges")
    return Problem(graph, potential, mesh)


def assemble(problem: Problem, mesh: Optional[Tuple[int, ...]] = None) -> FormPair:
    if problem.metric:
        return assembly_service.assemble_metric_fem(problem.graph, problem.potential, mesh or problem.mesh)
    return assembly_service.assemble_combinatorial(problem.graph, problem.potential)


async def decompose_cached(pair: FormPair, eigen_cache: Optional[EigenCacheRepository]) -> Eigenpairs:
    """Full eigendecomposition, reused across runs when the cache is configured"""
    if eigen_cache is None:
        return heat_service.decompose(pair)
    digest = pair_digest(pair)
    eig = await eigen_cache.get(digest)
    if eig is None:
        eig = heat_service.decompose(pair)
        await eigen_cache.put(digest, eig)
    return eig
