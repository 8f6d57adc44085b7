"""Edge and vertex potential aggregates"""

import argparse
import logging

from errors import InvalidParameterError
from handlers.common import Problem, load_problem
from handlers.router import Router, arg
from services.potential_service import potential_service
from storage.artifacts import ArtifactWriter

router = Router(name="potentials")
logger = logging.getLogger(__name__)

ON_MESH = arg("--on-mesh", action="store_true",
              help="integrate with the FEM mesh quadrature instead of the native sample nodes")


def _metric(problem: Problem) -> None:
    if not problem.metric:
        raise InvalidParameterError(f"needs a metric graph, got a {problem.graph.kind} one")


@router.command("eta", "eta_V(e) = l_e * integral of V over e, per edge (units length^2 times units of V)", ON_MESH)
async def eta(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    problem = await load_problem(args)
    _metric(problem)
    graph = problem.graph
    values = potential_service.eta(graph, problem.potential, problem.mesh if args.on_mesh else None)
    rows = [(e, graph.edge_label(e), graph.lengths[e], values[e]) for e in range(graph.n_edges)]
    await writer.write_csv("eta.csv", ("edge", "label", "length", "eta"), rows)


@router.command("kappa", "kappa_V(v) = integral of V over the star of v, per vertex (units length times units of V)", ON_MESH)
async def kappa(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    problem = await load_problem(args)
    _metric(problem)
    graph = problem.graph
    values = potential_service.kappa(graph, problem.potential, problem.mesh if args.on_mesh else None).values
    rows = [(v, graph.labels[v], values[v]) for v in range(graph.n_vertices)]
    await writer.write_csv("kappa.csv", ("vertex", "label", "kappa"), rows)
