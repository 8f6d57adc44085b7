"""Form assembly export"""

import argparse
import logging

from handlers.common import assemble, load_problem
from handlers.router import Router, arg
from models.forms import FormPair
from services.assembly_service import assembly_service
from storage.artifacts import ArtifactWriter

router = Router(name="assembly")
logger = logging.getLogger(__name__)


async def _write_pair(writer: ArtifactWriter, pair: FormPair, prefix: str = "") -> None:
    # stdout carries A alone
    primary = not prefix
    await writer.write_matrix(f"{prefix}A.coo", pair.A, stdout=primary)
    await writer.write_matrix(f"{prefix}B.coo", pair.B, stdout=False)
    if pair.M is not None:
        await writer.write_matrix(f"{prefix}M.coo", pair.M, stdout=False)
    await writer.write_dof_map(f"{prefix}dofs.json", pair.dof_map, stdout=False)


@router.command(
    "assemble", "export A, B (and the FEM mass M) in COO text with the DOF map",
    arg("--split", action="store_true", help="also export the pl and Dirichlet blocks (metric graphs)"),
)
async def assemble_forms(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    problem = await load_problem(args)
    pair = assemble(problem)
    await _write_pair(writer, pair)
    if args.split and problem.metric:
        split = assembly_service.split_pl_dirichlet(pair, problem.graph)
        await _write_pair(writer, split.pl_pair, "pl_")
        await _write_pair(writer, split.dirichlet_pair, "dirichlet_")
        await writer.write_json("split.json", {
            "pl_dimension": split.pl_dimension,
            "dirichlet_dimension": split.dirichlet_dimension,
            "cross_max": split.cross_max,
            "mesh_signature": pair.mesh_signature,
        }, stdout=False)
    elif args.split:
        logger.warning("--split ignored for a combinatorial graph")
