"""Pencil spectra, negative-spectrum counts and the Birman-Schwinger check"""

import argparse
import logging

from config import settings
from errors import InvalidParameterError
from handlers.common import Problem, assemble, load_problem
from handlers.router import Router, arg
from models.forms import FormPair
from services.assembly_service import assembly_service
from services.spectral_service import spectral_service
from storage.artifacts import ArtifactWriter
from utils.grids import parse_grid, parse_numbers
from utils.sweep import SweepRunner

router = Router(name="spectra")
logger = logging.getLogger(__name__)

ALPHA_GRID = arg("--alpha-grid", default="0.1:100:log16",
                 help="couplings alpha (dimensionless): lo:hi:logN, lo:hi:linN or a,b,c (default: 0.1:100:log16)")


def select_pair(problem: Problem, subspace: str = "full", edge: int = None) -> FormPair:
    """Full pair, one block of the pl / Dirichlet splitting, or one edge with Dirichlet ends"""
    if subspace != "full" and not problem.metric:
        raise InvalidParameterError(f"subspace {subspace!r} needs a metric graph")
    if subspace == "edge":
        if edge is None:
            raise InvalidParameterError("--subspace edge needs --edge")
        return assembly_service.edge_dirichlet_pair(problem.graph, problem.potential, edge, problem.mesh)
    pair = assemble(problem)
    if subspace == "full":
        return pair
    split = assembly_service.split_pl_dirichlet(pair, problem.graph)
    return split.pl_pair if subspace == "pl" else split.dirichlet_pair


@router.command(
    "eigs", "largest eigenvalues s_n of B u = s A u",
    arg("--count", type=int, help="number of eigenvalues (default: all, dense sizes only)"),
    arg("--threshold", type=float, help="all eigenvalues above this level s (units length^2)"),
    arg("--subspace", choices=("full", "pl", "dirichlet", "edge"), default="full",
        help="form domain (default: full)"),
    arg("--edge", type=int, help="edge id for --subspace edge"),
    arg("--q", help="exponents q for the S_q / Sigma_q estimates, e.g. 0.5,1"),
    arg("--trace", action="store_true", help="compare sum s_n with tr(A^{-1} B) (complete spectra)"),
)
async def eigs(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    problem = await load_problem(args)
    pair = select_pair(problem, args.subspace, args.edge)
    report = spectral_service.pencil_eigenvalues(pair, count=args.count, threshold=args.threshold)
    payload = report.to_dict()
    if args.q:
        payload["quasi_norms"] = {
            str(q): {"schatten": norms.schatten, "weak": norms.weak}
            for q in parse_numbers(args.q)
            for norms in [spectral_service.quasi_norms(report, q)]
        }
    if args.trace:
        payload["trace"] = spectral_service.trace_identity(pair, report)._asdict()
    logger.info(f"{len(report)} eigenvalues, ||B_V|| = {spectral_service.operator_norm(report):.6g}")
    await writer.write_csv("spectrum.csv", ("n", "s_n"),
                           ((n, s) for n, s in enumerate(report.eigenvalues.tolist(), start=1)))
    await writer.write_json("spectrum.json", payload, stdout=False)


@router.command("ninertia", "N_-(A - alpha B) over a coupling grid, from pivot signs", ALPHA_GRID)
async def ninertia(args: argparse.Namespace, writer: ArtifactWriter, runner: SweepRunner) -> None:
    problem = await load_problem(args)
    pair = assemble(problem)
    sweep = await spectral_service.coupling_sweep(pair, parse_grid(args.alpha_grid), runner)
    await writer.write_csv("ninertia.csv", ("alpha", "n_minus", "threshold_coupling"),
                           ((alpha, count.value, count.ambiguous) for alpha, count in sweep))


@router.command(
    "bs-check", "N_-(A - alpha B) against n(1/alpha, B_V) on a coupling grid",
    ALPHA_GRID, aliases=("bs",),
)
async def bs_check(args: argparse.Namespace, writer: ArtifactWriter, runner: SweepRunner) -> None:
    problem = await load_problem(args)
    pair = assemble(problem)
    alphas = parse_grid(args.alpha_grid)
    if pair.size <= settings.dense_limit:
        report = spectral_service.pencil_eigenvalues(pair)
    else:
        report = spectral_service.pencil_eigenvalues(pair, threshold=1.0 / max(alphas))
    checks = await runner.map(lambda alpha: spectral_service.birman_schwinger_check(pair, alpha, report), alphas)
    failed = [c.alpha for c in checks if not c.equal and not c.ambiguous]
    if failed:
        logger.error(f"Birman-Schwinger mismatches at alpha={failed}")
    else:
        logger.info(f"Birman-Schwinger identity holds on {len(checks)} couplings")
    await writer.write_csv("bs_check.csv", ("alpha", "n_minus", "n_pencil", "equal", "ambiguous"), checks)
    await writer.write_json("bs_check.json", [c._asdict() for c in checks], stdout=False)
