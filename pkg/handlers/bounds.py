"""Bound checks and ratio diagnostics"""

import argparse
import json
import logging
from pathlib import Path
from typing import List, Sequence

import numpy as np

from config import settings
from errors import ConfigError, InvalidParameterError
from handlers.common import Problem, assemble, load_problem
from handlers.router import Router, arg
from models.reports import BirmanSchwingerCheck, BoundReport, RatioTable
from services.assembly_service import assembly_service
from services.bounds_service import bounds_service
from services.potential_service import potential_service
from services.spectral_service import spectral_service
from storage.artifacts import MANIFEST, ArtifactWriter
from utils.grids import parse_grid, parse_numbers
from utils.sweep import SweepRunner

router = Router(name="bounds")
logger = logging.getLogger(__name__)

S_GRID = arg("--s", default="0.01:1:log9",
             help="pencil thresholds s (units length^2): one value or a grid (default: 0.01:1:log9)")
ALPHA_GRID = arg("--alpha-grid", default="1:1000:log13",
                 help="couplings alpha (dimensionless): lo:hi:logN, lo:hi:linN or a,b,c (default: 1:1000:log13)")

BOUND_COLUMNS = ("name", "parameter", "lhs", "rhs", "margin", "passed", "ambiguous")


def _require(problem: Problem, metric: bool) -> None:
    if problem.metric != metric:
        wanted = "metric" if metric else "combinatorial"
        raise InvalidParameterError(f"needs a {wanted} graph, got a {problem.graph.kind} one")


async def _write_reports(writer: ArtifactWriter, name: str, key: str, reports: Sequence[BoundReport]) -> None:
    failed = sum(not r.passed for r in reports)
    if failed:
        logger.warning(f"{name}: {failed} of {len(reports)} checks failed")
    else:
        logger.info(f"{name}: all {len(reports)} checks passed")
    rows = [(r.name, r.parameters.get(key), r.lhs, r.rhs, r.margin, r.passed, r.ambiguous) for r in reports]
    await writer.write_json(f"bound_{name}.json", [r.to_dict() for r in reports])
    await writer.write_csv(f"bound_{name}.csv", BOUND_COLUMNS, rows, stdout=False)


@router.command(
    "lower-combinatorial", "n(s, B_V) >= (d + 1)^{-1} nu(g_0 (d + 1) s, V) with an independent-set witness",
    S_GRID,
    arg("--weak-q", type=float, help="also tabulate ||B_V||_{Sigma_q} against ||V||_{l^q_w}"),
    group="bound",
)
async def lower_combinatorial(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    problem = await load_problem(args)
    _require(problem, metric=False)
    s_values = parse_grid(args.s)
    pair = assemble(problem)
    report = spectral_service.pencil_eigenvalues(pair, threshold=min(s_values))
    reports = [bounds_service.lower_bound_combinatorial(problem.graph, problem.potential, s, report, pair)
               for s in s_values]
    await _write_reports(writer, "lower-combinatorial", "s", reports)
    if args.weak_q:
        complete = report if report.complete else spectral_service.pencil_eigenvalues(pair)
        table = bounds_service.weak_class_lower_bound(problem.graph, problem.potential, complete, args.weak_q)
        await writer.write_json("weak_class.json", table.to_dict(), stdout=False)


@router.command(
    "per-edge", "n(lambda, B_{V,e,D}) <= C lambda^{-1/2} eta_V(e)^{1/2} on single edges",
    arg("--edge", help="edge ids, e.g. 0,2 (default: every edge)"),
    arg("--lambda", dest="lam", default="0.01:10:log7",
        help="levels lambda (units length^2): one value or a grid (default: 0.01:10:log7)"),
    arg("--calibrate", type=int, metavar="INSTANCES",
        help="calibrate C on random single-edge instances first"),
    group="bound",
)
async def per_edge(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    problem = await load_problem(args)
    _require(problem, metric=True)
    graph = problem.graph
    edges = [int(e) for e in parse_numbers(args.edge)] if args.edge else range(graph.n_edges)
    constant = None
    if args.calibrate:
        constant = bounds_service.calibrate_edge_constant(np.random.default_rng(settings.seed), args.calibrate)
    reports = [
        bounds_service.per_edge_dirichlet_bound(graph, problem.potential, e, lam, problem.mesh, constant)
        for e in edges for lam in parse_grid(args.lam)
    ]
    await _write_reports(writer, "per-edge", "lambda", reports)


@router.command(
    "bracketing", "max{n(s, pl), n(s, D)} <= n(s, full) <= n(s/2, pl) + n(s/2, D) on one mesh",
    S_GRID, group="bound",
)
async def bracketing(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    problem = await load_problem(args)
    _require(problem, metric=True)
    s_values = parse_grid(args.s)
    pair = assemble(problem)
    split = assembly_service.split_pl_dirichlet(pair, problem.graph)
    level = min(s_values) / 2
    full = spectral_service.pencil_eigenvalues(pair, threshold=level)
    pl = spectral_service.pencil_eigenvalues(split.pl_pair, threshold=level)
    dirichlet = spectral_service.pencil_eigenvalues(split.dirichlet_pair, threshold=level)
    reports = [bounds_service.bracketing_check(problem.graph, problem.potential, s, full, pl, dirichlet)
               for s in s_values]
    await _write_reports(writer, "bracketing", "s", reports)


@router.command(
    "domination", "lambda_n(B_{V,pl}) <= lambda_n(B_{kappa_V}) for every computed n", group="bound",
)
async def domination(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    problem = await load_problem(args)
    _require(problem, metric=True)
    report = bounds_service.domination_check(problem.graph, problem.potential, mesh=problem.mesh)
    await _write_reports(writer, "domination", "compared", [report])


@router.command(
    "lower-metric", "n(s, B_V) >= c' nu(c'' s, eta_V) with an edge-star witness",
    S_GRID, group="bound",
)
async def lower_metric(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    problem = await load_problem(args)
    _require(problem, metric=True)
    s_values = parse_grid(args.s)
    pair = assemble(problem)
    report = spectral_service.pencil_eigenvalues(pair, threshold=min(s_values))
    reports = [bounds_service.metric_lower_bound(problem.graph, problem.potential, s, report, pair)
               for s in s_values]
    await _write_reports(writer, "lower-metric", "s", reports)


@router.command(
    "norm", "||B_V|| >= (2d - 2)^{-1} (l_- / l_+) max eta_V(e)", group="bound",
)
async def norm(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    problem = await load_problem(args)
    _require(problem, metric=True)
    report = bounds_service.norm_lower_bound(problem.graph, problem.potential, pair=assemble(problem))
    await _write_reports(writer, "norm", "eta_max", [report])


async def _write_table(writer: ArtifactWriter, name: str, table: RatioTable) -> None:
    await writer.write_csv(f"{name}.csv", table.columns, table.rows)
    await writer.write_json(f"{name}.json", table.to_dict(), stdout=False)


@router.command(
    "weyl", "W(alpha) = pi N_- / (alpha^{1/2} int sqrt V) per coupling and refinement level",
    ALPHA_GRID,
)
async def weyl(args: argparse.Namespace, writer: ArtifactWriter, runner: SweepRunner) -> None:
    problem = await load_problem(args)
    _require(problem, metric=True)
    alphas = parse_grid(args.alpha_grid)
    tables: List[RatioTable] = []
    for level in range(args.refine + 1):
        mesh = assembly_service.refine(problem.mesh, 2 ** level)
        pair = assemble(problem, mesh)
        sweep = await spectral_service.coupling_sweep(pair, alphas, runner)
        tables.append(bounds_service.weyl_ratio(problem.graph, problem.potential, sweep, mesh, level))
        logger.info(f"Weyl ratios at refinement {level}: {[round(w, 4) for w in tables[-1].column('W')]}")
    table = RatioTable(tables[0].name, tables[0].columns, tuple(row for t in tables for row in t.rows),
                       tables[-1].parameters)
    await _write_table(writer, "weyl", table)


@router.command(
    "rlc", "R(alpha) = N_-(A - alpha V) / (alpha^q ||V||_q^q) with q = D/2 and extra exponents",
    ALPHA_GRID,
    arg("--dimension", type=float, required=True, help="dimension D entering q = D/2"),
    arg("--q", help="extra exponents q, e.g. 1,1.5"),
)
async def rlc(args: argparse.Namespace, writer: ArtifactWriter, runner: SweepRunner) -> None:
    problem = await load_problem(args)
    pair = assemble(problem)
    if problem.metric:
        values = potential_service.eta(problem.graph, problem.potential, problem.mesh)
    else:
        values = problem.potential.values
    sweep = await spectral_service.coupling_sweep(pair, parse_grid(args.alpha_grid), runner)
    extra = parse_numbers(args.q) if args.q else ()
    await _write_table(writer, "rlc", bounds_service.rlc_ratio(values, sweep, args.dimension, extra))


def _load_results(path: Path) -> list:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise ConfigError(f"unreadable result file {path}: {e}", {"path": str(path)})
    items = payload if isinstance(payload, list) else [payload]
    results = []
    for item in items:
        if not isinstance(item, dict):
            continue
        if "margin" in item and "passed" in item:
            results.append(BoundReport(**item))
        elif "equal" in item and "alpha" in item:
            results.append(BirmanSchwingerCheck(**item))
        elif "columns" in item and "rows" in item:
            results.append(RatioTable(item["name"], tuple(item["columns"]),
                                      tuple(tuple(row) for row in item["rows"]), item.get("parameters", {})))
    return results


@router.command(
    "report", "pass / fail / diagnostic summary of the result files in a directory",
    arg("--from", dest="source", required=True, metavar="DIR", help="directory holding earlier outputs"),
)
async def report(args: argparse.Namespace, writer: ArtifactWriter) -> None:
    source = Path(args.source)
    if not source.is_dir():
        raise ConfigError(f"directory not found: {source}", {"path": str(source)})
    results = []
    for path in sorted(source.glob("*.json")):
        if path.name not in (MANIFEST, "summary.json", "error.json"):
            results.extend(_load_results(path))
    summary = bounds_service.summary_manifest(results)
    logger.info(f"Summary: {summary['passed']} passed, {summary['failed']} failed, "
                f"{summary['diagnostics']} diagnostics")
    await writer.write_json("summary.json", summary)
