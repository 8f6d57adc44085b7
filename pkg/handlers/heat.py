"""Heat-kernel profiles and dimension fits"""

import argparse
import logging
from typing import Any, Dict, Optional

import numpy as np

from config import settings
from database.models import EigenCacheRepository
from handlers.common import assemble, decompose_cached, load_problem
from handlers.router import Router, arg
from models.reports import DimensionFit
from services.heat_service import heat_service
from storage.artifacts import ArtifactWriter
from utils.grids import parse_grid, parse_window

router = Router(name="heat")
logger = logging.getLogger(__name__)

TIME_GRID = arg("--times", default="0.01:100:log41",
                help="times t (units length^2): lo:hi:logN, lo:hi:linN or a,b,c (default: 0.01:100:log41)")


async def _profile(args: argparse.Namespace, eigen_cache: Optional[EigenCacheRepository]):
    problem = await load_problem(args)
    pair = assemble(problem)
    eig = await decompose_cached(pair, eigen_cache)
    profile = heat_service.heat_profile(eig, parse_grid(args.times), {**pair.provenance, "dofs": pair.size})
    return eig, profile


def _fit_dict(fit: DimensionFit) -> Dict[str, Any]:
    return {"window": list(fit.window), "slope": fit.slope, "dimension": fit.dimension,
            "residual": fit.residual, "points": fit.points}


@router.command(
    "heat", "M(t) = sup_x P(t; x, x) on a time grid, with saturation time and default fits",
    TIME_GRID,
    arg("--checks", action="store_true", help="spot-check log-convexity and diagonal dominance"),
)
async def heat(args: argparse.Namespace, writer: ArtifactWriter,
               eigen_cache: Optional[EigenCacheRepository]) -> None:
    eig, profile = await _profile(args, eigen_cache)
    payload = {
        "saturation_time": profile.saturation_time,
        "fits": [_fit_dict(fit) for fit in profile.fits],
        "provenance": profile.provenance,
        "lambda_1": float(eig.values[0]),
    }
    if args.checks:
        times = profile.times
        payload["checks"] = [
            heat_service.check_log_convexity(eig, float(times[0]), float(times[-1])).to_dict(),
            heat_service.check_diagonal_dominance(eig, np.random.default_rng(settings.seed), times).to_dict(),
        ]
    rows = [(t, m, slope) for (t, m), slope in zip(profile.to_rows(), profile.local_slopes().tolist())]
    await writer.write_csv("heat.csv", ("t", "M", "local_slope"), rows)
    await writer.write_json("heat.json", payload, stdout=False)


@router.command(
    "dimfit", "least-squares slope of log M against log t on a window; dimension = -2 slope",
    TIME_GRID,
    arg("--window", help="fit window lo:hi in time units (default: the saturation-based windows)"),
)
async def dimfit(args: argparse.Namespace, writer: ArtifactWriter,
                 eigen_cache: Optional[EigenCacheRepository]) -> None:
    _, profile = await _profile(args, eigen_cache)
    if args.window:
        fit = heat_service.dimension_fit(profile, parse_window(args.window))
        fits = [_fit_dict(fit)]
        logger.info(f"Fitted dimension {fit.dimension:.6g} on {fit.window}")
    else:
        fits = [_fit_dict(fit) for fit in profile.fits]
    await writer.write_json("dimfit.json", {"saturation_time": profile.saturation_time, "fits": fits})
