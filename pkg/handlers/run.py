"""Experiment runner"""

import argparse
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from config import settings
from database.models import EigenCacheRepository
from errors import ConfigError
from handlers.build import GRAPH_FILE, POTENTIAL_FILE
from handlers.common import DEFAULT_POTENTIAL
from handlers.router import Router, arg
from models.experiment import load_experiment, options_argv
from storage.artifacts import ArtifactWriter
from utils.sweep import SweepRunner

router = Router(name="run")
logger = logging.getLogger(__name__)


async def _dispatch(parser: argparse.ArgumentParser, argv: List[str], data: Dict[str, Any]) -> None:
    logger.info(f"Running: {' '.join(argv)}")
    args = parser.parse_args(argv)
    await args.command(args, data)


@router.command(
    "run", "run every operation of a TOML experiment into one output directory",
    arg("--config", required=True, metavar="FILE", help="experiment TOML file"),
)
async def run(args: argparse.Namespace, parser: argparse.ArgumentParser, writer: ArtifactWriter,
              runner: SweepRunner, eigen_cache: Optional[EigenCacheRepository]) -> None:
    config = load_experiment(args.config)
    for name in ("seed", "jobs", "rtol"):
        if getattr(args, name) is None and getattr(config, name) is not None:
            setattr(settings, name, getattr(config, name))
    runner.jobs = settings.jobs
    writer.annotations.update(seed=settings.seed, jobs=settings.jobs, rtol=settings.rtol)
    if writer.out_dir is None:
        if config.output is None:
            raise ConfigError("an experiment needs --out or an output entry", {"path": str(args.config)})
        writer.out_dir = config.output
    writer.annotations["experiment"] = config.model_dump(mode="json")
    data = {"writer": writer, "runner": runner, "eigen_cache": eigen_cache}

    if config.graph.builder is not None:
        await _dispatch(parser, [config.graph.builder, *options_argv(config.graph.options)], data)
        graph = writer.out_dir / GRAPH_FILE
    else:
        graph = config.graph.file

    if config.potential.file is not None:
        potential = config.potential.file
    else:
        build_args = ["build", "potential", "--graph", str(graph),
                      "--potential-gen", config.potential.gen or DEFAULT_POTENTIAL]
        if config.rule is not None:
            build_args.extend(["--rule", config.rule])
        await _dispatch(parser, build_args, data)
        potential = writer.out_dir / POTENTIAL_FILE

    shared = config.shared_argv(Path(graph), Path(potential))
    for operation in config.operations:
        await _dispatch(parser, [*operation.argv(), *shared], data)
    logger.info(f"Experiment finished: {len(config.operations)} operations, {len(writer.files)} files")
