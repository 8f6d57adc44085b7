import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import List, Optional

from config import settings
from database.models import Database
from handlers import ROUTERS
from handlers.common import apply_overrides, common_parser
from handlers.router import register
from middlewares.artifacts import ArtifactMiddleware
from storage.artifacts import ArtifactWriter
from utils.logger import setup_logging
from utils.sweep import SweepRunner

logger = logging.getLogger(__name__)

CACHE_FILE = "eigen_cache.db"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectral-lab",
        description="Negative spectrum of -Delta - alpha V on combinatorial and metric graphs",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True, metavar="COMMAND")
    register(ROUTERS, subparsers, [common_parser()])
    return parser


async def main(argv: Optional[List[str]] = None) -> int:
    """Main function"""
    parser = build_parser()
    args = parser.parse_args(argv)
    apply_overrides(args)

    # Setup logging
    setup_logging()
    logger.debug(f"spectral-lab {' '.join(sys.argv[1:] if argv is None else argv)}")

    # Cache database is optional
    db = None
    if settings.cache is not None:
        db = Database(Path(settings.cache) / CACHE_FILE)
        await db.connect()
        logger.info(f"Eigen cache at {db.db_path}")

    writer = ArtifactWriter(Path(args.out) if args.out else None)
    middleware = ArtifactMiddleware(writer, db, SweepRunner(settings.jobs), manifest_extra={
        "command": args.command.name,
        "seed": settings.seed,
        "rtol": settings.rtol,
        "jobs": settings.jobs,
    })
    try:
        return await middleware(args.command, args, {"parser": parser})
    finally:
        if db is not None:
            await db.disconnect()


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
