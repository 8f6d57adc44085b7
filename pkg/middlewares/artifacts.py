"""Artifact middleware"""

import json
import logging
import sys
from typing import Any, Awaitable, Callable, Dict, Optional

from database.models import Database, EigenCacheRepository
from errors import LabError
from storage.artifacts import ArtifactWriter
from utils.sweep import SweepRunner

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_LAB_ERROR = 2


class ArtifactMiddleware:
    """Injects the writer, eigen cache and sweep runner; turns errors into exit codes"""

    def __init__(self, writer: ArtifactWriter, db: Optional[Database] = None,
                 runner: Optional[SweepRunner] = None, manifest_extra: Optional[Dict[str, Any]] = None):
        self.writer = writer
        self.eigen_cache = EigenCacheRepository(db) if db is not None else None
        self.runner = runner or SweepRunner()
        self.manifest_extra = manifest_extra or {}

    async def __call__(
        self,
        handler: Callable[[Any, Dict[str, Any]], Awaitable[Any]],
        event: Any,
        data: Dict[str, Any]
    ) -> int:
        """Add dependencies to handler data and run it"""
        data["writer"] = self.writer
        data["eigen_cache"] = self.eigen_cache
        data["runner"] = self.runner
        try:
            await handler(event, data)
        except LabError as e:
            logger.error(f"{e.code}: {e.message}")
            payload = e.to_dict()
            sys.stderr.write(json.dumps(payload, sort_keys=True, default=str) + "\n")
            if self.writer.out_dir is not None:
                await self.writer.write_json("error.json", payload)
                await self.writer.write_manifest({**self.manifest_extra, "status": "error"})
            return EXIT_LAB_ERROR
        except Exception as e:
            logger.error(f"Unexpected error: {e}", exc_info=True)
            return EXIT_UNEXPECTED
        await self.writer.write_manifest({**self.manifest_extra, "status": "ok"})
        return EXIT_OK
