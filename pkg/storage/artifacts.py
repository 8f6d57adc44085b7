"""Artifact output: CSV and JSON tables, matrix exports and the checksum manifest"""
import csv
import dataclasses
import hashlib
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import aiofiles
import numpy as np
import scipy.sparse as sp

from models.forms import DofMap

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"


def format_value(value: Any) -> str:
    """Numbers in 17 significant digits, booleans lowercase, None empty"""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    if hasattr(value, "to_dict"):
        return value.to_dict()
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return dataclasses.asdict(value)
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """RFC 4180 text (CRLF line ends)"""
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def json_text(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n"


def coo_text(matrix: sp.spmatrix) -> str:
    """'% rows cols nnz' header, then 'row col value' lines sorted by (row, col)"""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    lines = [f"% {coo.shape[0]} {coo.shape[1]} {coo.nnz}"]
    lines.extend(
        f"{int(coo.row[k])} {int(coo.col[k])} {format_value(coo.data[k])}" for k in order
    )
    return "\n".join(lines) + "\n"


class ArtifactWriter:
    """Writes into an output directory and records every file; without one, writes to stdout"""

    def __init__(self, out_dir: Optional[Path] = None):
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.files: Dict[str, str] = {}
        self.annotations: Dict[str, Any] = {}

    async def write_text(self, name: str, text: str, stdout: bool = True) -> Optional[Path]:
        """Without an output directory only the stdout files are printed; the rest are dropped"""
        if self.out_dir is None:
            if stdout:
                sys.stdout.write(text)
                sys.stdout.flush()
            return None
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / name
        async with aiofiles.open(path, "w", encoding="utf-8", newline="") as f:
            await f.write(text)
        self.files[name] = hashlib.sha256(text.encode("utf-8")).hexdigest()
        logger.debug(f"Wrote {path}")
        return path

    async def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]],
                        stdout: bool = True) -> Optional[Path]:
        return await self.write_text(name, csv_text(header, rows), stdout)

    async def write_json(self, name: str, payload: Any, stdout: bool = True) -> Optional[Path]:
        return await self.write_text(name, json_text(payload), stdout)

    async def write_matrix(self, name: str, matrix: sp.spmatrix, stdout: bool = True) -> Optional[Path]:
        return await self.write_text(name, coo_text(matrix), stdout)

    async def write_dof_map(self, name: str, dof_map: DofMap, stdout: bool = True) -> Optional[Path]:
        return await self.write_json(name, {
            "n_dofs": dof_map.n_dofs,
            "n_vertex_dofs": dof_map.n_vertex_dofs,
            "mesh": list(dof_map.mesh),
            "signature": dof_map.signature,
            "dofs": dof_map.tags(),
        }, stdout)

    def manifest(self, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        files: List[Dict[str, str]] = [
            {"path": name, "sha256": checksum} for name, checksum in sorted(self.files.items())
        ]
        return {"files": files, **(extra or {}), **self.annotations}

    async def write_manifest(self, extra: Optional[Dict[str, Any]] = None) -> Optional[Path]:
        """manifest.json listing every file written so far with its SHA-256"""
        if self.out_dir is None:
            return None
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / MANIFEST
        async with aiofiles.open(path, "w", encoding="utf-8") as f:
            await f.write(json_text(self.manifest(extra)))
        logger.info(f"Manifest lists {len(self.files)} files in {self.out_dir}")
        return path
