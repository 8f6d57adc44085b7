"""Database models"""

import hashlib
import io
import logging
from pathlib import Path
from typing import Optional

import aiosqlite
import numpy as np

from models.forms import FormPair
from models.reports import Eigenpairs

logger = logging.getLogger(__name__)


def pair_digest(pair: FormPair) -> str:
    """SHA-256 of the stiffness and mass matrices, the inputs of a heat decomposition"""
    digest = hashlib.sha256()
    for matrix in (pair.A, pair.M):
        if matrix is None:
            digest.update(b"identity")
            continue
        csr = matrix.tocsr()
        csr.sort_indices()
        digest.update(np.asarray(csr.shape, dtype=np.int64).tobytes())
        digest.update(csr.indptr.astype(np.int64).tobytes())
        digest.update(csr.indices.astype(np.int64).tobytes())
        digest.update(csr.data.astype(np.float64).tobytes())
    return digest.hexdigest()


def _to_blob(array: np.ndarray) -> bytes:
    buffer = io.BytesIO()
    np.save(buffer, array, allow_pickle=False)
    return buffer.getvalue()


def _from_blob(blob: bytes) -> np.ndarray:
    return np.load(io.BytesIO(blob), allow_pickle=False)


class Database:
    """SQLite database manager"""

    def __init__(self, db_path: Path):
        self.db_path = Path(db_path)
        self.connection: Optional[aiosqlite.Connection] = None

    async def connect(self) -> None:
        """Establish database connection"""
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        self.connection = await aiosqlite.connect(self.db_path)
        self.connection.row_factory = aiosqlite.Row
        await self._create_tables()

    async def disconnect(self) -> None:
        """Close database connection"""
        if self.connection:
            await self.connection.close()
            self.connection = None

    async def _create_tables(self) -> None:
        """Create database tables if they don't exist"""
        async with self.connection.cursor() as cursor:
            await cursor.execute("""
                CREATE TABLE IF NOT EXISTS eigendecompositions (
                    digest TEXT PRIMARY KEY,
                    size INTEGER NOT NULL,
                    eigenvalues BLOB NOT NULL,
                    eigenvectors BLOB NOT NULL,
                    created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
                )
            """)
            await self.connection.commit()


class EigenCacheRepository:
    """Full eigendecompositions keyed by pair digest"""

    def __init__(self, db: Database):
        self.db = db

    async def get(self, digest: str) -> Optional[Eigenpairs]:
        """Get a cached decomposition"""
        async with self.db.connection.cursor() as cursor:
            await cursor.execute(
                "SELECT eigenvalues, eigenvectors FROM eigendecompositions WHERE digest = ?",
                (digest,)
            )
            row = await cursor.fetchone()
        if row is None:
            return None
        logger.debug(f"Eigen cache hit: {digest[:12]}")
        return Eigenpairs(_from_blob(row["eigenvalues"]), _from_blob(row["eigenvectors"]))

    async def put(self, digest: str, eig: Eigenpairs) -> None:
        """Store or replace a decomposition"""
        async with self.db.connection.cursor() as cursor:
            await cursor.execute(
                """
                INSERT OR REPLACE INTO eigendecompositions (digest, size, eigenvalues, eigenvectors)
                VALUES (?, ?, ?, ?)
                """,
                (digest, eig.size, _to_blob(eig.values), _to_blob(eig.vectors))
            )
            await self.db.connection.commit()

    async def delete(self, digest: str) -> None:
        """Delete a decomposition"""
        async with self.db.connection.cursor() as cursor:
            await cursor.execute("DELETE FROM eigendecompositions WHERE digest = ?", (digest,))
            await self.db.connection.commit()

    async def count(self) -> int:
        async with self.db.connection.cursor() as cursor:
            await cursor.execute("SELECT COUNT(*) FROM eigendecompositions")
            row = await cursor.fetchone()
        return int(row[0])
