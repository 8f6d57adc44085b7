"""Symmetric factorizations and inertia counting"""
import logging
from typing import Optional

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from config import settings
from errors import EigenSolverError, NotPositiveDefiniteError
from models.reports import Inertia

logger = logging.getLogger(__name__)

# Dense fallback cap when the sparse factorization cannot keep a symmetric ordering
DENSE_FALLBACK_CAP = 8000


def _block_pivots(d: np.ndarray) -> np.ndarray:
    """Eigenvalues of the 1x1 / 2x2 block diagonal factor of a Bunch-Kaufman LDL^T"""
    n = d.shape[0]
    values = []
    i = 0
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0.0:
            values.extend(np.linalg.eigvalsh(d[i:i + 2, i:i + 2]).tolist())
            i += 2
        else:
            values.append(d[i, i])
            i += 1
    return np.asarray(values)


def _dense_pivots(matrix) -> np.ndarray:
    dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=np.float64)
    _, d, _ = la.ldl(dense, lower=True)
    return _block_pivots(d)


def _sparse_pivots(matrix) -> Optional[np.ndarray]:
    """Diagonal of U from SuperLU with diagonal pivots and a symmetric ordering.

    With row order equal to column order, U = D L^T for the permuted matrix P A P^T,
    so diag(U) has the inertia of A. Returns None when SuperLU had to break symmetry.
    """
    try:
        lu = splu(
            sp.csc_matrix(matrix),
            permc_spec="MMD_AT_PLUS_A",
            diag_pivot_thresh=0.0,
            options={"SymmetricMode": True},
        )
    except RuntimeError as e:
        logger.debug(f"Sparse factorization failed: {e}")
        return None
    if not np.array_equal(lu.perm_r, lu.perm_c):
        return None
    return lu.U.diagonal()


def pivots(matrix, dense_limit: Optional[int] = None) -> np.ndarray:
    """Pivots of a symmetric triangular factorization (signs give the inertia)"""
    dense_limit = settings.dense_limit if dense_limit is None else dense_limit
    n = matrix.shape[0]
    if n <= dense_limit:
        return _dense_pivots(matrix)
    result = _sparse_pivots(matrix)
    if result is not None:
        return result
    if n > DENSE_FALLBACK_CAP:
        raise EigenSolverError(
            "sparse symmetric factorization lost its symmetric ordering",
            {"size": n, "dense_cap": DENSE_FALLBACK_CAP},
        )
    logger.warning(f"Falling back to dense Bunch-Kaufman factorization for n={n}")
    return _dense_pivots(matrix)


def inertia(matrix, dense_limit: Optional[int] = None, pivot_tol: Optional[float] = None) -> Inertia:
    """(negative, zero, positive) eigenvalue counts by Sylvester's law of inertia.

    Pivots within pivot_tol of zero, relative to the largest diagonal entry, count as zero.
    """
    if matrix.shape[0] == 0:
        return Inertia(0, 0, 0)
    pivot_tol = settings.pivot_tol if pivot_tol is None else pivot_tol
    diagonal = matrix.diagonal() if sp.issparse(matrix) else np.diag(np.asarray(matrix))
    cutoff = pivot_tol * max(float(np.max(np.abs(diagonal))), np.finfo(float).tiny)
    values = pivots(matrix, dense_limit)
    zero = np.abs(values) <= cutoff
    return Inertia(
        int(np.count_nonzero((values < 0) & ~zero)),
        int(np.count_nonzero(zero)),
        int(np.count_nonzero((values > 0) & ~zero)),
    )


def certify_positive_definite(matrix, name: str = "A", dense_limit: Optional[int] = None) -> None:
    """Fail unless every pivot of the factorization is positive"""
    if matrix.shape[0] == 0:
        raise NotPositiveDefiniteError(f"{name} is empty", {"matrix": name})
    counts = inertia(matrix, dense_limit)
    if counts.negative or counts.zero:
        raise NotPositiveDefiniteError(
            f"{name} is not positive definite on the truncated space; "
            "the window may touch no Dirichlet boundary",
            {"matrix": name, "negative_pivots": counts.negative, "zero_pivots": counts.zero},
        )
