"""Birman-Schwinger pencil spectra, counting functions and negative-spectrum counts"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigsh

from config import settings
from errors import EigenSolverError, InvalidParameterError
from models.forms import FormPair
from models.potential import SequenceSummary
from models.reports import BirmanSchwingerCheck, Count, QuasiNorms, SpectralReport, TraceCheck
from services.linalg import DENSE_FALLBACK_CAP, inertia
from utils.sweep import SweepRunner

logger = logging.getLogger(__name__)


class SpectralService:
    """Eigenvalues s_n of B u = s A u and the counts built on them"""

    def __init__(self, seed: Optional[int] = None, rtol: Optional[float] = None):
        self._seed = seed
        self._rtol = rtol

    @property
    def seed(self) -> int:
        return settings.seed if self._seed is None else self._seed

    @property
    def rtol(self) -> float:
        return settings.rtol if self._rtol is None else self._rtol

    # Pencil eigenvalues

    def pencil_eigenvalues(
        self,
        pair: FormPair,
        count: Optional[int] = None,
        threshold: Optional[float] = None,
    ) -> SpectralReport:
        """Largest pencil eigenvalues: the whole spectrum, the top `count`, or all above `threshold`.

        Threshold mode sizes the request by the inertia of B - s (1 - guard) A, so the
        report also holds the eigenvalues in the guard band just below s and resolves
        n(s') with its ambiguity flag for every s' >= threshold.
        """
        if count is not None and threshold is not None:
            raise InvalidParameterError("give either count or threshold, not both")
        if count is not None and count < 0:
            raise InvalidParameterError(f"eigenvalue count must be nonnegative, got {count}")
        if threshold is not None and not threshold > 0:
            raise InvalidParameterError(f"threshold must be positive, got {threshold}")
        n = pair.size
        provenance = {**pair.provenance, "dofs": n}

        if pair.B.nnz == 0 or not np.any(pair.B.data):
            logger.debug("Potential form vanishes; empty positive spectrum")
            return self._report(np.zeros(0), 0.0, "trivial", provenance)

        if threshold is not None:
            lower = float(threshold) * (1.0 - settings.count_guard)
            k = inertia(pair.B - lower * pair.A).positive
            logger.debug(f"Threshold {threshold}: {k} pencil eigenvalues above {lower}")
            values, solver = self._top(pair, k)
            return self._report(values, lower, solver, provenance)

        if count is None:
            if n > settings.dense_limit:
                raise InvalidParameterError(
                    f"pair of size {n} exceeds the dense limit; request a count or a threshold",
                    {"size": n, "dense_limit": settings.dense_limit},
                )
            values, solver = self._top(pair, n)
            return self._report(values, 0.0, solver, provenance)

        if count >= n:
            values, solver = self._top(pair, n)
            return self._report(values, 0.0, solver, provenance)
        values, solver = self._top(pair, count + 1)
        values = np.sort(values)[::-1]
        return self._report(values[:count], float(values[count]), solver, provenance)

    def _top(self, pair: FormPair, k: int) -> Tuple[np.ndarray, str]:
        n = pair.size
        if k == 0:
            return np.zeros(0), "inertia"
        if n <= settings.dense_limit or k >= n - 1:
            if n > DENSE_FALLBACK_CAP:
                raise EigenSolverError(
                    f"{k} of {n} eigenvalues requested; too many for the iterative solver",
                    {"requested": k, "size": n},
                )
            values = la.eigh(pair.B.toarray(), pair.A.toarray(), eigvals_only=True,
                             subset_by_index=[n - k, n - 1])
            return np.clip(values, 0.0, None), "dense"
        return self._arpack(pair, k), "arpack"

    def _arpack(self, pair: FormPair, k: int) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        try:
            values = eigsh(
                sp.csr_matrix(pair.B), k=k, M=sp.csc_matrix(pair.A),
                which="LA", tol=self.rtol, maxiter=settings.max_iterations, v0=rng.random(pair.size),
                return_eigenvectors=False,
            )
        except ArpackNoConvergence as e:
            raise EigenSolverError(
                f"ARPACK did not converge: {len(e.eigenvalues)} of {k} eigenvalues",
                {"requested": k, "converged": len(e.eigenvalues), "max_iterations": settings.max_iterations},
            )
        except ArpackError as e:
            raise EigenSolverError(f"ARPACK failed: {e}", {"requested": k})
        logger.debug(f"ARPACK computed {k} eigenvalues of a pencil of size {pair.size}")
        return np.clip(values, 0.0, None)

    def _report(self, values: np.ndarray, valid_above: float, solver: str, provenance) -> SpectralReport:
        return SpectralReport(
            eigenvalues=values,
            valid_above=valid_above,
            solver=solver,
            rtol=self.rtol,
            count_guard=settings.count_guard,
            seed=self.seed,
            provenance=provenance,
        )

    # Counting

    @staticmethod
    def counting(report: SpectralReport, s: float) -> Count:
        """n(s) = #{s_n > s}, strict with the relative guard band"""
        return report.count(s)

    @staticmethod
    def negative_count(pair: FormPair, alpha: float) -> Count:
        """N_-(A - alpha B) from the pivot signs; a zero pivot flags threshold coupling"""
        if alpha < 0:
            raise InvalidParameterError(f"coupling must be nonnegative, got {alpha}")
        if alpha == 0:
            return Count(0, False)
        counts = inertia(pair.A - alpha * pair.B)
        if counts.zero:
            logger.warning(f"Threshold coupling at alpha={alpha}: {counts.zero} zero pivots")
        return Count(counts.negative, counts.zero > 0)

    def birman_schwinger_check(
        self,
        pair: FormPair,
        alpha: float,
        report: Optional[SpectralReport] = None,
    ) -> BirmanSchwingerCheck:
        """N_-(A - alpha B) == n(1/alpha, B_V), each side computed independently"""
        if not alpha > 0:
            raise InvalidParameterError(f"coupling must be positive, got {alpha}")
        if report is None:
            report = (self.pencil_eigenvalues(pair) if pair.size <= settings.dense_limit
                      else self.pencil_eigenvalues(pair, threshold=1.0 / alpha))
        lhs = self.negative_count(pair, alpha)
        rhs = self.counting(report, 1.0 / alpha)
        equal = lhs.value == rhs.value
        ambiguous = lhs.ambiguous or rhs.ambiguous
        if not equal and not ambiguous:
            logger.error(f"Birman-Schwinger mismatch at alpha={alpha}: N_-={lhs.value}, n={rhs.value}")
        return BirmanSchwingerCheck(float(alpha), lhs.value, rhs.value, equal, ambiguous)

    async def coupling_sweep(
        self,
        pair: FormPair,
        alphas: Sequence[float],
        runner: Optional[SweepRunner] = None,
    ) -> List[Tuple[float, Count]]:
        """(alpha, N_-) over a coupling grid, in grid order"""
        runner = runner or SweepRunner()
        counts = await runner.map(lambda alpha: self.negative_count(pair, alpha), list(alphas))
        return list(zip((float(a) for a in alphas), counts))

    # Finite-spectrum estimators

    @staticmethod
    def quasi_norms(report: SpectralReport, q: float) -> QuasiNorms:
        """(Schatten S_q estimate, weak Sigma_q estimate, tail sequence n^{1/q} s_n)"""
        summary = SequenceSummary.of(report.eigenvalues)
        return QuasiNorms(summary.lq_norm(q), summary.weak_norm(q), summary.indicator(q))

    @staticmethod
    def operator_norm(report: SpectralReport) -> float:
        return float(report.eigenvalues[0]) if len(report) else 0.0

    @staticmethod
    def trace_identity(pair: FormPair, report: SpectralReport) -> TraceCheck:
        """sum of s_n against tr(A^{-1} B)"""
        if not report.complete:
            raise InvalidParameterError("trace identity needs a complete spectrum")
        if pair.size > DENSE_FALLBACK_CAP:
            raise InvalidParameterError("pair too large for a dense trace", {"size": pair.size})
        solved = la.solve(pair.A.toarray(), pair.B.toarray(), assume_a="pos")
        trace = float(np.trace(solved))
        eigen_sum = float(np.sum(report.eigenvalues))
        relative = abs(trace - eigen_sum) / max(abs(trace), np.finfo(float).tiny)
        return TraceCheck(trace, eigen_sum, relative)


# Create global instance
spectral_service = SpectralService()
