"""Heat-kernel diagnostics and dimension fits"""
import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la

from config import settings
from errors import DegenerateWindowError, HeatSizeError, InvalidParameterError
from models.forms import FormPair
from models.reports import BoundReport, DimensionFit, Eigenpairs, HeatProfile

logger = logging.getLogger(__name__)

# |d log M / d log t| below this marks a flat profile
FLAT_SLOPE = 0.1
MIN_FIT_POINTS = 5


class HeatService:
    """P(t; x, x) from a full eigendecomposition, M(t) profiles and log-log slope fits"""

    def __init__(self, max_dofs: Optional[int] = None):
        self._max_dofs = max_dofs

    @property
    def max_dofs(self) -> int:
        return self._max_dofs or settings.heat_max_dofs

    def decompose(self, pair: FormPair) -> Eigenpairs:
        """Eigenpairs of A (counting measure) or of (A, M) with M-orthonormal vectors"""
        if pair.size > self.max_dofs:
            raise HeatSizeError(
                f"window of {pair.size} DOFs exceeds the full-decomposition cap {self.max_dofs}",
                {"dofs": pair.size, "cap": self.max_dofs},
            )
        A = pair.A.toarray()
        if pair.M is None:
            values, vectors = la.eigh(A)
        else:
            values, vectors = la.eigh(A, pair.M.toarray())
        logger.info(f"Decomposed {pair.size} DOFs, lambda_1={values[0]:.6g}")
        return Eigenpairs(values, vectors)

    # Kernel evaluation

    @staticmethod
    def kernel_diag(eig: Eigenpairs, t: float) -> np.ndarray:
        """P(t; x, x) = sum_k exp(-lambda_k t) u_k(x)^2 over all DOF sites"""
        _check_time(t)
        return (eig.vectors ** 2) @ np.exp(-eig.values * t)

    @staticmethod
    def kernel(eig: Eigenpairs, t: float) -> np.ndarray:
        _check_time(t)
        return (eig.vectors * np.exp(-eig.values * t)) @ eig.vectors.T

    def sup_kernel(self, eig: Eigenpairs, t: float) -> float:
        """M(t) = max_x P(t; x, x), the sup over X x X by diagonal dominance"""
        return float(np.max(self.kernel_diag(eig, t)))

    # Profiles

    def heat_profile(self, eig: Eigenpairs, times: Sequence[float],
                     provenance: Optional[Dict] = None) -> HeatProfile:
        """M(t) on the grid, with the saturation time and default delta / D fits"""
        times = np.sort(np.asarray(times, dtype=np.float64))
        if times.size < 2:
            raise InvalidParameterError("a heat profile needs at least two times")
        values = np.array([self.sup_kernel(eig, t) for t in times])
        profile = HeatProfile(times, values, dict(provenance or {}))
        saturation = self.saturation_time(eig, profile)
        fits = []
        for name, window in self.default_windows(profile, saturation).items():
            try:
                fits.append(self.dimension_fit(profile, window))
            except DegenerateWindowError:
                logger.debug(f"Default {name} window {window} holds too few grid points")
        logger.info(f"Heat profile on {times.size} times, saturation at t={saturation}")
        return HeatProfile(times, values, profile.provenance, saturation, tuple(fits))

    @staticmethod
    def saturation_time(eig: Eigenpairs, profile: HeatProfile) -> Optional[float]:
        """Onset of boundary effects: 1/lambda_1 or the first flattening after decay starts"""
        candidates = []
        if eig.values.size and eig.values[0] > 0:
            candidates.append(1.0 / float(eig.values[0]))
        slopes = np.abs(profile.local_slopes())
        decaying = np.flatnonzero(slopes >= FLAT_SLOPE)
        if decaying.size:
            flat = np.flatnonzero(slopes[decaying[0]:] < FLAT_SLOPE)
            if flat.size:
                candidates.append(float(profile.times[decaying[0] + flat[0]]))
        return min(candidates) if candidates else None

    @staticmethod
    def default_windows(profile: HeatProfile, saturation: Optional[float]) -> Dict[str, Tuple[float, float]]:
        """[t_min, 10 t_min] for delta; [t_sat / 10, t_sat] for D"""
        t_min = float(profile.times[0])
        windows = {"local": (t_min, 10.0 * t_min)}
        if saturation is not None and saturation / 10.0 >= t_min:
            windows["infinity"] = (saturation / 10.0, saturation)
        return windows

    @staticmethod
    def dimension_fit(profile: HeatProfile, window: Tuple[float, float]) -> DimensionFit:
        """Least-squares slope beta of log M against log t; dimension = -2 beta"""
        lo, hi = float(window[0]), float(window[1])
        if not 0 < lo < hi:
            raise DegenerateWindowError(f"fit window must satisfy 0 < lo < hi, got {window}",
                                        {"window": [lo, hi]})
        mask = (profile.times >= lo * (1 - 1e-12)) & (profile.times <= hi * (1 + 1e-12))
        points = int(np.count_nonzero(mask))
        if points < MIN_FIT_POINTS:
            raise DegenerateWindowError(
                f"fit window {window} holds {points} < {MIN_FIT_POINTS} grid points",
                {"window": [lo, hi], "points": points},
            )
        log_t, log_m = np.log(profile.times[mask]), np.log(profile.values[mask])
        (slope, intercept) = np.polyfit(log_t, log_m, 1)
        residual = float(np.linalg.norm(log_m - (slope * log_t + intercept)))
        logger.debug(f"Fit on [{lo}, {hi}]: slope={slope:.6g}, residual={residual:.3g}")
        return DimensionFit((lo, hi), float(slope), float(-2.0 * slope), residual, points)

    # Spot checks

    def check_log_convexity(self, eig: Eigenpairs, t1: float, t2: float,
                            sites: Optional[Sequence[int]] = None) -> BoundReport:
        """P(t1) P(t2) >= P((t1 + t2) / 2)^2 at every sampled site"""
        sites = np.arange(eig.size) if sites is None else np.asarray(sites)
        product = self.kernel_diag(eig, t1)[sites] * self.kernel_diag(eig, t2)[sites]
        middle = self.kernel_diag(eig, (t1 + t2) / 2)[sites] ** 2
        worst = int(np.argmin(product - middle))
        return BoundReport.evaluate(
            "log-convexity", product[worst], middle[worst], settings.bound_abs_tol,
            parameters={"t1": t1, "t2": t2, "site": int(sites[worst])},
        )

    def check_diagonal_dominance(self, eig: Eigenpairs, rng: np.random.Generator,
                                 times: Sequence[float], samples: int = 100) -> BoundReport:
        """P(t; x, y) <= sqrt(P(t; x, x) P(t; y, y)) on random (x, y, t) samples"""
        times = np.asarray(times, dtype=np.float64)
        worst = None
        for _ in range(samples):
            x, y = rng.integers(0, eig.size, size=2)
            t = float(rng.choice(times))
            weights = np.exp(-eig.values * t)
            off = float(np.sum(weights * eig.vectors[x] * eig.vectors[y]))
            bound = float(np.sqrt(np.sum(weights * eig.vectors[x] ** 2) * np.sum(weights * eig.vectors[y] ** 2)))
            if worst is None or bound - off < worst[1] - worst[0]:
                worst = (off, bound, int(x), int(y), t)
        off, bound, x, y, t = worst
        return BoundReport.evaluate(
            "diagonal-dominance", bound + 1e-12, off, 0.0,
            parameters={"x": x, "y": y, "t": t, "samples": samples},
        )


def _check_time(t: float) -> None:
    if t < 0:
        raise InvalidParameterError(f"time must be nonnegative, got {t}")


# Create global instance
heat_service = HeatService()
