"""Spectral, heat and bound reports"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from errors import IncompleteSpectrumError, InvalidParameterError


class Count(NamedTuple):
    """Integer count with the threshold flag raised inside the guard band"""

    value: int
    ambiguous: bool = False


class Inertia(NamedTuple):
    negative: int
    zero: int
    positive: int


class QuasiNorms(NamedTuple):
    schatten: float
    weak: float
    indicator: np.ndarray


class BirmanSchwingerCheck(NamedTuple):
    """N_-(A - alpha B) against n(1/alpha) of the pencil"""

    alpha: float
    lhs: int
    rhs: int
    equal: bool
    ambiguous: bool = False


class TraceCheck(NamedTuple):
    trace: float
    eigen_sum: float
    relative_error: float


@dataclass(frozen=True, eq=False)
class SpectralReport:
    """Nonincreasing pencil eigenvalues s_n of B u = s A u.

    Counts are exact for thresholds s >= valid_above; a complete report has
    valid_above = 0.
    """

    eigenvalues: np.ndarray
    valid_above: float = 0.0
    solver: str = "dense"
    rtol: float = 1e-9
    count_guard: float = 1e-9
    seed: int = 0
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        values = np.sort(np.asarray(self.eigenvalues, dtype=np.float64))[::-1].copy()
        values.setflags(write=False)
        object.__setattr__(self, "eigenvalues", values)

    def __len__(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def complete(self) -> bool:
        return self.valid_above == 0.0

    def count(self, s: float) -> Count:
        """n(s) = #{s_n > s (1 + guard)}, flagged when an eigenvalue sits in the guard band"""
        if not s > 0:
            raise InvalidParameterError(f"counting threshold must be positive, got {s}")
        if s < self.valid_above:
            raise IncompleteSpectrumError(
                f"report resolves counts only above {self.valid_above}",
                {"threshold": s, "valid_above": self.valid_above},
            )
        upper = s * (1.0 + self.count_guard)
        lower = s * (1.0 - self.count_guard)
        value = int(np.count_nonzero(self.eigenvalues > upper))
        ambiguous = bool(np.any((self.eigenvalues >= lower) & (self.eigenvalues <= upper)))
        return Count(value, ambiguous)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "valid_above": self.valid_above,
            "solver": self.solver,
            "rtol": self.rtol,
            "count_guard": self.count_guard,
            "seed": self.seed,
            "provenance": self.provenance,
        }


@dataclass(frozen=True, eq=False)
class Eigenpairs:
    """Full eigendecomposition of A (M-orthonormal vectors in the metric case)"""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def size(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class DimensionFit:
    window: Tuple[float, float]
    slope: float
    dimension: float
    residual: float
    points: int


@dataclass(frozen=True, eq=False)
class HeatProfile:
    """M(t) on a log-spaced time grid"""

    times: np.ndarray
    values: np.ndarray
    provenance: Dict[str, Any] = field(default_factory=dict)
    saturation_time: Optional[float] = None
    fits: Tuple[DimensionFit, ...] = ()

    def local_slopes(self) -> np.ndarray:
        return np.gradient(np.log(self.values), np.log(self.times))

    def to_rows(self) -> List[Tuple[float, float]]:
        return list(zip(self.times.tolist(), self.values.tolist()))


@dataclass(frozen=True)
class BoundReport:
    """margin = lhs - rhs; the bound holds when margin >= -abs_tol"""

    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    parameters: Dict[str, Any] = field(default_factory=dict)
    witness: Optional[Dict[str, Any]] = None
    ambiguous: bool = False

    @classmethod
    def evaluate(
        cls,
        name: str,
        lhs: float,
        rhs: float,
        abs_tol: float,
        parameters: Optional[Dict[str, Any]] = None,
        witness: Optional[Dict[str, Any]] = None,
        ambiguous: bool = False,
        margin: Optional[float] = None,
    ) -> "BoundReport":
        if margin is None:
            margin = float(lhs) - float(rhs)
        scale = max(1.0, abs(float(lhs)), abs(float(rhs)))
        passed = margin >= -abs_tol * scale
        if witness is not None and not witness.get("passed", True):
            passed = False
        return cls(name, float(lhs), float(rhs), float(margin), bool(passed),
                   parameters or {}, witness, ambiguous)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "passed": self.passed,
            "ambiguous": self.ambiguous,
            "parameters": self.parameters,
            "witness": self.witness,
        }


@dataclass(frozen=True)
class RatioTable:
    """Diagnostic table of ratios with unspecified constants; reported, never asserted"""

    name: str
    columns: Tuple[str, ...]
    rows: Tuple[Tuple[Any, ...], ...]
    parameters: Dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> List[Any]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "columns": list(self.columns),
            "rows": [list(row) for row in self.rows],
            "parameters": self.parameters,
        }
