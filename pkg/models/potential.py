"""Potential value objects"""
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from errors import InvalidParameterError, PotentialError

QUADRATURE_RULES = ("trapezoid", "simpson")


@dataclass(frozen=True, eq=False)
class VertexPotential:
    """Nonnegative values indexed by vertex id"""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise PotentialError("vertex potential must be one-dimensional")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise PotentialError("vertex potential must be finite and nonnegative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def scaled(self, factor: float) -> "VertexPotential":
        return VertexPotential(self.values * factor)


@dataclass(frozen=True, eq=False)
class EdgeProfile:
    """Potential on one edge: a constant, or samples on a uniform mesh of [0, l_e]"""

    constant: Optional[float] = None
    samples: Optional[np.ndarray] = None

    def __post_init__(self):
        if (self.constant is None) == (self.samples is None):
            raise PotentialError("edge profile needs exactly one of constant or samples")
        if self.constant is not None:
            if not np.isfinite(self.constant) or self.constant < 0:
                raise PotentialError("edge potential constant must be finite and nonnegative")
            object.__setattr__(self, "constant", float(self.constant))
            return
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size < 2:
            raise PotentialError("sampled edge potential needs at least 2 samples")
        if not np.all(np.isfinite(samples)) or np.any(samples < 0):
            raise PotentialError("edge potential samples must be finite and nonnegative")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def is_constant(self) -> bool:
        return self.constant is not None

    @property
    def sample_count(self) -> int:
        return 0 if self.samples is None else int(self.samples.size)

    def evaluate(self, length: float, x: np.ndarray) -> np.ndarray:
        """Values at positions x in [0, length]; samples are linearly interpolated"""
        if self.constant is not None:
            return np.full(np.shape(x), self.constant)
        nodes = np.linspace(0.0, length, self.samples.size)
        return np.interp(x, nodes, self.samples)

    def scaled(self, factor: float) -> "EdgeProfile":
        if self.constant is not None:
            return EdgeProfile(constant=self.constant * factor)
        return EdgeProfile(samples=self.samples * factor)

    @property
    def is_zero(self) -> bool:
        if self.constant is not None:
            return self.constant == 0.0
        return not np.any(self.samples)


@dataclass(frozen=True, eq=False)
class EdgePotential:
    """Per-edge potential profiles with the quadrature rule they are integrated with"""

    profiles: Tuple[EdgeProfile, ...]
    rule: str = "trapezoid"

    def __post_init__(self):
        if self.rule not in QUADRATURE_RULES:
            raise InvalidParameterError(f"unknown quadrature rule: {self.rule}")
        object.__setattr__(self, "profiles", tuple(self.profiles))

    def __len__(self) -> int:
        return len(self.profiles)

    def scaled(self, factor: float) -> "EdgePotential":
        return EdgePotential(tuple(p.scaled(factor) for p in self.profiles), self.rule)

    def with_rule(self, rule: str) -> "EdgePotential":
        return EdgePotential(self.profiles, rule)

    @property
    def support(self) -> np.ndarray:
        """Edge ids where the potential is not identically zero"""
        return np.array([i for i, p in enumerate(self.profiles) if not p.is_zero], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class SequenceSummary:
    """Nonincreasing rearrangement of a nonnegative sequence"""

    sorted_values: np.ndarray

    @classmethod
    def of(cls, values) -> "SequenceSummary":
        array = np.asarray(values, dtype=np.float64).ravel()
        if not np.all(np.isfinite(array)):
            raise InvalidParameterError("sequence values must be finite")
        ordered = np.sort(array)[::-1].copy()
        ordered.setflags(write=False)
        return cls(ordered)

    def __len__(self) -> int:
        return int(self.sorted_values.size)

    def distribution(self, tau: float) -> int:
        """nu(tau) = #{entries > tau}"""
        return int(np.count_nonzero(self.sorted_values > tau))

    def lq_norm(self, q: float) -> float:
        _check_exponent(q)
        positive = self.sorted_values[self.sorted_values > 0]
        if positive.size == 0:
            return 0.0
        return float(np.sum(positive ** q) ** (1.0 / q))

    def weak_norm(self, q: float) -> float:
        """sup_n n^{1/q} a_n over the nonincreasing rearrangement"""
        _check_exponent(q)
        if self.sorted_values.size == 0:
            return 0.0
        return float(np.max(self.indicator(q)))

    def indicator(self, q: float) -> np.ndarray:
        """Tail sequence n^{1/q} a_n"""
        _check_exponent(q)
        n = np.arange(1, self.sorted_values.size + 1, dtype=np.float64)
        return n ** (1.0 / q) * self.sorted_values

    @cached_property
    def maximum(self) -> float:
        return float(self.sorted_values[0]) if self.sorted_values.size else 0.0


def _check_exponent(q: float) -> None:
    if not q > 0:
        raise InvalidParameterError(f"exponent q must be positive, got {q}")
