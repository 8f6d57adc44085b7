"""Grid and window strings of the command line and experiment files"""
from typing import List, Sequence, Tuple, Union

import numpy as np

from errors import InvalidParameterError

GridSpec = Union[str, Sequence[float]]


def parse_grid(spec: GridSpec) -> List[float]:
    """'1:100:log20' (geometric), '0.1:1:lin10' (linear), '1,2,5' or a list of numbers"""
    if not isinstance(spec, str):
        values = [float(v) for v in spec]
    elif spec.count(":") == 2:
        start, stop, kind = spec.split(":")
        points = _points(kind, spec)
        lo, hi = _number(start, spec), _number(stop, spec)
        if kind.startswith("log"):
            if lo <= 0 or hi <= 0:
                raise InvalidParameterError(f"log grid needs positive ends: {spec}")
            values = np.geomspace(lo, hi, points).tolist()
        else:
            values = np.linspace(lo, hi, points).tolist()
    else:
        values = [_number(part, spec) for part in spec.split(",") if part.strip()]
    if not values:
        raise InvalidParameterError(f"grid is empty: {spec}")
    if any(not v > 0 for v in values):
        raise InvalidParameterError(f"grid values must be positive: {spec}")
    return values


def parse_window(spec: GridSpec) -> Tuple[float, float]:
    """'1:10' or a pair of numbers"""
    parts = spec.split(":") if isinstance(spec, str) else list(spec)
    if len(parts) != 2:
        raise InvalidParameterError(f"window must be lo:hi, got {spec}")
    lo, hi = (_number(p, spec) if isinstance(p, str) else float(p) for p in parts)
    return lo, hi


def parse_numbers(spec: str) -> List[float]:
    """Comma-separated numbers, e.g. edge lengths '1,1,0.5'"""
    values = [_number(part, spec) for part in spec.split(",") if part.strip()]
    if not values:
        raise InvalidParameterError(f"expected a comma-separated list of numbers: {spec}")
    return values


def _points(kind: str, spec: str) -> int:
    for prefix in ("log", "lin"):
        if kind.startswith(prefix):
            try:
                points = int(kind[len(prefix):])
            except ValueError:
                break
            if points < 1:
                break
            return points
    raise InvalidParameterError(f"grid kind must be logN or linN: {spec}")


def _number(text: str, spec) -> float:
    try:
        return float(text)
    except ValueError:
        raise InvalidParameterError(f"not a number: {text!r} in {spec}")
