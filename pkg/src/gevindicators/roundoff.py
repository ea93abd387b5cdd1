"""Round-off based reference indicators.

Both start from the float32 rounding of the initial condition, so the single
and double orbits begin at the same point and ``t = 0`` gives exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import DiscreteMap, StandardMap, StandardMapParams, _check_point

__all__ = [
    "RoundoffResult",
    "NoInverseError",
    "LOG_FLOOR",
    "divergence",
    "reversibility_error",
    "roundoff",
    "roundoff_indicators",
    "divergence_history",
    "safe_log10",
]

#: Substituted for exact zeros when a logarithm is displayed.
LOG_FLOOR = 1e-16


class NoInverseError(TypeError):
    pass


@dataclass(frozen=True)
class RoundoffResult:
    t: int
    divergence: float
    reversibility: float


def _as_map(params) -> DiscreteMap:
    return params if isinstance(params, DiscreteMap) else StandardMap(params)


def _check_t(t: int) -> int:
    if t < 0:
        raise ValueError("t must be >= 0")
    return int(t)


def roundoff_indicators(points, params: StandardMapParams | DiscreteMap,
                        t: int) -> tuple[np.ndarray, np.ndarray]:
    """Divergence and reversibility error at ``t`` for each row of ``points``."""
    dynmap = _as_map(params)
    return dynmap.roundoff(np.atleast_2d(points), _check_t(t))


def divergence(p0, params: StandardMapParams | DiscreteMap, t: int) -> float:
    """Distance between the single- and double-precision ``t``-th iterates."""
    div, _ = roundoff_indicators([_check_point(p0)], params, t)
    return float(div[0])


def reversibility_error(p0, params: StandardMapParams | DiscreteMap, t: int) -> float:
    """Distance from the start after ``t`` forward then ``t`` backward single-precision steps."""
    dynmap = _as_map(params)
    if not dynmap.has_inverse:
        raise NoInverseError(f"{type(dynmap).__name__} exposes no inverse step")
    _, rev = dynmap.roundoff(np.atleast_2d(_check_point(p0)), _check_t(t))
    return float(rev[0])


def roundoff(p0, params, t: int) -> RoundoffResult:
    div, rev = roundoff_indicators([_check_point(p0)], params, t)
    return RoundoffResult(int(t), float(div[0]), float(rev[0]))


def divergence_history(points, params, t: int) -> np.ndarray:
    """``(N, t + 1)`` array of divergences at every step ``0 .. t``."""
    return _as_map(params).divergence_history(np.atleast_2d(points), _check_t(t))


def safe_log10(values) -> np.ndarray:
    return np.log10(np.maximum(np.asarray(values, dtype=np.float64), LOG_FLOOR))
