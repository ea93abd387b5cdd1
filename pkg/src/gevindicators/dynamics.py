"""State space, torus metric and the Standard map.

Points live on the unit 2-torus.  The Standard map used throughout is

    y' = y - K/(2 pi) sin(2 pi x)   mod 1
    x' = x + y'                     mod 1

with the momentum updated first.  Both the forward and inverse step can be
evaluated in single (float32) or double (float64) arithmetic.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple

import numpy as np

from . import _kernels

__all__ = [
    "TorusPoint",
    "StandardMapParams",
    "Precision",
    "Direction",
    "DiscreteMap",
    "StandardMap",
    "OrbitMemoryError",
    "MAX_ORBIT_POINTS",
    "standard_map_step",
    "standard_map_inverse_step",
    "iterate",
    "torus_distance",
    "torus_distances",
]

#: Largest orbit ``iterate`` will materialise without a streaming consumer.
MAX_ORBIT_POINTS = 20_000_000


class OrbitMemoryError(MemoryError):
    """Requested orbit exceeds the in-memory budget."""


class TorusPoint(NamedTuple):
    x: float
    y: float

    @classmethod
    def wrap(cls, x: float, y: float) -> "TorusPoint":
        """Reduce arbitrary coordinates into [0, 1)."""
        return cls(_wrap(x), _wrap(y))

    def is_valid(self) -> bool:
        return 0.0 <= self.x < 1.0 and 0.0 <= self.y < 1.0


def _wrap(v: float) -> float:
    r = v - math.floor(v)
    return 0.0 if r >= 1.0 else r


def _check_point(p) -> TorusPoint:
    p = TorusPoint(float(p[0]), float(p[1]))
    if not p.is_valid():
        raise ValueError(f"point {tuple(p)} is outside [0, 1)^2")
    return p


@dataclass(frozen=True)
class StandardMapParams:
    K: float

    def __post_init__(self):
        if not math.isfinite(self.K) or self.K < 0:
            raise ValueError(f"K must be finite and non-negative, got {self.K!r}")


class Precision(enum.Enum):
    SINGLE = "single"
    DOUBLE = "double"

    @property
    def dtype(self) -> type:
        return np.float32 if self is Precision.SINGLE else np.float64


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


def _constants(K: float, prec: Precision) -> tuple:
    """Kick amplitude K/2pi and pi, rounded to the working precision."""
    if prec is Precision.SINGLE:
        return np.float32(K) / np.float32(2.0 * np.pi), np.float32(np.pi)
    return K / (2.0 * np.pi), np.pi


def torus_distance(a, b) -> float:
    """Euclidean distance on the unit torus with per-coordinate wraparound."""
    dx = abs(float(a[0]) - float(b[0]))
    dy = abs(float(a[1]) - float(b[1]))
    return math.hypot(min(dx, 1.0 - dx), min(dy, 1.0 - dy))


def torus_distances(points: np.ndarray, ref) -> np.ndarray:
    """Vectorised :func:`torus_distance` of an ``(N, 2)`` array to ``ref``."""
    diff = np.abs(np.asarray(points, dtype=np.float64) - np.asarray(ref, dtype=np.float64))
    diff = np.minimum(diff, 1.0 - diff)
    return np.hypot(diff[..., 0], diff[..., 1])


class DiscreteMap:
    """Invertible (or not) map on the unit 2-torus.

    Subclasses supply :meth:`step` and, when available, :meth:`inverse_step`.
    The bulk methods below work for any subclass through Python-level
    iteration; :class:`StandardMap` overrides them with compiled loops.
    Downstream code only relies on this interface.
    """

    dim = 2
    has_inverse = False

    def step(self, p, prec: Precision = Precision.DOUBLE) -> TorusPoint:
        raise NotImplementedError

    def inverse_step(self, p, prec: Precision = Precision.DOUBLE) -> TorusPoint:
        raise NotImplementedError(f"{type(self).__name__} has no inverse step")

    def distance(self, a, b) -> float:
        return torus_distance(a, b)

    def orbit(self, p0, steps: int, prec: Precision = Precision.DOUBLE,
              direction: Direction = Direction.FORWARD) -> np.ndarray:
        out = np.empty((steps, 2), dtype=prec.dtype)
        move = self.step if direction is Direction.FORWARD else self.inverse_step
        p = TorusPoint(*(prec.dtype(c) for c in p0))
        for t in range(steps):
            p = move(p, prec)
            out[t] = p
        return out

    def block_min_distances(self, points: np.ndarray, n: int, m: int,
                            floor: float) -> tuple[np.ndarray, np.ndarray]:
        """Per-bin minimum distance of each double-precision orbit to its start.

        Returns ``(minima, returns)`` with ``minima`` of shape ``(N, n)`` and
        ``returns[i]`` the number of iterates closer than ``floor``.
        """
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        minima = np.empty((len(points), n))
        returns = np.zeros(len(points), dtype=np.int64)
        for i, p0 in enumerate(points):
            p = TorusPoint(*p0)
            for j in range(n):
                best = math.inf
                for _ in range(m):
                    p = self.step(p)
                    d = self.distance(p, p0)
                    returns[i] += d < floor
                    best = min(best, d)
                minima[i, j] = best
        return minima, returns

    def roundoff(self, points: np.ndarray, t: int) -> tuple[np.ndarray, np.ndarray]:
        """Divergence and reversibility error after ``t`` steps for each point."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float32))
        div = np.empty(len(points))
        rev = np.empty(len(points))
        for i, p0 in enumerate(points):
            s = self.orbit(p0, t, Precision.SINGLE)[-1] if t else p0
            d = self.orbit(p0.astype(np.float64), t, Precision.DOUBLE)[-1] if t else p0
            div[i] = self.distance(s, d)
            if not self.has_inverse:
                rev[i] = math.nan
                continue
            back = self.orbit(s, t, Precision.SINGLE, Direction.BACKWARD)[-1] if t else s
            rev[i] = self.distance(back, p0)
        return div, rev

    def divergence_history(self, points: np.ndarray, t: int) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=np.float32))
        out = np.zeros((len(points), t + 1))
        for i, p0 in enumerate(points):
            s = self.orbit(p0, t, Precision.SINGLE)
            d = self.orbit(p0.astype(np.float64), t, Precision.DOUBLE)
            out[i, 1:] = [self.distance(a, b) for a, b in zip(s, d)]
        return out


@dataclass(frozen=True)
class StandardMap(DiscreteMap):
    params: StandardMapParams

    has_inverse = True

    @classmethod
    def from_K(cls, K: float) -> "StandardMap":
        return cls(StandardMapParams(float(K)))

    @property
    def K(self) -> float:
        return self.params.K

    def step(self, p, prec: Precision = Precision.DOUBLE) -> TorusPoint:
        kick, pi = _constants(self.K, prec)
        dt = prec.dtype
        x, y = _kernels.forward(dt(p[0]), dt(p[1]), kick, pi)
        return TorusPoint(dt(x), dt(y))

    def inverse_step(self, p, prec: Precision = Precision.DOUBLE) -> TorusPoint:
        kick, pi = _constants(self.K, prec)
        dt = prec.dtype
        x, y = _kernels.backward(dt(p[0]), dt(p[1]), kick, pi)
        return TorusPoint(dt(x), dt(y))

    def orbit(self, p0, steps: int, prec: Precision = Precision.DOUBLE,
              direction: Direction = Direction.FORWARD) -> np.ndarray:
        kick, pi = _constants(self.K, prec)
        dt = prec.dtype
        out = np.empty((steps, 2), dtype=dt)
        _kernels.orbit(dt(p0[0]), dt(p0[1]), kick, pi, steps,
                       direction is Direction.BACKWARD, out)
        return out

    def block_min_distances(self, points, n, m, floor):
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        kick, pi = _constants(self.K, Precision.DOUBLE)
        return _kernels.block_min_distances(
            np.ascontiguousarray(points[:, 0]), np.ascontiguousarray(points[:, 1]),
            kick, pi, int(n), int(m), float(floor))

    def _roundoff_args(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=np.float32))
        ks, ts = _constants(self.K, Precision.SINGLE)
        kd, td = _constants(self.K, Precision.DOUBLE)
        return (np.ascontiguousarray(points[:, 0]), np.ascontiguousarray(points[:, 1]),
                ks, ts, kd, td)

    def roundoff(self, points, t):
        return _kernels.roundoff(*self._roundoff_args(points), int(t))

    def divergence_history(self, points, t):
        return _kernels.divergence_history(*self._roundoff_args(points), int(t))


def standard_map_step(p, params: StandardMapParams,
                      prec: Precision = Precision.DOUBLE) -> TorusPoint:
    return StandardMap(params).step(_check_point(p), prec)


def standard_map_inverse_step(p, params: StandardMapParams,
                              prec: Precision = Precision.DOUBLE) -> TorusPoint:
    return StandardMap(params).inverse_step(_check_point(p), prec)


def iterate(p0, params: StandardMapParams | DiscreteMap, prec: Precision = Precision.DOUBLE,
            steps: int = 1, direction: Direction = Direction.FORWARD, *,
            consumer: Callable[[np.ndarray], None] | None = None,
            chunk_size: int = 1_000_000,
            max_points: int | None = None) -> np.ndarray | None:
    """Orbit ``p_1 ... p_steps`` of ``p0`` (the start itself is excluded).

    Returns an ``(steps, 2)`` array.  With a ``consumer`` the orbit is
    instead fed to it in consecutive chunks and nothing is returned, which
    lifts the ``max_points`` memory budget.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    dynmap = params if isinstance(params, DiscreteMap) else StandardMap(params)
    p0 = _check_point(p0)
    if consumer is None:
        budget = MAX_ORBIT_POINTS if max_points is None else max_points
        if steps > budget:
            raise OrbitMemoryError(
                f"orbit of {steps} points exceeds the budget of {budget}; "
                "attach a consumer to stream it")
        return dynmap.orbit(p0, steps, prec, direction)
    for chunk in _chunks(dynmap, p0, steps, prec, direction, chunk_size):
        consumer(chunk)
    return None


def _chunks(dynmap: DiscreteMap, p0, steps, prec, direction, chunk_size) -> Iterator[np.ndarray]:
    p, done = p0, 0
    while done < steps:
        size = min(chunk_size, steps - done)
        chunk = dynmap.orbit(p, size, prec, direction)
        yield chunk
        p = chunk[-1]
        done += size
