"""Observables of the distance to the initial condition and their block maxima."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .dynamics import DiscreteMap, torus_distances

__all__ = [
    "ObservableKind",
    "ObservableSpec",
    "BlockSpec",
    "MaximaSeries",
    "DEFAULT_DISTANCE_FLOOR",
    "distance_series",
    "observable_series",
    "apply_observable",
    "block_maxima",
    "min_distance_series",
    "orbit_block_minima",
    "maxima_from_minima",
]

DEFAULT_DISTANCE_FLOOR = 1e-15


class ObservableKind(enum.Enum):
    G1 = "g1"  # -log d            -> Gumbel
    G2 = "g2"  # d**(-1/alpha)     -> Frechet
    G3 = "g3"  # C - d**(1/alpha)  -> Weibull

    @classmethod
    def parse(cls, name: str) -> "ObservableKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown observable {name!r}; expected g1, g2 or g3") from None


@dataclass(frozen=True)
class ObservableSpec:
    kind: ObservableKind = ObservableKind.G1
    alpha: float = 3.0
    c: float = 0.0
    distance_floor: float = DEFAULT_DISTANCE_FLOOR

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not 0 < self.distance_floor <= 1e-10:
            raise ValueError("distance_floor must lie in (0, 1e-10]")

    @property
    def name(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class BlockSpec:
    """``k`` observations split into ``n`` bins of ``m``."""

    k: int
    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be >= 1")
        if self.k != self.n * self.m:
            raise ValueError(f"k={self.k} must equal n*m={self.n * self.m}")

    @classmethod
    def from_bins(cls, n: int, m: int) -> "BlockSpec":
        return cls(n * m, n, m)


@dataclass
class MaximaSeries:
    values: np.ndarray
    exact_return_count: int = 0
    kind: ObservableKind | None = field(default=None, compare=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise ValueError("maxima must be one-dimensional")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("maxima must be finite")

    def __len__(self) -> int:
        return len(self.values)


def distance_series(orbit, zeta, floor: float = DEFAULT_DISTANCE_FLOOR) -> tuple[np.ndarray, int]:
    """Distances of the orbit to ``zeta`` clamped below at ``floor``, plus the clamp count."""
    d = torus_distances(np.asarray(orbit).reshape(-1, 2), zeta)
    clamped = d < floor
    return np.where(clamped, floor, d), int(clamped.sum())


def apply_observable(d: np.ndarray, spec: ObservableSpec) -> np.ndarray:
    d = np.asarray(d, dtype=np.float64)
    if spec.kind is ObservableKind.G1:
        return -np.log(d)
    if spec.kind is ObservableKind.G2:
        return d ** (-1.0 / spec.alpha)
    return spec.c - d ** (1.0 / spec.alpha)


def observable_series(orbit, zeta, spec: ObservableSpec, *, return_count: bool = False):
    """Observable ``g(dist(orbit_t, zeta))`` for each iterate of ``orbit``.

    ``orbit`` should not contain ``zeta`` itself as its first row: the
    distance there is zero by construction.
    """
    d, count = distance_series(orbit, zeta, spec.distance_floor)
    series = apply_observable(d, spec)
    return (series, count) if return_count else series


def _check_length(series: np.ndarray, blocks: BlockSpec) -> np.ndarray:
    series = np.asarray(series, dtype=np.float64)
    if len(series) < blocks.k:
        raise ValueError(f"series has {len(series)} entries, need k={blocks.k}")
    return series[: blocks.k].reshape(blocks.n, blocks.m)


def block_maxima(series, blocks: BlockSpec, *, exact_return_count: int = 0,
                 kind: ObservableKind | None = None) -> MaximaSeries:
    return MaximaSeries(_check_length(series, blocks).max(axis=1), exact_return_count, kind)


def min_distance_series(orbit, zeta, blocks: BlockSpec) -> np.ndarray:
    """Per-bin minima of the raw (unclamped) distance to ``zeta``."""
    orbit = np.asarray(orbit).reshape(-1, 2)
    if len(orbit) < blocks.k:
        raise ValueError(f"orbit has {len(orbit)} points, need k={blocks.k}")
    d = torus_distances(orbit[: blocks.k], zeta)
    return d.reshape(blocks.n, blocks.m).min(axis=1)


def orbit_block_minima(dynmap: DiscreteMap, points, blocks: BlockSpec,
                       floor: float = DEFAULT_DISTANCE_FLOOR) -> tuple[np.ndarray, np.ndarray]:
    """Streamed per-bin distance minima for orbits started at each of ``points``.

    The orbit is never stored, so ``k`` may be as large as patience allows.
    Returns ``(minima, exact_returns)`` with shapes ``(N, n)`` and ``(N,)``.
    """
    return dynmap.block_min_distances(points, blocks.n, blocks.m, floor)


def maxima_from_minima(minima, spec: ObservableSpec, exact_return_count: int = 0) -> MaximaSeries:
    """Block maxima of ``spec``'s observable, from per-bin distance minima.

    Every observable is a decreasing function of the distance, so the bin
    maximum is the observable of the bin minimum.
    """
    d = np.maximum(np.asarray(minima, dtype=np.float64), spec.distance_floor)
    return MaximaSeries(apply_observable(d, spec), exact_return_count, spec.kind)
