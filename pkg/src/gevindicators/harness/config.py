"""Experiment configurations."""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field

import numpy as np

from ..dynamics import TorusPoint
from ..extremes import BlockSpec, ObservableKind, ObservableSpec

DEFAULT_CENTER = TorusPoint(0.305, 0.7340)
DEFAULT_HALF_WIDTH = 5e-4


def default_observables(alpha: float = 3.0, c: float = 0.0) -> tuple[ObservableSpec, ...]:
    return tuple(ObservableSpec(kind, alpha, c) for kind in ObservableKind)


def log_k_grid(lo: float = 1e-4, hi: float = 1e2, count: int = 25) -> tuple[float, ...]:
    return tuple(float(v) for v in np.logspace(np.log10(lo), np.log10(hi), count))


@dataclass(frozen=True)
class EnsembleConfig:
    center: TorusPoint = DEFAULT_CENTER
    half_width: float = DEFAULT_HALF_WIDTH
    count: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("ensemble count must be >= 1")
        if not 0 < self.half_width <= 0.5:
            raise ValueError("half_width must lie in (0, 0.5]")

    def sample(self) -> np.ndarray:
        """Uniform initial conditions in the square around ``center``, wrapped to the torus."""
        rng = np.random.default_rng(self.seed)
        offsets = rng.uniform(-self.half_width, self.half_width, size=(self.count, 2))
        pts = np.mod(np.asarray(self.center) + offsets, 1.0)
        pts[pts >= 1.0] = 0.0
        return pts


@dataclass(frozen=True)
class SweepConfig:
    k_values: tuple[float, ...] = field(default_factory=log_k_grid)
    blocks: BlockSpec = BlockSpec(500_000, 500, 1000)
    observables: tuple[ObservableSpec, ...] = field(default_factory=default_observables)
    d_assumed: float = 2.0
    bootstrap_reps: int = 1000
    roundoff_t: int = 100
    threshold: float = 0.05

    def __post_init__(self):
        if not self.k_values:
            raise ValueError("k_values must not be empty")
        if any(not np.isfinite(k) or k < 0 for k in self.k_values):
            raise ValueError("every K must be finite and >= 0")
        _check_observables(self.observables)


@dataclass(frozen=True)
class GridScanConfig:
    resolution: int = 100
    K: float = 6.5
    blocks: BlockSpec = BlockSpec(100_000, 100, 1000)
    observables: tuple[ObservableSpec, ...] = field(default_factory=default_observables)
    roundoff_t: int = 100
    d_assumed: float = 2.0
    bootstrap_reps: int = 1000
    seed: int = 0
    threshold: float = 0.05

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be >= 2")
        if not np.isfinite(self.K) or self.K < 0:
            raise ValueError("K must be finite and >= 0")
        _check_observables(self.observables)

    def points(self) -> np.ndarray:
        """Cell centres of the lattice in row-major order (rows are constant y)."""
        c = (np.arange(self.resolution) + 0.5) / self.resolution
        xx, yy = np.meshgrid(c, c)
        return np.column_stack([xx.ravel(), yy.ravel()])


def _check_observables(observables):
    if not observables:
        raise ValueError("at least one observable is required")
    kinds = [o.kind for o in observables]
    if len(set(kinds)) != len(kinds):
        raise ValueError("observables must be distinct")


def to_jsonable(obj):
    """Plain JSON structure for a config (dataclasses, enums, tuples)."""
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, tuple) and hasattr(obj, "_fields"):
        return {k: to_jsonable(v) for k, v in zip(obj._fields, obj)}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
