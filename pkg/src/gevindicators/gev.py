"""GEV fitting by sample L-moments, bootstrap intervals and theoretical targets.

Shape convention: ``xi > 0`` is Frechet, ``xi < 0`` Weibull, ``xi = 0``
Gumbel, i.e. ``F(x) = exp(-(1 + xi (x - mu)/sigma)**(-1/xi))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gamma as gamma_fn

from .extremes import BlockSpec, MaximaSeries, ObservableKind

__all__ = [
    "DegenerateSampleError",
    "GevDomainError",
    "KindMismatchError",
    "GevParams",
    "LMoments",
    "Intervals",
    "FitResult",
    "TheoreticalTarget",
    "Deviation",
    "sample_lmoments",
    "gev_from_lmoments",
    "fit_gev",
    "theoretical_params",
    "deviation_score",
    "gev_cdf",
    "gev_ppf",
    "gev_sample",
]

EULER_GAMMA = 0.5772156649015329
LN2 = math.log(2.0)
_C_OFFSET = math.log(2.0) / math.log(3.0)
_GUMBEL_LIMIT = 1e-8
_BOOT_CHUNK = 250


class DegenerateSampleError(ValueError):
    """All sample values are equal: no dispersion to fit."""


class GevDomainError(ValueError):
    """L-moments outside the range the GEV estimator can map."""


class KindMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class GevParams:
    mu: float
    sigma: float
    xi: float

    def __post_init__(self):
        if not all(map(math.isfinite, (self.mu, self.sigma, self.xi))):
            raise ValueError(f"non-finite GEV parameters {self}")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class LMoments:
    l1: float
    l2: float
    tau3: float


class Intervals(NamedTuple):
    mu: tuple[float, float]
    sigma: tuple[float, float]
    xi: tuple[float, float]


@dataclass(frozen=True)
class FitResult:
    params: GevParams
    ci: Intervals
    sample_size: int
    failed_fraction: float = 0.0
    kind: ObservableKind | None = None


@dataclass(frozen=True)
class TheoreticalTarget:
    """Expected GEV parameters for a chaotic orbit; ``None`` marks a scaling-only entry."""

    kind: ObservableKind
    d: float
    alpha: float
    k: int
    n: int
    mu: float | None
    sigma: float | None
    xi: float


@dataclass(frozen=True)
class Deviation:
    xi: float
    sigma: float | None
    mu: float | None
    inside_ci: dict


def _pwm_lmoments(x_sorted: np.ndarray):
    """l1, l2, tau3 along the last axis of an ascending-sorted array."""
    n = x_sorted.shape[-1]
    j = np.arange(n, dtype=np.float64)
    w1 = j / (n - 1)
    w2 = j * (j - 1) / ((n - 1) * (n - 2))
    b0 = x_sorted.mean(axis=-1)
    b1 = (x_sorted @ w1) / n
    b2 = (x_sorted @ w2) / n
    l2 = 2 * b1 - b0
    with np.errstate(divide="ignore", invalid="ignore"):
        tau3 = (6 * b2 - 6 * b1 + b0) / l2
    return b0, l2, tau3


def sample_lmoments(sample) -> LMoments:
    """First two sample L-moments and the L-skewness (unbiased PWM estimator)."""
    x = np.sort(np.asarray(sample, dtype=np.float64).ravel())
    if len(x) < 3:
        raise ValueError("need at least 3 values for sample L-moments")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    if x[0] == x[-1]:
        raise DegenerateSampleError("all sample values are equal")
    l1, l2, tau3 = _pwm_lmoments(x)
    if not l2 > 0:
        # equal values up to rounding
        raise DegenerateSampleError("sample has no dispersion")
    return LMoments(float(l1), float(l2), float(tau3))


def _gev_arrays(l1, l2, tau3):
    """Vectorised Hosking estimator; invalid entries come back as NaN."""
    l1, l2, tau3 = np.broadcast_arrays(*(np.asarray(a, dtype=np.float64) for a in (l1, l2, tau3)))
    ok = (l2 > 0) & (np.abs(tau3) < 1)
    c = 2.0 / (3.0 + np.where(ok, tau3, 0.0)) - _C_OFFSET
    h = 7.8590 * c + 2.9554 * c * c
    ok &= h > -1
    gumbel = np.abs(h) < _GUMBEL_LIMIT
    hs = np.where(ok & ~gumbel, h, 1.0)
    g = gamma_fn(1 + hs)
    sigma = np.where(gumbel, l2 / LN2, l2 * hs / ((1 - 2.0 ** (-hs)) * g))
    mu = np.where(gumbel, l1 - sigma * EULER_GAMMA, l1 - sigma * (1 - g) / hs)
    xi = np.where(gumbel, 0.0, -h)
    ok &= np.isfinite(sigma) & np.isfinite(mu) & (sigma > 0)
    nan = np.nan
    return np.where(ok, mu, nan), np.where(ok, sigma, nan), np.where(ok, xi, nan)


def gev_from_lmoments(lm: LMoments) -> GevParams:
    if not lm.l2 > 0:
        raise DegenerateSampleError("l2 must be positive")
    if not abs(lm.tau3) < 1:
        raise GevDomainError(f"L-skewness {lm.tau3} outside (-1, 1)")
    mu, sigma, xi = (float(v) for v in _gev_arrays(lm.l1, lm.l2, lm.tau3))
    if math.isnan(mu):
        raise GevDomainError(f"L-skewness {lm.tau3} maps outside the estimator's domain")
    return GevParams(mu, sigma, xi)


def _bootstrap(values: np.ndarray, reps: int, seed: int) -> np.ndarray:
    """``(reps, 3)`` array of refitted (mu, sigma, xi); failed replicates are NaN."""
    rng = np.random.default_rng(seed)
    n = len(values)
    out = np.empty((reps, 3))
    for start in range(0, reps, _BOOT_CHUNK):
        size = min(_BOOT_CHUNK, reps - start)
        resampled = np.sort(values[rng.integers(0, n, size=(size, n))], axis=1)
        lm = _pwm_lmoments(resampled)
        out[start:start + size] = np.column_stack(_gev_arrays(*lm))
    return out


def fit_gev(maxima: MaximaSeries | np.ndarray, bootstrap_reps: int = 1000, seed: int = 0,
            confidence: float = 0.95) -> FitResult:
    """L-moments GEV fit with a percentile-bootstrap interval for each parameter.

    Raises :class:`DegenerateSampleError` or :class:`GevDomainError` when the
    point estimate cannot be formed; failed bootstrap replicates are only
    counted.
    """
    if bootstrap_reps < 1:
        raise ValueError("bootstrap_reps must be >= 1")
    kind = getattr(maxima, "kind", None)
    values = np.asarray(getattr(maxima, "values", maxima), dtype=np.float64)
    if len(values) < 50:
        warnings.warn(f"fitting a GEV to only {len(values)} maxima", stacklevel=2)
    params = gev_from_lmoments(sample_lmoments(values))

    boot = _bootstrap(values, bootstrap_reps, seed)
    good = np.all(np.isfinite(boot), axis=1)
    tail = 50 * (1 - confidence)
    point = (params.mu, params.sigma, params.xi)
    bounds = []
    for col, p in enumerate(point):
        if good.any():
            lo, hi = np.percentile(boot[good, col], [tail, 100 - tail])
            # percentile intervals of a biased estimator can miss the point
            bounds.append((float(min(lo, p)), float(max(hi, p))))
        else:
            bounds.append((math.nan, math.nan))
    return FitResult(params, Intervals(*bounds), len(values),
                     float(1 - good.mean()), kind)


def theoretical_params(kind: ObservableKind, d: float, alpha: float, blocks: BlockSpec,
                       c: float = 0.0) -> TheoreticalTarget:
    """First-order GEV parameters expected for a chaotic orbit of dimension ``d``."""
    if not d > 0 or not alpha > 0:
        raise ValueError("d and alpha must be positive")
    kind = ObservableKind(kind)
    if kind is ObservableKind.G1:
        mu, sigma, xi = math.log(blocks.k / blocks.n) / d, 1.0 / d, 0.0
    elif kind is ObservableKind.G2:
        mu, sigma, xi = None, None, 1.0 / (alpha * d)
    else:
        mu, sigma, xi = c, None, -1.0 / (alpha * d)
    return TheoreticalTarget(kind, d, alpha, blocks.k, blocks.n, mu, sigma, xi)


def deviation_score(fit: FitResult, target: TheoreticalTarget) -> Deviation:
    """Absolute parameter deviations from theory, and whether theory is inside each CI."""
    if fit.kind is not None and fit.kind is not target.kind:
        raise KindMismatchError(f"fit is for {fit.kind.value}, target for {target.kind.value}")
    inside = {}
    scores = {}
    for name in ("xi", "sigma", "mu"):
        expected = getattr(target, name)
        if expected is None:
            scores[name] = None
            continue
        value = getattr(fit.params, name)
        lo, hi = getattr(fit.ci, name)
        scores[name] = abs(value - expected)
        inside[name] = bool(lo <= expected <= hi)
    return Deviation(scores["xi"], scores["sigma"], scores["mu"], inside)


def gev_cdf(x, mu: float, sigma: float, xi: float):
    z = (np.asarray(x, dtype=np.float64) - mu) / sigma
    if xi == 0:
        return np.exp(-np.exp(-z))
    t = np.maximum(1 + xi * z, 0.0)
    with np.errstate(divide="ignore"):
        return np.exp(-t ** (-1 / xi))


def gev_ppf(u, mu: float, sigma: float, xi: float):
    """Inverse of :func:`gev_cdf`."""
    e = -np.log(np.asarray(u, dtype=np.float64))
    if xi == 0:
        return mu - sigma * np.log(e)
    return mu + sigma * (e ** (-xi) - 1) / xi


def gev_sample(mu: float, sigma: float, xi: float, size, rng=None) -> np.ndarray:
    rng = np.random.default_rng(rng)
    return gev_ppf(rng.random(size), mu, sigma, xi)
