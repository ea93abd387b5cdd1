import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import spearmanr

from gevindicators.dynamics import DiscreteMap, Precision, StandardMap, StandardMapParams, TorusPoint
from gevindicators.roundoff import (
    LOG_FLOOR,
    NoInverseError,
    RoundoffResult,
    divergence,
    divergence_history,
    reversibility_error,
    roundoff,
    roundoff_indicators,
    safe_log10,
)

SEA = (0.305, 0.7340)
# lies in a regular island at K=6.5 (found by a reversibility scan)
ISLAND = (0.79, 0.01)
BOUND = math.sqrt(2) / 2


@pytest.mark.parametrize("K", [0.0, 1e-4, 6.5, 100.0])
def test_zero_steps_gives_zero(K):
    params = StandardMapParams(K)
    assert divergence((0.123, 0.456), params, 0) == 0.0
    assert reversibility_error((0.123, 0.456), params, 0) == 0.0


@pytest.mark.parametrize("K", [0.5, 6.5, 100.0])
def test_fixed_point_stays_put(K):
    params = StandardMapParams(K)
    for t in (1, 10, 100):
        assert divergence((0.5, 0.0), params, t) == 0.0
        assert reversibility_error((0.5, 0.0), params, t) == 0.0


def test_negative_t_is_rejected():
    with pytest.raises(ValueError):
        divergence((0.1, 0.2), StandardMapParams(1.0), -1)


def test_chaotic_orbit_saturates():
    res = roundoff(SEA, StandardMapParams(6.5), 100)
    assert isinstance(res, RoundoffResult) and res.t == 100
    assert safe_log10(res.divergence) > -1.5
    assert safe_log10(res.reversibility) > -1.5


def test_island_is_orders_of_magnitude_lower():
    params = StandardMapParams(6.5)
    sea = roundoff(SEA, params, 100)
    island = roundoff(ISLAND, params, 100)
    assert island.reversibility < 1e-3 * sea.reversibility
    assert island.divergence < 1e-3 * sea.divergence


def test_divergence_matches_hand_built_orbits():
    dm = StandardMap.from_K(3.0)
    p0 = np.float32([0.21, 0.64])
    s = dm.orbit(p0, 40, Precision.SINGLE)[-1]
    d = dm.orbit(p0.astype(np.float64), 40, Precision.DOUBLE)[-1]
    expect = math.hypot(*(min(abs(a - b), 1 - abs(a - b)) for a, b in zip(map(float, s), d)))
    assert divergence(tuple(map(float, p0)), dm, 40) == pytest.approx(expect, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True),
       st.floats(0, 100), st.integers(0, 300))
def test_torus_bound(x, y, K, t):
    div, rev = roundoff_indicators([(x, y)], StandardMapParams(K), t)
    assert 0 <= div[0] <= BOUND + 1e-12
    assert 0 <= rev[0] <= BOUND + 1e-12


def test_history_endpoints_match_scalar_calls():
    params = StandardMapParams(10.0)
    pts = np.random.default_rng(1).random((5, 2))
    hist = divergence_history(pts, params, 30)
    assert hist.shape == (5, 31)
    assert np.all(hist[:, 0] == 0)
    div, _ = roundoff_indicators(pts, params, 30)
    np.testing.assert_array_equal(hist[:, -1], div)


def test_monotone_envelope_until_saturation():
    pts = np.random.default_rng(0).random((200, 2))
    mean = safe_log10(divergence_history(pts, StandardMapParams(10.0), 100)).mean(axis=0)
    plateau = mean[50:].mean()
    sat = int(np.argmax(mean >= plateau - 0.1))
    assert sat > 3
    assert np.all(np.diff(mean[: sat + 1]) > 0)
    # afterwards it only fluctuates around the plateau
    assert np.all(np.abs(mean[sat:] - plateau) < 0.15)
    assert plateau > -1


def test_indicators_rank_correlate_on_grid():
    g = (np.arange(50) + 0.5) / 50
    xx, yy = np.meshgrid(g, g)
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    div, rev = roundoff_indicators(pts, StandardMapParams(6.5), 100)
    rho = spearmanr(safe_log10(div), safe_log10(rev)).statistic
    assert rho >= 0.8


def test_safe_log10_floors_zero_only_for_display():
    vals = np.array([0.0, 1e-3])
    np.testing.assert_allclose(safe_log10(vals), [math.log10(LOG_FLOOR), -3.0])
    assert vals[0] == 0.0


class _Forward(DiscreteMap):
    def step(self, p, prec=Precision.DOUBLE):
        dt = prec.dtype
        return TorusPoint.wrap(dt(p[0]) + dt(0.25), dt(p[1]))


def test_map_without_inverse():
    with pytest.raises(NoInverseError):
        reversibility_error((0.1, 0.2), _Forward(), 5)
    # divergence still works, reversibility reported as missing
    assert divergence((0.5, 0.2), _Forward(), 4) == 0.0
    assert math.isnan(roundoff((0.5, 0.2), _Forward(), 4).reversibility)
