"""Compiled inner loops for the Standard map.

Every kernel is generic over the floating dtype of its arguments: numba
specialises on float32 and float64 separately, so a float32 call keeps the
reduction, sine, add and mod-1 reduction in 32-bit arithmetic.
"""

import math

import numba as nb
import numpy as np


@nb.njit(cache=True, inline="always")
def wrap_unit(v):
    r = v - np.floor(v)
    # v slightly negative rounds to exactly 1.0
    if r >= 1.0:
        r = r - r
    return r


@nb.njit(cache=True, inline="always")
def sin_two_pi(x, pi):
    """sin(2 pi x) with exact reduction to the nearest half turn.

    ``2x - rint(2x)`` is exact, so half-integer ``x`` gives exactly zero.
    ``pi`` carries the working dtype (numba widens mixed float32 literals).
    """
    u = x + x
    n = np.rint(u)
    s = np.sin(pi * (u - n))
    if n * 0.5 != np.floor(n * 0.5):
        s = -s
    return s


@nb.njit(cache=True, inline="always")
def forward(x, y, kick, pi):
    y1 = wrap_unit(y - kick * sin_two_pi(x, pi))
    x1 = wrap_unit(x + y1)
    return x1, y1


@nb.njit(cache=True, inline="always")
def backward(x, y, kick, pi):
    x0 = wrap_unit(x - y)
    y0 = wrap_unit(y + kick * sin_two_pi(x0, pi))
    return x0, y0


@nb.njit(cache=True, inline="always")
def torus_d2(ax, ay, bx, by):
    dx = abs(float(ax) - float(bx))
    if dx > 0.5:
        dx = 1.0 - dx
    dy = abs(float(ay) - float(by))
    if dy > 0.5:
        dy = 1.0 - dy
    return dx * dx + dy * dy


@nb.njit(cache=True)
def orbit(x0, y0, kick, pi, steps, reverse, out):
    x, y = x0, y0
    for t in range(steps):
        if reverse:
            x, y = backward(x, y, kick, pi)
        else:
            x, y = forward(x, y, kick, pi)
        out[t, 0] = x
        out[t, 1] = y
    return x, y


@nb.njit(cache=True)
def block_min_distances(xs, ys, kick, pi, n, m, floor):
    """Per-bin minimum torus distance of each orbit to its own start."""
    npts = xs.shape[0]
    minima = np.empty((npts, n))
    returns = np.zeros(npts, dtype=np.int64)
    floor2 = floor * floor
    for p in range(npts):
        x0 = xs[p]
        y0 = ys[p]
        x, y = x0, y0
        hits = 0
        for j in range(n):
            best = np.inf
            for _ in range(m):
                x, y = forward(x, y, kick, pi)
                d2 = torus_d2(x, y, x0, y0)
                if d2 < floor2:
                    hits += 1
                if d2 < best:
                    best = d2
            minima[p, j] = math.sqrt(best)
        returns[p] = hits
    return minima, returns


@nb.njit(cache=True)
def roundoff(xs, ys, kick_s, pi_s, kick_d, pi_d, t):
    """Single-vs-double divergence and single-precision reversibility error.

    ``xs``/``ys`` are float32 starts; the double orbit starts from the same
    (exactly representable) values.
    """
    npts = xs.shape[0]
    div = np.empty(npts)
    rev = np.empty(npts)
    for p in range(npts):
        sx, sy = xs[p], ys[p]
        dx, dy = float(xs[p]), float(ys[p])
        for _ in range(t):
            sx, sy = forward(sx, sy, kick_s, pi_s)
            dx, dy = forward(dx, dy, kick_d, pi_d)
        div[p] = math.sqrt(torus_d2(sx, sy, dx, dy))
        for _ in range(t):
            sx, sy = backward(sx, sy, kick_s, pi_s)
        rev[p] = math.sqrt(torus_d2(sx, sy, xs[p], ys[p]))
    return div, rev


@nb.njit(cache=True)
def divergence_history(xs, ys, kick_s, pi_s, kick_d, pi_d, t):
    npts = xs.shape[0]
    out = np.zeros((npts, t + 1))
    for p in range(npts):
        sx, sy = xs[p], ys[p]
        dx, dy = float(xs[p]), float(ys[p])
        for s in range(1, t + 1):
            sx, sy = forward(sx, sy, kick_s, pi_s)
            dx, dy = forward(dx, dy, kick_d, pi_d)
            out[p, s] = math.sqrt(torus_d2(sx, sy, dx, dy))
    return out
