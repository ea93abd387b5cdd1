"""Iterating the Standard map in double and single precision."""

import numpy as np

from gevindicators import Precision, StandardMap, iterate, torus_distance

zeta = (0.305, 0.7340)
dm = StandardMap.from_K(6.5)

# the first five iterates of a chaotic orbit
orbit = iterate(zeta, dm, steps=5)
print("first iterates:\n", orbit)

# (0.5, 0) is a fixed point for every K
print("fixed point ->", dm.step((0.5, 0.0)))

# stepping back undoes a forward step up to rounding
p = dm.step(zeta)
print("round trip error:", torus_distance(dm.inverse_step(p), zeta))

# single and double orbits separate quickly in the chaotic sea
start = np.float32(zeta).astype(np.float64)
single = dm.orbit(start, 40, Precision.SINGLE)
double = dm.orbit(start, 40, Precision.DOUBLE)
for t in (1, 10, 20, 40):
    print(f"t={t:2d}  gap={torus_distance(single[t - 1], double[t - 1]):.3e}")

# long orbits can be streamed instead of stored
total = []
iterate(zeta, dm, steps=3_000_000, consumer=lambda chunk: total.append(len(chunk)))
print("streamed chunks:", total)
