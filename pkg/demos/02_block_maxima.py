"""From an orbit to block maxima of the three distance observables."""

import numpy as np

from gevindicators import BlockSpec, ObservableKind, ObservableSpec, StandardMap
from gevindicators.extremes import maxima_from_minima, orbit_block_minima

zeta = (0.305, 0.7340)
blocks = BlockSpec.from_bins(n=200, m=1000)

# per-bin closest approach of the orbit to its start, computed without
# storing the orbit
for K in (0.3, 6.5):
    minima, returns = orbit_block_minima(StandardMap.from_K(K), [zeta], blocks)
    print(f"K={K}: median closest approach {np.median(minima[0]):.2e}, exact returns {returns[0]}")
    for kind in ObservableKind:
        series = maxima_from_minima(minima[0], ObservableSpec(kind), int(returns[0]))
        v = series.values
        print(f"   {kind.value}: maxima mean {v.mean():9.4f}  spread {v.std():.4f}")
