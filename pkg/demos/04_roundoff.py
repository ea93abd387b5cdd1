"""Round-off indicators separate islands from the chaotic sea."""

import numpy as np

from gevindicators import StandardMapParams
from gevindicators.roundoff import divergence_history, roundoff, safe_log10

params = StandardMapParams(6.5)
for label, p0 in (("chaotic sea", (0.305, 0.7340)), ("island", (0.79, 0.01))):
    r = roundoff(p0, params, 100)
    print(f"{label:12s} log10 divergence {safe_log10(r.divergence):6.2f}"
          f"   log10 reversibility {safe_log10(r.reversibility):6.2f}")

# averaged over random starts the divergence grows exponentially, then saturates
pts = np.random.default_rng(0).random((200, 2))
mean = safe_log10(divergence_history(pts, StandardMapParams(10.0), 30)).mean(axis=0)
print("mean log10 divergence at t = 1, 5, 10, 20, 30:", np.round(mean[[1, 5, 10, 20, 30]], 2))
