"""A small phase-space scan written to CSV and pixmaps."""

import sys
import tempfile
from pathlib import Path

import numpy as np

from gevindicators.extremes import BlockSpec
from gevindicators.harness import GridScanConfig, render_heatmap, run_grid_scan, write_records

out = Path(sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="scan_"))
out.mkdir(parents=True, exist_ok=True)

cfg = GridScanConfig(resolution=24, K=6.5, blocks=BlockSpec.from_bins(100, 500),
                     bootstrap_reps=100)
scan = run_grid_scan(cfg, workers=2)
write_records(scan.records, out / "records.csv")
for field in ("xi_g1", "log10_R"):
    render_heatmap(scan, field, out / f"{field}.ppm")

labels = [r.classification for r in scan.records]
print(f"{labels.count('chaotic')} chaotic / {labels.count('regular')} regular cells")
print("median |xi_g1|:", float(np.nanmedian(np.abs(scan.values("xi_g1")))))
print("wrote", sorted(p.name for p in out.iterdir()), "to", out)
