"""Scaled reproductions of the headline results, one test group per criterion."""

import math

import numpy as np
import pytest

from gevindicators.dynamics import StandardMap, StandardMapParams
from gevindicators.extremes import BlockSpec, ObservableKind, ObservableSpec, block_maxima
from gevindicators.gev import gev_from_lmoments, gev_sample, sample_lmoments
from gevindicators.harness import (
    EnsembleConfig,
    GridScanConfig,
    SweepConfig,
    run_binsize_study,
    run_ensemble_sweep,
    run_grid_scan,
)
from gevindicators.harness.cli import HEATMAP_FIELDS, main
from gevindicators.roundoff import roundoff_indicators, safe_log10

criterion = pytest.mark.criterion


@pytest.fixture(scope="module")
def sweep():
    ens = EnsembleConfig(count=50, seed=0)
    cfg = SweepConfig(k_values=(1e-4, 100.0), blocks=BlockSpec(500_000, 500, 1000),
                      bootstrap_reps=1000)
    return run_ensemble_sweep(ens, cfg)


@criterion(1, "chaotic-regime convergence at K=100")
def test_chaotic_convergence(sweep, measured):
    g1 = [r.xi("g1") for r in sweep.records[100.0]]
    mean_abs_xi = float(np.nanmean(np.abs(g1)))
    sigma = sweep.row(100.0, "g1")["mean_sigma"]
    xi2 = sweep.row(100.0, "g2")["mean_xi"]
    xi3 = sweep.row(100.0, "g3")["mean_xi"]
    measured(f"mean|xi_g1|={mean_abs_xi:.4f} sigma_g1={sigma:.4f} "
             f"xi_g2={xi2:.4f} xi_g3={xi3:.4f}")
    assert sweep.row(100.0, "g1")["n_ok"] == 50
    assert mean_abs_xi <= 0.05
    assert abs(sigma - 0.5) <= 0.05
    assert abs(xi2 - 1 / 6) <= 0.05
    assert abs(xi3 + 1 / 6) <= 0.05


@criterion(2, "regular-regime spread at K=1e-4")
def test_regular_divergence(sweep, measured):
    regular, chaotic = sweep.row(1e-4, "g1"), sweep.row(100.0, "g1")
    ratio = (regular["std_xi"] or 0.0) / chaotic["std_xi"]
    failed = regular["failed_fraction"]
    measured(f"std ratio={ratio:.2f} degenerate fraction={failed:.2f}")
    assert ratio >= 5 or failed >= 0.20


@criterion(3, "island detection on a 100x100 scan at K=6.5")
def test_island_detection(measured):
    cfg = GridScanConfig(resolution=100, K=6.5, blocks=BlockSpec(100_000, 100, 1000),
                         bootstrap_reps=100, observables=(ObservableSpec(ObservableKind.G1),))
    scan = run_grid_scan(cfg)
    dev = np.array([r.observables["g1"].deviation.xi if r.observables["g1"].deviation
                    else math.inf for r in scan.records])
    regular_by_xi = dev > 0.1
    log_r = scan.values("log10_R")
    regular_by_r = log_r <= np.median(log_r)
    agreement = float(np.mean(regular_by_xi == regular_by_r))
    measured(f"agreement={agreement:.3f} flagged by xi={regular_by_xi.mean():.3f}")
    assert agreement >= 0.80


@criterion(4, "bin-size convergence at K=4.5")
def test_binsize_convergence(measured):
    cfg = GridScanConfig(resolution=50, K=4.5, blocks=BlockSpec.from_bins(1000, 1000),
                         bootstrap_reps=20, observables=(ObservableSpec(ObservableKind.G1),))
    study = run_binsize_study(cfg, [1000, 10_000])
    small, large = study.mean_abs_xi(1000), study.mean_abs_xi(10_000)
    measured(f"m=1e3: {small:.4f}  m=1e4: {large:.4f}  chaotic cells={int(study.chaotic.sum())}")
    assert large < small


@criterion(5, "L-moment fit recovers known parameters")
@pytest.mark.parametrize("xi", [-0.3, 0.0, 0.15, 0.3])
def test_fit_recovery(xi, measured):
    mu, sigma = 1.0, 2.0
    hits = {"mu": 0, "sigma": 0, "xi": 0}
    for trial in range(100):
        p = gev_from_lmoments(sample_lmoments(gev_sample(mu, sigma, xi, 1000, rng=trial)))
        hits["mu"] += abs(p.mu - mu) <= 0.05 * abs(mu)
        if xi == 0.0:
            hits["sigma"] += abs(p.sigma - sigma) <= 0.02
            hits["xi"] += abs(p.xi) <= 0.02
        else:
            hits["sigma"] += abs(p.sigma - sigma) <= 0.05 * sigma
            hits["xi"] += abs(p.xi - xi) <= 0.05 * abs(xi)
    measured(f"xi={xi}: " + " ".join(f"{k}={v}%" for k, v in hits.items()))
    assert all(v >= 95 for v in hits.values())


@criterion(6, "streamed block maxima equal a naive loop")
def test_block_maxima_equivalence(measured):
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n, m = rng.integers(1, 60, size=2)
        series = rng.standard_normal(n * m + rng.integers(0, 5))
        naive = []
        for j in range(n):
            best = -math.inf
            for i in range(j * m, (j + 1) * m):
                best = max(best, series[i])
            naive.append(best)
        assert list(block_maxima(series, BlockSpec.from_bins(int(n), int(m))).values) == naive
    measured("1000 series identical")


@criterion(7, "area preservation and forward/inverse round trip")
def test_map_correctness(measured):
    rng = np.random.default_rng(77)
    h = 1e-5
    worst_det = worst_trip = 0.0
    for _ in range(1000):
        x, y = rng.uniform(0.01, 0.99, size=2)
        dm = StandardMap.from_K(rng.uniform(0, 100))
        cols = []
        for dx, dy in ((h, 0.0), (0.0, h)):
            d = np.subtract(dm.step((x + dx, y + dy)), dm.step((x - dx, y - dy)))
            cols.append((d - np.round(d)) / (2 * h))
        det = cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1]
        worst_det = max(worst_det, abs(det - 1))
    for _ in range(1000):
        p = tuple(rng.random(2))
        dm = StandardMap.from_K(rng.uniform(0, 100))
        back = dm.inverse_step(dm.step(p))
        gap = np.abs(np.subtract(back, p))
        worst_trip = max(worst_trip, float(np.hypot(*np.minimum(gap, 1 - gap))))
    measured(f"max|detJ-1|={worst_det:.2e} max round trip={worst_trip:.2e}")
    assert worst_det <= 1e-8
    assert worst_trip <= 1e-12


@criterion(8, "scan output is independent of the worker count")
def test_determinism(tmp_path, measured):
    argv = ["scan", "--grid", "16", "--seed", "11", "--bootstrap-reps", "200"]
    assert main([*argv, "--workers", "1", "--out", str(tmp_path / "w1")]) == 0
    assert main([*argv, "--workers", "8", "--out", str(tmp_path / "w8")]) == 0
    names = ["records.csv"] + [f"{f}.ppm" for f in HEATMAP_FIELDS]
    for name in names:
        assert (tmp_path / "w1" / name).read_bytes() == (tmp_path / "w8" / name).read_bytes(), name
    measured(f"{len(names)} files byte-identical")


@criterion(9, "round-off divergence saturates in chaos and stays small when regular")
def test_roundoff_behaviour(measured):
    pts = np.random.default_rng(9).random((100, 2))
    chaotic = float(safe_log10(roundoff_indicators(pts, StandardMapParams(10.0), 100)[0]).mean())
    regular = float(safe_log10(roundoff_indicators(pts, StandardMapParams(1e-4), 100)[0]).mean())
    measured(f"K=10: {chaotic:.2f}  K=1e-4: {regular:.2f}")
    assert chaotic >= -1
    assert regular <= -4
