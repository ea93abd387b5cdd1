"""The three Standard-map experiments: K sweep, phase-space scan, bin-size study."""

from __future__ import annotations

import math
import multiprocessing
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..dynamics import DiscreteMap, StandardMap
from ..extremes import BlockSpec, ObservableKind, ObservableSpec, maxima_from_minima, orbit_block_minima
from ..gev import (
    Deviation,
    DegenerateSampleError,
    FitResult,
    GevDomainError,
    TheoreticalTarget,
    deviation_score,
    fit_gev,
    theoretical_params,
)
from ..roundoff import safe_log10
from .config import EnsembleConfig, GridScanConfig, SweepConfig

__all__ = [
    "ObservableResult",
    "IndicatorRecord",
    "SweepResult",
    "GridScan",
    "BinsizeStudy",
    "evaluate_points",
    "run_ensemble_sweep",
    "run_grid_scan",
    "run_binsize_study",
]

STATUS_OK = "ok"
STATUS_DEGENERATE = "degenerate"
STATUS_DOMAIN = "domain_error"

_CHUNK = 64


@dataclass
class ObservableResult:
    kind: ObservableKind
    status: str
    target: TheoreticalTarget
    exact_return_count: int
    fit: FitResult | None = None
    deviation: Deviation | None = None


@dataclass
class IndicatorRecord:
    index: int
    x0: float
    y0: float
    observables: dict[str, ObservableResult]
    divergence: float
    reversibility: float
    classification: str

    def xi(self, name: str = "g1") -> float:
        fit = self.observables[name].fit
        return math.nan if fit is None else fit.params.xi


@dataclass(frozen=True)
class _Task:
    dynmap: DiscreteMap
    points: np.ndarray
    start: int
    blocks: BlockSpec
    observables: tuple[ObservableSpec, ...]
    d: float
    bootstrap_reps: int
    seed: int
    roundoff_t: int
    threshold: float


def _fit_seed(seed: int, index: int, slot: int) -> int:
    return int(np.random.SeedSequence([seed, index, slot]).generate_state(1)[0])


def _evaluate_observable(minima, returns, spec, task, index, slot) -> ObservableResult:
    target = theoretical_params(spec.kind, task.d, spec.alpha, task.blocks, spec.c)
    maxima = maxima_from_minima(minima, spec, returns)
    result = ObservableResult(spec.kind, STATUS_OK, target, returns)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            fit = fit_gev(maxima, task.bootstrap_reps, _fit_seed(task.seed, index, slot))
    except DegenerateSampleError:
        result.status = STATUS_DEGENERATE
        return result
    except GevDomainError:
        result.status = STATUS_DOMAIN
        return result
    result.fit = fit
    result.deviation = deviation_score(fit, target)
    return result


def _run_task(task: _Task) -> list[IndicatorRecord]:
    # exact returns are counted against the tightest floor in use
    floor = min(o.distance_floor for o in task.observables)
    minima, returns = orbit_block_minima(task.dynmap, task.points, task.blocks, floor)
    div, rev = task.dynmap.roundoff(task.points, task.roundoff_t)
    records = []
    for row, p in enumerate(task.points):
        index = task.start + row
        obs = {}
        for slot, spec in enumerate(task.observables):
            obs[spec.name] = _evaluate_observable(minima[row], int(returns[row]), spec,
                                                  task, index, slot)
        chaotic = all(o.status == STATUS_OK and o.deviation.xi <= task.threshold
                      for o in obs.values())
        records.append(IndicatorRecord(index, float(p[0]), float(p[1]), obs,
                                       float(div[row]), float(rev[row]),
                                       "chaotic" if chaotic else "regular"))
    return records


def _parallel_map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
        return list(pool.map(fn, items))


def evaluate_points(dynmap: DiscreteMap, points, blocks: BlockSpec,
                    observables: tuple[ObservableSpec, ...], *, d: float = 2.0,
                    bootstrap_reps: int = 1000, seed: int = 0, roundoff_t: int = 100,
                    threshold: float = 0.05, workers: int = 1) -> list[IndicatorRecord]:
    """One :class:`IndicatorRecord` per initial condition, in input order.

    Work is split into fixed-size chunks and every random stream is keyed
    by (seed, point index, observable slot), so results do not depend on
    ``workers``.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    tasks = [_Task(dynmap, points[i:i + _CHUNK], i, blocks, tuple(observables), d,
                   bootstrap_reps, seed, roundoff_t, threshold)
             for i in range(0, len(points), _CHUNK)]
    out = []
    for chunk in _parallel_map(_run_task, tasks, workers):
        out.extend(chunk)
    return out


@dataclass
class SweepResult:
    config: SweepConfig
    ensemble: EnsembleConfig
    rows: list[dict]
    records: dict[float, list[IndicatorRecord]] = field(repr=False)

    def row(self, K: float, observable: str) -> dict:
        for r in self.rows:
            if r["K"] == K and r["observable"] == observable:
                return r
        raise KeyError((K, observable))


def _ensemble_stats(K: float, name: str, records: list[IndicatorRecord]) -> dict:
    fits = [r.observables[name].fit for r in records if r.observables[name].fit is not None]
    row = {"K": K, "observable": name, "count": len(records), "n_ok": len(fits),
           "failed_fraction": 1 - len(fits) / len(records)}
    for param in ("mu", "sigma", "xi"):
        vals = np.array([getattr(f.params, param) for f in fits])
        row[f"mean_{param}"] = float(vals.mean()) if len(vals) else None
        row[f"std_{param}"] = float(vals.std()) if len(vals) else None
    return row


def run_ensemble_sweep(ens: EnsembleConfig, sweep: SweepConfig, workers: int = 1) -> SweepResult:
    """Fit every ensemble member at each K; mean and spread of each GEV parameter."""
    points = ens.sample()
    rows, by_k = [], {}
    for K in sweep.k_values:
        records = evaluate_points(
            StandardMap.from_K(K), points, sweep.blocks, sweep.observables,
            d=sweep.d_assumed, bootstrap_reps=sweep.bootstrap_reps, seed=ens.seed,
            roundoff_t=sweep.roundoff_t, threshold=sweep.threshold, workers=workers)
        by_k[K] = records
        rows.extend(_ensemble_stats(K, o.name, records) for o in sweep.observables)
    return SweepResult(sweep, ens, rows, by_k)


@dataclass
class GridScan:
    config: GridScanConfig
    records: list[IndicatorRecord] = field(repr=False)

    @property
    def resolution(self) -> int:
        return self.config.resolution

    def values(self, name: str) -> np.ndarray:
        """Flat per-cell values of a named field (NaN where undefined)."""
        if name == "log10_R":
            return safe_log10([r.reversibility for r in self.records])
        if name == "log10_div":
            return safe_log10([r.divergence for r in self.records])
        if name in ("divergence", "reversibility"):
            return np.array([getattr(r, name) for r in self.records])
        param, _, obs = name.partition("_")
        out = []
        for r in self.records:
            fit = r.observables[obs].fit
            out.append(math.nan if fit is None else getattr(fit.params, param))
        return np.array(out, dtype=np.float64)

    def field(self, name: str) -> np.ndarray:
        """``(resolution, resolution)`` array; row ``j`` holds cells with ``y = (j + 1/2)/resolution``."""
        return self.values(name).reshape(self.resolution, self.resolution)


def run_grid_scan(cfg: GridScanConfig, workers: int = 1) -> GridScan:
    records = evaluate_points(
        StandardMap.from_K(cfg.K), cfg.points(), cfg.blocks, cfg.observables,
        d=cfg.d_assumed, bootstrap_reps=cfg.bootstrap_reps, seed=cfg.seed,
        roundoff_t=cfg.roundoff_t, threshold=cfg.threshold, workers=workers)
    return GridScan(cfg, records)


@dataclass
class BinsizeStudy:
    scans: dict[int, GridScan] = field(repr=False)
    chaotic: np.ndarray = field(repr=False)
    summary: list[dict] = field(default_factory=list)

    def mean_abs_xi(self, m: int) -> float:
        for row in self.summary:
            if row["m"] == m:
                return row["mean_abs_xi_g1"]
        raise KeyError(m)


def run_binsize_study(cfg: GridScanConfig, m_values, workers: int = 1,
                      chaos_log10_R: float = -2.0) -> BinsizeStudy:
    """Repeat the scan with ``n`` fixed and bins of each size in ``m_values``.

    Chaotic-sea cells are those whose reversibility error at
    ``cfg.roundoff_t`` reaches ``10**chaos_log10_R``; the summary gives,
    per ``m``, the mean of ``|xi(g1)|`` over them.
    """
    if ObservableKind.G1 not in {o.kind for o in cfg.observables}:
        raise ValueError("the bin-size study needs the g1 observable")
    m_values = [int(m) for m in m_values]
    if not m_values:
        raise ValueError("m_values must not be empty")
    scans = {}
    for m in m_values:
        sub = GridScanConfig(cfg.resolution, cfg.K, BlockSpec.from_bins(cfg.blocks.n, m),
                             cfg.observables, cfg.roundoff_t, cfg.d_assumed,
                             cfg.bootstrap_reps, cfg.seed, cfg.threshold)
        scans[m] = run_grid_scan(sub, workers)
    first = scans[m_values[0]]
    chaotic = first.values("log10_R") >= chaos_log10_R
    summary = []
    for m, scan in scans.items():
        xi = np.abs(scan.values("xi_g1"))
        sel = xi[chaotic & np.isfinite(xi)]
        summary.append({"m": m, "n": cfg.blocks.n, "chaotic_cells": int(chaotic.sum()),
                        "fitted_cells": int(len(sel)),
                        "mean_abs_xi_g1": float(sel.mean()) if len(sel) else None})
    return BinsizeStudy(scans, chaotic, summary)
