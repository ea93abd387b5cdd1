"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 I/O error.  Numerical
failures in individual cells are recorded in the output, never in the exit
code.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .. import __version__
from ..dynamics import Precision, StandardMap, TorusPoint, iterate
from ..extremes import (
    BlockSpec,
    ObservableKind,
    ObservableSpec,
    block_maxima,
    distance_series,
    apply_observable,
)
from ..gev import DegenerateSampleError, GevDomainError, fit_gev
from .config import (
    DEFAULT_HALF_WIDTH,
    DEFAULT_CENTER,
    EnsembleConfig,
    GridScanConfig,
    SweepConfig,
    log_k_grid,
    to_jsonable,
)
from .experiments import run_binsize_study, run_ensemble_sweep, run_grid_scan
from .io import record_columns, record_to_row, render_heatmap, write_manifest, write_records, write_table

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2

HEATMAP_FIELDS = ("xi_g1", "sigma_g1", "xi_g2", "xi_g3", "log10_R", "log10_div")


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text: str) -> list[int]:
    return [int(float(v)) for v in text.split(",") if v.strip()]


def _point(text: str) -> TorusPoint:
    x, y = _float_list(text)
    return TorusPoint(x, y)


def _common(p: argparse.ArgumentParser, *, k_total, bins, bin_size, grid=None):
    p.add_argument("--k-total", type=lambda s: int(float(s)), default=None,
                   help=f"series length k (default {k_total})")
    p.add_argument("--bins", type=lambda s: int(float(s)), default=None,
                   help=f"number of bins n (default {bins})")
    p.add_argument("--bin-size", type=lambda s: int(float(s)), default=None,
                   help=f"observations per bin m (default {bin_size})")
    p.set_defaults(_blocks=(k_total, bins, bin_size))
    if grid is not None:
        p.add_argument("--grid", type=int, default=grid, help="lattice points per axis")
    p.add_argument("--alpha", type=float, default=3.0)
    p.add_argument("--c", type=float, default=0.0, help="constant of the g3 observable")
    p.add_argument("--observables", default="g1,g2,g3")
    p.add_argument("--d", type=float, default=2.0, help="attractor dimension assumed by theory")
    p.add_argument("--roundoff-t", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bootstrap-reps", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--threshold", type=float, default=0.05,
                   help="largest |xi| deviation still classified chaotic")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gevindicators", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep-k", help="ensemble statistics of GEV parameters versus K")
    p.add_argument("--K", type=_float_list, default=None,
                   help="comma-separated K values (default: 25 log-spaced in [1e-4, 1e2])")
    p.add_argument("--center", type=_point, default=DEFAULT_CENTER)
    p.add_argument("--half-width", type=float, default=DEFAULT_HALF_WIDTH)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--full-scale", action="store_true",
                   help="500 initial conditions, k=1e6, n=m=1000")
    _common(p, k_total=500_000, bins=500, bin_size=1000)

    for name, helptext in (("scan", "phase-space grid scan"),
                           ("binsize", "repeat a scan for several bin sizes")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--K", type=float, default=6.5 if name == "scan" else 4.5)
        p.add_argument("--full-scale", action="store_true", help="500x500 grid, k=1e6, n=m=1000")
        if name == "binsize":
            p.add_argument("--m-values", type=_int_list, default=[1000, 10000])
            p.add_argument("--chaos-log10-R", type=float, default=-2.0,
                           help="log10 R_t above which a cell counts as chaotic sea")
            _common(p, k_total=None, bins=1000, bin_size=None, grid=50)
        else:
            _common(p, k_total=100_000, bins=100, bin_size=1000, grid=100)

    p = sub.add_parser("orbit", help="dump one orbit's observable series and block maxima")
    p.add_argument("--K", type=float, default=6.5)
    p.add_argument("--x0", type=float, default=DEFAULT_CENTER.x)
    p.add_argument("--y0", type=float, default=DEFAULT_CENTER.y)
    _common(p, k_total=100_000, bins=100, bin_size=1000)

    p = sub.add_parser("fit", help="fit a GEV to a file of maxima")
    p.add_argument("path", type=Path, help="text file: one value per line, or CSV with --column")
    p.add_argument("--column", default=None)
    p.add_argument("--bootstrap-reps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None)
    return parser


def _blocks(args) -> BlockSpec:
    """Resolve --k-total/--bins/--bin-size against the subcommand defaults."""
    _, n0, m0 = (1_000_000, 1000, 1000) if args.__dict__.get("full_scale") else args._blocks
    n = args.bins if args.bins is not None else n0
    if args.bin_size is not None:
        m = args.bin_size
    elif args.k_total is not None:
        if args.k_total % n:
            raise ConfigError("--k-total must be a multiple of --bins")
        m = args.k_total // n
    elif m0 is not None:
        m = m0
    else:
        raise ConfigError("--bin-size is required")
    k = args.k_total if args.k_total is not None else n * m
    try:
        return BlockSpec(k, n, m)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _observables(args) -> tuple[ObservableSpec, ...]:
    try:
        kinds = [ObservableKind.parse(s) for s in args.observables.split(",") if s.strip()]
        return tuple(ObservableSpec(k, args.alpha, args.c) for k in kinds)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _manifest(args, config: dict) -> dict:
    return {"command": args.command, "version": __version__, "argv": args.argv,
            "seed": args.seed, "config": config}


def _outdir(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {path}: {exc}") from exc
    return path


def _write_scan(scan, out: Path, fields):
    write_records(scan.records, out / "records.csv", [o.name for o in scan.config.observables])
    names = {o.name for o in scan.config.observables}
    for f in fields:
        if f.startswith("log10_") or f.rsplit("_", 1)[-1] in names:
            render_heatmap(scan, f, out / f"{f}.ppm")


def _cmd_sweep(args):
    full = args.full_scale
    ens = EnsembleConfig(args.center, args.half_width, 500 if full else args.count, args.seed)
    sweep = SweepConfig(tuple(args.K) if args.K else log_k_grid(), _blocks(args),
                        _observables(args), args.d, args.bootstrap_reps, args.roundoff_t,
                        args.threshold)
    out = _outdir(args.out)
    result = run_ensemble_sweep(ens, sweep, args.workers)
    write_table(result.rows, out / "sweep.csv")
    records = [r for recs in result.records.values() for r in recs]
    rows_k = [K for K, recs in result.records.items() for _ in recs]
    rows = [dict(record_to_row(r), K=K) for r, K in zip(records, rows_k)]
    write_table(rows, out / "records.csv",
                ["K"] + record_columns([o.name for o in sweep.observables]))
    write_manifest(out / "run.json", _manifest(
        args, {"ensemble": to_jsonable(ens), "sweep": to_jsonable(sweep)}))


def _scan_config(args, m=None) -> GridScanConfig:
    grid = 500 if args.full_scale else args.grid
    try:
        return GridScanConfig(grid, args.K, _blocks(args) if m is None else m,
                              _observables(args), args.roundoff_t, args.d,
                              args.bootstrap_reps, args.seed, args.threshold)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _cmd_scan(args):
    cfg = _scan_config(args)
    out = _outdir(args.out)
    scan = run_grid_scan(cfg, args.workers)
    _write_scan(scan, out, HEATMAP_FIELDS)
    write_manifest(out / "run.json", _manifest(args, to_jsonable(cfg)))


def _cmd_binsize(args):
    n = 1000 if args.full_scale else (args.bins or args._blocks[1])
    if not args.m_values:
        raise ConfigError("--m-values must not be empty")
    base = BlockSpec.from_bins(n, args.m_values[0])
    cfg = _scan_config(args, base)
    out = _outdir(args.out)
    study = run_binsize_study(cfg, args.m_values, args.workers, args.chaos_log10_R)
    for m, scan in study.scans.items():
        _write_scan(scan, _outdir(out / f"m_{m}"), HEATMAP_FIELDS)
    write_table(study.summary, out / "binsize.csv")
    write_manifest(out / "run.json", _manifest(
        args, {"scan": to_jsonable(cfg), "m_values": args.m_values,
               "chaos_log10_R": args.chaos_log10_R}))


def _cmd_orbit(args):
    blocks = _blocks(args)
    specs = _observables(args)
    zeta = TorusPoint(args.x0, args.y0)
    if not zeta.is_valid():
        raise ConfigError("initial condition must lie in [0, 1)^2")
    orbit = iterate(zeta, StandardMap.from_K(args.K), Precision.DOUBLE, blocks.k)
    floor = min(s.distance_floor for s in specs)
    d, count = distance_series(orbit, zeta, floor)
    out = _outdir(args.out)
    series = {"t": np.arange(1, blocks.k + 1), "x": orbit[:, 0], "y": orbit[:, 1], "distance": d}
    maxima = {"bin": np.arange(blocks.n)}
    for s in specs:
        series[s.name] = apply_observable(d, s)
        maxima[s.name] = block_maxima(series[s.name], blocks).values
    _write_columns(series, out / "series.csv")
    _write_columns(maxima, out / "maxima.csv")
    write_manifest(out / "run.json", _manifest(
        args, {"K": args.K, "x0": args.x0, "y0": args.y0, "blocks": to_jsonable(blocks),
               "observables": to_jsonable(specs), "exact_returns": count}))


def _write_columns(columns: dict, path: Path):
    names = list(columns)
    arrays = [np.asarray(columns[k]) for k in names]
    rows = [dict(zip(names, (a[i].item() for a in arrays))) for i in range(len(arrays[0]))]
    write_table(rows, path, names)


def _load_maxima(path: Path, column: str | None) -> np.ndarray:
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read maxima file {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    try:
        if column is None:
            return np.array([float(ln.split(",")[0]) for ln in lines])
        header = lines[0].split(",")
        if column not in header:
            raise ConfigError(f"column {column!r} not in {path}")
        j = header.index(column)
        return np.array([float(ln.split(",")[j]) for ln in lines[1:]])
    except (ValueError, IndexError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot parse maxima in {path}: {exc}") from None


def _cmd_fit(args):
    values = _load_maxima(args.path, args.column)
    try:
        res = fit_gev(values, args.bootstrap_reps, args.seed)
        payload = {"status": "ok", "params": to_jsonable(res.params), "ci": to_jsonable(res.ci),
                   "sample_size": res.sample_size, "failed_fraction": res.failed_fraction}
    except DegenerateSampleError as exc:
        payload = {"status": "degenerate", "message": str(exc), "sample_size": len(values)}
    except GevDomainError as exc:
        payload = {"status": "domain_error", "message": str(exc), "sample_size": len(values)}
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.out is not None:
        write_manifest(_outdir(args.out) / "fit.json", payload)


COMMANDS = {"sweep-k": _cmd_sweep, "scan": _cmd_scan, "binsize": _cmd_binsize,
            "orbit": _cmd_orbit, "fit": _cmd_fit}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 1 via _Parser.error; --help/--version exit 0
        return EXIT_OK if exc.code is None else int(exc.code)
    args.argv = argv
    started = time.perf_counter()
    try:
        COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"gevindicators: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"gevindicators: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"{args.command} done in {time.perf_counter() - started:.1f}s", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
