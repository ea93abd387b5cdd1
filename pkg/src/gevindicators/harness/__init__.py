"""Experiment orchestration, persistence and the command-line interface."""

from .config import EnsembleConfig, GridScanConfig, SweepConfig
from .experiments import (
    BinsizeStudy,
    GridScan,
    IndicatorRecord,
    ObservableResult,
    SweepResult,
    evaluate_points,
    run_binsize_study,
    run_ensemble_sweep,
    run_grid_scan,
)
from .io import read_records, render_heatmap, write_manifest, write_records
