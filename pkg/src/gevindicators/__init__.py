"""Regular/chaotic orbit classification from extreme-value statistics of close returns."""

__version__ = "0.1.0"

from .dynamics import (
    Direction,
    DiscreteMap,
    Precision,
    StandardMap,
    StandardMapParams,
    TorusPoint,
    iterate,
    standard_map_inverse_step,
    standard_map_step,
    torus_distance,
)
from .extremes import BlockSpec, MaximaSeries, ObservableKind, ObservableSpec
from .gev import FitResult, GevParams, fit_gev, theoretical_params
from .roundoff import divergence, reversibility_error
