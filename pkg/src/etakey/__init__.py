"""Secret-key-rate bounds for BB84 with mismatched detector efficiencies."""

from .decoy import DecoyEstimates, DecoyInputs, IntensityRecord, decoy_estimates, decoy_keyrate
from .keyrate import (
    DeltaPair,
    DerivedBounds,
    KeyRateResult,
    Observables,
    STATUS_ABORT_ERROR_RATE,
    STATUS_ABORT_NO_SINGLE_PHOTON,
    STATUS_FEASIBLE,
    derive_bounds,
    deltas_from_single_obs,
    keyrate_multiphoton,
    keyrate_no_mismatch,
    keyrate_single_simple,
    keyrate_single_tight,
    pdet2_upper,
)
from .scalarmath import binary_entropy, p01_min, theta
from .simulate import (
    DepolarizingModel,
    SectorStats,
    SweepRow,
    depolarized_observables,
    depolarized_state,
    observables_from_state,
    sweep_figure,
)

__version__ = "0.1.0"

__all__ = [
    "DecoyEstimates",
    "DecoyInputs",
    "DeltaPair",
    "DepolarizingModel",
    "DerivedBounds",
    "IntensityRecord",
    "KeyRateResult",
    "Observables",
    "SectorStats",
    "STATUS_ABORT_ERROR_RATE",
    "STATUS_ABORT_NO_SINGLE_PHOTON",
    "STATUS_FEASIBLE",
    "SweepRow",
    "binary_entropy",
    "decoy_estimates",
    "decoy_keyrate",
    "deltas_from_single_obs",
    "depolarized_observables",
    "depolarized_state",
    "derive_bounds",
    "keyrate_multiphoton",
    "keyrate_no_mismatch",
    "keyrate_single_simple",
    "keyrate_single_tight",
    "observables_from_state",
    "p01_min",
    "pdet2_upper",
    "sweep_figure",
    "theta",
]
