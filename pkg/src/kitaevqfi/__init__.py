"""Boundary quantum Fisher information dynamics in the open Kitaev chain."""

__version__ = "0.1.0"

from .bdg import (
    BdgSpectrum,
    ChainParams,
    PropagatorPair,
    build_bdg_spectrum,
    bulk_dispersion,
    infinite_chain_propagator,
    max_group_velocity,
    propagators,
)
from .majorana import (
    MajoranaMode,
    critical_scaling_fit,
    localization_length,
    plateau_prediction,
    zero_mode,
)
from .experiments import (
    DisorderSpec,
    SpacetimeMap,
    TimeWindow,
    axis_asymmetry,
    disorder_ensemble,
    encoding_site_scan,
    phase_diagram_scan,
    spacetime_map,
    time_average_qfi,
    wavefront_velocity,
    window_average,
)
from .manybody import (
    ManyBodyParams,
    boundary_qfi_series,
    evolve_two_branches,
    interaction_scan,
    qfi_spectral,
    reduced_qubit_from_branches,
)
from .qfi import (
    BlochVector,
    Channel,
    QfiInputs,
    bloch_vector,
    qfi_closed_form,
    qfi_inputs,
    qfi_optimal,
    qfi_qubit,
    qfi_timeseries,
    w_timeseries,
)

__all__ = [
    "BdgSpectrum",
    "BlochVector",
    "ChainParams",
    "Channel",
    "DisorderSpec",
    "MajoranaMode",
    "ManyBodyParams",
    "PropagatorPair",
    "QfiInputs",
    "SpacetimeMap",
    "TimeWindow",
    "__version__",
    "axis_asymmetry",
    "bloch_vector",
    "boundary_qfi_series",
    "build_bdg_spectrum",
    "bulk_dispersion",
    "critical_scaling_fit",
    "disorder_ensemble",
    "encoding_site_scan",
    "evolve_two_branches",
    "infinite_chain_propagator",
    "interaction_scan",
    "localization_length",
    "max_group_velocity",
    "phase_diagram_scan",
    "plateau_prediction",
    "propagators",
    "qfi_closed_form",
    "qfi_inputs",
    "qfi_optimal",
    "qfi_qubit",
    "qfi_spectral",
    "qfi_timeseries",
    "reduced_qubit_from_branches",
    "spacetime_map",
    "time_average_qfi",
    "w_timeseries",
    "wavefront_velocity",
    "window_average",
    "zero_mode",
]
