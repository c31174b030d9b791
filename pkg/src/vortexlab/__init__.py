"""Vortex ground states, plasma modes, and cavity readout of a quasi-1D
Josephson junction array.

The package is organised as a pipeline: :mod:`~vortexlab.lattice` builds the
array geometry, gauge and circuit matrices; :mod:`~vortexlab.energy` evaluates
the Josephson potential and its derivatives; :mod:`~vortexlab.groundstate`
finds flux-dependent minima; :mod:`~vortexlab.spinwave` turns curvature into
linear mode spectra; :mod:`~vortexlab.cavity` maps spectra to microwave
reflection; :mod:`~vortexlab.disorder` handles junction-spread ensembles; and
:mod:`~vortexlab.config`/:mod:`~vortexlab.cli` orchestrate runs.
"""

__version__ = "0.1.0"

from .cavity import (
    CavityParams,
    FitError,
    FitResult,
    PoleError,
    ReflectionTrace,
    fit_resonance,
    photon_number,
    photon_number_from_watts,
    reflection_map,
    reflection_trace,
    s11,
    susceptibility,
)
from .config import RunConfig, apply_overrides, config_digest, load_config
from .disorder import (
    DisorderEnsemble,
    SusceptibilityStd,
    generate_ensemble,
    reflection_difference_map,
    susceptibility_std,
)
from .energy import (
    VortexMap,
    gradient,
    hessian,
    link_phases,
    potential,
    vortex_map,
    wrap_angle,
)
from .groundstate import (
    GroundStateResult,
    MinimizerConfig,
    minimize,
    sweep_ground_states,
)
from .lattice import (
    ArrayGeometry,
    CircuitParams,
    GaugeField,
    build_gauge,
    build_geometry,
    capacitance_matrix,
    plaquette_gauge_sums,
)
from .spinwave import (
    InductanceMatrix,
    ModeSpectrum,
    NotAMinimumError,
    SingularCurvatureError,
    conductance_matrix,
    inductance_matrix,
    link_inductances,
    lossy_dynamical_matrix,
    mode_spectrum,
    spectrum_vs_flux,
)

__all__ = [
    "__version__",
    "ArrayGeometry",
    "CavityParams",
    "CircuitParams",
    "DisorderEnsemble",
    "FitError",
    "FitResult",
    "GaugeField",
    "GroundStateResult",
    "InductanceMatrix",
    "MinimizerConfig",
    "ModeSpectrum",
    "NotAMinimumError",
    "PoleError",
    "ReflectionTrace",
    "RunConfig",
    "SingularCurvatureError",
    "SusceptibilityStd",
    "VortexMap",
    "apply_overrides",
    "build_gauge",
    "build_geometry",
    "capacitance_matrix",
    "conductance_matrix",
    "config_digest",
    "fit_resonance",
    "generate_ensemble",
    "gradient",
    "hessian",
    "inductance_matrix",
    "link_inductances",
    "link_phases",
    "load_config",
    "lossy_dynamical_matrix",
    "minimize",
    "mode_spectrum",
    "photon_number",
    "photon_number_from_watts",
    "plaquette_gauge_sums",
    "potential",
    "reflection_difference_map",
    "reflection_map",
    "reflection_trace",
    "s11",
    "spectrum_vs_flux",
    "susceptibility",
    "susceptibility_std",
    "sweep_ground_states",
    "vortex_map",
    "wrap_angle",
]
