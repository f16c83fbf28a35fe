"""Cavity-assisted Raman quantum memory with refractive-index control.

A linear index ramp sweeps successive spin-wave modes (spaced 2*pi/L in
wave number, delta = pi/beta in time) through phase matching, mapping an
input wave packet onto a comb of collective excitations; reversing the ramp
releases a time-reversed replica, replaying it releases a delayed one.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    AdiabaticityWarning,
    BandwidthWarning,
    ChannelError,
    ConfigError,
    EfficiencyUndefinedError,
    GridMismatchError,
    ModeTruncationError,
    NumericsError,
    PulseBoundaryError,
    RamanLimitError,
    RamanMemError,
    ScheduleError,
    ScheduleRangeError,
    StepSizeError,
    WeakFieldError,
)
from .model import (  # noqa: F401
    DerivedParams,
    IndexSchedule,
    MemoryParams,
    ModeGrid,
    Pulse,
    RampSegment,
    ScenarioConfig,
    SpinWaveState,
    backward_schedule,
    build_mode_grid,
    custom_pulse,
    derive_params,
    forward_schedule,
    linear_schedule,
    make_gaussian_pulse,
    mismatch,
    resonance_times,
)
from .dynamics import (  # noqa: F401
    FieldRecord,
    Trajectory,
    efficiency,
    fig2_scenario,
    integrate,
    run_retrieval,
    run_storage,
)
from .analytics import (  # noqa: F401
    CapacityReport,
    ChannelIsolationResult,
    CrosstalkSpec,
    analytic_backward,
    analytic_forward,
    analytic_spin_imprint,
    capacity,
    channel_isolation_demo,
    crosstalk_approx,
    crosstalk_exact,
    crosstalk_report,
    efficiency_vs_kappa,
    efficiency_vs_kappa_reciprocal,
)
from .ensemble import (  # noqa: F401
    AtomEnsemble,
    FullState,
    ModelComparison,
    compare_models,
    continuum_diffraction,
    diffraction,
    dirichlet_diffraction,
    integrate_full,
    oracle_step,
    random_ensemble,
    uniform_ensemble,
)
from .scenarios import (  # noqa: F401
    ScenarioBundle,
    oracle_bundle,
    standard_bundle,
    synthetic_params,
)
