"""bolab: pseudo-spectral laboratory for the Benjamin-Ono equation and its
Burgers-type dissipative perturbation, with conservation-law diagnostics and
vanishing-dissipation sweep experiments."""

__version__ = "0.1.0"

from .spectral import (
    Grid,
    RealField,
    SpectralField,
    dealias,
    dealias_mask,
    dx,
    forward,
    frac_deriv,
    hermitian_asymmetry,
    hilbert,
    inverse,
    make_grid,
    real_field,
)
from .diagnostics import (
    DiagnosticSeries,
    DiagnosticsSample,
    InequalityCheck,
    cubic_integral,
    energy,
    energy_identity_residual,
    frac_deriv_norm_sq,
    gn_inequality_check,
    l2_identity_residual,
    l2_norm_sq,
    sample_diagnostics,
    sobolev_norm_sq,
)
from .dynamics import (
    BlowUpError,
    ConfigError,
    Etdrk4Stepper,
    SimConfig,
    Trajectory,
    initial_field,
    integrate,
    linear_symbol,
    mms_exact,
    mms_forcing,
    nonlinear_term,
    propagate_linear,
    resolve_time_step,
    step_etdrk4,
)
from .lab import (
    DEFAULT_EPSILONS,
    FitResult,
    MonotonicityReport,
    ReferenceRejectedError,
    SweepAbortError,
    SweepConfig,
    SweepRecord,
    SweepResult,
    fit_rate,
    monotonicity_report,
    reference_solution,
    run_sweep,
)

__all__ = [
    "__version__",
    # spectral
    "Grid", "RealField", "SpectralField", "make_grid", "real_field",
    "forward", "inverse", "hilbert", "frac_deriv", "dx", "dealias",
    "dealias_mask", "hermitian_asymmetry",
    # diagnostics
    "DiagnosticsSample", "DiagnosticSeries", "InequalityCheck",
    "l2_norm_sq", "sobolev_norm_sq", "frac_deriv_norm_sq", "cubic_integral",
    "energy", "sample_diagnostics", "l2_identity_residual",
    "energy_identity_residual", "gn_inequality_check",
    # dynamics
    "SimConfig", "Trajectory", "ConfigError", "BlowUpError",
    "linear_symbol", "nonlinear_term", "propagate_linear", "Etdrk4Stepper",
    "step_etdrk4", "integrate", "initial_field", "resolve_time_step",
    "mms_forcing", "mms_exact",
    # lab
    "SweepConfig", "SweepRecord", "SweepResult", "FitResult",
    "MonotonicityReport", "ReferenceRejectedError", "SweepAbortError",
    "DEFAULT_EPSILONS", "reference_solution", "run_sweep", "fit_rate",
    "monotonicity_report",
]
