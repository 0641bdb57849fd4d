"""Pseudo-spectral simulator and verification harness for 3D compressible
Hall-MHD in perturbation form: exact linearized propagator, exponential
time differencing, and decay-rate / energy diagnostics."""

from .config import ConfigError, RunConfig, parse_config
from .diagnostics import (
    DecaySeries,
    EnergyReport,
    EnergyRow,
    FitResult,
    energy_functional,
    fit_decay_exponent,
    fourier_splitting_residual,
    lp_norm,
    nonlinear_term_norms,
    sobolev_norm,
    time_derivative_norms,
)
from .integrator import CFLError, RunRecord, StepConfig, etd_step, simulate
from .io import (
    BadMagicError,
    SnapshotFormatError,
    SnapshotVersionError,
    TruncatedSnapshotError,
    read_series_csv,
    read_snapshot,
    snapshot_size,
    write_series_csv,
    write_snapshot,
)
from .model import (
    FieldState,
    ParameterError,
    PhysicalParams,
    RegimeError,
    check_identities,
    check_regime,
    coeffs,
    compute_S1,
    compute_S2,
    compute_S3,
    full_rhs,
    make_initial_data,
    state_h2_norm,
)
from .propagator import (
    Eigenvalues,
    PropagatorKernel,
    QuadratureError,
    RadialData,
    apply_propagator,
    eigenvalues,
    gaussian_radial_data,
    generator_matrix,
    kernel,
    linear_decay_norm,
    propagator_matrix,
)
from .spectral import (
    RepresentationError,
    ScalarField,
    SpectralGrid,
    VectorField,
    build_grid,
    dealias,
    project_divergence_free,
    spectral_derivative,
    transform,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
