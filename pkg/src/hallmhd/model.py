"""Perturbation-form compressible Hall-MHD: coefficients, nonlinear terms, RHS.

Unknowns are recentered at the constant equilibrium (density, velocity,
magnetic field) = (1, 0, 0); ``varrho`` is density minus one.  The evolved
system is

    d varrho /dt = -div u                                + S1
    d u      /dt = mu*Lap u + (mu+nu)*grad div u - grad varrho + S2
    d B      /dt = Lap B                                 + S3,   div B = 0

with quadratic/cubic terms S1..S3 assembled pseudo-spectrally: derivatives
in spectral space, products on the physical grid, 2/3-rule dealiasing after
every product.  The cubic Hall contribution is built as two successive
dealiased binary products.  S3 is projected divergence-free (the curl is
solenoidal analytically; dealiasing perturbs it at round-off level).

The pressure law is P(rho) = rho**gamma / gamma, which satisfies P'(1) = 1
for every gamma >= 1 and makes the pressure coefficient closed-form.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import spectral
from .spectral import (
    PHYSICAL,
    SPECTRAL,
    ScalarField,
    SpectralGrid,
    VectorField,
    curl,
    dealias,
    divergence,
    divergence_defect,
    forward_array,
    gradient,
    inverse_array,
    laplacian,
    project_divergence_free,
    sobolev_seminorm_sq,
)


class ParameterError(ValueError):
    """Physical parameters outside the admissible range."""


class RegimeError(RuntimeError):
    """Total density left the validated band [1/2, 3/2] (or positivity)."""

    def __init__(self, message: str, field: str, minimum: float, maximum: float,
                 time: float | None = None):
        super().__init__(message)
        self.field = field
        self.minimum = minimum
        self.maximum = maximum
        self.time = time


@dataclass(frozen=True)
class PhysicalParams:
    """Viscosities, pressure exponent and the Hall switch.

    hall=False drops the Hall term, recovering compressible MHD.
    """

    mu: float
    nu: float
    gamma: float = 5.0 / 3.0
    hall: bool = True

    def __post_init__(self):
        if not (self.mu > 0.0 and 2.0 * self.mu + 3.0 * self.nu >= 0.0):
            raise ParameterError(
                f"viscosities mu={self.mu}, nu={self.nu} violate the physical "
                "condition mu > 0 and 2*mu + 3*nu >= 0"
            )
        if not self.gamma >= 1.0:
            raise ParameterError(f"pressure exponent gamma={self.gamma} must be >= 1")


@dataclass(frozen=True)
class FieldState:
    """The seven unknowns at one time instant, all in one representation."""

    grid: SpectralGrid
    time: float
    varrho: ScalarField
    u: VectorField
    B: VectorField

    def __post_init__(self):
        reps = {self.varrho.representation, self.u.representation,
                self.B.representation}
        if len(reps) != 1:
            raise spectral.RepresentationError(
                f"state components carry mixed representations {sorted(reps)}"
            )

    @property
    def representation(self) -> str:
        return self.varrho.representation

    @classmethod
    def zeros(cls, grid: SpectralGrid, time: float = 0.0,
              representation: str = SPECTRAL) -> "FieldState":
        return cls(grid, time,
                   ScalarField.zeros(grid, representation),
                   VectorField.zeros(grid, representation),
                   VectorField.zeros(grid, representation))

    def to_spectral(self) -> "FieldState":
        if self.representation == SPECTRAL:
            return self
        return FieldState(self.grid, self.time, self.varrho.to_spectral(),
                          self.u.to_spectral(), self.B.to_spectral())

    def to_physical(self) -> "FieldState":
        if self.representation == PHYSICAL:
            return self
        return FieldState(self.grid, self.time, self.varrho.to_physical(),
                          self.u.to_physical(), self.B.to_physical())

    def with_time(self, time: float) -> "FieldState":
        return replace(self, time=time)


def state_h2_norm(state: FieldState) -> float:
    """H^2 norm of the full triple (root of the summed squared seminorms)."""
    s = state.to_spectral()
    total = 0.0
    for field in (s.varrho, s.u, s.B):
        total += sum(sobolev_seminorm_sq(field, k) for k in range(3))
    return float(np.sqrt(total))


def check_regime(state: FieldState, lower: float = 0.5, upper: float = 1.5) -> tuple[float, float]:
    """Verify lower <= varrho+1 <= upper pointwise; return (min, max).

    Raises RegimeError (not a crash) carrying the offending extremum.
    """
    rho = state.varrho.to_physical().data + 1.0
    lo, hi = float(rho.min()), float(rho.max())
    if lo < lower or hi > upper:
        raise RegimeError(
            f"total density left [{lower}, {upper}]: min={lo:.6g}, max={hi:.6g} "
            f"at t={state.time:.6g}",
            field="varrho", minimum=lo, maximum=hi, time=state.time,
        )
    return lo, hi


def coeffs(varrho_phys: np.ndarray, params: PhysicalParams):
    """Pointwise coefficient fields (h, f, g) of the perturbation equations.

    h = varrho/(varrho+1),  f = (varrho+1)**(gamma-2) - 1,  g = 1/(varrho+1).
    """
    rho = np.asarray(varrho_phys) + 1.0
    lo = float(rho.min())
    if lo <= 0.0:
        raise RegimeError(
            f"total density reached {lo:.6g} <= 0; coefficient functions undefined",
            field="varrho", minimum=lo, maximum=float(rho.max()),
        )
    h = (rho - 1.0) / rho
    if params.gamma == 2.0:
        f = np.zeros_like(rho)  # P'(rho)/rho = 1 identically
    else:
        f = rho ** (params.gamma - 2.0) - 1.0
    g = 1.0 / rho
    return h, f, g


# ---------------------------------------------------------------------------
# pseudo-spectral assembly helpers (raw arrays, one grid)


def _phys(field) -> np.ndarray:
    return field.to_physical().data


def _spec_dealiased(grid: SpectralGrid, values: np.ndarray) -> np.ndarray:
    """Forward transform of physical-space products, 2/3-rule dealiased."""
    return forward_array(grid, values) * grid.dealias_mask


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _advect(v_phys: np.ndarray, grad_rows: list[np.ndarray]) -> np.ndarray:
    """(v . grad) w from the physical gradient rows of w."""
    return np.stack([_dot(v_phys, row) for row in grad_rows])


def _grad_rows(grid: SpectralGrid, w_hat: np.ndarray) -> list[np.ndarray]:
    """Physical gradients of each component of a spectral vector field."""
    rows = []
    for c in range(3):
        gx = inverse_array(grid, 1j * grid.kx * w_hat[c])
        gy = inverse_array(grid, 1j * grid.ky * w_hat[c])
        gz = inverse_array(grid, 1j * grid.kz * w_hat[c])
        rows.append(np.stack([gx, gy, gz]))
    return rows


def _lorentz_hat(grid: SpectralGrid, B_hat: np.ndarray, B_phys: np.ndarray) -> np.ndarray:
    """B.grad B - (1/2) grad |B|^2, spectral, each quadratic product dealiased."""
    rows = _grad_rows(grid, B_hat)
    adv_hat = _spec_dealiased(grid, _advect(B_phys, rows))
    b2_hat = _spec_dealiased(grid, _dot(B_phys, B_phys))
    return adv_hat - 0.5 * np.stack([
        1j * grid.kx * b2_hat, 1j * grid.ky * b2_hat, 1j * grid.kz * b2_hat,
    ])


def compute_S1(state: FieldState) -> ScalarField:
    """-varrho div u - u . grad varrho, spectral and dealiased."""
    s = state.to_spectral()
    g = s.grid
    rho_p = _phys(s.varrho)
    u_p = _phys(s.u)
    div_u = inverse_array(g, divergence(s.u).data)
    grad_rho = np.stack([
        inverse_array(g, 1j * g.kx * s.varrho.data),
        inverse_array(g, 1j * g.ky * s.varrho.data),
        inverse_array(g, 1j * g.kz * s.varrho.data),
    ])
    values = -rho_p * div_u - _dot(u_p, grad_rho)
    return ScalarField.from_spectral(g, _spec_dealiased(g, values))


def compute_S2(state: FieldState, params: PhysicalParams) -> VectorField:
    """Momentum nonlinearity: advection, variable viscosity, pressure, Lorentz."""
    s = state.to_spectral()
    g = s.grid
    rho_p = _phys(s.varrho)
    u_p = _phys(s.u)
    B_p = _phys(s.B)
    h, f, gfun = coeffs(rho_p, params)

    u_rows = _grad_rows(g, s.u.data)
    advection = _advect(u_p, u_rows)

    visc_hat = (params.mu * laplacian(s.u).data
                + (params.mu + params.nu) * gradient(divergence(s.u)).data)
    visc_p = inverse_array(g, visc_hat)

    grad_rho = np.stack([
        inverse_array(g, 1j * g.kx * s.varrho.data),
        inverse_array(g, 1j * g.ky * s.varrho.data),
        inverse_array(g, 1j * g.kz * s.varrho.data),
    ])

    lorentz = inverse_array(g, _lorentz_hat(g, s.B.data, B_p))

    values = -advection - h * visc_p - f * grad_rho + gfun * lorentz
    return VectorField.from_spectral(g, _spec_dealiased(g, values))


def compute_S3(state: FieldState, params: PhysicalParams) -> VectorField:
    """Induction nonlinearity (plus Hall term), projected divergence-free."""
    s = state.to_spectral()
    g = s.grid
    u_p = _phys(s.u)
    B_p = _phys(s.B)

    B_rows = _grad_rows(g, s.B.data)
    u_rows = _grad_rows(g, s.u.data)
    div_u = inverse_array(g, divergence(s.u).data)

    values = -_advect(u_p, B_rows) + _advect(B_p, u_rows) - B_p * div_u
    out_hat = _spec_dealiased(g, values)

    if params.hall:
        rho_p = _phys(s.varrho)
        _, _, gfun = coeffs(rho_p, params)
        lorentz = inverse_array(g, _lorentz_hat(g, s.B.data, B_p))
        hall_hat = _spec_dealiased(g, gfun * lorentz)
        hall_curl = curl(VectorField.from_spectral(g, hall_hat)).data
        out_hat = out_hat - hall_curl

    return project_divergence_free(VectorField.from_spectral(g, out_hat))


def nonlinear_terms(state: FieldState, params: PhysicalParams):
    """(S1, S2, S3) for one state; shares no work across terms by design."""
    return (compute_S1(state), compute_S2(state, params),
            compute_S3(state, params))


def linear_rhs(state: FieldState, params: PhysicalParams) -> FieldState:
    """Constant-coefficient part of the system, exact per Fourier mode."""
    s = state.to_spectral()
    g = s.grid
    div_u = divergence(s.u)
    drho = ScalarField.from_spectral(g, -div_u.data)
    du = VectorField.from_spectral(
        g,
        params.mu * laplacian(s.u).data
        + (params.mu + params.nu) * gradient(div_u).data
        - gradient(s.varrho).data,
    )
    dB = laplacian(s.B)
    return FieldState(g, s.time, drho, du, dB)


def full_rhs(state: FieldState, params: PhysicalParams,
             nonlinear: bool = True) -> FieldState:
    """Semi-discrete time derivative of (varrho, u, B).

    The returned FieldState holds the derivative triple (its regime
    invariant is not meaningful).  With nonlinear=False only the
    constant-coefficient part is evaluated.
    """
    s = state.to_spectral()
    if nonlinear:
        check_regime(s)
    out = linear_rhs(s, params)
    if not nonlinear:
        return out
    s1, s2, s3 = nonlinear_terms(s, params)
    return FieldState(
        s.grid, s.time,
        ScalarField.from_spectral(s.grid, out.varrho.data + s1.data),
        VectorField.from_spectral(s.grid, out.u.data + s2.data),
        VectorField.from_spectral(s.grid, out.B.data + s3.data),
    )


# ---------------------------------------------------------------------------
# vector identities


@dataclass(frozen=True)
class IdentityReport:
    """Max-norm relative residuals of the two curl identities."""

    lorentz_residual: float    # (curl B) x B  vs  B.grad B - (1/2) grad |B|^2
    induction_residual: float  # curl(u x B)   vs  u div B - u.grad B + B.grad u - B div u


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.stack([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


def _rel_residual(lhs: np.ndarray, rhs: np.ndarray) -> float:
    scale = max(np.max(np.abs(lhs)), np.max(np.abs(rhs)), 1e-300)
    return float(np.max(np.abs(lhs - rhs)) / scale)


def check_identities(B: VectorField, u: VectorField) -> IdentityReport:
    """Evaluate both curl identities spectrally with dealiasing.

    Inputs need not be divergence-free; the div B term of the second
    identity is kept.  On band-limited inputs the dealiased products are
    exact truncated convolutions, so residuals sit at round-off.
    """
    g = B.grid
    Bs = dealias(B.to_spectral())
    us = dealias(u.to_spectral())
    B_p = _phys(Bs)
    u_p = _phys(us)

    curl_B = inverse_array(g, curl(Bs).data)
    lhs1 = _spec_dealiased(g, _cross(curl_B, B_p))
    rhs1 = _lorentz_hat(g, Bs.data, B_p)

    lhs2 = curl(VectorField.from_spectral(g, _spec_dealiased(g, _cross(u_p, B_p)))).data
    B_rows = _grad_rows(g, Bs.data)
    u_rows = _grad_rows(g, us.data)
    div_B = inverse_array(g, divergence(Bs).data)
    div_u = inverse_array(g, divergence(us).data)
    rhs2 = _spec_dealiased(
        g, u_p * div_B - _advect(u_p, B_rows) + _advect(B_p, u_rows) - B_p * div_u
    )

    return IdentityReport(
        lorentz_residual=_rel_residual(lhs1, rhs1),
        induction_residual=_rel_residual(lhs2, rhs2),
    )


# ---------------------------------------------------------------------------
# initial data


def make_initial_data(kind: str, amplitude: float, seed: int,
                      grid: SpectralGrid) -> FieldState:
    """Smooth seeded initial data with an exact H^2 amplitude.

    kind='gaussian_bump': localized bumps centered at L/2 with width L/20;
    the magnetic part is the curl of a bump vector potential, hence exactly
    solenoidal, and all components keep Gaussian tails at the box boundary
    (no spectral filtering is applied, so the grid must resolve the bump).

    kind='random_lowpass': seeded broadband noise (NumPy PCG64 generator)
    under a Gaussian spectral envelope, band-limited to the dealias mask,
    with the spatial mean removed from every component: constant modes
    never decay on a periodic box and would mask whole-space decay mimicry.

    The triple is rescaled so its H^2 norm equals ``amplitude`` exactly.
    """
    if not amplitude > 0.0:
        raise ValueError(f"amplitude={amplitude} must be positive")
    rng = np.random.default_rng(seed)

    if kind == "gaussian_bump":
        X, Y, Z = grid.meshgrid()
        c = grid.box_length / 2.0
        w = grid.box_length / 20.0
        bump = np.exp(-((X - c) ** 2 + (Y - c) ** 2 + (Z - c) ** 2) / (2.0 * w ** 2))
        scales = rng.uniform(0.5, 1.0, size=7)
        rho_hat = forward_array(grid, scales[0] * bump)
        u_hat = forward_array(grid, np.stack([scales[1] * bump,
                                              scales[2] * bump,
                                              scales[3] * bump]))
        pot_hat = forward_array(grid, np.stack([scales[4] * bump,
                                                scales[5] * bump,
                                                scales[6] * bump]))
        B_hat = curl(VectorField.from_spectral(grid, pot_hat)).data
    elif kind == "random_lowpass":
        # wide envelope: the spectrum stays near-flat across low shells, so
        # box decay over the pre-wrap window tracks the whole-space rates
        k0 = 16.0 * (2.0 * np.pi / grid.box_length)
        envelope = np.exp(-grid.k_sq / k0 ** 2) * grid.dealias_mask
        rho_hat = forward_array(grid, rng.standard_normal(grid.shape)) * envelope
        u_hat = forward_array(grid, rng.standard_normal((3,) + grid.shape)) * envelope
        B_hat = forward_array(grid, rng.standard_normal((3,) + grid.shape)) * envelope
        rho_hat[0, 0, 0] = 0.0
        u_hat[:, 0, 0, 0] = 0.0
        B_hat[:, 0, 0, 0] = 0.0
    else:
        raise ValueError(f"unknown initial-data kind {kind!r}")

    state = FieldState(
        grid, 0.0,
        ScalarField.from_spectral(grid, rho_hat),
        VectorField.from_spectral(grid, u_hat),
        project_divergence_free(VectorField.from_spectral(grid, B_hat)),
    )
    norm = state_h2_norm(state)
    if norm == 0.0:
        raise ValueError("generated initial data vanished; cannot rescale")
    factor = amplitude / norm
    return FieldState(
        grid, 0.0,
        ScalarField.from_spectral(grid, state.varrho.data * factor),
        VectorField.from_spectral(grid, state.u.data * factor),
        VectorField.from_spectral(grid, state.B.data * factor),
    )


def state_divergence_defect(state: FieldState) -> float:
    """Relative divergence defect of the magnetic field."""
    return divergence_defect(state.B.to_spectral())
