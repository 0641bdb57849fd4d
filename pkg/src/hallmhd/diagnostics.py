"""Norms, energy functionals, splitting inequalities, decay-exponent fits.

Everything here evaluates immutable snapshots; the heavy lifting is the
Plancherel machinery of :mod:`hallmhd.spectral`.  Norm inequalities whose
constants are non-constructive are *measured and reported only*, never
asserted; see :func:`nonlinear_term_norms`.

Time-derivative decay targets: the fitted exponents of the time
derivatives are asserted by ordering only (the derivative norms decay
faster than the fields by about 1/2 in the (1+t) exponent); the gaps are
reported.  The gradient-of-time-derivative rates are treated as negative
exponents -(5+2k)/4 and -(7+2k)/4 (the positive sign that sometimes
appears for the first family is an evident typo).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import FieldState, PhysicalParams, full_rhs
from .spectral import l2_norm_sq, sobolev_seminorm_sq

SUPPORTED_P = (1, 2, 3, 6, np.inf)


@dataclass(frozen=True)
class DecaySeries:
    """Time-stamped positive norm samples for exponent fitting."""

    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValueError("times and values must be matching 1-D arrays")
        if t.size >= 2 and not np.all(np.diff(t) > 0.0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(v)) or np.any(v < 0.0):
            raise ValueError("values must be finite and nonnegative")


@dataclass(frozen=True)
class FitResult:
    slope: float
    stderr: float
    n_samples: int
    window: tuple[float, float]


def _component(state: FieldState, name: str):
    if name == "rho":
        return state.varrho
    if name == "u":
        return state.u
    if name == "B":
        return state.B
    raise ValueError(f"unknown component {name!r}; use rho|u|B")


def sobolev_norm(state: FieldState, component: str, k: int,
                 kind: str = "seminorm") -> float:
    """Order-k seminorm or full H^k norm of one component."""
    if k not in (0, 1, 2, 3):
        raise ValueError(f"derivative order k={k} outside the supported range 0..3")
    f = _component(state.to_spectral(), component)
    if kind == "seminorm":
        return float(np.sqrt(sobolev_seminorm_sq(f, k)))
    if kind == "full":
        return float(np.sqrt(sum(sobolev_seminorm_sq(f, j) for j in range(k + 1))))
    raise ValueError(f"unknown norm kind {kind!r}; use seminorm|full")


def lp_norm(state: FieldState, component: str, p) -> float:
    """Discrete L^p norm with cell-volume weighting; p=inf is the max.

    Vector components use the pointwise Euclidean magnitude.
    """
    if p not in SUPPORTED_P:
        raise ValueError(f"unsupported p={p}; supported: 1, 2, 3, 6, inf")
    f = _component(state.to_physical(), component)
    data = f.data
    mag = np.abs(data) if data.ndim == 3 else np.sqrt(
        data[0] ** 2 + data[1] ** 2 + data[2] ** 2)
    if p == np.inf:
        return float(np.max(mag))
    cell = f.grid.cell_volume
    return float((np.sum(mag ** p) * cell) ** (1.0 / p))


# ---------------------------------------------------------------------------
# energy functionals


@dataclass(frozen=True)
class EnergyRow:
    t: float
    value: float          # E_l^2 including the weighted cross term
    dissipation: float    # instantaneous dissipation integrand
    cross: float          # unweighted cross term
    monotone: bool | None = None


@dataclass
class EnergyReport:
    """Accumulates energy rows and flags non-increase within a tolerance."""

    tolerance: float = 0.01  # fraction of the initial value
    rows: list[EnergyRow] = field(default_factory=list)

    def add(self, row: EnergyRow) -> EnergyRow:
        if self.rows:
            slack = self.tolerance * self.rows[0].value
            flagged = EnergyRow(row.t, row.value, row.dissipation, row.cross,
                                row.value <= self.rows[-1].value + slack)
        else:
            flagged = EnergyRow(row.t, row.value, row.dissipation, row.cross, None)
        self.rows.append(flagged)
        return flagged

    @property
    def all_monotone(self) -> bool:
        return all(r.monotone for r in self.rows[1:])


def _triple_seminorm_sq(state: FieldState, k: int) -> float:
    s = state.to_spectral()
    return (sobolev_seminorm_sq(s.varrho, k)
            + sobolev_seminorm_sq(s.u, k)
            + sobolev_seminorm_sq(s.B, k))


def _cross_term(state: FieldState, k: int) -> float:
    """Plancherel form of the integral of grad^k u . grad^(k+1) varrho."""
    s = state.to_spectral()
    g = s.grid
    w = 1.0 if k == 0 else g.k_sq ** k
    total = 0.0
    for c, kc in enumerate((g.kx, g.ky, g.kz)):
        total += np.sum(w * (np.conj(s.u.data[c]) * (1j * kc * s.varrho.data)).real)
    return float(total) / g.volume


def energy_functional(state: FieldState, l: int, beta: float) -> EnergyRow:
    """Layered energy functional and its dissipation at one instant.

    value = sum_{j=l..2} ||grad^j (varrho,u,B)||^2
            + beta * sum_{k=l..1} Int grad^k u . grad^(k+1) varrho dx,
    dissipation = sum_{j=l+1..2} ||grad^j varrho||^2
                  + sum_{j=l+1..3} ||grad^j (u,B)||^2.
    """
    if l not in (0, 1):
        raise ValueError(f"layer l={l} must be 0 or 1")
    if beta < 0.0:
        raise ValueError("beta must be nonnegative")
    s = state.to_spectral()
    base = sum(_triple_seminorm_sq(s, j) for j in range(l, 3))
    cross = sum(_cross_term(s, k) for k in range(l, 2))
    diss = sum(sobolev_seminorm_sq(s.varrho, j) for j in range(l + 1, 3))
    diss += sum(sobolev_seminorm_sq(s.u, j) + sobolev_seminorm_sq(s.B, j)
                for j in range(l + 1, 4))
    return EnergyRow(t=s.time, value=base + beta * cross,
                     dissipation=diss, cross=cross)


# ---------------------------------------------------------------------------
# Fourier splitting


def fourier_splitting_residual(state: FieldState, t: float, R: float,
                               k: int) -> float:
    """Splitting-sphere residual for the magnetic field at orders (k-1,k,k+1).

    residual = ||grad^(k+1) B||^2 - a ||grad^k B||^2 + a^2 ||grad^(k-1) B||^2
    with a = R/(1+t).  Per mode the summand is
    |xi|^(2k-2) [(|xi|^2 - a/2)^2 + 3 a^2/4] |B_hat|^2 >= 0, so the sum is
    nonnegative up to round-off for every R > 0 and t >= 0.
    """
    if k not in (2, 3):
        raise ValueError(f"splitting order k={k} must be 2 or 3")
    if R <= 0.0:
        raise ValueError("R must be positive")
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    s = state.to_spectral()
    g = s.grid
    a = R / (1.0 + t)
    power = np.sum(np.abs(s.B.data) ** 2, axis=0)
    ksq = g.k_sq
    summand = ksq ** (k - 1) * (ksq ** 2 - a * ksq + a ** 2) * power
    return float(np.sum(summand)) / g.volume


def fourier_splitting_scale(state: FieldState, k: int) -> float:
    """The leading term ||grad^(k+1) B||^2 used to normalize the residual."""
    s = state.to_spectral()
    return float(sobolev_seminorm_sq(s.B, k + 1))


# ---------------------------------------------------------------------------
# time derivatives


@dataclass(frozen=True)
class TimeDerivativeNorms:
    rho_t_h1: float
    u_t_l2: float
    b_t_l2: float
    grad_rho_t_h1: float | None = None
    grad_u_t_l2: float | None = None
    grad_b_t_l2: float | None = None


def time_derivative_norms(state: FieldState, params: PhysicalParams,
                          include_gradients: bool = False) -> TimeDerivativeNorms:
    """Norms of the instantaneous time derivatives from the full RHS."""
    rhs = full_rhs(state, params)
    rho_t_h1 = np.sqrt(sobolev_seminorm_sq(rhs.varrho, 0)
                       + sobolev_seminorm_sq(rhs.varrho, 1))
    u_t_l2 = np.sqrt(sobolev_seminorm_sq(rhs.u, 0))
    b_t_l2 = np.sqrt(sobolev_seminorm_sq(rhs.B, 0))
    if not include_gradients:
        return TimeDerivativeNorms(float(rho_t_h1), float(u_t_l2), float(b_t_l2))
    grad_rho = np.sqrt(sobolev_seminorm_sq(rhs.varrho, 1)
                       + sobolev_seminorm_sq(rhs.varrho, 2))
    grad_u = np.sqrt(sobolev_seminorm_sq(rhs.u, 1))
    grad_b = np.sqrt(sobolev_seminorm_sq(rhs.B, 1))
    return TimeDerivativeNorms(float(rho_t_h1), float(u_t_l2), float(b_t_l2),
                               float(grad_rho), float(grad_u), float(grad_b))


# ---------------------------------------------------------------------------
# exponent fitting


def fit_decay_exponent(series: DecaySeries,
                       window: tuple[float, float]) -> FitResult:
    """Least-squares slope of log(value) against log(1+t) over a window."""
    t0, t1 = window
    if not t1 > t0:
        raise ValueError(f"empty fit window [{t0}, {t1}]")
    mask = (series.times >= t0) & (series.times <= t1)
    t = series.times[mask]
    v = series.values[mask]
    if t.size < 10:
        raise ValueError(
            f"fit window [{t0}, {t1}] holds {t.size} samples; at least 10 required")
    if np.any(v <= 0.0):
        raise ValueError("fit requires strictly positive values in the window")
    x = np.log1p(t)
    y = np.log(v)
    n = t.size
    xm = x - x.mean()
    sxx = float(xm @ xm)
    slope = float(xm @ y) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    dof = max(n - 2, 1)
    stderr = float(np.sqrt((resid @ resid) / dof / sxx))
    return FitResult(slope=slope, stderr=stderr, n_samples=n, window=(t0, t1))


# ---------------------------------------------------------------------------
# nonlinear-term norm report


@dataclass(frozen=True)
class NonlinearTermReport:
    """Measured norms of S1..S3 plus the comparison combinations.

    The right-hand-side combinations are reported so ratios can be
    inspected; no inequality is asserted (their constants are not
    constructive).
    """

    s_l1: tuple[float, float, float]
    s_l2: tuple[float, float, float]
    grad_s_l2: tuple[float, float, float]
    rhs_first_order: float   # ||grad rho|| + ||grad u||_H1 + ||grad B||_H1
    rhs_second_order: float  # ||grad^2 rho|| + ||grad^2 u|| + ||grad^2 B||
    rhs_product: float       # ||grad (rho,B)||_H1 * ||grad^2 (u,B)||_H1


def nonlinear_term_norms(state: FieldState,
                         params: PhysicalParams) -> NonlinearTermReport:
    from .model import nonlinear_terms

    s = state.to_spectral()
    s1, s2, s3 = nonlinear_terms(s, params)

    def l1_of(f) -> float:
        p = f.to_physical().data
        mag = np.abs(p) if p.ndim == 3 else np.sqrt(p[0] ** 2 + p[1] ** 2 + p[2] ** 2)
        return float(np.sum(mag) * f.grid.cell_volume)

    l1 = tuple(l1_of(f) for f in (s1, s2, s3))
    l2 = tuple(float(np.sqrt(l2_norm_sq(f))) for f in (s1, s2, s3))
    g1 = tuple(float(np.sqrt(sobolev_seminorm_sq(f, 1))) for f in (s1, s2, s3))

    def semi(fld, k):
        return sobolev_seminorm_sq(fld, k)

    first = (np.sqrt(semi(s.varrho, 1))
             + np.sqrt(semi(s.u, 1) + semi(s.u, 2))
             + np.sqrt(semi(s.B, 1) + semi(s.B, 2)))
    second = (np.sqrt(semi(s.varrho, 2)) + np.sqrt(semi(s.u, 2))
              + np.sqrt(semi(s.B, 2)))
    prod = (np.sqrt(semi(s.varrho, 1) + semi(s.varrho, 2)
                    + semi(s.B, 1) + semi(s.B, 2))
            * np.sqrt(semi(s.u, 2) + semi(s.u, 3) + semi(s.B, 2) + semi(s.B, 3)))
    return NonlinearTermReport(
        s_l1=l1, s_l2=l2, grad_s_l2=g1,
        rhs_first_order=float(first),
        rhs_second_order=float(second),
        rhs_product=float(prod),
    )
