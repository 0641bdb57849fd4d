"""Exponential time differencing on top of the exact linear propagator.

One step realizes the interval form of the variation-of-constants
representation: the stiff constant-coefficient part is advanced exactly
by the propagator (zero dispersion and dissipation error), the nonlinear
source is quadratured,

    ETD1:  U(t+dt) = G(dt) [U + dt S(U)]
    ETD2:  predictor  U* = G(dt) [U + dt S(U)]
           corrector  U(t+dt) = G(dt) [U + dt/2 S(U)] + dt/2 S(U*),

i.e. left-endpoint vs trapezoidal quadrature of the source convolution.
The magnetic field is re-projected divergence-free after every step.

The advective CFL cap applies only to the nonlinear source (sound and
diffusion live inside the exact propagator); ``simulate`` enforces it as
a validation error rather than adapting the step size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .diagnostics import energy_functional, fourier_splitting_residual, \
    fourier_splitting_scale
from .model import (
    FieldState,
    PhysicalParams,
    RegimeError,
    check_regime,
    nonlinear_terms,
    state_divergence_defect,
)
from .propagator import apply_propagator
from .spectral import (
    ScalarField,
    VectorField,
    project_divergence_free,
    sobolev_seminorm_sq,
)

Forcing = Callable[[FieldState], tuple[np.ndarray, np.ndarray, np.ndarray]]


class CFLError(RuntimeError):
    """Configured dt exceeds the advective CFL cap."""

    def __init__(self, message: str, dt: float, cap: float, step: int, time: float):
        super().__init__(message)
        self.dt = dt
        self.cap = cap
        self.step = step
        self.time = time


@dataclass(frozen=True)
class StepConfig:
    """Time-stepping controls for one run."""

    dt: float
    t_end: float
    cfl_safety: float = 0.5
    scheme: str = "etd2"
    snapshot_every: float = 0.0  # 0: snapshots only at t=0 and t_end
    regime_abort: bool = True
    nonlinear: bool = True

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt={self.dt} must be positive")
        if self.t_end < 0.0:
            raise ValueError(f"t_end={self.t_end} must be nonnegative")
        if not 0.0 < self.cfl_safety <= 1.0:
            raise ValueError(f"cfl_safety={self.cfl_safety} must lie in (0, 1]")
        if self.scheme not in ("etd1", "etd2"):
            raise ValueError(f"scheme={self.scheme!r} must be etd1|etd2")
        if self.snapshot_every < 0.0:
            raise ValueError("snapshot_every must be nonnegative")


def advective_cfl_cap(state: FieldState, cfl_safety: float) -> float:
    """cfl_safety * dx / (1 + max |u|)."""
    u = state.u.to_physical().data
    umax = float(np.sqrt((u ** 2).sum(axis=0)).max())
    return cfl_safety * state.grid.dx / (1.0 + umax)


def _add_source(state: FieldState, scale: float, s1, s2, s3) -> FieldState:
    g = state.grid
    return FieldState(
        g, state.time,
        ScalarField.from_spectral(g, state.varrho.data + scale * s1),
        VectorField.from_spectral(g, state.u.data + scale * s2),
        VectorField.from_spectral(g, state.B.data + scale * s3),
    )


def _source(state: FieldState, params: PhysicalParams, nonlinear: bool,
            forcing: Forcing | None):
    g = state.grid
    if nonlinear:
        t1, t2, t3 = nonlinear_terms(state, params)
        s1, s2, s3 = t1.data, t2.data, t3.data
    else:
        z = np.zeros(g.shape, dtype=complex)
        s1, s2, s3 = z, np.zeros((3,) + g.shape, dtype=complex), \
            np.zeros((3,) + g.shape, dtype=complex)
    if forcing is not None:
        f1, f2, f3 = forcing(state)
        s1 = s1 + f1
        s2 = s2 + f2
        s3 = s3 + f3
    return s1, s2, s3


def etd_step(state: FieldState, dt: float, params: PhysicalParams,
             scheme: str = "etd2", nonlinear: bool = True,
             forcing: Forcing | None = None,
             enforce_regime: bool = True) -> FieldState:
    """Advance one step; the magnetic field is re-projected afterwards."""
    if not dt > 0.0:
        raise ValueError(f"dt={dt} must be positive")
    s = state.to_spectral()
    if nonlinear and enforce_regime:
        check_regime(s)

    if not nonlinear and forcing is None:
        out = apply_propagator(s, dt, params)
    else:
        s1, s2, s3 = _source(s, params, nonlinear, forcing)
        if scheme == "etd1":
            out = apply_propagator(_add_source(s, dt, s1, s2, s3), dt, params)
        elif scheme == "etd2":
            predictor = apply_propagator(_add_source(s, dt, s1, s2, s3), dt, params)
            if nonlinear and enforce_regime:
                check_regime(predictor)
            p1, p2, p3 = _source(predictor, params, nonlinear, forcing)
            half = apply_propagator(_add_source(s, 0.5 * dt, s1, s2, s3), dt, params)
            out = _add_source(half, 0.5 * dt, p1, p2, p3)
        else:
            raise ValueError(f"scheme={scheme!r} must be etd1|etd2")

    return FieldState(
        out.grid, out.time, out.varrho, out.u,
        project_divergence_free(out.B),
    )


@dataclass
class RunRecord:
    """Per-step diagnostics plus snapshots on a coarser schedule."""

    times: list[float] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)
    snapshots: list[tuple[float, FieldState]] = field(default_factory=list)
    final_state: FieldState | None = None


def _diagnostic_row(state: FieldState, params: PhysicalParams, beta: float,
                    splitting_r: tuple[float, ...]) -> dict:
    s = state.to_spectral()
    row: dict[str, float] = {"t": s.time}
    for name, fld in (("rho", s.varrho), ("u", s.u), ("b", s.B)):
        row[f"{name}_l2"] = float(np.sqrt(sobolev_seminorm_sq(fld, 0)))
        row[f"grad_{name}_l2"] = float(np.sqrt(sobolev_seminorm_sq(fld, 1)))
    row["grad2_b_l2"] = float(np.sqrt(sobolev_seminorm_sq(s.B, 2)))
    total = 0.0
    for fld in (s.varrho, s.u, s.B):
        total += sum(sobolev_seminorm_sq(fld, k) for k in range(3))
    row["h2_sq_total"] = total
    for l in (0, 1):
        er = energy_functional(s, l, beta)
        row[f"e{l}_value"] = er.value
        row[f"e{l}_dissipation"] = er.dissipation
        row[f"e{l}_cross"] = er.cross
    row["div_b_defect"] = state_divergence_defect(s)
    rho_phys = s.varrho.to_physical().data + 1.0
    row["rho_total_min"] = float(rho_phys.min())
    row["rho_total_max"] = float(rho_phys.max())
    for k in (2, 3):
        row[f"fsm_scale_k{k}"] = fourier_splitting_scale(s, k)
        for R in splitting_r:
            row[f"fsm_res_R{R:g}_k{k}"] = fourier_splitting_residual(
                s, s.time, R, k)
    return row


def simulate(initial: FieldState, config: StepConfig, params: PhysicalParams,
             beta: float = 1e-2, splitting_r: tuple[float, ...] = (4.0, 5.0),
             forcing: Forcing | None = None) -> RunRecord:
    """Advance to t_end, recording per-step diagnostics and snapshots.

    Deterministic given the initial state and configuration.  A regime
    violation aborts with the failing step index and time attached; a dt
    above the advective CFL cap raises CFLError before the offending step.
    """
    state = initial.to_spectral()
    record = RunRecord()
    record.times.append(state.time)
    record.rows.append(_diagnostic_row(state, params, beta, splitting_r))
    record.snapshots.append((state.time, state))
    next_snapshot = (state.time + config.snapshot_every
                     if config.snapshot_every > 0.0 else np.inf)

    t_final = initial.time + config.t_end
    step = 0
    while state.time < t_final - 1e-12 * max(config.dt, 1.0):
        dt = min(config.dt, t_final - state.time)
        if config.nonlinear:
            cap = advective_cfl_cap(state, config.cfl_safety)
            if dt > cap:
                raise CFLError(
                    f"dt={dt:.6g} exceeds the advective CFL cap {cap:.6g} "
                    f"at step {step}, t={state.time:.6g}",
                    dt=dt, cap=cap, step=step, time=state.time,
                )
        try:
            state = etd_step(state, dt, params, scheme=config.scheme,
                             nonlinear=config.nonlinear, forcing=forcing,
                             enforce_regime=config.regime_abort)
        except RegimeError as err:
            raise RegimeError(
                f"run aborted at step {step}: {err}",
                field=err.field, minimum=err.minimum, maximum=err.maximum,
                time=err.time,
            ) from err
        step += 1
        record.times.append(state.time)
        record.rows.append(_diagnostic_row(state, params, beta, splitting_r))
        if state.time >= next_snapshot - 1e-9 * config.dt:
            record.snapshots.append((state.time, state))
            next_snapshot += config.snapshot_every

    if abs(record.snapshots[-1][0] - state.time) > 1e-9 * max(config.dt, 1.0):
        record.snapshots.append((state.time, state))
    record.final_state = state
    return record
