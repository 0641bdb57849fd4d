"""Command-line entry points tying the solver modules into reproducible runs.

Subcommands:

* ``simulate``      advance the nonlinear system, emit CSV series,
                    binary snapshots, summary JSON and figures;
* ``linear-decay``  continuum quadrature decay rates of the linearized
                    flow with a fitted exponent check;
* ``identities``    spectral residuals of the two curl identities on
                    random band-limited fields;
* ``energy-audit``  run a configuration and verify energy monotonicity,
                    functional equivalence and splitting positivity;
* ``fit``           fit a decay exponent to a CSV series column.

Every subcommand writes its outputs (CSV + PNG + summary.json) under the
configured output directory, exits 0 when all assertions pass, and
otherwise prints a one-line machine-readable failure summary and exits 1.
Configuration problems exit 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .config import SCHEMA, ConfigError, RunConfig, parse_config
from .diagnostics import DecaySeries, fit_decay_exponent
from .figures import save_decay_figure, save_residual_figure, save_series_figure
from .integrator import CFLError, simulate
from .io import read_series_csv, write_series_csv, write_snapshot
from .model import (
    ParameterError,
    PhysicalParams,
    RegimeError,
    check_identities,
)
from .propagator import QuadratureError, gaussian_radial_data, linear_decay_norm
from .spectral import VectorField, build_grid

DIVB_TOL = 1e-12
SPLITTING_TOL = 1e-10


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group(
        "configuration overrides", "any config key, e.g. --stepping.dt 0.001")
    for key in SCHEMA:
        group.add_argument(f"--{key}", dest=key, metavar="VALUE")


def _collect_overrides(args) -> dict[str, str]:
    raw = vars(args)
    overrides = {k: raw[k] for k in SCHEMA if raw.get(k) is not None}
    if raw.get("output") is not None:
        overrides["output.dir"] = raw["output"]
    return overrides


def _ensure_outdir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _finish(outdir: str, subcommand: str, checks: list[dict],
            extra: dict | None = None) -> int:
    passed = all(c["passed"] for c in checks)
    summary = {"subcommand": subcommand, "passed": passed, "checks": checks}
    if extra:
        summary.update(extra)
    with open(os.path.join(outdir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if passed:
        print(f"{subcommand}: all checks passed ({outdir})")
        return 0
    print(json.dumps({"subcommand": subcommand, "passed": False,
                      "failures": [c for c in checks if not c["passed"]]}))
    return 1


def _fail_summary(outdir: str, subcommand: str, message: str) -> int:
    return _finish(outdir, subcommand,
                   [{"name": "run", "passed": False, "detail": message}])


# ---------------------------------------------------------------------------
# simulate


def _run_configured(config: RunConfig):
    grid = config.build_grid()
    initial = config.make_initial(grid)
    record = simulate(initial, config.stepping, config.params,
                      beta=config.beta, splitting_r=config.splitting_r)
    return grid, record


def cmd_simulate(args) -> int:
    config = parse_config(args.config, _collect_overrides(args))
    outdir = _ensure_outdir(config.output_dir)
    try:
        _, record = _run_configured(config)
    except (RegimeError, CFLError) as err:
        return _fail_summary(outdir, "simulate", str(err))

    write_series_csv(record.rows, os.path.join(outdir, "series.csv"))
    snapshot_files = []
    for i, (t, snap) in enumerate(record.snapshots):
        name = f"snapshot_{i:04d}.hmhd"
        write_snapshot(snap, os.path.join(outdir, name))
        snapshot_files.append({"file": name, "t": t})

    times = np.array(record.times)
    cols = {k: np.array([row[k] for row in record.rows])
            for k in record.rows[0] if k != "t"}
    if not args.no_figures:
        save_series_figure(
            os.path.join(outdir, "norms.png"), times,
            {k: cols[k] for k in ("rho_l2", "u_l2", "b_l2", "grad_b_l2")},
            title="component norms")
        save_series_figure(
            os.path.join(outdir, "energy.png"), times,
            {k: cols[k] for k in ("e0_value", "e1_value", "e0_dissipation")},
            title="energy functionals")

    divb_max = float(np.max(cols["div_b_defect"]))
    checks = [
        {"name": "run_completed", "passed": True,
         "detail": f"{len(record.times) - 1} steps to t={record.times[-1]:g}"},
        {"name": "div_b_bounded", "passed": divb_max <= DIVB_TOL,
         "detail": f"max divergence defect {divb_max:.3e} vs {DIVB_TOL:g}"},
    ]
    return _finish(outdir, "simulate", checks,
                   extra={"config": config.to_dict(), "snapshots": snapshot_files})


# ---------------------------------------------------------------------------
# linear-decay


def cmd_linear_decay(args) -> int:
    try:
        params = PhysicalParams(mu=args.mu, nu=args.nu)
    except ParameterError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    outdir = _ensure_outdir(args.output)
    data = gaussian_radial_data(rho_amp=args.rho_amp, u_amp=args.u_amp,
                                b_amp=args.b_amp, sigma=args.sigma)
    times = np.geomspace(args.t0, args.t1, args.samples)
    try:
        values = np.array([
            linear_decay_norm(args.k, float(t), data, args.component, params)
            for t in times
        ])
    except QuadratureError as err:
        return _fail_summary(outdir, "linear-decay", str(err))

    rows = [{"t": float(t), "norm": float(v)} for t, v in zip(times, values)]
    write_series_csv(rows, os.path.join(outdir, "decay.csv"))

    fit = fit_decay_exponent(DecaySeries(times, values, args.component),
                             (args.t0, args.t1))
    target = -(3.0 + 2.0 * args.k) / 4.0
    passed = abs(fit.slope - target) <= args.tolerance
    if not args.no_figures:
        save_decay_figure(
            os.path.join(outdir, "decay.png"), times,
            {args.component: values}, fits={args.component: fit.slope},
            title=f"linear decay, component {args.component}, order {args.k}")
    print(f"fitted slope: {fit.slope:.6g} (stderr {fit.stderr:.3g}, "
          f"target {target:+.4g})")
    checks = [{
        "name": "decay_exponent",
        "passed": bool(passed),
        "detail": f"slope {fit.slope:.6f}, target {target:+.4f} "
                  f"+- {args.tolerance:g}",
    }]
    return _finish(outdir, "linear-decay", checks,
                   extra={"slope": fit.slope, "stderr": fit.stderr,
                          "target": target})


# ---------------------------------------------------------------------------
# identities


def cmd_identities(args) -> int:
    outdir = _ensure_outdir(args.output)
    grid = build_grid(args.n, args.L)
    rng = np.random.default_rng(args.seed)
    rows = []
    for pair in range(args.pairs):
        B = VectorField.from_physical(grid, rng.standard_normal((3,) + grid.shape))
        u = VectorField.from_physical(grid, rng.standard_normal((3,) + grid.shape))
        report = check_identities(B, u)
        rows.append({"pair": float(pair),
                     "lorentz_residual": report.lorentz_residual,
                     "induction_residual": report.induction_residual})
    write_series_csv(rows, os.path.join(outdir, "identities.csv"))
    worst = max(max(r["lorentz_residual"], r["induction_residual"]) for r in rows)
    if not args.no_figures:
        save_residual_figure(
            os.path.join(outdir, "identities.png"), ["pair"],
            np.array([[r["lorentz_residual"], r["induction_residual"]]
                      for r in rows]).ravel(),
            threshold=args.tolerance, title="curl identity residuals")
    checks = [{
        "name": "identity_residuals",
        "passed": bool(worst <= args.tolerance),
        "detail": f"worst residual {worst:.3e} vs {args.tolerance:g} "
                  f"on {args.pairs} pairs at n={args.n}",
    }]
    return _finish(outdir, "identities", checks, extra={"worst_residual": worst})


# ---------------------------------------------------------------------------
# energy-audit


def cmd_energy_audit(args) -> int:
    config = parse_config(args.config, _collect_overrides(args))
    outdir = _ensure_outdir(config.output_dir)
    try:
        _, record = _run_configured(config)
    except (RegimeError, CFLError) as err:
        return _fail_summary(outdir, "energy-audit", str(err))

    rows = record.rows
    write_series_csv(rows, os.path.join(outdir, "energy.csv"))
    times = np.array(record.times)

    checks = []
    tol = args.tolerance
    for l in (0, 1):
        e = np.array([row[f"e{l}_value"] for row in rows])
        worst_rise = float(np.max(np.diff(e))) if len(e) > 1 else 0.0
        checks.append({
            "name": f"e{l}_nonincreasing",
            "passed": bool(worst_rise <= tol * e[0]),
            "detail": f"worst rise {worst_rise:.3e} vs {tol:g} * initial {e[0]:.3e}",
        })
    base0 = np.array([row["h2_sq_total"] for row in rows])
    e0 = np.array([row["e0_value"] for row in rows])
    nonzero = base0 > 0.0
    equiv = bool(np.all(e0[nonzero] >= 0.5 * base0[nonzero])
                 and np.all(e0[nonzero] <= 2.0 * base0[nonzero]))
    checks.append({
        "name": "functional_equivalence",
        "passed": equiv,
        "detail": "0.5*||.||^2 <= E_0^2 <= 2*||.||^2 on all samples",
    })
    worst_rel = 0.0
    for k in (2, 3):
        scale = np.array([row[f"fsm_scale_k{k}"] for row in rows])
        for R in config.splitting_r:
            res = np.array([row[f"fsm_res_R{R:g}_k{k}"] for row in rows])
            mask = scale > 0.0
            if mask.any():
                worst_rel = min(worst_rel, float(np.min(res[mask] / scale[mask])))
    checks.append({
        "name": "fourier_splitting_nonnegative",
        "passed": bool(worst_rel >= -SPLITTING_TOL),
        "detail": f"worst residual/scale {worst_rel:.3e} vs -{SPLITTING_TOL:g}",
    })

    if not args.no_figures:
        save_series_figure(
            os.path.join(outdir, "energy.png"), times,
            {k: np.array([row[k] for row in rows])
             for k in ("e0_value", "e1_value", "h2_sq_total")},
            title="energy audit")
    return _finish(outdir, "energy-audit", checks,
                   extra={"config": config.to_dict()})


# ---------------------------------------------------------------------------
# fit


def cmd_fit(args) -> int:
    outdir = _ensure_outdir(args.output)
    try:
        columns = read_series_csv(args.input)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    if args.column not in columns:
        print(f"error: column {args.column!r} not in {sorted(columns)}",
              file=sys.stderr)
        return 2
    try:
        series = DecaySeries(columns["t"], columns[args.column], args.column)
        fit = fit_decay_exponent(series, (args.window[0], args.window[1]))
    except ValueError as err:
        return _fail_summary(outdir, "fit", str(err))
    print(f"fitted slope: {fit.slope:.6g} (stderr {fit.stderr:.3g})")
    if not args.no_figures:
        mask = (series.times >= args.window[0]) & (series.times <= args.window[1])
        save_decay_figure(
            os.path.join(outdir, "fit.png"), series.times[mask],
            {args.column: series.values[mask]}, fits={args.column: fit.slope},
            title=f"fit over [{args.window[0]:g}, {args.window[1]:g}]")
    checks = [{"name": "fit_computed", "passed": True,
               "detail": f"slope {fit.slope:.6f} +- {fit.stderr:.3g} "
                         f"on {fit.n_samples} samples"}]
    return _finish(outdir, "fit", checks,
                   extra={"slope": fit.slope, "stderr": fit.stderr})


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hallmhd",
        description="Pseudo-spectral compressible Hall-MHD simulator and "
                    "verification harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--no-figures", action="store_true",
                       help="skip PNG rendering")

    p_sim = sub.add_parser("simulate", help="advance the nonlinear system")
    p_sim.add_argument("--config", help="key = value configuration file")
    p_sim.add_argument("--output", help="output directory (overrides output.dir)")
    _add_config_flags(p_sim)
    common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_lin = sub.add_parser("linear-decay",
                           help="linearized whole-space decay rates")
    p_lin.add_argument("--k", type=int, default=0, choices=(0, 1, 2, 3),
                       help="derivative order")
    p_lin.add_argument("--component", default="u", choices=("rho", "u", "B"))
    p_lin.add_argument("--mu", type=float, default=1.0)
    p_lin.add_argument("--nu", type=float, default=0.0)
    p_lin.add_argument("--sigma", type=float, default=1.0,
                       help="Gaussian profile width parameter")
    p_lin.add_argument("--rho-amp", type=float, default=1.0)
    p_lin.add_argument("--u-amp", type=float, default=1.0)
    p_lin.add_argument("--b-amp", type=float, default=1.0)
    p_lin.add_argument("--t0", type=float, default=1e2)
    p_lin.add_argument("--t1", type=float, default=1e4)
    p_lin.add_argument("--samples", type=int, default=25)
    p_lin.add_argument("--tolerance", type=float, default=0.05)
    p_lin.add_argument("--output", default="hallmhd-out")
    common(p_lin)
    p_lin.set_defaults(func=cmd_linear_decay)

    p_id = sub.add_parser("identities", help="curl identity residual checks")
    p_id.add_argument("--n", type=int, default=32)
    p_id.add_argument("--L", type=float, default=2 * np.pi)
    p_id.add_argument("--seed", type=int, default=0)
    p_id.add_argument("--pairs", type=int, default=20)
    p_id.add_argument("--tolerance", type=float, default=1e-11)
    p_id.add_argument("--output", default="hallmhd-out")
    common(p_id)
    p_id.set_defaults(func=cmd_identities)

    p_en = sub.add_parser("energy-audit",
                          help="energy functional and splitting checks")
    p_en.add_argument("--config", help="key = value configuration file")
    p_en.add_argument("--output", help="output directory (overrides output.dir)")
    p_en.add_argument("--tolerance", type=float, default=0.01,
                      help="allowed rise as a fraction of the initial energy")
    _add_config_flags(p_en)
    common(p_en)
    p_en.set_defaults(func=cmd_energy_audit)

    p_fit = sub.add_parser("fit", help="fit a decay exponent to a CSV column")
    p_fit.add_argument("--input", required=True)
    p_fit.add_argument("--column", default="norm")
    p_fit.add_argument("--window", type=float, nargs=2, required=True,
                       metavar=("T0", "T1"))
    p_fit.add_argument("--output", default="hallmhd-out")
    common(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except (ParameterError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
