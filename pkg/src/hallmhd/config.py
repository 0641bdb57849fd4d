"""Run configuration: key=value files, environment and flag overrides.

Configuration keys are dotted (``grid.n``, ``stepping.dt``).  Sources are
merged with increasing precedence: built-in defaults, then the config
file, then environment variables, then command-line flags.  Environment
variables use the prefix ``HALLMHD_`` with dots replaced by double
underscores and the key upper-cased, e.g. ``stepping.dt`` is overridden
by ``HALLMHD_STEPPING__DT``.

Unknown keys are rejected; every validation error names the offending
key and the violated constraint.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .integrator import StepConfig
from .model import ParameterError, PhysicalParams, make_initial_data
from .spectral import SpectralGrid, build_grid

ENV_PREFIX = "HALLMHD_"


class ConfigError(ValueError):
    """Invalid configuration; carries the offending key."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_int(text: str) -> int:
    return int(text.strip())


def _parse_float(text: str) -> float:
    return float(text.strip())


def _parse_str(text: str) -> str:
    return text.strip()


# key -> (parser, default); required keys carry the REQUIRED sentinel
REQUIRED = object()

SCHEMA: dict[str, tuple] = {
    "grid.n": (_parse_int, REQUIRED),
    "grid.L": (_parse_float, REQUIRED),
    "params.mu": (_parse_float, REQUIRED),
    "params.nu": (_parse_float, REQUIRED),
    "params.gamma": (_parse_float, 5.0 / 3.0),
    "params.hall": (_parse_bool, True),
    "initial.kind": (_parse_str, "random_lowpass"),
    "initial.amplitude": (_parse_float, 0.05),
    "initial.seed": (_parse_int, 0),
    "stepping.dt": (_parse_float, 0.01),
    "stepping.t_end": (_parse_float, 1.0),
    "stepping.cfl_safety": (_parse_float, 0.5),
    "stepping.scheme": (_parse_str, "etd2"),
    "stepping.snapshot_every": (_parse_float, 0.0),
    "stepping.regime_abort": (_parse_bool, True),
    "stepping.nonlinear": (_parse_bool, True),
    "diagnostics.beta": (_parse_float, 1e-2),
    "diagnostics.fit_t0": (_parse_float, 1.0),
    "diagnostics.fit_t1": (_parse_float, 0.0),  # 0: auto, half the box length
    "diagnostics.splitting_R": (_parse_str, "4,5"),
    "output.dir": (_parse_str, "hallmhd-out"),
}

INITIAL_KINDS = ("gaussian_bump", "random_lowpass")


def env_var_name(key: str) -> str:
    return ENV_PREFIX + key.upper().replace(".", "__")


@dataclass(frozen=True)
class RunConfig:
    """Fully validated run configuration."""

    grid_n: int
    grid_length: float
    params: PhysicalParams
    initial_kind: str
    initial_amplitude: float
    initial_seed: int
    stepping: StepConfig
    beta: float
    fit_window: tuple[float, float]
    splitting_r: tuple[float, ...]
    output_dir: str

    def build_grid(self) -> SpectralGrid:
        return build_grid(self.grid_n, self.grid_length)

    def make_initial(self, grid: SpectralGrid | None = None):
        return make_initial_data(self.initial_kind, self.initial_amplitude,
                                 self.initial_seed, grid or self.build_grid())

    def to_dict(self) -> dict:
        return {
            "grid.n": self.grid_n,
            "grid.L": self.grid_length,
            "params.mu": self.params.mu,
            "params.nu": self.params.nu,
            "params.gamma": self.params.gamma,
            "params.hall": self.params.hall,
            "initial.kind": self.initial_kind,
            "initial.amplitude": self.initial_amplitude,
            "initial.seed": self.initial_seed,
            "stepping.dt": self.stepping.dt,
            "stepping.t_end": self.stepping.t_end,
            "stepping.cfl_safety": self.stepping.cfl_safety,
            "stepping.scheme": self.stepping.scheme,
            "stepping.snapshot_every": self.stepping.snapshot_every,
            "stepping.regime_abort": self.stepping.regime_abort,
            "stepping.nonlinear": self.stepping.nonlinear,
            "diagnostics.beta": self.beta,
            "diagnostics.fit_t0": self.fit_window[0],
            "diagnostics.fit_t1": self.fit_window[1],
            "diagnostics.splitting_R": ",".join(f"{r:g}" for r in self.splitting_r),
            "output.dir": self.output_dir,
        }


def read_config_file(path: str) -> dict[str, str]:
    """Parse a line-oriented ``key = value`` file with # comments."""
    raw: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(
                    f"{path}:{lineno}", f"malformed line {stripped!r}; expected key = value")
            key, value = stripped.split("=", 1)
            key = key.strip()
            if key not in SCHEMA:
                raise ConfigError(key, f"unknown configuration key (line {lineno})")
            raw[key] = value.strip()
    return raw


def parse_config(path: str | None = None,
                 overrides: dict[str, str] | None = None,
                 env: dict[str, str] | None = None) -> RunConfig:
    """Merge defaults, file, environment and flag overrides, then validate."""
    env = os.environ if env is None else env

    values: dict[str, object] = {}
    sources: dict[str, str] = {}
    for key, (_, default) in SCHEMA.items():
        if default is not REQUIRED:
            values[key] = default
            sources[key] = "default"

    layered: list[tuple[str, dict[str, str]]] = []
    if path is not None:
        layered.append(("file", read_config_file(path)))
    env_layer = {}
    for key in SCHEMA:
        name = env_var_name(key)
        if name in env:
            env_layer[key] = env[name]
    layered.append(("environment", env_layer))
    if overrides:
        for key in overrides:
            if key not in SCHEMA:
                raise ConfigError(key, "unknown configuration key")
        layered.append(("flags", dict(overrides)))

    for source, layer in layered:
        for key, text in layer.items():
            parser = SCHEMA[key][0]
            try:
                values[key] = parser(text)
            except ValueError as err:
                raise ConfigError(key, f"bad value from {source}: {err}") from None
            sources[key] = source

    missing = [k for k in SCHEMA if k not in values]
    if missing:
        raise ConfigError(missing[0], "missing required key")

    return _validate(values)


def _validate(v: dict) -> RunConfig:
    n = v["grid.n"]
    if n < 8 or (n & (n - 1)) != 0:
        raise ConfigError("grid.n", f"{n} is not a power of two >= 8")
    if not v["grid.L"] > 0.0:
        raise ConfigError("grid.L", f"{v['grid.L']} must be positive")

    try:
        params = PhysicalParams(mu=v["params.mu"], nu=v["params.nu"],
                                gamma=v["params.gamma"], hall=v["params.hall"])
    except ParameterError as err:
        key = "params.gamma" if "gamma" in str(err) else "params.mu"
        raise ConfigError(key, str(err)) from None

    if v["initial.kind"] not in INITIAL_KINDS:
        raise ConfigError("initial.kind",
                          f"{v['initial.kind']!r} not one of {INITIAL_KINDS}")
    if not v["initial.amplitude"] > 0.0:
        raise ConfigError("initial.amplitude",
                          f"{v['initial.amplitude']} must be positive")

    try:
        stepping = StepConfig(
            dt=v["stepping.dt"], t_end=v["stepping.t_end"],
            cfl_safety=v["stepping.cfl_safety"], scheme=v["stepping.scheme"],
            snapshot_every=v["stepping.snapshot_every"],
            regime_abort=v["stepping.regime_abort"],
            nonlinear=v["stepping.nonlinear"],
        )
    except ValueError as err:
        text = str(err)
        field = next((f for f in ("dt", "t_end", "cfl_safety", "scheme",
                                  "snapshot_every") if f in text), "dt")
        raise ConfigError(f"stepping.{field}", text) from None

    if v["diagnostics.beta"] < 0.0:
        raise ConfigError("diagnostics.beta", "must be nonnegative")
    fit_t0 = v["diagnostics.fit_t0"]
    fit_t1 = v["diagnostics.fit_t1"]
    if fit_t1 == 0.0:
        fit_t1 = v["grid.L"] / 2.0  # pre-wrap window end
    if not fit_t1 > fit_t0:
        raise ConfigError("diagnostics.fit_t1",
                          f"window [{fit_t0}, {fit_t1}] is empty")
    try:
        splitting = tuple(float(r) for r in str(v["diagnostics.splitting_R"]).split(","))
    except ValueError:
        raise ConfigError("diagnostics.splitting_R",
                          "expected a comma-separated list of radii") from None
    if not splitting or any(r <= 0.0 for r in splitting):
        raise ConfigError("diagnostics.splitting_R", "radii must be positive")

    return RunConfig(
        grid_n=n,
        grid_length=v["grid.L"],
        params=params,
        initial_kind=v["initial.kind"],
        initial_amplitude=v["initial.amplitude"],
        initial_seed=v["initial.seed"],
        stepping=stepping,
        beta=v["diagnostics.beta"],
        fit_window=(fit_t0, fit_t1),
        splitting_r=splitting,
        output_dir=v["output.dir"],
    )
