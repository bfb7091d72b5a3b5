"""Scenario files: a flat `key = value` format with `#` comments and dotted
keys for namespacing.

Unknown keys are hard errors (no silent defaults for misspellings); missing
keys take the documented defaults.  Parsing fully resolves every derived
default (e.g. infodyn.lambda falls back to infodyn.u), so a parsed scenario
serializes to an explicit file that parses back to an identical scenario.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .dynamics import (
    ControlParams,
    State,
    SystemParams,
    ValidationError,
    state_violations,
    validate,
)
from .equilibrium import RegimeThresholds
from .infodyn import InfoConfig, info_config_violations, uniform_world, zipf_world
from .integrators import IntegratorConfig, config_violations

ZIPF = "zipf"
UNIFORM = "uniform"


class ConfigError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


@dataclass(frozen=True)
class SweepSpec:
    u_min: float = 0.05
    u_max: float = 1.0
    points: int = 96
    mode: str = "analytic"
    T: float = 500.0
    """Horizon used by simulated mode."""

    def u_grid(self) -> np.ndarray:
        return np.linspace(self.u_min, self.u_max, self.points)


@dataclass(frozen=True)
class InfoSpec:
    K: int = 64
    world: str = ZIPF
    zipf_exponent: float = 1.0
    generations: int = 20
    u: float = 0.5
    lam: float = 0.5
    tau: float = 0.6
    epsilon_tail: float = 1e-4
    kappa: float = 0.5
    smoothing: float = 1e-12

    def build_world(self) -> np.ndarray:
        if self.world == ZIPF:
            return zipf_world(self.K, self.zipf_exponent)
        return uniform_world(self.K)

    def build_config(self) -> InfoConfig:
        return InfoConfig(
            u=self.u, lam=self.lam, tau=self.tau,
            epsilon_tail=self.epsilon_tail, kappa=self.kappa, smoothing=self.smoothing,
        )


@dataclass(frozen=True)
class Scenario:
    name: str = "scenario"
    description: str = ""
    params: SystemParams = SystemParams()
    control: ControlParams = ControlParams()
    init: State = State(1.0, 1.0, 1.0)
    integrator: IntegratorConfig = IntegratorConfig()
    thresholds: RegimeThresholds = RegimeThresholds()
    sweep: SweepSpec = SweepSpec()
    info: InfoSpec = InfoSpec()


def _parse_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("on", "true", "yes", "1"):
        return True
    if lowered in ("off", "false", "no", "0"):
        return False
    raise ValueError(f"expected on/off, got {value!r}")


def _format_bool(value: bool) -> str:
    return "on" if value else "off"


# key -> (parse, format, default); order defines canonical serialization
_SCHEMA: dict[str, tuple] = {
    "name": (str, str, "scenario"),
    "description": (str, str, ""),
    "a": (float, repr, 1.0),
    "b": (float, repr, 1.0),
    "c": (float, repr, 1.0),
    "d": (float, repr, 1.0),
    "e": (float, repr, 1.0),
    "f": (float, repr, 1.0),
    "r_H": (float, repr, 0.0),
    "r_Q": (float, repr, 0.0),
    "r_M": (float, repr, 0.0),
    "alpha": (float, repr, 1.0),
    "beta": (float, repr, 1.0),
    "u": (float, repr, 0.5),
    "init.H": (float, repr, 1.0),
    "init.Q": (float, repr, 1.0),
    "init.M": (float, repr, 1.0),
    "integrator.method": (str, str, "euler"),
    "integrator.h": (float, repr, 0.01),
    "integrator.T": (float, repr, 100.0),
    "integrator.clamp": (_parse_bool, _format_bool, True),
    "integrator.max_steps": (int, str, 10_000_000),
    "integrator.stride": (int, str, 1),
    "classify.eps_eq": (float, repr, 1e-4),
    "classify.s_conv": (float, repr, 1e-4),
    "classify.s_min": (float, repr, 1e-3),
    "classify.delta": (float, repr, 0.1),
    "sweep.u_min": (float, repr, 0.05),
    "sweep.u_max": (float, repr, 1.0),
    "sweep.points": (int, str, 96),
    "sweep.mode": (str, str, "analytic"),
    "sweep.T": (float, repr, 500.0),
    "infodyn.K": (int, str, 64),
    "infodyn.world": (str, str, ZIPF),
    "infodyn.zipf_exponent": (float, repr, 1.0),
    "infodyn.generations": (int, str, 20),
    "infodyn.u": (float, repr, None),
    "infodyn.lambda": (float, repr, None),
    "infodyn.tau": (float, repr, None),
    "infodyn.epsilon_tail": (float, repr, 1e-4),
    "infodyn.kappa": (float, repr, 0.5),
    "infodyn.smoothing": (float, repr, 1e-12),
}


def parse_scenario(text: str) -> Scenario:
    """Parse and fully validate a scenario; errors carry line numbers."""
    raw: dict[str, object] = {}
    seen_lines: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(lineno, f"expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _SCHEMA:
            raise ConfigError(lineno, f"unknown key {key!r}")
        if key in raw:
            raise ConfigError(
                lineno, f"duplicate key {key!r} (first set on line {seen_lines[key]})"
            )
        if not value:
            raise ConfigError(lineno, f"empty value for key {key!r}")
        parse = _SCHEMA[key][0]
        try:
            raw[key] = parse(value)
        except ValueError as exc:
            raise ConfigError(lineno, f"bad value for {key!r}: {exc}") from None
        seen_lines[key] = lineno
    return _build_scenario(raw)


def _build_scenario(raw: dict[str, object]) -> Scenario:
    def get(key: str):
        return raw.get(key, _SCHEMA[key][2])

    control = ControlParams(alpha=get("alpha"), beta=get("beta"), u=get("u"))

    # derived defaults resolve at parse time so scenarios serialize explicitly
    info_u = get("infodyn.u")
    if info_u is None:
        info_u = control.u
    info_lam = get("infodyn.lambda")
    if info_lam is None:
        info_lam = info_u
    info_tau = get("infodyn.tau")
    if info_tau is None:
        info_tau = 1.0 - 0.8 * info_u

    scenario = Scenario(
        name=get("name"),
        description=get("description"),
        params=SystemParams(
            a=get("a"), b=get("b"), c=get("c"), d=get("d"), e=get("e"), f=get("f"),
            r_H=get("r_H"), r_Q=get("r_Q"), r_M=get("r_M"),
        ),
        control=control,
        init=State(get("init.H"), get("init.Q"), get("init.M")),
        integrator=IntegratorConfig(
            method=get("integrator.method"),
            h=get("integrator.h"),
            T=get("integrator.T"),
            clamp_nonneg=get("integrator.clamp"),
            max_steps=get("integrator.max_steps"),
            stride=get("integrator.stride"),
        ),
        thresholds=RegimeThresholds(
            eps_eq=get("classify.eps_eq"),
            s_conv=get("classify.s_conv"),
            s_min=get("classify.s_min"),
            delta=get("classify.delta"),
        ),
        sweep=SweepSpec(
            u_min=get("sweep.u_min"),
            u_max=get("sweep.u_max"),
            points=get("sweep.points"),
            mode=get("sweep.mode"),
            T=get("sweep.T"),
        ),
        info=InfoSpec(
            K=get("infodyn.K"),
            world=get("infodyn.world"),
            zipf_exponent=get("infodyn.zipf_exponent"),
            generations=get("infodyn.generations"),
            u=info_u,
            lam=info_lam,
            tau=info_tau,
            epsilon_tail=get("infodyn.epsilon_tail"),
            kappa=get("infodyn.kappa"),
            smoothing=get("infodyn.smoothing"),
        ),
    )
    _validate_scenario(scenario)
    return scenario


def _validate_scenario(s: Scenario) -> None:
    violations = validate(s.params, s.control)
    violations += state_violations(s.init)
    violations += config_violations(s.integrator)
    violations += info_config_violations(s.info.build_config())
    if s.sweep.points < 8:
        violations.append(f"sweep.points must be >= 8, got {s.sweep.points}")
    if not 0.0 < s.sweep.u_min < s.sweep.u_max <= 1.0:
        violations.append(
            f"sweep grid must satisfy 0 < u_min < u_max <= 1, "
            f"got [{s.sweep.u_min!r}, {s.sweep.u_max!r}]"
        )
    if s.sweep.mode not in ("analytic", "simulated"):
        violations.append(f"sweep.mode must be analytic or simulated, got {s.sweep.mode!r}")
    if s.sweep.T <= 0:
        violations.append(f"sweep.T must be > 0, got {s.sweep.T!r}")
    if s.info.K < 2:
        violations.append(f"infodyn.K must be >= 2, got {s.info.K}")
    if s.info.world not in (ZIPF, UNIFORM):
        violations.append(f"infodyn.world must be zipf or uniform, got {s.info.world!r}")
    if s.info.zipf_exponent < 0:
        violations.append(f"infodyn.zipf_exponent must be >= 0, got {s.info.zipf_exponent!r}")
    if s.info.generations < 2:
        violations.append(f"infodyn.generations must be >= 2, got {s.info.generations}")
    for name, thr in (("eps_eq", s.thresholds.eps_eq), ("s_conv", s.thresholds.s_conv),
                      ("s_min", s.thresholds.s_min)):
        if thr <= 0:
            violations.append(f"classify.{name} must be > 0, got {thr!r}")
    if not 0.0 <= s.thresholds.delta < 1.0:
        violations.append(f"classify.delta must lie in [0,1), got {s.thresholds.delta!r}")
    if violations:
        raise ValidationError(violations)


def scenario_values(s: Scenario) -> dict[str, object]:
    """Fully resolved scenario as a flat {config key: native value} map."""
    return {
        "name": s.name,
        "description": s.description,
        "a": s.params.a, "b": s.params.b, "c": s.params.c,
        "d": s.params.d, "e": s.params.e, "f": s.params.f,
        "r_H": s.params.r_H, "r_Q": s.params.r_Q, "r_M": s.params.r_M,
        "alpha": s.control.alpha, "beta": s.control.beta, "u": s.control.u,
        "init.H": s.init.H, "init.Q": s.init.Q, "init.M": s.init.M,
        "integrator.method": s.integrator.method,
        "integrator.h": s.integrator.h,
        "integrator.T": s.integrator.T,
        "integrator.clamp": s.integrator.clamp_nonneg,
        "integrator.max_steps": s.integrator.max_steps,
        "integrator.stride": s.integrator.stride,
        "classify.eps_eq": s.thresholds.eps_eq,
        "classify.s_conv": s.thresholds.s_conv,
        "classify.s_min": s.thresholds.s_min,
        "classify.delta": s.thresholds.delta,
        "sweep.u_min": s.sweep.u_min,
        "sweep.u_max": s.sweep.u_max,
        "sweep.points": s.sweep.points,
        "sweep.mode": s.sweep.mode,
        "sweep.T": s.sweep.T,
        "infodyn.K": s.info.K,
        "infodyn.world": s.info.world,
        "infodyn.zipf_exponent": s.info.zipf_exponent,
        "infodyn.generations": s.info.generations,
        "infodyn.u": s.info.u,
        "infodyn.lambda": s.info.lam,
        "infodyn.tau": s.info.tau,
        "infodyn.epsilon_tail": s.info.epsilon_tail,
        "infodyn.kappa": s.info.kappa,
        "infodyn.smoothing": s.info.smoothing,
    }


def serialize_scenario(s: Scenario) -> str:
    """Canonical explicit form: every key, schema order, round-trip exact."""
    values = scenario_values(s)
    lines = []
    for key, (_, fmt, _) in _SCHEMA.items():
        value = values[key]
        if key == "description" and value == "":
            continue
        lines.append(f"{key} = {fmt(value)}")
    return "\n".join(lines) + "\n"


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def preset_names() -> list[str]:
    files = resources.files("edl.presets")
    return sorted(p.name[: -len(".cfg")] for p in files.iterdir() if p.name.endswith(".cfg"))


def preset_text(name: str) -> str:
    path = resources.files("edl.presets").joinpath(f"{name}.cfg")
    if not path.is_file():
        raise KeyError(f"no preset named {name!r}; available: {', '.join(preset_names())}")
    return path.read_text(encoding="utf-8")


def load_preset(name: str) -> Scenario:
    return parse_scenario(preset_text(name))
