"""Declarative run configuration: flat ``key = value`` text with ``#``
comments and dotted section prefixes.

Every key has a documented default; unknown keys are errors (no silent
typo tolerance) and parse -> serialize -> parse is the identity. Floats
are serialized with ``repr`` so the round trip is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (BELL_KINDS, COUPLING_KINDS, STATE_KINDS, BathSpec,
                    DrivingProtocol, InitialState, ModelSpec, XEntries)
from .observables import CycleClock

__all__ = [
    "ConfigError",
    "RunConfig",
    "SWEEP_PARAMETERS",
    "build_model",
    "build_initial_state",
    "build_clock",
]

CLOCK_MODES = ("one_excitation", "two_excitation", "explicit")
SWEEP_PARAMETERS = ("omega_d1", "omega_d2", "j", "delta1", "delta2", "r")
VALIDATE_CHECKS = ("dark_state", "unitary_limit", "truncation",
                   "step_convergence", "pseudomode")


class ConfigError(ValueError):
    """Malformed or unknown configuration input."""


def _parse_float(s: str) -> float:
    return float(s)


def _parse_int(s: str) -> int:
    return int(s)


def _parse_optfloat(s: str):
    return None if s == "auto" else float(s)


def _parse_str(s: str) -> str:
    return s


def _parse_ints(s: str) -> tuple[int, ...]:
    return tuple(int(part.strip()) for part in s.split(",") if part.strip())


def _parse_strs(s: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in s.split(",") if part.strip())


def _fmt(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


# key -> (parser, default, help)
SCHEMA: dict[str, tuple] = {
    "drive1.omega": (_parse_float, 15.0, "carrier frequency of qubit 1"),
    "drive1.delta": (_parse_float, 0.0, "detuning amplitude of qubit 1"),
    "drive1.omega_d": (_parse_float, 0.0, "driving frequency of qubit 1"),
    "drive1.phi": (_parse_float, 0.0, "driving phase of qubit 1 (radians)"),
    "drive2.omega": (_parse_float, 10.0, "carrier frequency of qubit 2"),
    "drive2.delta": (_parse_float, 0.0, "detuning amplitude of qubit 2"),
    "drive2.omega_d": (_parse_float, 0.0, "driving frequency of qubit 2"),
    "drive2.phi": (_parse_float, 0.0, "driving phase of qubit 2 (radians)"),
    "coupling.j": (_parse_float, 0.0, "transverse qubit-qubit exchange J"),
    "coupling.kind": (_parse_str, "dipolar", "system-bath coupling: dipolar | dephasing"),
    "bath.r": (_parse_float, 1.0, "coupling ratio R = gamma0/lambda (0 = closed system)"),
    "bath.omega0": (_parse_optfloat, None, "bath peak; auto = mean initial qubit frequency"),
    "state.kind": (_parse_str, "phi_plus",
                   "initial state: phi_plus | phi_minus | psi_plus | psi_minus | werner | x_state"),
    "state.p": (_parse_float, 0.5, "entanglement weight of the Bell-like core"),
    "state.r": (_parse_float, 1.0, "Werner mixing weight"),
    "state.bell": (_parse_str, "phi_plus", "pure core used when state.kind = werner"),
    "state.x.rho11": (_parse_float, 0.0, "X-state |11><11| population"),
    "state.x.rho22": (_parse_float, 0.0, "X-state |10><10| population"),
    "state.x.rho33": (_parse_float, 0.0, "X-state |01><01| population"),
    "state.x.re_rho14": (_parse_float, 0.0, "X-state Re <11|rho|00>"),
    "state.x.im_rho14": (_parse_float, 0.0, "X-state Im <11|rho|00>"),
    "state.x.re_rho23": (_parse_float, 0.0, "X-state Re <10|rho|01>"),
    "state.x.im_rho23": (_parse_float, 0.0, "X-state Im <10|rho|01>"),
    "clock.mode": (_parse_str, "one_excitation",
                   "cycle period rule: one_excitation | two_excitation | explicit"),
    "clock.tau_s": (_parse_optfloat, None, "explicit cycle period (required when mode = explicit)"),
    "run.cycles": (_parse_float, 10.0, "number of natural cycles to simulate"),
    "integrator.dt": (_parse_float, 1e-3, "RK4 step size (scaled time)"),
    "integrator.depth": (_parse_int, 20, "hierarchy truncation depth per index"),
    "integrator.sample_stride": (_parse_int, 10, "steps between trajectory samples"),
    "gp.eigen_stride": (_parse_int, 1, "samples between eigendecompositions for the geometric phase"),
    "sweep.axis_a.parameter": (_parse_str, "omega_d1", "first swept parameter"),
    "sweep.axis_a.min": (_parse_float, 0.0, "first axis lower endpoint"),
    "sweep.axis_a.max": (_parse_float, 8.0, "first axis upper endpoint"),
    "sweep.axis_a.points": (_parse_int, 21, "first axis point count"),
    "sweep.axis_b.parameter": (_parse_str, "omega_d2", "second swept parameter"),
    "sweep.axis_b.min": (_parse_float, 0.0, "second axis lower endpoint"),
    "sweep.axis_b.max": (_parse_float, 8.0, "second axis upper endpoint"),
    "sweep.axis_b.points": (_parse_int, 21, "second axis point count"),
    "sweep.cycles": (_parse_ints, (1, 3, 5, 7), "cycle counts to snapshot"),
    "sweep.lock": (_parse_strs, (), "bindings like omega_d2=omega_d1 or omega_d2=1.0"),
    "validate.checks": (_parse_strs, VALIDATE_CHECKS, "subset of validation checks to run"),
    "validate.dark_state_tol": (_parse_float, 1e-6, "Concurrence deviation bound for the dark state"),
    "validate.unitary_tol": (_parse_float, 1e-8, "trace-distance bound against the unitary oracle"),
    "validate.truncation_tol": (_parse_float, 1e-6, "trace-distance bound between truncation depths"),
    "validate.truncation_depth_a": (_parse_int, 20, "shallow depth for the truncation check"),
    "validate.truncation_depth_b": (_parse_int, 24, "deep depth for the truncation check"),
    "validate.truncation_tau": (_parse_float, 10.0, "horizon of the truncation check"),
    "validate.pseudomode_tol": (_parse_float, 1e-3, "trace-distance bound against the dilation oracle"),
    "validate.step_ratio_min": (_parse_float, 8.0, "lower bound of the dt-halving error ratio"),
    "validate.step_ratio_max": (_parse_float, 32.0, "upper bound of the dt-halving error ratio"),
}


@dataclass
class RunConfig:
    """Parsed configuration; ``values`` holds one entry per schema key."""

    values: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        merged = {k: default for k, (_, default, _) in SCHEMA.items()}
        for k, v in self.values.items():
            if k not in SCHEMA:
                raise ConfigError(f"unknown key '{k}'")
            merged[k] = v
        self.values = merged

    def __getitem__(self, key: str):
        try:
            return self.values[key]
        except KeyError:
            raise ConfigError(f"unknown key '{key}'") from None

    def replace(self, **overrides) -> "RunConfig":
        """Copy with dotted keys overridden (underscores stand for dots)."""
        vals = dict(self.values)
        for k, v in overrides.items():
            vals[k.replace("__", ".")] = v
        return RunConfig(vals)

    def updated(self, mapping: dict) -> "RunConfig":
        vals = dict(self.values)
        vals.update(mapping)
        return RunConfig(vals)

    @classmethod
    def parse(cls, text: str, source: str = "<config>") -> "RunConfig":
        values: dict = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, _, rhs = line.partition("=")
            key = key.strip()
            rhs = rhs.strip()
            if key not in SCHEMA:
                raise ConfigError(f"{source}:{lineno}: unknown key '{key}'")
            parser = SCHEMA[key][0]
            try:
                values[key] = parser(rhs)
            except ValueError as exc:
                raise ConfigError(f"{source}:{lineno}: bad value for '{key}': {exc}") from None
        return cls(values)

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read(), source=str(path))

    def serialize(self) -> str:
        lines = []
        section = None
        for key, (_, _, help_text) in SCHEMA.items():
            head = key.split(".", 1)[0]
            if head != section:
                if section is not None:
                    lines.append("")
                section = head
            lines.append(f"{key} = {_fmt(self.values[key])}")
        return "\n".join(lines) + "\n"

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.serialize())


def build_model(cfg: RunConfig) -> ModelSpec:
    kind = cfg["coupling.kind"]
    if kind not in COUPLING_KINDS:
        raise ConfigError(f"coupling.kind must be one of {COUPLING_KINDS}, got '{kind}'")
    try:
        return ModelSpec(
            drive1=DrivingProtocol(omega=cfg["drive1.omega"], delta=cfg["drive1.delta"],
                                   omega_d=cfg["drive1.omega_d"], phi=cfg["drive1.phi"]),
            drive2=DrivingProtocol(omega=cfg["drive2.omega"], delta=cfg["drive2.delta"],
                                   omega_d=cfg["drive2.omega_d"], phi=cfg["drive2.phi"]),
            bath=BathSpec(R=cfg["bath.r"], omega0=cfg["bath.omega0"]),
            J=cfg["coupling.j"],
            coupling=kind,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def build_initial_state(cfg: RunConfig) -> InitialState:
    kind = cfg["state.kind"]
    if kind not in STATE_KINDS:
        raise ConfigError(f"state.kind must be one of {STATE_KINDS}, got '{kind}'")
    bell = cfg["state.bell"]
    if bell not in BELL_KINDS:
        raise ConfigError(f"state.bell must be one of {BELL_KINDS}, got '{bell}'")
    try:
        return InitialState(
            kind=kind, p=cfg["state.p"], r=cfg["state.r"], bell=bell,
            x=XEntries(
                rho11=cfg["state.x.rho11"], rho22=cfg["state.x.rho22"],
                rho33=cfg["state.x.rho33"],
                re_rho14=cfg["state.x.re_rho14"], im_rho14=cfg["state.x.im_rho14"],
                re_rho23=cfg["state.x.re_rho23"], im_rho23=cfg["state.x.im_rho23"],
            ))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def build_clock(cfg: RunConfig, spec: ModelSpec) -> CycleClock:
    mode = cfg["clock.mode"]
    if mode not in CLOCK_MODES:
        raise ConfigError(f"clock.mode must be one of {CLOCK_MODES}, got '{mode}'")
    try:
        if mode == "one_excitation":
            return CycleClock.one_excitation(spec)
        if mode == "two_excitation":
            return CycleClock.two_excitation(spec)
        tau_s = cfg["clock.tau_s"]
        if tau_s is None:
            raise ConfigError("clock.mode = explicit requires clock.tau_s")
        return CycleClock.explicit(tau_s)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
