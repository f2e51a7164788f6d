"""Deterministic parallel parameter sweeps over rectangular grids.

Each grid cell runs an independent hierarchy trajectory to the largest
requested cycle count and snapshots Concurrence and Purity at every cycle
boundary. Work is partitioned statically by grid row and results are
assembled by index, so output is bit-identical for any worker count. A
failed cell carries an explicit status string instead of a silent gap.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .heom import HierarchySpace, IntegrationError, StabilityError, init_hierarchy, propagate_snapshots
from .model import InitialState, ModelSpec, initial_state
from .observables import CycleClock, concurrence, purity

__all__ = [
    "SWEEP_PARAMETERS",
    "SweepAxis",
    "SweepResult",
    "apply_parameter",
    "parse_locks",
    "locked_axes",
    "run_sweep",
]

SWEEP_PARAMETERS = ("omega_d1", "omega_d2", "j", "delta1", "delta2", "r")


@dataclass(frozen=True)
class SweepAxis:
    """Uniform closed-interval grid over one model parameter.

    points = 1 degenerates to the single value ``min`` (used by the 1x1
    consistency checks).
    """

    parameter: str
    min: float
    max: float
    points: int

    def __post_init__(self) -> None:
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"unknown sweep parameter '{self.parameter}'; "
                             f"expected one of {SWEEP_PARAMETERS}")
        if self.points < 1:
            raise ValueError(f"axis needs at least one point, got {self.points}")
        if self.points == 1 and self.max != self.min:
            raise ValueError("a single-point axis requires max == min")

    def values(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.min], dtype=float)
        return np.linspace(self.min, self.max, self.points)


def apply_parameter(spec: ModelSpec, name: str, value: float) -> ModelSpec:
    """Return a copy of the model with one swept parameter replaced."""
    if name == "omega_d1":
        return dataclasses.replace(spec, drive1=dataclasses.replace(spec.drive1, omega_d=value))
    if name == "omega_d2":
        return dataclasses.replace(spec, drive2=dataclasses.replace(spec.drive2, omega_d=value))
    if name == "delta1":
        return dataclasses.replace(spec, drive1=dataclasses.replace(spec.drive1, delta=value))
    if name == "delta2":
        return dataclasses.replace(spec, drive2=dataclasses.replace(spec.drive2, delta=value))
    if name == "j":
        return dataclasses.replace(spec, J=value)
    if name == "r":
        return dataclasses.replace(spec, bath=dataclasses.replace(spec.bath, R=value))
    raise ValueError(f"unknown sweep parameter '{name}'")


def parse_locks(specs) -> tuple[tuple[str, object], ...]:
    """Parse lock strings 'target=source' where source is a parameter name
    or a constant."""
    locks: list[tuple[str, object]] = []
    for item in specs:
        target, sep, source = str(item).partition("=")
        target = target.strip()
        source = source.strip()
        if not sep or not target or not source:
            raise ValueError(f"lock '{item}' must have the form target=source")
        if target not in SWEEP_PARAMETERS:
            raise ValueError(f"lock target '{target}' is not a sweep parameter")
        if source in SWEEP_PARAMETERS:
            locks.append((target, source))
        else:
            try:
                locks.append((target, float(source)))
            except ValueError:
                raise ValueError(f"lock source '{source}' is neither a parameter "
                                 f"nor a number") from None
    return tuple(locks)


def locked_axes(base: ModelSpec, axis_a: SweepAxis, axis_b: SweepAxis,
                locks: tuple[tuple[str, object], ...] = ()):
    """Factory mapping grid coordinates to fully-bound model specs.

    Bindings must reference distinct target parameters, and a lock may not
    retarget a swept axis parameter.
    """
    targets = [t for t, _ in locks]
    if len(set(targets)) != len(targets):
        raise ValueError("conflicting locks: duplicate target parameter")
    for t in targets:
        if t in (axis_a.parameter, axis_b.parameter):
            raise ValueError(f"conflicting lock: '{t}' is a swept axis parameter")

    def make(value_a: float, value_b: float) -> ModelSpec:
        spec = apply_parameter(base, axis_a.parameter, value_a)
        spec = apply_parameter(spec, axis_b.parameter, value_b)
        bound = {axis_a.parameter: value_a, axis_b.parameter: value_b}
        for target, source in locks:
            val = bound[source] if isinstance(source, str) else source
            spec = apply_parameter(spec, target, val)
        return spec

    return make


@dataclass
class SweepResult:
    """Grid observables at each requested cycle count plus run metadata."""

    axis_a: SweepAxis
    axis_b: SweepAxis
    cycles: tuple[int, ...]
    values_a: np.ndarray
    values_b: np.ndarray
    concurrence: np.ndarray  # (n_cycles, na, nb)
    purity: np.ndarray  # (n_cycles, na, nb)
    status: list  # [na][nb] strings, "ok" or "failed: reason"
    metadata: dict


def _run_cell(base: ModelSpec, init: InitialState, axis_a: SweepAxis, axis_b: SweepAxis,
              locks, value_a: float, value_b: float, cycles, tau_s: float,
              dt: float, depth: int):
    make = locked_axes(base, axis_a, axis_b, locks)
    spec = make(value_a, value_b)
    boundaries = np.array([n * tau_s for n in cycles])
    try:
        space = HierarchySpace.from_model(spec, depth)
        state = init_hierarchy(initial_state(init), space)
        traj = propagate_snapshots(state, spec, space, dt, boundaries[-1], boundaries)
        conc = np.array([concurrence(rho, eig_floor=-1e-6) for rho in traj.states])
        pur = np.array([purity(rho) for rho in traj.states])
        return conc, pur, "ok"
    except (IntegrationError, StabilityError, ValueError) as exc:
        nan = np.full(len(cycles), np.nan)
        return nan, nan, f"failed: {exc}"


def _run_rows(args):
    (rows, base, init, axis_a, axis_b, locks, values_a, values_b,
     cycles, tau_s, dt, depth) = args
    out = []
    for i in rows:
        row = [_run_cell(base, init, axis_a, axis_b, locks, values_a[i], vb,
                         cycles, tau_s, dt, depth)
               for vb in values_b]
        out.append((i, row))
    return out


def run_sweep(base: ModelSpec, init: InitialState, axis_a: SweepAxis, axis_b: SweepAxis,
              cycles, clock: CycleClock, dt: float = 1e-3, depth: int = 20,
              locks: tuple = (), workers: int = 1) -> SweepResult:
    """Evaluate the grid; each cell is an independent trajectory.

    Cells that fail to integrate are recorded with a reason; the sweep
    completes the remaining cells.
    """
    cycles = tuple(int(n) for n in cycles)
    if not cycles or any(n < 1 for n in cycles) or list(cycles) != sorted(set(cycles)):
        raise ValueError(f"cycles must be distinct ascending positive integers, got {cycles}")
    values_a = axis_a.values()
    values_b = axis_b.values()
    na, nb = len(values_a), len(values_b)
    conc = np.full((len(cycles), na, nb), np.nan)
    pur = np.full((len(cycles), na, nb), np.nan)
    status = [["pending"] * nb for _ in range(na)]

    workers = max(1, int(workers))
    block = -(-na // workers)  # static contiguous blocks of rows
    row_blocks = [list(range(w * block, min((w + 1) * block, na)))
                  for w in range(workers)]
    row_blocks = [b for b in row_blocks if b]
    payloads = [(rows, base, init, axis_a, axis_b, locks, values_a, values_b,
                 cycles, clock.tau_s, dt, depth) for rows in row_blocks]

    if workers == 1 or na == 1:
        results = [_run_rows(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=len(payloads)) as pool:
            results = list(pool.map(_run_rows, payloads))

    for block in results:
        for i, row in block:
            for j, (c, p, st) in enumerate(row):
                conc[:, i, j] = c
                pur[:, i, j] = p
                status[i][j] = st

    metadata = {
        "axis_a.parameter": axis_a.parameter, "axis_a.min": axis_a.min,
        "axis_a.max": axis_a.max, "axis_a.points": axis_a.points,
        "axis_b.parameter": axis_b.parameter, "axis_b.min": axis_b.min,
        "axis_b.max": axis_b.max, "axis_b.points": axis_b.points,
        "cycles": ",".join(str(n) for n in cycles),
        "tau_s": repr(clock.tau_s), "dt": repr(dt), "depth": depth,
        "locks": ";".join(f"{t}={s}" for t, s in locks),
        "base.drive1": f"omega={base.drive1.omega} delta={base.drive1.delta} "
                       f"omega_d={base.drive1.omega_d} phi={base.drive1.phi}",
        "base.drive2": f"omega={base.drive2.omega} delta={base.drive2.delta} "
                       f"omega_d={base.drive2.omega_d} phi={base.drive2.phi}",
        "base.j": base.J, "base.coupling": base.coupling,
        "base.bath_r": base.bath.R, "base.omega0": repr(base.omega0),
        "state.kind": init.kind, "state.p": init.p, "state.r": init.r,
    }
    return SweepResult(axis_a=axis_a, axis_b=axis_b, cycles=cycles,
                       values_a=values_a, values_b=values_b,
                       concurrence=conc, purity=pur, status=status,
                       metadata=metadata)
