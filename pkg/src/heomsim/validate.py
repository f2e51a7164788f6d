"""Built-in validation suite: oracle-backed correctness checks runnable
from the command line.

Each check returns a CheckResult with the measured value and its bound;
the CLI turns any failed assertion into a nonzero exit code. Model
parameters (coupling strength, initial state, depths, tolerances) come
from the run configuration so the suite can be pointed at deliberately
bad settings, e.g. a shallow truncation at strong coupling.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass

import numpy as np

from .algebra import trace_distance
from .config import RunConfig, build_initial_state, build_model
from .heom import HierarchySpace, evolve, init_hierarchy, truncation_check
from .model import BathSpec, DrivingProtocol, InitialState, ModelSpec, initial_state
from .observables import concurrence, purity
from .oracle import PseudomodeSpec, compare, pseudomode_propagate, unitary_propagate

__all__ = ["CheckResult", "run_checks", "CHECK_NAMES"]

CHECK_NAMES = ("dark_state", "unitary_limit", "truncation",
               "step_convergence", "pseudomode")


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    bound: str
    detail: str
    seconds: float


def _fig2_baseline(r: float) -> ModelSpec:
    """Undriven strongly-detuned baseline used by several checks."""
    return ModelSpec(
        drive1=DrivingProtocol(omega=15.0, delta=4.0, omega_d=0.0, phi=np.pi),
        drive2=DrivingProtocol(omega=10.0, delta=7.0, omega_d=0.0, phi=0.0),
        bath=BathSpec(R=r), J=0.0, coupling="dipolar")


def _check_dark_state(cfg: RunConfig) -> CheckResult:
    t0 = time.perf_counter()
    tol = cfg["validate.dark_state_tol"]
    spec = ModelSpec(drive1=DrivingProtocol(omega=10.0), drive2=DrivingProtocol(omega=10.0),
                     bath=BathSpec(R=cfg["bath.r"] if cfg["bath.r"] > 0 else 1.0),
                     J=0.0, coupling="dipolar")
    space = HierarchySpace.from_model(spec, cfg["integrator.depth"])
    state = init_hierarchy(initial_state(InitialState(kind="phi_minus")), space)
    traj = evolve(state, spec, space, cfg["integrator.dt"], 10.0, sample_every=100)
    dev = max(abs(concurrence(rho, eig_floor=-1e-6) - 1.0) for rho in traj.states)
    return CheckResult("dark_state", dev < tol, dev, f"< {tol:g}",
                       "resonant undriven phi_minus stays maximally entangled",
                       time.perf_counter() - t0)


def _check_unitary_limit(cfg: RunConfig) -> CheckResult:
    t0 = time.perf_counter()
    tol = cfg["validate.unitary_tol"]
    spec = dataclasses.replace(_fig2_baseline(1e-12))
    init = InitialState(kind="phi_plus")
    rho0 = initial_state(init)
    depth = cfg["integrator.depth"]
    dt = cfg["integrator.dt"]
    space = HierarchySpace.from_model(spec, depth)
    heom_traj = evolve(init_hierarchy(rho0, space), spec, space, dt, 10.0, sample_every=100)
    uni_traj = unitary_propagate(spec, rho0, dt, 10.0, sample_every=100)
    res = compare(heom_traj, uni_traj)
    drift = max(abs(purity(rho) - 1.0) for rho in heom_traj.states)
    dev = max(res.max_trace_distance, drift)
    return CheckResult("unitary_limit", dev < tol, dev, f"< {tol:g}",
                       f"trace distance {res.max_trace_distance:.3e}, purity drift {drift:.3e}",
                       time.perf_counter() - t0)


def _check_truncation(cfg: RunConfig) -> CheckResult:
    t0 = time.perf_counter()
    tol = cfg["validate.truncation_tol"]
    spec = build_model(cfg)
    rho0 = initial_state(build_initial_state(cfg))
    dist = truncation_check(spec, rho0, cfg["integrator.dt"], cfg["validate.truncation_tau"],
                            cfg["validate.truncation_depth_a"], cfg["validate.truncation_depth_b"],
                            sample_every=100)
    return CheckResult("truncation", dist < tol, dist, f"< {tol:g}",
                       f"depths {cfg['validate.truncation_depth_a']} vs "
                       f"{cfg['validate.truncation_depth_b']}",
                       time.perf_counter() - t0)


def _check_step_convergence(cfg: RunConfig) -> CheckResult:
    t0 = time.perf_counter()
    lo, hi = cfg["validate.step_ratio_min"], cfg["validate.step_ratio_max"]
    spec = build_model(cfg)
    rho0 = initial_state(build_initial_state(cfg))
    depth = cfg["integrator.depth"]
    space = HierarchySpace.from_model(spec, depth)
    dt0 = 4e-3
    finals = []
    for dt in (dt0, dt0 / 2, dt0 / 4):
        traj = evolve(init_hierarchy(rho0, space), spec, space, dt, 1.0,
                      sample_every=10 ** 9)
        finals.append(traj.states[-1])
    d1 = trace_distance(finals[0], finals[1])
    d2 = trace_distance(finals[1], finals[2])
    ratio = d1 / d2 if d2 > 0 else np.inf
    return CheckResult("step_convergence", lo <= ratio <= hi, ratio, f"in [{lo:g}, {hi:g}]",
                       f"errors {d1:.3e} -> {d2:.3e} at dt {dt0} -> {dt0 / 4}",
                       time.perf_counter() - t0)


def _check_pseudomode(cfg: RunConfig) -> CheckResult:
    t0 = time.perf_counter()
    tol = cfg["validate.pseudomode_tol"]
    spec = build_model(cfg)
    init = build_initial_state(cfg)
    rho0 = initial_state(init)
    dt = cfg["integrator.dt"]
    depth = cfg["integrator.depth"]
    two_excitation = init.kind in ("psi_plus", "psi_minus")
    pm = PseudomodeSpec(fock_cutoff=24 if two_excitation else 16)
    space = HierarchySpace.from_model(spec, depth)
    heom_traj = evolve(init_hierarchy(rho0, space), spec, space, dt, 5.0, sample_every=50)
    pm_traj = pseudomode_propagate(spec, pm, rho0, dt, 5.0, sample_every=50)
    res = compare(heom_traj, pm_traj)
    return CheckResult("pseudomode", res.max_trace_distance < tol, res.max_trace_distance,
                       f"< {tol:g}",
                       f"mean {res.mean_trace_distance:.3e}, cutoff {pm.fock_cutoff}",
                       time.perf_counter() - t0)


_CHECKS = {
    "dark_state": _check_dark_state,
    "unitary_limit": _check_unitary_limit,
    "truncation": _check_truncation,
    "step_convergence": _check_step_convergence,
    "pseudomode": _check_pseudomode,
}


def run_checks(cfg: RunConfig) -> list[CheckResult]:
    names = cfg["validate.checks"]
    unknown = [n for n in names if n not in _CHECKS]
    if unknown:
        raise ValueError(f"unknown validation checks {unknown}; expected subset of {CHECK_NAMES}")
    return [_CHECKS[name](cfg) for name in names]
