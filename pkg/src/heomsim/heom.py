"""Truncated hierarchy propagation for the driven two-qubit model.

The physical density matrix rho_(0,0) is coupled to a square family of
auxiliary 4x4 matrices rho_(n1,n2) with 0 <= n1, n2 <= depth; couplings to
indices beyond the cutoff are dropped (terminator). A compiled extension
carries the RK4 inner loop; a vectorized numpy fallback with the same
contract is selected automatically when the extension is missing, or
explicitly via the environment variable HEOMSIM_KERNEL=numpy.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import _heom_numpy
from .model import ModelSpec, coupling_operator, hamiltonian_at

if os.environ.get("HEOMSIM_KERNEL", "").strip().lower() == "numpy":
    _backend = _heom_numpy
else:
    try:
        from . import _heom_kernel as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = _heom_numpy

KERNEL = _backend.KERNEL_NAME

# RK4 is stable on the negative real axis up to |z| ~ 2.785; the stiffest
# hierarchy decay rate is n.Re(nu) <= 2*depth, so require dt*2*depth < 2.5.
RK4_STABILITY_LIMIT = 2.5

__all__ = [
    "KERNEL",
    "RK4_STABILITY_LIMIT",
    "IntegrationError",
    "StabilityError",
    "HierarchySpace",
    "HierarchyState",
    "Trajectory",
    "init_hierarchy",
    "rhs",
    "step_rk4",
    "evolve",
    "propagate_snapshots",
    "truncation_check",
]


class IntegrationError(RuntimeError):
    """Non-finite values appeared during propagation."""

    def __init__(self, message: str, tau: float | None = None, step: int | None = None):
        super().__init__(message)
        self.tau = tau
        self.step = step


class StabilityError(ValueError):
    """Step size violates the linear-stability guard (a configuration error)."""


@dataclass(frozen=True)
class HierarchySpace:
    """Static description of the truncated hierarchy.

    The ladder couplings are normalized so that the second-order (Born)
    expansion of the hierarchy reproduces the bath correlation
    C(tau) = (R/2) exp(-(1 + i*omega0) tau) exactly: the coupling to
    rho_{n-e_k} carries the correlation amplitude C(0) = gamma0/2, i.e.
    +i (gamma0/2) n1 rho V and -i (gamma0/2) n2 V rho. (The same equation
    is often printed with twice this prefactor, which double-counts the
    coupling; the dephasing limit then disagrees with its exact solution.)
    """

    n_trunc: int
    nu1: complex
    gamma0: float
    V: np.ndarray

    @property
    def nu2(self) -> complex:
        return np.conj(self.nu1)

    @property
    def corr_amplitude(self) -> float:
        """C(0) = gamma0/2, the ladder-coupling amplitude."""
        return 0.5 * self.gamma0

    @property
    def dim(self) -> int:
        return self.n_trunc + 1

    @classmethod
    def from_model(cls, spec: ModelSpec, depth: int = 20) -> "HierarchySpace":
        if depth < 0:
            raise ValueError(f"truncation depth must be nonnegative, got {depth}")
        v = coupling_operator(spec)
        v.setflags(write=False)
        return cls(n_trunc=depth, nu1=1.0 - 1.0j * spec.omega0, gamma0=spec.bath.R, V=v)


@dataclass
class HierarchyState:
    """Integration state: scaled time plus the dense auxiliary family.

    An exclusive value; hand it between workers but never share it mutably.
    """

    tau: float
    mats: np.ndarray  # (dim, dim, 4, 4) complex, C-contiguous

    @property
    def physical(self) -> np.ndarray:
        """The reduced density matrix rho_(0,0)."""
        return self.mats[0, 0]


@dataclass
class Trajectory:
    """Sampled physical-matrix trajectory."""

    taus: np.ndarray  # (S,)
    states: np.ndarray  # (S, 4, 4)

    def __len__(self) -> int:
        return len(self.taus)


def init_hierarchy(rho0: np.ndarray, space: HierarchySpace) -> HierarchyState:
    """Separable-start hierarchy: rho_(0,0) = rho0, all auxiliaries zero."""
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (4, 4):
        raise ValueError(f"initial state must be 4x4, got {rho0.shape}")
    d = space.dim
    mats = np.zeros((d, d, 4, 4), dtype=complex)
    mats[0, 0] = rho0
    return HierarchyState(tau=0.0, mats=mats)


def _drive_tuple(spec: ModelSpec) -> tuple:
    d1, d2 = spec.drive1, spec.drive2
    return (d1.omega, d1.delta, d1.omega_d, d1.phi,
            d2.omega, d2.delta, d2.omega_d, d2.phi,
            0.5 * spec.J)


def rhs(state: HierarchyState, spec: ModelSpec, space: HierarchySpace,
        tau: float | None = None) -> np.ndarray:
    """One right-hand-side evaluation of the hierarchy (diagnostic path).

    Raises IntegrationError naming the index if any derivative entry is
    non-finite.
    """
    t = state.tau if tau is None else tau
    out = _heom_numpy.rhs(state.mats, t, space.nu1, space.corr_amplitude, space.V,
                          _drive_tuple(spec))
    d = out.shape[0]
    finite = np.isfinite(out.view(float).reshape(d, d, 32)).all(axis=2)
    if not finite.all():
        n1, n2 = (int(v) for v in np.argwhere(~finite)[0])
        raise IntegrationError(f"non-finite derivative at tau={t} index ({n1}, {n2})", tau=t)
    return out


def check_step(dt: float, depth: int) -> None:
    """Linear-stability guard, applied before integration starts."""
    if dt <= 0:
        raise StabilityError(f"step size must be positive, got {dt}")
    if dt * 2.0 * depth >= RK4_STABILITY_LIMIT:
        raise StabilityError(
            f"dt={dt} with depth={depth} violates the stability guard "
            f"dt*2*depth < {RK4_STABILITY_LIMIT} (stiffest hierarchy decay rate is 2*depth)")


def _step_plan(tau0: float, tau_end: float, dt: float) -> tuple[int, float, int]:
    """Number of full steps, shortened final step, and total step count."""
    span = tau_end - tau0
    if span <= 0:
        raise ValueError(f"tau_end={tau_end} must exceed the current time {tau0}")
    n_full = int(math.floor(span / dt + 1e-9))
    last_dt = span - n_full * dt
    if last_dt < 1e-12 * max(1.0, abs(tau_end)):
        last_dt = 0.0
    return n_full, last_dt, n_full + (1 if last_dt > 0 else 0)


def _run_kernel(state: HierarchyState, spec: ModelSpec, space: HierarchySpace,
                dt: float, n_full: int, last_dt: float,
                snap_steps: np.ndarray) -> np.ndarray:
    backend = _backend
    if getattr(backend, "REAL_COUPLING_ONLY", False) and np.any(space.V.imag != 0):
        backend = _heom_numpy
    snaps, tau_final, fail_step = backend.propagate(
        state.mats, state.tau, dt, n_full, last_dt,
        np.asarray(snap_steps, dtype=np.int64),
        _drive_tuple(spec), space.corr_amplitude, space.nu1,
        np.array(space.V, dtype=complex, order="C"))
    if fail_step >= 0:
        tau_fail = state.tau + min(fail_step, n_full) * dt + (last_dt if fail_step > n_full else 0.0)
        raise IntegrationError(
            f"non-finite state detected at step {fail_step} (tau~{tau_fail:.6g})",
            tau=tau_fail, step=int(fail_step))
    state.tau = tau_final
    return snaps


def step_rk4(state: HierarchyState, spec: ModelSpec, space: HierarchySpace,
             dt: float) -> HierarchyState:
    """Advance the state by one classic RK4 step (in place) and return it."""
    check_step(dt, space.n_trunc)
    _run_kernel(state, spec, space, dt, 1, 0.0, np.array([1], dtype=np.int64))
    return state


def evolve(state: HierarchyState, spec: ModelSpec, space: HierarchySpace,
           dt: float, tau_end: float, sample_every: int = 10) -> Trajectory:
    """Propagate to tau_end, sampling rho_(0,0) every ``sample_every`` steps.

    The final sample lands exactly on tau_end (the last step is shortened
    when needed). The passed state is advanced in place to tau_end.
    """
    check_step(dt, space.n_trunc)
    if sample_every < 1:
        raise ValueError(f"sample_every must be >= 1, got {sample_every}")
    tau0 = state.tau
    n_full, last_dt, n_total = _step_plan(tau0, tau_end, dt)
    steps = list(range(0, n_total + 1, sample_every))
    if steps[-1] != n_total:
        steps.append(n_total)
    snap_steps = np.array(steps, dtype=np.int64)
    snaps = _run_kernel(state, spec, space, dt, n_full, last_dt, snap_steps)
    taus = tau0 + snap_steps * dt
    taus[-1] = tau_end
    return Trajectory(taus=np.asarray(taus, dtype=float), states=snaps)


def propagate_snapshots(state: HierarchyState, spec: ModelSpec, space: HierarchySpace,
                        dt: float, tau_end: float,
                        snapshot_taus: np.ndarray) -> Trajectory:
    """Propagate to tau_end recording rho_(0,0) at the steps nearest the
    requested times (time mismatch at most dt/2)."""
    check_step(dt, space.n_trunc)
    tau0 = state.tau
    n_full, last_dt, n_total = _step_plan(tau0, tau_end, dt)
    req = np.asarray(snapshot_taus, dtype=float)
    if np.any(req < tau0 - 1e-12) or np.any(req > tau_end + 1e-12):
        raise ValueError("snapshot times must lie within [state.tau, tau_end]")
    steps = np.minimum(np.rint((req - tau0) / dt).astype(np.int64), n_total)
    if np.any(np.diff(steps) < 0):
        raise ValueError("snapshot times must be nondecreasing")
    uniq, inverse = np.unique(steps, return_inverse=True)
    snaps = _run_kernel(state, spec, space, dt, n_full, last_dt, uniq)
    taus = tau0 + uniq * dt
    if uniq[-1] == n_total and last_dt > 0:
        taus[-1] = tau_end
    return Trajectory(taus=taus[inverse], states=snaps[inverse])


def truncation_check(spec: ModelSpec, rho0: np.ndarray, dt: float, tau_end: float,
                     n_a: int, n_b: int, sample_every: int = 20) -> float:
    """Max trace distance between physical trajectories at two depths."""
    if not n_a < n_b:
        raise ValueError(f"expected n_a < n_b, got {n_a}, {n_b}")
    from .algebra import trace_distance

    trajs = []
    for depth in (n_a, n_b):
        space = HierarchySpace.from_model(spec, depth)
        st = init_hierarchy(rho0, space)
        trajs.append(evolve(st, spec, space, dt, tau_end, sample_every))
    a, b = trajs
    return max(trace_distance(x, y) for x, y in zip(a.states, b.states))
