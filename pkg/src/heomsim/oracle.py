"""Independent cross-checks for the hierarchy propagation.

Two oracles, both deliberately simple and structurally unrelated to the
hierarchy code path:

* a direct unitary RK4 integrator of d(rho)/dtau = -i[H(tau), rho] for the
  closed system, and
* a one-mode Lindblad dilation of the Lorentzian vacuum bath. A single
  damped harmonic mode with frequency omega0, decay rate 2 and coupling
  g = sqrt(R/2) through V (x) (a + a^dag) reproduces the bath correlation
  (R/2) exp(-(1 + i*omega0) tau) exactly, so tracing the mode out must
  reproduce the hierarchy's reduced dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import kron, trace_distance
from .heom import IntegrationError, Trajectory, _step_plan
from .model import ModelSpec, coupling_operator
from .observables import concurrence, purity

__all__ = [
    "PseudomodeSpec",
    "CutoffError",
    "unitary_propagate",
    "pseudomode_propagate",
    "ComparisonResult",
    "compare",
]


class CutoffError(RuntimeError):
    """Population reached the top Fock level; the mode cutoff is inadequate."""

    def __init__(self, message: str, tau: float, population: float):
        super().__init__(message)
        self.tau = tau
        self.population = population


@dataclass(frozen=True)
class PseudomodeSpec:
    """One damped mode replacing the structured bath.

    g and mode_freq default to sqrt(R/2) and the bath peak omega0 of the
    model they are used with; mode_decay 2 matches the unit correlation
    time in scaled units.
    """

    fock_cutoff: int = 16
    g: float | None = None
    mode_freq: float | None = None
    mode_decay: float = 2.0

    def coupling(self, spec: ModelSpec) -> float:
        return math.sqrt(spec.bath.R / 2.0) if self.g is None else self.g

    def frequency(self, spec: ModelSpec) -> float:
        return spec.omega0 if self.mode_freq is None else self.mode_freq


def _sample_plan(tau0: float, tau_end: float, dt: float, sample_every: int):
    n_full, last_dt, n_total = _step_plan(tau0, tau_end, dt)
    steps = list(range(0, n_total + 1, sample_every))
    if steps[-1] != n_total:
        steps.append(n_total)
    return n_full, last_dt, n_total, steps


def _rk4(rho, rhs, tau, h):
    k1 = rhs(tau, rho)
    k2 = rhs(tau + 0.5 * h, rho + (0.5 * h) * k1)
    k3 = rhs(tau + 0.5 * h, rho + (0.5 * h) * k2)
    k4 = rhs(tau + h, rho + h * k3)
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def unitary_propagate(spec: ModelSpec, rho0: np.ndarray, dt: float, tau_end: float,
                      sample_every: int = 10) -> Trajectory:
    """Closed-system propagation d(rho)/dtau = -i[H(tau), rho] by RK4."""
    d1, d2 = spec.drive1, spec.drive2
    jh = 0.5 * spec.J

    def h_at(tau):
        w1 = float(d1.frequency(tau))
        w2 = float(d2.frequency(tau))
        h = np.zeros((4, 4), dtype=complex)
        h[0, 0] = w1 + w2
        h[1, 1] = w1
        h[2, 2] = w2
        h[1, 2] = h[2, 1] = jh
        return h

    def rhs(tau, rho):
        h = h_at(tau)
        return -1j * (h @ rho - rho @ h)

    return _propagate_dense(rhs, np.asarray(rho0, dtype=complex), dt, tau_end,
                            sample_every)


def _propagate_dense(rhs, rho0, dt, tau_end, sample_every, on_sample=None):
    n_full, last_dt, n_total, steps = _sample_plan(0.0, tau_end, dt, sample_every)
    samples = np.zeros((len(steps), *rho0.shape), dtype=complex)
    taus = np.zeros(len(steps))
    pos = 0
    if steps[0] == 0:
        samples[0] = rho0
        pos = 1
    rho = rho0.copy()
    tau = 0.0
    for k in range(1, n_total + 1):
        h = dt if k <= n_full else last_dt
        rho = _rk4(rho, rhs, tau, h)
        tau += h
        if pos < len(steps) and steps[pos] == k:
            if not np.all(np.isfinite(rho.view(float))):
                raise IntegrationError(f"non-finite state at step {k} (tau={tau:.6g})",
                                       tau=tau, step=k)
            if on_sample is not None:
                on_sample(tau, rho)
            samples[pos] = rho
            taus[pos] = tau
            pos += 1
    taus[-1] = tau_end
    return Trajectory(taus=taus, states=samples)


def pseudomode_propagate(spec: ModelSpec, pm: PseudomodeSpec, rho0: np.ndarray,
                         dt: float, tau_end: float, sample_every: int = 10) -> Trajectory:
    """Lindblad propagation of system (x) mode, reduced to the system.

    The mode starts in vacuum. Raises CutoffError as soon as the top Fock
    level holds more than 1e-6 population at a sample time.
    """
    nf = pm.fock_cutoff
    if nf < 2:
        raise ValueError(f"fock_cutoff must be at least 2, got {nf}")
    g = pm.coupling(spec)
    wm = pm.frequency(spec)
    kappa = pm.mode_decay

    a_op = np.diag(np.sqrt(np.arange(1, nf, dtype=float)), k=1).astype(complex)
    n_op = a_op.conj().T @ a_op
    im = np.eye(nf, dtype=complex)
    i4 = np.eye(4, dtype=complex)
    v = coupling_operator(spec)

    k1 = kron(np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex), im)  # multiplies w1
    k2 = kron(np.diag([1.0, 0.0, 1.0, 0.0]).astype(complex), im)  # multiplies w2
    h_static = np.zeros((4 * nf, 4 * nf), dtype=complex)
    h_static[:, :] = wm * kron(i4, n_op) + g * kron(v, a_op + a_op.conj().T)
    jh = 0.5 * spec.J
    hj = np.zeros((4, 4), dtype=complex)
    hj[1, 2] = hj[2, 1] = jh
    h_static += kron(hj, im)

    a_full = kron(i4, a_op)
    ad_full = a_full.conj().T
    n_full_op = kron(i4, n_op)
    d1, d2 = spec.drive1, spec.drive2

    def rhs(tau, rho):
        h = h_static + float(d1.frequency(tau)) * k1 + float(d2.frequency(tau)) * k2
        out = -1j * (h @ rho - rho @ h)
        out += kappa * (a_full @ rho @ ad_full
                        - 0.5 * (n_full_op @ rho + rho @ n_full_op))
        return out

    top = slice(nf - 1, 4 * nf, nf)

    def check_cutoff(tau, rho):
        pop = float(np.sum(rho.diagonal()[top].real))
        if pop > 1e-6:
            raise CutoffError(
                f"top Fock level population {pop:.3e} exceeds 1e-6 at tau={tau:.6g}; "
                f"increase fock_cutoff", tau=tau, population=pop)

    rho_full0 = kron(np.asarray(rho0, dtype=complex),
                     np.outer(im[:, 0], im[:, 0].conj()))
    traj = _propagate_dense(rhs, rho_full0, dt, tau_end, sample_every,
                            on_sample=check_cutoff)
    reduced = np.einsum("sanbn->sab", traj.states.reshape(-1, 4, nf, 4, nf))
    return Trajectory(taus=traj.taus, states=reduced)


@dataclass(frozen=True)
class ComparisonResult:
    max_trace_distance: float
    mean_trace_distance: float
    max_purity_delta: float
    max_concurrence_delta: float


def compare(traj_a: Trajectory, traj_b: Trajectory,
            grid_tol: float = 1e-9, eig_floor: float = -1e-6) -> ComparisonResult:
    """Trace-distance and per-observable deltas on a common sample grid."""
    if len(traj_a) != len(traj_b) or np.max(np.abs(traj_a.taus - traj_b.taus)) > grid_tol:
        raise ValueError("trajectories are not on a common sample grid")
    td = np.array([trace_distance(x, y) for x, y in zip(traj_a.states, traj_b.states)])
    dp = np.array([abs(purity(x) - purity(y))
                   for x, y in zip(traj_a.states, traj_b.states)])
    dc = np.array([abs(concurrence(x, eig_floor) - concurrence(y, eig_floor))
                   for x, y in zip(traj_a.states, traj_b.states)])
    return ComparisonResult(
        max_trace_distance=float(td.max()),
        mean_trace_distance=float(td.mean()),
        max_purity_delta=float(dp.max()),
        max_concurrence_delta=float(dc.max()),
    )
