"""Observables over sampled trajectories: Purity, Concurrence, matrix
elements, and the kinematic geometric phase of the evolving mixed state.

The geometric phase follows the quantum-kinematic construction: at each
cycle boundary it combines the endpoint eigenvector overlaps, weighted by
sqrt(eps_k(0) eps_k(tau)), with a parallel-transport correction realized
as the accumulated product of per-step overlap phases (a Pancharatnam
discretization of exp(-int <Psi_k| d/dt |Psi_k> dt)). The combination is
gauge invariant: multiplying any stored eigenvector by a phase cancels
between the endpoint term and the transport sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import hermitian_eig, kron, psd_sqrt
from .heom import Trajectory
from .model import SIGMA_Y, ModelSpec

__all__ = [
    "purity",
    "concurrence",
    "MatrixElements",
    "matrix_elements",
    "CycleClock",
    "ObservableSeries",
    "observable_series",
    "BranchTrackingError",
    "GeometricPhaseSeries",
    "geometric_phase",
    "wrap_angle",
]

_SYSY = kron(SIGMA_Y, SIGMA_Y)


def purity(rho: np.ndarray) -> float:
    """trace(rho^2); 1 for pure states, 1/4 for the maximally mixed state."""
    return float(np.trace(rho @ rho).real)


def concurrence(rho: np.ndarray, eig_floor: float = -1e-9) -> float:
    """Two-qubit Concurrence max(0, sqrt(l1)-sqrt(l2)-sqrt(l3)-sqrt(l4)).

    The l_i are the eigenvalues of rho*rho_tilde with
    rho_tilde = (sy x sy) conj(rho) (sy x sy), evaluated in Hermitian form:
    sqrt(l_i) are the eigenvalues of sqrt( sqrt(rho) rho_tilde sqrt(rho) ).
    Eigenvalues of rho down to ``eig_floor`` are clamped to zero; anything
    below is rejected.
    """
    s = psd_sqrt(rho, floor=eig_floor)
    rho_t = _SYSY @ rho.conj() @ _SYSY
    m = s @ rho_t @ s
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    eta = np.sqrt(np.clip(w, 0.0, None))[::-1]  # descending sqrt(l_i)
    return float(max(0.0, eta[0] - eta[1] - eta[2] - eta[3]))


@dataclass(frozen=True)
class MatrixElements:
    """Populations and X-state coherences of a reduced density matrix.

    rho44_from_trace duplicates rho44 through the trace identity
    1 - rho11 - rho22 - rho33 as a consistency field.
    """

    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho23: complex
    rho14: complex
    rho44_from_trace: float


def matrix_elements(rho: np.ndarray) -> MatrixElements:
    return MatrixElements(
        rho11=float(rho[0, 0].real),
        rho22=float(rho[1, 1].real),
        rho33=float(rho[2, 2].real),
        rho44=float(rho[3, 3].real),
        rho23=complex(rho[1, 2]),
        rho14=complex(rho[0, 3]),
        rho44_from_trace=float(1.0 - rho[0, 0].real - rho[1, 1].real - rho[2, 2].real),
    )


@dataclass(frozen=True)
class CycleClock:
    """Natural-cycle clock N = tau / tau_s."""

    tau_s: float
    mode: str = "explicit"

    def __post_init__(self) -> None:
        if not self.tau_s > 0:
            raise ValueError(f"cycle period must be positive, got {self.tau_s}")

    @classmethod
    def one_excitation(cls, spec: ModelSpec) -> "CycleClock":
        """tau_s = 2*pi/|Omega2 - Omega1| (carrier frequencies)."""
        diff = spec.drive2.omega - spec.drive1.omega
        if diff == 0:
            raise ValueError("one-excitation clock requires Omega2 != Omega1")
        return cls(tau_s=2.0 * np.pi / abs(diff), mode="one_excitation")

    @classmethod
    def two_excitation(cls, spec: ModelSpec) -> "CycleClock":
        """tau_s = 2*pi/(Omega1 + Omega2)."""
        return cls(tau_s=2.0 * np.pi / (spec.drive1.omega + spec.drive2.omega),
                   mode="two_excitation")

    @classmethod
    def explicit(cls, tau_s: float) -> "CycleClock":
        return cls(tau_s=tau_s, mode="explicit")

    def cycles(self, tau):
        return np.asarray(tau) / self.tau_s


@dataclass
class ObservableSeries:
    """Per-sample scalar observables of a trajectory."""

    tau: np.ndarray
    cycle: np.ndarray
    rho11: np.ndarray
    rho22: np.ndarray
    rho33: np.ndarray
    rho44: np.ndarray
    rho23: np.ndarray
    rho14: np.ndarray
    purity: np.ndarray
    concurrence: np.ndarray


def observable_series(traj: Trajectory, clock: CycleClock,
                      eig_floor: float = -1e-6) -> ObservableSeries:
    """Evaluate the standard observables at every sample.

    The eigenvalue floor is relaxed to the hierarchy's approximate-positivity
    bound so that transient truncation noise does not abort a run.
    """
    n = len(traj)
    pur = np.empty(n)
    con = np.empty(n)
    for i, rho in enumerate(traj.states):
        pur[i] = purity(rho)
        con[i] = concurrence(rho, eig_floor=eig_floor)
    return ObservableSeries(
        tau=traj.taus.copy(),
        cycle=clock.cycles(traj.taus),
        rho11=traj.states[:, 0, 0].real.copy(),
        rho22=traj.states[:, 1, 1].real.copy(),
        rho33=traj.states[:, 2, 2].real.copy(),
        rho44=traj.states[:, 3, 3].real.copy(),
        rho23=traj.states[:, 1, 2].copy(),
        rho14=traj.states[:, 0, 3].copy(),
        purity=pur,
        concurrence=con,
    )


def wrap_angle(x):
    """Wrap to the principal interval (-pi, pi]."""
    x = np.asarray(x, dtype=float)
    w = np.mod(x + np.pi, 2.0 * np.pi) - np.pi
    w = np.where(w == -np.pi, np.pi, w)
    return float(w) if w.ndim == 0 else w


class BranchTrackingError(RuntimeError):
    """Successive eigenvector overlap fell below the tracking threshold."""

    def __init__(self, message: str, step: int, tau: float):
        super().__init__(message)
        self.step = step
        self.tau = tau


@dataclass
class GeometricPhaseSeries:
    """Geometric phase at cycle boundaries.

    phi_cycle is the phase acquired over each cycle, wrapped to (-pi, pi];
    phi_cumulative is the continuity-unwrapped total since tau = 0.
    """

    cycles: np.ndarray
    phi_cycle: np.ndarray
    phi_cumulative: np.ndarray
    min_matched_overlap: float
    degenerate_at_start: bool


def _degenerate_groups(values: np.ndarray, tol: float = 1e-9) -> list:
    """Label groups whose eigenvalues coincide within ``tol``."""
    order = np.argsort(values)
    groups, current = [], [order[0]]
    for a, b in zip(order[:-1], order[1:]):
        if abs(values[b] - values[a]) < tol:
            current.append(b)
        else:
            if len(current) > 1:
                groups.append(np.array(current))
            current = [b]
    if len(current) > 1:
        groups.append(np.array(current))
    return groups


def _align_degenerate(prev_vecs: np.ndarray, new_vecs: np.ndarray,
                      new_eps: np.ndarray) -> np.ndarray:
    """Gauge-fix exactly degenerate eigenspaces against the previous frame.

    Within a degenerate cluster the eigenvectors are defined only up to a
    unitary rotation; the Procrustes alignment picks the rotation closest
    to the previous step's tracked vectors, realizing parallel transport
    inside the cluster.
    """
    out = new_vecs.copy()
    for group in _degenerate_groups(new_eps):
        c = prev_vecs[:, group]
        p = new_vecs[:, group]
        u, _, wh = np.linalg.svd(c.conj().T @ p)
        out[:, group] = p @ (wh.conj().T @ u.conj().T)
    return out


def _match_branches(prev_vecs: np.ndarray, prev_eps: np.ndarray,
                    vecs: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """Bijective branch assignment by maximal overlap magnitude.

    Greedy on the 4x4 overlap table; near-ties are broken by eigenvalue
    proximity, then lexicographically, so the matching is deterministic.
    """
    m = np.abs(prev_vecs.conj().T @ vecs)
    perm = np.full(4, -1, dtype=int)
    used_a = np.zeros(4, dtype=bool)
    used_b = np.zeros(4, dtype=bool)
    for _ in range(4):
        best = (-1.0, 0.0, -1, -1)
        for a in range(4):
            if used_a[a]:
                continue
            for b in range(4):
                if used_b[b]:
                    continue
                ov = m[a, b]
                prox = -abs(prev_eps[a] - eps[b])
                if ov > best[0] + 1e-12 or (abs(ov - best[0]) <= 1e-12 and prox > best[1]):
                    best = (ov, prox, a, b)
        _, _, a, b = best
        perm[a] = b
        used_a[a] = True
        used_b[b] = True
    return perm


def geometric_phase(traj: Trajectory, clock: CycleClock, eigen_stride: int = 1,
                    contrib_eps: float = 1e-12,
                    overlap_min: float = 0.9) -> GeometricPhaseSeries:
    """Geometric phase of the sampled mixed-state trajectory at each
    completed cycle boundary.

    Branches whose weight eps_k(0)*eps_k(tau) stays below ``contrib_eps``
    are skipped (their sqrt weight vanishes and their eigenvectors are
    noise-dominated). The 90% successive-overlap requirement is enforced
    on contributing branches only; a violation raises BranchTrackingError
    naming the failing step.
    """
    if eigen_stride < 1:
        raise ValueError(f"eigen_stride must be >= 1, got {eigen_stride}")
    idx = list(range(0, len(traj), eigen_stride))
    if idx[-1] != len(traj) - 1:
        idx.append(len(traj) - 1)
    taus = traj.taus[idx]
    decomps = [hermitian_eig(traj.states[i], tol=1e-6) for i in idx]
    return geometric_phase_from_decomps(taus, decomps, clock,
                                        contrib_eps=contrib_eps,
                                        overlap_min=overlap_min)


def geometric_phase_from_decomps(taus: np.ndarray, decomps: list,
                                 clock: CycleClock,
                                 contrib_eps: float = 1e-12,
                                 overlap_min: float = 0.9) -> GeometricPhaseSeries:
    """Accumulate the geometric phase from precomputed eigendecompositions.

    Split out from ``geometric_phase`` so the gauge invariance of the
    construction can be exercised directly.
    """
    n_cycles = int(np.floor(taus[-1] / clock.tau_s + 1e-9))
    if n_cycles < 1:
        raise ValueError("trajectory is shorter than one cycle")
    boundary_idx = [int(np.argmin(np.abs(taus - n * clock.tau_s)))
                    for n in range(1, n_cycles + 1)]

    eps0, v0 = decomps[0]
    eps0 = np.clip(eps0, 0.0, None)
    contributing = eps0 >= contrib_eps
    gaps = np.abs(np.subtract.outer(eps0[contributing], eps0[contributing]))
    degenerate = bool(np.any(gaps[np.triu_indices_from(gaps, k=1)] < 1e-12)) if gaps.size else False

    cur_vecs = v0.copy()
    cur_eps = eps0.copy()
    panch = np.zeros(4)
    min_ov = np.inf
    phi_cont = np.zeros(len(taus))
    phi_raw_prev = 0.0

    for j in range(1, len(taus)):
        eps, vecs = decomps[j]
        eps = np.clip(eps, 0.0, None)
        perm = _match_branches(cur_vecs, cur_eps, vecs, eps)
        new_vecs = _align_degenerate(cur_vecs, vecs[:, perm], eps[perm])
        new_eps = eps[perm]
        step_ov = cur_vecs.conj().T @ new_vecs
        for a in range(4):
            z = step_ov[a, a]
            if contributing[a]:
                mag = abs(z)
                # eigenvalues are 1-Lipschitz in rho, so a large jump on a
                # matched branch proves the assignment went wrong
                if mag < overlap_min or abs(new_eps[a] - cur_eps[a]) > 0.2:
                    raise BranchTrackingError(
                        f"branch tracking unresolved at step {j} (tau={taus[j]:.6g}): "
                        f"matched overlap {mag:.3f}, eigenvalue jump "
                        f"{abs(new_eps[a] - cur_eps[a]):.3f}; sample more densely",
                        step=j, tau=float(taus[j]))
                min_ov = min(min_ov, mag)
            panch[a] += np.angle(z)
        cur_vecs = new_vecs
        cur_eps = new_eps

        weights = np.sqrt(np.clip(eps0 * cur_eps, 0.0, None))
        active = eps0 * cur_eps >= contrib_eps
        total = 0.0 + 0.0j
        for a in range(4):
            if not active[a]:
                continue
            ov0 = np.vdot(v0[:, a], cur_vecs[:, a])
            total += weights[a] * abs(ov0) * np.exp(1j * (np.angle(ov0) - panch[a]))
        phi_raw = float(np.angle(total)) if total != 0 else phi_raw_prev
        w = wrap_angle(phi_raw - phi_raw_prev)
        # a half-turn between samples (the total passing through zero, e.g.
        # closed-system or pure-dephasing crossings) has no preferred sign;
        # resolve the tie upward so ideal staircases accumulate monotonely
        if abs(abs(w) - np.pi) < 1e-9:
            w = np.pi
        phi_cont[j] = phi_cont[j - 1] + w
        phi_raw_prev = phi_raw

    phi_cum = np.array([phi_cont[i] for i in boundary_idx])
    prev = np.concatenate([[0.0], phi_cum[:-1]])
    phi_cycle = wrap_angle(phi_cum - prev)
    phi_cycle = np.where(np.abs(np.abs(phi_cycle) - np.pi) < 1e-9, np.pi, phi_cycle)
    return GeometricPhaseSeries(
        cycles=np.arange(1, n_cycles + 1),
        phi_cycle=np.atleast_1d(phi_cycle),
        phi_cumulative=phi_cum,
        min_matched_overlap=float(min_ov) if np.isfinite(min_ov) else 1.0,
        degenerate_at_start=degenerate,
    )
