"""Pure-numpy fallback for the hierarchy propagation kernel.

Mirrors the compiled kernel's contract: classic fixed-step RK4 over the
dense (depth+1)^2 family of auxiliary 4x4 matrices, with the driven
Hamiltonian evaluated analytically at substage times and snapshots of the
physical matrix taken at requested step indices. The whole family is kept
as one (D, D, 4, 4) array so every term of the hierarchy right-hand side
is a handful of broadcasted matmuls.
"""

from __future__ import annotations

import math

import numpy as np

KERNEL_NAME = "numpy"


def _hamiltonian(tau, o1, d1, wd1, p1, o2, d2, wd2, p2, jh):
    w1 = o1 + d1 * math.cos(wd1 * tau + p1)
    w2 = o2 + d2 * math.cos(wd2 * tau + p2)
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = w1 + w2
    h[1, 1] = w1
    h[2, 2] = w2
    h[1, 2] = h[2, 1] = jh
    return h


def _rhs(y, tau, damp, gamma0, v, drive):
    """Hierarchy right-hand side for the full (D, D, 4, 4) family."""
    d = y.shape[0]
    h = _hamiltonian(tau, *drive)
    out = -1j * (h @ y - y @ h)
    out -= damp[:, :, None, None] * y

    s = np.zeros_like(y)
    s[:-1] += y[1:]
    s[:, :-1] += y[:, 1:]
    out -= 1j * (v @ s - s @ v)

    if gamma0 != 0.0 and d > 1:
        n = np.arange(1, d, dtype=float)
        out[1:] += (1j * gamma0) * n[:, None, None, None] * (y[:-1] @ v)
        out[:, 1:] -= (1j * gamma0) * n[None, :, None, None] * (v @ y[:, :-1])
    return out


def rhs(y, tau, nu1, gamma0, v, drive):
    """Single right-hand-side evaluation (diagnostic entry point)."""
    d = y.shape[0]
    n = np.arange(d, dtype=float)
    damp = n[:, None] * nu1 + n[None, :] * np.conj(nu1)
    return _rhs(np.ascontiguousarray(y, dtype=complex), tau, damp, gamma0, v, drive)


def propagate(mats, tau0, dt, n_full, last_dt, snap_steps, drive, gamma0, nu1, v):
    """Advance the hierarchy in place and collect physical-matrix snapshots.

    mats        (D, D, 4, 4) complex, modified in place
    snap_steps  ascending int64 step indices in [0, n_total] to record
    drive       (o1, d1, wd1, p1, o2, d2, wd2, p2, J/2)
    returns (snapshots (S, 4, 4), tau_final, fail_step) with fail_step = -1
    on success, else the snapshot step at which non-finite values appeared.
    """
    d = mats.shape[0]
    n = np.arange(d, dtype=float)
    damp = n[:, None] * nu1 + n[None, :] * np.conj(nu1)
    n_total = n_full + (1 if last_dt > 0.0 else 0)

    snaps = np.zeros((len(snap_steps), 4, 4), dtype=complex)
    pos = 0
    fail_step = -1
    if pos < len(snap_steps) and snap_steps[pos] == 0:
        snaps[pos] = mats[0, 0]
        pos += 1

    tau = tau0
    y = mats
    for k in range(1, n_total + 1):
        h = dt if k <= n_full else last_dt
        k1 = _rhs(y, tau, damp, gamma0, v, drive)
        k2 = _rhs(y + (0.5 * h) * k1, tau + 0.5 * h, damp, gamma0, v, drive)
        k3 = _rhs(y + (0.5 * h) * k2, tau + 0.5 * h, damp, gamma0, v, drive)
        k4 = _rhs(y + h * k3, tau + h, damp, gamma0, v, drive)
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        tau += h
        if pos < len(snap_steps) and snap_steps[pos] == k:
            phys = y[0, 0]
            if not np.all(np.isfinite(phys.view(float))):
                fail_step = k
                break
            snaps[pos] = phys
            pos += 1
    return snaps, tau, fail_step
