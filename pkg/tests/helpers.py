"""Shared test utilities, including a literal reference implementation of the
hierarchy right-hand side kept deliberately independent of the package's
vectorized/compiled code paths."""

import numpy as np

from heomsim.algebra import anticommutator, commutator
from heomsim.heom import HierarchySpace
from heomsim.model import ModelSpec, hamiltonian_at


def literal_rhs(mats: np.ndarray, spec: ModelSpec, space: HierarchySpace,
                tau: float) -> np.ndarray:
    """Nested-loop transcription of the hierarchy generator.

    d rho_n / dtau = -(i [H, .] + n.nu) rho_n
                     - i sum_k [V, rho_{n+e_k}]
                     - i (c0/2) sum_k n_k ([V, .] + (-1)^k {V, .}) rho_{n-e_k}

    with c0 = gamma0/2 the correlation amplitude C(0); out-of-range
    neighbours are dropped (terminator).
    """
    d = mats.shape[0]
    h = hamiltonian_at(spec, tau)
    v = space.V
    nu = (space.nu1, space.nu2)
    c0 = 0.5 * space.gamma0
    out = np.zeros_like(mats)
    for n1 in range(d):
        for n2 in range(d):
            rho = mats[n1, n2]
            acc = -1j * commutator(h, rho) - (n1 * nu[0] + n2 * nu[1]) * rho
            for k, (e1, e2) in enumerate([(1, 0), (0, 1)], start=1):
                if n1 + e1 < d and n2 + e2 < d:
                    acc = acc - 1j * commutator(v, mats[n1 + e1, n2 + e2])
                nk = n1 if k == 1 else n2
                if nk > 0:
                    lower = mats[n1 - e1, n2 - e2]
                    acc = acc - 1j * (c0 / 2.0) * nk * (
                        commutator(v, lower) + (-1) ** k * anticommutator(v, lower))
            out[n1, n2] = acc
    return out
