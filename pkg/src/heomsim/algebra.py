"""Dense complex linear algebra for the two-qubit problem and its oracles.

Everything operates on plain complex128 numpy arrays. Matrices are small
(4x4 for the system, up to ~100x100 for the dilation oracle), so all
routines are dense and eager. The LAPACK Hermitian solver behind
``numpy.linalg.eigh`` is deterministic (no randomized pivoting), which
keeps repeated runs bit-identical on a given platform.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "dagger",
    "kron",
    "commutator",
    "anticommutator",
    "hermitian_eig",
    "psd_sqrt",
    "trace_distance",
]


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product with the first factor as the slow index.

    With qubit basis (|1>, |0>) in each factor this realizes the fixed
    two-qubit ordering |11>, |10>, |01>, |00>.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2 or a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1]:
        raise ValueError("kron expects square matrices")
    return np.kron(a, b)


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """[a, b] = ab - ba."""
    _check_same_shape(a, b)
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """{a, b} = ab + ba."""
    _check_same_shape(a, b)
    return a @ b + b @ a


def hermitian_eig(m: np.ndarray, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as (m + m^dag)/2 before decomposition;
    inputs deviating from Hermiticity by more than ``tol`` in max-entry
    norm are rejected. Returns (eigenvalues ascending, eigenvectors as
    columns of a unitary matrix).
    """
    m = np.asarray(m, dtype=complex)
    dev = float(np.max(np.abs(m - m.conj().T)))
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian: max deviation {dev:.3e} exceeds {tol:.1e}")
    return np.linalg.eigh(0.5 * (m + m.conj().T))


def psd_sqrt(m: np.ndarray, floor: float = -1e-9) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in [floor, 0) are clamped to zero; anything below
    ``floor`` is rejected.
    """
    w, v = hermitian_eig(m)
    if w[0] < floor:
        raise ValueError(f"matrix is not PSD: min eigenvalue {w[0]:.3e} below {floor:.1e}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Trace distance (1/2)*sum|eig| of the Hermitian difference a - b."""
    _check_same_shape(a, b)
    d = a - b
    w = np.linalg.eigvalsh(0.5 * (d + d.conj().T))
    return 0.5 * float(np.sum(np.abs(w)))
