import numpy as np
import pytest

from heomsim.algebra import (anticommutator, commutator, hermitian_eig, kron,
                             psd_sqrt, trace_distance)
from heomsim.model import I2, SIGMA_X, SIGMA_Y, SIGMA_Z


def random_hermitian(rng, n=4):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def test_kron_identity():
    assert np.allclose(kron(I2, I2), np.eye(4))


def test_kron_dark_state():
    # sigma_x swaps |0> and |1> symmetrically, so the collective flip
    # annihilates the singlet-like combination (|01> - |10>)/sqrt(2)
    v = kron(SIGMA_X, I2) + kron(I2, SIGMA_X)
    phi_minus = np.array([0, -1, 1, 0], dtype=complex) / np.sqrt(2)
    assert np.allclose(v @ phi_minus, 0.0, atol=1e-15)


def test_kron_sign_convention():
    # sigma_z = diag(1, -1) in (|1>, |0>) order: |10> is an excited-first state
    ket10 = np.array([0, 1, 0, 0], dtype=complex)
    assert np.allclose(kron(SIGMA_Z, I2) @ ket10, ket10)


def test_kron_dimension_product():
    rng = np.random.default_rng(11)
    for na, nb in [(2, 2), (2, 3), (4, 4), (3, 5)]:
        a = rng.normal(size=(na, na))
        b = rng.normal(size=(nb, nb))
        assert kron(a, b).shape == (na * nb, na * nb)


def test_kron_rejects_nonsquare():
    with pytest.raises(ValueError):
        kron(np.ones((2, 3)), np.ones((2, 2)))


def test_commutator_self_is_zero():
    rng = np.random.default_rng(0)
    a = random_hermitian(rng)
    assert np.allclose(commutator(a, a), 0.0)


def test_pauli_commutator():
    assert np.allclose(commutator(SIGMA_X, SIGMA_Y), 2j * SIGMA_Z)


def test_anticommutator_sigma_x():
    assert np.allclose(anticommutator(SIGMA_X, SIGMA_X), 2 * I2)


def test_commutator_dimension_mismatch():
    with pytest.raises(ValueError):
        commutator(np.eye(2), np.eye(4))


def test_hermitian_eig_diag():
    w, v = hermitian_eig(np.diag([0.0, 0, 0, 1]).astype(complex))
    assert np.allclose(w, [0, 0, 0, 1])


def test_hermitian_eig_werner():
    # Werner state r=1/2 around the Bell core (|01>+|10>)/sqrt(2):
    # eigenvalues (1-r)/4 three-fold and (1-r)/4 + r = 0.625
    psi = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
    rho = 0.125 * np.eye(4) + 0.5 * np.outer(psi, psi.conj())
    w, v = hermitian_eig(rho)
    assert np.allclose(w, [0.125, 0.125, 0.125, 0.625], atol=1e-12)


def test_hermitian_eig_bell_projector():
    phi_minus = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    rho = np.outer(phi_minus, phi_minus.conj())
    w, v = hermitian_eig(rho)
    assert np.allclose(w, [0, 0, 0, 1], atol=1e-12)
    top = v[:, -1]
    overlap = abs(np.vdot(top, phi_minus))
    assert overlap == pytest.approx(1.0, abs=1e-12)


def test_hermitian_eig_rejects_nonhermitian():
    m = np.eye(4, dtype=complex)
    m[0, 1] = 1e-6
    with pytest.raises(ValueError, match="Hermitian"):
        hermitian_eig(m)


def test_hermitian_eig_reconstruction_property():
    rng = np.random.default_rng(42)
    worst_rec, worst_orth = 0.0, 0.0
    for _ in range(1000):
        m = random_hermitian(rng)
        w, v = hermitian_eig(m)
        assert np.all(np.diff(w) >= 0)
        rec = (v * w) @ v.conj().T
        worst_rec = max(worst_rec, np.max(np.abs(rec - m)))
        worst_orth = max(worst_orth, np.max(np.abs(v.conj().T @ v - np.eye(4))))
    assert worst_rec < 1e-12
    assert worst_orth < 1e-12


def test_psd_sqrt_identity():
    assert np.allclose(psd_sqrt(np.eye(4, dtype=complex)), np.eye(4))


def test_psd_sqrt_diag():
    assert np.allclose(psd_sqrt(np.diag([4.0, 1, 0, 0]).astype(complex)),
                       np.diag([2.0, 1, 0, 0]))


def test_psd_sqrt_projector_idempotent():
    psi = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
    rho = np.outer(psi, psi.conj())
    assert np.allclose(psd_sqrt(rho), rho, atol=1e-12)


def test_psd_sqrt_squares_back():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m = a @ a.conj().T
        s = psd_sqrt(m)
        assert np.max(np.abs(s @ s - m)) < 1e-10 * max(1.0, np.linalg.norm(m))


def test_psd_sqrt_rejects_negative():
    with pytest.raises(ValueError, match="PSD"):
        psd_sqrt(np.diag([1.0, 1, 1, -1e-3]).astype(complex))


def test_psd_sqrt_clamps_tiny_negative():
    s = psd_sqrt(np.diag([1.0, 1, 1, -1e-10]).astype(complex))
    assert np.all(np.isfinite(s))


def test_trace_distance_bell_vs_mixed():
    # eigenvalues of P_bell - I/4 are (3/4, -1/4, -1/4, -1/4)
    psi = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
    rho = np.outer(psi, psi.conj())
    assert trace_distance(rho, np.eye(4) / 4) == pytest.approx(0.75, abs=1e-12)
