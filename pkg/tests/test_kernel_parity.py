"""The compiled kernel and the numpy fallback must agree to rounding noise
on identical inputs, for every term of the generator."""

import numpy as np
import pytest

from heomsim import _heom_numpy

try:
    from heomsim import _heom_kernel
except ImportError:
    _heom_kernel = None

pytestmark = pytest.mark.skipif(_heom_kernel is None,
                                reason="compiled kernel not built")

DIPOLAR = np.zeros((4, 4), dtype=complex)
DIPOLAR[[1, 3, 0, 2], [3, 1, 2, 0]] = 1.0
DIPOLAR[[0, 1, 2, 3], [1, 0, 3, 2]] = 1.0
DEPHASING = np.diag([2.0, 0.0, 0.0, -2.0]).astype(complex)


def random_family(rng, d):
    m = rng.normal(size=(d, d, 4, 4)) + 1j * rng.normal(size=(d, d, 4, 4))
    return np.ascontiguousarray(m)


@pytest.mark.parametrize("v", [DIPOLAR, DEPHASING], ids=["dipolar", "dephasing"])
@pytest.mark.parametrize("drive", [
    (10.0, 0.0, 0.0, 0.0, 10.0, 0.0, 0.0, 0.0, 0.0),
    (15.0, 4.0, 2.0, np.pi, 10.0, 7.0, 1.3, 0.0, 0.85),
], ids=["static", "driven+J"])
@pytest.mark.parametrize("gamma0", [0.0, 0.5])
def test_propagate_parity(v, drive, gamma0):
    rng = np.random.default_rng(17)
    d = 5
    m0 = random_family(rng, d)
    snap = np.array([0, 7, 50], dtype=np.int64)
    nu1 = 1.0 - 12.5j
    m_c = m0.copy()
    m_n = m0.copy()
    s_c, tau_c, f_c = _heom_kernel.propagate(m_c, 0.2, 1e-3, 50, 0.0, snap,
                                             drive, gamma0, nu1, v.copy())
    s_n, tau_n, f_n = _heom_numpy.propagate(m_n, 0.2, 1e-3, 50, 0.0, snap,
                                            drive, gamma0, nu1, v.copy())
    assert f_c == f_n == -1
    assert tau_c == pytest.approx(tau_n, abs=1e-15)
    assert np.max(np.abs(m_c - m_n)) < 1e-11
    assert np.max(np.abs(s_c - s_n)) < 1e-11


def test_shortened_last_step_parity():
    rng = np.random.default_rng(23)
    m0 = random_family(rng, 3)
    drive = (9.0, 1.0, 2.0, 0.1, 11.0, 0.5, 3.0, 0.0, 0.2)
    snap = np.array([0, 10, 11], dtype=np.int64)
    m_c, m_n = m0.copy(), m0.copy()
    s_c, tau_c, _ = _heom_kernel.propagate(m_c, 0.0, 1e-3, 10, 4.4e-4, snap,
                                           drive, 1.0, 1 - 10j, DIPOLAR.copy())
    s_n, tau_n, _ = _heom_numpy.propagate(m_n, 0.0, 1e-3, 10, 4.4e-4, snap,
                                          drive, 1.0, 1 - 10j, DIPOLAR.copy())
    assert tau_c == pytest.approx(0.0104 + 4e-5, abs=1e-12)
    assert tau_c == pytest.approx(tau_n, abs=1e-15)
    assert np.max(np.abs(m_c - m_n)) < 1e-12


def test_nonfinite_detection_parity():
    m0 = np.zeros((3, 3, 4, 4), dtype=complex)
    m0[0, 0] = np.eye(4) / 4
    drive = (10.0, 0.0, 0.0, 0.0, 10.0, 0.0, 0.0, 0.0, 0.0)
    snap = np.array([5, 200], dtype=np.int64)
    res = []
    for mod in (_heom_kernel, _heom_numpy):
        m = m0.copy()
        _, _, fail = mod.propagate(m, 0.0, 1e-3, 200, 0.0, snap, drive,
                                   1e12, 1 - 10j, DIPOLAR.copy())
        res.append(fail)
    assert res[0] == res[1] != -1
