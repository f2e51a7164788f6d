import numpy as np
import pytest
from scipy.integrate import quad

from heomsim.model import (BathSpec, DrivingProtocol, InitialState, ModelSpec, XEntries,
                           bell_state, correlation, coupling_operator, hamiltonian_at,
                           initial_state, spectral_density)


def spec_with(omega1=10.0, omega2=15.0, **kw):
    d1 = {k[:-1]: v for k, v in kw.items() if k.endswith("1")}
    d2 = {k[:-1]: v for k, v in kw.items() if k.endswith("2")}
    rest = {k: v for k, v in kw.items() if not k.endswith(("1", "2"))}
    return ModelSpec(drive1=DrivingProtocol(omega=omega1, **d1),
                     drive2=DrivingProtocol(omega=omega2, **d2), **rest)


class TestHamiltonian:
    def test_undriven_diagonal(self):
        h = hamiltonian_at(spec_with(omega1=10.0, omega2=15.0), 3.7)
        assert np.allclose(h, np.diag([25.0, 10.0, 15.0, 0.0]))

    def test_exchange_element(self):
        h = hamiltonian_at(spec_with(J=2.0), 0.0)
        assert h[1, 2] == h[2, 1] == 1.0
        assert h[0, 1] == h[0, 2] == h[0, 3] == 0.0

    def test_driven_frequency_at_zero(self):
        # omega1(0) = 15 + 4*cos(pi) = 11
        spec = spec_with(omega1=15.0, delta1=4.0, omega_d1=2.0, phi1=np.pi)
        h = hamiltonian_at(spec, 0.0)
        assert h[1, 1] == pytest.approx(11.0, abs=1e-14)

    def test_hermitian_under_random_driving(self):
        rng = np.random.default_rng(3)
        worst = 0.0
        for _ in range(10_000):
            spec = spec_with(omega1=rng.uniform(1, 20), omega2=rng.uniform(1, 20),
                             delta1=rng.uniform(0, 8), omega_d1=rng.uniform(0, 8),
                             phi1=rng.uniform(0, 2 * np.pi), delta2=rng.uniform(0, 8),
                             omega_d2=rng.uniform(0, 8), J=rng.uniform(0, 10))
            h = hamiltonian_at(spec, rng.uniform(0, 50))
            worst = max(worst, np.max(np.abs(h - h.conj().T)))
        assert worst < 1e-14

    def test_periodicity_of_drive(self):
        d = DrivingProtocol(omega=10.0, delta=3.0, omega_d=2.0, phi=0.7)
        period = 2 * np.pi / 2.0
        taus = np.linspace(0, 7, 23)
        assert np.allclose(d.frequency(taus), d.frequency(taus + period), atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            DrivingProtocol(omega=0.0)
        with pytest.raises(ValueError):
            DrivingProtocol(omega=1.0, delta=-0.1)
        with pytest.raises(ValueError):
            DrivingProtocol(omega=1.0, omega_d=-2.0)


class TestCouplingOperator:
    def test_dipolar_annihilates_phi_minus(self):
        v = coupling_operator(spec_with())
        phi_minus = bell_state("phi_minus")
        assert np.allclose(v @ phi_minus, 0.0, atol=1e-15)

    def test_dephasing_diagonal(self):
        v = coupling_operator(spec_with(coupling="dephasing"))
        assert np.allclose(v, np.diag([2.0, 0.0, 0.0, -2.0]))

    def test_dipolar_on_ground(self):
        v = coupling_operator(spec_with())
        out = v @ np.array([0, 0, 0, 1], dtype=complex)
        assert np.allclose(out, [0, 1, 1, 0])

    def test_dipolar_square(self):
        # V^2 = 2 (1 + sigma_x (x) sigma_x): eigenvalues {0, 0, 4, 4}
        v = coupling_operator(spec_with())
        assert np.allclose(sorted(np.linalg.eigvalsh(v @ v)), [0, 0, 4, 4], atol=1e-12)

    def test_both_hermitian(self):
        for kind in ("dipolar", "dephasing"):
            v = coupling_operator(spec_with(coupling=kind))
            assert np.allclose(v, v.conj().T)


class TestBath:
    def test_peak_value(self):
        assert spectral_density(BathSpec(R=1.0, omega0=12.0), 12.0) == pytest.approx(1 / (2 * np.pi))
        assert spectral_density(BathSpec(R=5.0, omega0=0.0), 0.0) == pytest.approx(5 / (2 * np.pi))

    def test_integral_equals_correlation_at_zero(self):
        # quadrature oracle: integral of J over the real line must equal C(0) = R/2
        for r in (0.1, 1.0, 5.0):
            bath = BathSpec(R=r, omega0=10.0)
            val, err = quad(lambda w: spectral_density(bath, w), -np.inf, np.inf)
            assert val == pytest.approx(r / 2, rel=1e-9)
            assert val == pytest.approx(correlation(bath, 0.0).real, rel=1e-9)

    def test_correlation_values(self):
        assert correlation(BathSpec(R=1.0, omega0=5.0), 0.0) == pytest.approx(0.5)
        assert correlation(BathSpec(R=1.0, omega0=0.0), 1.0) == pytest.approx(0.5 * np.exp(-1))

    def test_correlation_halving_time(self):
        for om0 in (0.0, 7.0):
            bath = BathSpec(R=2.0, omega0=om0)
            c0 = abs(correlation(bath, 0.3))
            c1 = abs(correlation(bath, 0.3 + np.log(2)))
            assert c1 == pytest.approx(c0 / 2, rel=1e-12)

    def test_correlation_is_fourier_transform_of_density(self):
        # C(dt) = int J(w) exp(-i w dt) dw over the real line, within 1e-6.
        # Substituting x = w - omega0 peels off a phase e^{-i omega0 dt}; the
        # shifted density is even in x, so its sine part vanishes and the
        # cosine part is twice the weighted half-line integral.
        for r in (0.1, 1.0, 5.0):
            for om0 in (0.0, 10.0):
                bath = BathSpec(R=r, omega0=om0)
                f = lambda x: spectral_density(bath, bath.omega0 + x)
                for dt in (0.0, 0.4, 1.3):
                    if dt == 0.0:
                        even, _ = quad(f, -np.inf, np.inf)
                    else:
                        half, _ = quad(f, 0, np.inf, weight="cos", wvar=dt)
                        even = 2 * half
                    val = np.exp(-1j * om0 * dt) * even
                    assert val == pytest.approx(correlation(bath, dt), abs=1e-6)

    def test_correlation_rejects_negative_dt(self):
        with pytest.raises(ValueError):
            correlation(BathSpec(R=1.0, omega0=0.0), -0.5)

    def test_omega0_default_is_mean_initial_frequency(self):
        spec = spec_with(omega1=15.0, delta1=4.0, omega_d1=2.0, phi1=np.pi,
                         omega2=10.0, delta2=7.0)
        assert spec.omega0 == pytest.approx(0.5 * (11.0 + 17.0))
        spec2 = spec_with(bath=BathSpec(R=1.0, omega0=3.0))
        assert spec2.omega0 == 3.0

    def test_r_validation(self):
        with pytest.raises(ValueError):
            BathSpec(R=-0.5)
        BathSpec(R=0.0)  # closed-system limit is allowed


class TestInitialState:
    def test_phi_plus_bell(self):
        rho = initial_state(InitialState(kind="phi_plus", p=0.5))
        assert rho[1, 1] == pytest.approx(0.5)
        assert rho[2, 2] == pytest.approx(0.5)
        assert rho[1, 2] == pytest.approx(0.5)
        assert rho[0, 0] == rho[3, 3] == 0.0

    def test_werner_r0_is_maximally_mixed(self):
        rho = initial_state(InitialState(kind="werner", r=0.0))
        assert np.allclose(rho, np.eye(4) / 4)

    def test_werner_r1_is_bell_projector(self):
        rho = initial_state(InitialState(kind="werner", r=1.0, bell="phi_plus", p=0.5))
        psi = bell_state("phi_plus", 0.5)
        assert np.allclose(rho, np.outer(psi, psi.conj()), atol=1e-15)

    def test_all_kinds_are_states(self):
        rng = np.random.default_rng(5)
        for kind in ("phi_plus", "phi_minus", "psi_plus", "psi_minus"):
            for p in rng.uniform(0, 1, size=5):
                rho = initial_state(InitialState(kind=kind, p=float(p)))
                w = np.linalg.eigvalsh(rho)
                assert w[0] >= -1e-12
                assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        for r in rng.uniform(0, 1, size=5):
            rho = initial_state(InitialState(kind="werner", r=float(r), bell="psi_minus"))
            assert np.linalg.eigvalsh(rho)[0] >= -1e-12

    def test_x_state_assembly(self):
        x = XEntries(rho11=0.2, rho22=0.3, rho33=0.4, re_rho14=0.05, im_rho14=-0.02,
                     re_rho23=0.1, im_rho23=0.04)
        rho = initial_state(InitialState(kind="x_state", x=x))
        assert rho[3, 3] == pytest.approx(0.1)
        assert rho[0, 3] == pytest.approx(0.05 - 0.02j)
        assert rho[2, 1] == pytest.approx(0.1 - 0.04j)

    def test_x_state_rejects_non_psd(self):
        x = XEntries(rho11=0.5, rho22=0.0, rho33=0.0, re_rho14=0.9)
        with pytest.raises(ValueError, match="eigenvalues"):
            initial_state(InitialState(kind="x_state", x=x))

    def test_parameter_range_validation(self):
        with pytest.raises(ValueError):
            InitialState(kind="phi_plus", p=1.5)
        with pytest.raises(ValueError):
            InitialState(kind="werner", r=-0.1)
        with pytest.raises(ValueError):
            InitialState(kind="nope")
