"""Declarative model construction: driven two-qubit Hamiltonian, Lorentzian
bath descriptors, and X-class initial states.

All quantities are stored in bath-scaled dimensionless units: time is
tau = lambda*t and every energy-like parameter is divided by the spectral
width lambda, so the bath correlation time is 1 by construction and
lambda never appears as a runtime parameter.

Basis order is fixed everywhere to |1> = |11>, |2> = |10>, |3> = |01>,
|4> = |00>, with sigma_z = diag(+1, -1) in the (|1>, |0>) single-qubit
order so that sigma_+ sigma_- projects onto the excited state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import kron

__all__ = [
    "I2",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "DrivingProtocol",
    "BathSpec",
    "ModelSpec",
    "XEntries",
    "InitialState",
    "bell_state",
    "hamiltonian_at",
    "coupling_operator",
    "spectral_density",
    "correlation",
    "initial_state",
]

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Computational basis kets in the fixed order |11>, |10>, |01>, |00>.
KET_11, KET_10, KET_01, KET_00 = (np.eye(4, dtype=complex)[:, k].copy() for k in range(4))

COUPLING_KINDS = ("dipolar", "dephasing")
BELL_KINDS = ("phi_plus", "phi_minus", "psi_plus", "psi_minus")
STATE_KINDS = BELL_KINDS + ("werner", "x_state")


@dataclass(frozen=True)
class DrivingProtocol:
    """Periodically modulated level splitting of one qubit.

    The instantaneous frequency is
    omega(tau) = omega + delta * cos(omega_d * tau + phi).
    """

    omega: float
    delta: float = 0.0
    omega_d: float = 0.0
    phi: float = 0.0

    def __post_init__(self) -> None:
        if not self.omega > 0:
            raise ValueError(f"carrier frequency must be positive, got {self.omega}")
        if self.delta < 0:
            raise ValueError(f"detuning amplitude must be nonnegative, got {self.delta}")
        if self.omega_d < 0:
            raise ValueError(f"driving frequency must be nonnegative, got {self.omega_d}")

    def frequency(self, tau):
        """Instantaneous frequency at scaled time tau (vectorized)."""
        return self.omega + self.delta * np.cos(self.omega_d * tau + self.phi)


@dataclass(frozen=True)
class BathSpec:
    """Lorentzian vacuum bath in scaled units.

    R is the coupling ratio gamma0/lambda; omega0 the spectral peak
    position. omega0=None defers to the model-level default, the average
    of the two qubit frequencies at tau=0. R=0 is admitted as the
    closed-system limit.
    """

    R: float = 1.0
    omega0: float | None = None

    def __post_init__(self) -> None:
        if self.R < 0:
            raise ValueError(f"coupling ratio R must be nonnegative, got {self.R}")


@dataclass(frozen=True)
class ModelSpec:
    """Full system + bath description."""

    drive1: DrivingProtocol = field(default_factory=lambda: DrivingProtocol(omega=15.0))
    drive2: DrivingProtocol = field(default_factory=lambda: DrivingProtocol(omega=10.0))
    bath: BathSpec = field(default_factory=BathSpec)
    J: float = 0.0
    coupling: str = "dipolar"

    def __post_init__(self) -> None:
        if self.coupling not in COUPLING_KINDS:
            raise ValueError(f"coupling must be one of {COUPLING_KINDS}, got {self.coupling!r}")

    @property
    def omega0(self) -> float:
        """Bath peak position; defaults to the mean initial qubit frequency."""
        if self.bath.omega0 is not None:
            return self.bath.omega0
        return 0.5 * float(self.drive1.frequency(0.0) + self.drive2.frequency(0.0))

    def resolved_bath(self) -> BathSpec:
        """BathSpec with the omega0 default filled in."""
        return BathSpec(R=self.bath.R, omega0=self.omega0)


@dataclass(frozen=True)
class XEntries:
    """Independent entries of a general X-state (rho44 follows from the trace)."""

    rho11: float = 0.0
    rho22: float = 0.0
    rho33: float = 0.0
    re_rho14: float = 0.0
    im_rho14: float = 0.0
    re_rho23: float = 0.0
    im_rho23: float = 0.0


@dataclass(frozen=True)
class InitialState:
    """Initial two-qubit state selector.

    kind is one of the four Bell-like states, 'werner', or 'x_state'.
    p weights the Bell-like superpositions, r the Werner mixing, bell
    selects the Werner pure core, and x carries explicit X-state entries.
    """

    kind: str = "phi_plus"
    p: float = 0.5
    r: float = 1.0
    bell: str = "phi_plus"
    x: XEntries = field(default_factory=XEntries)

    def __post_init__(self) -> None:
        if self.kind not in STATE_KINDS:
            raise ValueError(f"state kind must be one of {STATE_KINDS}, got {self.kind!r}")
        if self.bell not in BELL_KINDS:
            raise ValueError(f"werner core must be one of {BELL_KINDS}, got {self.bell!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"entanglement weight p must lie in [0, 1], got {self.p}")
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"mixing weight r must lie in [0, 1], got {self.r}")


def bell_state(kind: str, p: float = 0.5) -> np.ndarray:
    """Bell-like pure state vector.

    phi_{+/-} = sqrt(1-p)|01> +/- sqrt(p)|10>   (one excitation)
    psi_{+/-} = sqrt(1-p)|00> +/- sqrt(p)|11>   (zero/two excitations)
    """
    a, b = np.sqrt(1.0 - p), np.sqrt(p)
    if kind == "phi_plus":
        return a * KET_01 + b * KET_10
    if kind == "phi_minus":
        return a * KET_01 - b * KET_10
    if kind == "psi_plus":
        return a * KET_00 + b * KET_11
    if kind == "psi_minus":
        return a * KET_00 - b * KET_11
    raise ValueError(f"unknown Bell-like state {kind!r}")


def hamiltonian_at(spec: ModelSpec, tau: float) -> np.ndarray:
    """System Hamiltonian at scaled time tau.

    Diagonal (w1+w2, w1, w2, 0) in the fixed basis plus the transverse
    exchange J/2 connecting |10> and |01>.
    """
    w1 = float(spec.drive1.frequency(tau))
    w2 = float(spec.drive2.frequency(tau))
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = w1 + w2
    h[1, 1] = w1
    h[2, 2] = w2
    h[1, 2] = h[2, 1] = 0.5 * spec.J
    return h


def coupling_operator(spec: ModelSpec) -> np.ndarray:
    """System side of the system-bath interaction.

    dipolar:   V  = sigma_x (x) 1 + 1 (x) sigma_x
    dephasing: V_z = sigma_z (x) 1 + 1 (x) sigma_z = diag(2, 0, 0, -2)
    """
    if spec.coupling == "dipolar":
        return kron(SIGMA_X, I2) + kron(I2, SIGMA_X)
    return kron(SIGMA_Z, I2) + kron(I2, SIGMA_Z)


def spectral_density(bath: BathSpec, omega) -> np.ndarray | float:
    """Lorentzian spectral density J(omega) = (R/2pi) / ((omega-omega0)^2 + 1)."""
    if bath.omega0 is None:
        raise ValueError("bath omega0 is unresolved; use ModelSpec.resolved_bath()")
    return (bath.R / (2.0 * np.pi)) / ((np.asarray(omega) - bath.omega0) ** 2 + 1.0)


def correlation(bath: BathSpec, dt) -> np.ndarray | complex:
    """Vacuum bath correlation C(dt) = (R/2) * exp(-(1 + i*omega0) * dt), dt >= 0."""
    if bath.omega0 is None:
        raise ValueError("bath omega0 is unresolved; use ModelSpec.resolved_bath()")
    dt = np.asarray(dt, dtype=float)
    if np.any(dt < 0):
        raise ValueError("correlation is defined for nonnegative time separations")
    out = 0.5 * bath.R * np.exp(-(1.0 + 1.0j * bath.omega0) * dt)
    return complex(out) if out.ndim == 0 else out


def _x_state_matrix(x: XEntries) -> np.ndarray:
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = x.rho11
    rho[1, 1] = x.rho22
    rho[2, 2] = x.rho33
    rho[3, 3] = 1.0 - x.rho11 - x.rho22 - x.rho33
    rho[0, 3] = x.re_rho14 + 1.0j * x.im_rho14
    rho[3, 0] = np.conj(rho[0, 3])
    rho[1, 2] = x.re_rho23 + 1.0j * x.im_rho23
    rho[2, 1] = np.conj(rho[1, 2])
    return rho


def initial_state(init: InitialState) -> np.ndarray:
    """Build the initial density matrix and validate it is a state.

    Raises ValueError with the offending eigenvalues if the requested
    X-state entries do not form a positive semidefinite matrix.
    """
    if init.kind in BELL_KINDS:
        psi = bell_state(init.kind, init.p)
        rho = np.outer(psi, psi.conj())
    elif init.kind == "werner":
        psi = bell_state(init.bell, init.p)
        rho = (1.0 - init.r) / 4.0 * np.eye(4, dtype=complex) + init.r * np.outer(psi, psi.conj())
    else:
        rho = _x_state_matrix(init.x)

    w = np.linalg.eigvalsh(rho)
    if w[0] < -1e-12:
        raise ValueError(f"initial state is not positive semidefinite; eigenvalues {np.array2string(w, precision=6)}")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > 1e-12:
        raise ValueError(f"initial state trace {tr} differs from 1")
    return rho
