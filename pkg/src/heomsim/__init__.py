"""heomsim: hierarchy-equations-of-motion simulator for two driven qubits
in a common Lorentzian vacuum bath.

Computes Purity, Concurrence, and the kinematic mixed-state geometric
phase along non-Markovian trajectories, with independent unitary and
pseudomode-dilation oracles and a deterministic parallel sweep engine.
"""

__version__ = "0.1.0"

from .algebra import anticommutator, commutator, hermitian_eig, kron, psd_sqrt, trace_distance
from .heom import (KERNEL, HierarchySpace, HierarchyState, IntegrationError, StabilityError,
                   Trajectory, evolve, init_hierarchy, rhs, step_rk4, truncation_check)
from .model import (BathSpec, DrivingProtocol, InitialState, ModelSpec, XEntries, bell_state,
                    correlation, coupling_operator, hamiltonian_at, initial_state,
                    spectral_density)
from .observables import (BranchTrackingError, CycleClock, GeometricPhaseSeries,
                          MatrixElements, ObservableSeries, concurrence, geometric_phase,
                          matrix_elements, observable_series, purity, wrap_angle)
from .oracle import (ComparisonResult, CutoffError, PseudomodeSpec, compare,
                     pseudomode_propagate, unitary_propagate)
from .sweep import SweepAxis, SweepResult, apply_parameter, locked_axes, parse_locks, run_sweep

__all__ = [name for name in dir() if not name.startswith("_")]
