import numpy as np
import pytest

from heomsim.heom import HierarchySpace, evolve, init_hierarchy
from heomsim.model import BathSpec, DrivingProtocol, InitialState, ModelSpec, initial_state
from heomsim.observables import CycleClock, concurrence, purity
from heomsim.sweep import SweepAxis, apply_parameter, locked_axes, parse_locks, run_sweep


def base_spec():
    return ModelSpec(drive1=DrivingProtocol(omega=15.0, delta=1.0, phi=np.pi),
                     drive2=DrivingProtocol(omega=15.0, delta=1.1),
                     bath=BathSpec(R=1.0))


INIT = InitialState(kind="phi_minus")
CLOCK = CycleClock.explicit(1.0)


class TestAxis:
    def test_values_include_endpoints(self):
        ax = SweepAxis("j", 0.0, 8.0, 5)
        assert np.allclose(ax.values(), [0, 2, 4, 6, 8])

    def test_single_point(self):
        ax = SweepAxis("omega_d1", 3.0, 3.0, 1)
        assert np.allclose(ax.values(), [3.0])
        with pytest.raises(ValueError):
            SweepAxis("omega_d1", 3.0, 5.0, 1)

    def test_unknown_parameter(self):
        with pytest.raises(ValueError, match="parameter"):
            SweepAxis("coupling_strength", 0, 1, 3)


class TestApplyAndLocks:
    def test_apply_each_parameter(self):
        spec = base_spec()
        assert apply_parameter(spec, "omega_d1", 3.0).drive1.omega_d == 3.0
        assert apply_parameter(spec, "omega_d2", 2.0).drive2.omega_d == 2.0
        assert apply_parameter(spec, "delta1", 0.4).drive1.delta == 0.4
        assert apply_parameter(spec, "delta2", 0.6).drive2.delta == 0.6
        assert apply_parameter(spec, "j", 5.0).J == 5.0
        assert apply_parameter(spec, "r", 0.3).bath.R == 0.3

    def test_lock_to_other_parameter(self):
        make = locked_axes(base_spec(), SweepAxis("omega_d1", 0, 8, 3),
                           SweepAxis("j", 0, 8, 3),
                           parse_locks(["omega_d2=omega_d1"]))
        spec = make(3.0, 1.0)
        assert spec.drive1.omega_d == 3.0
        assert spec.drive2.omega_d == 3.0
        assert spec.J == 1.0

    def test_lock_to_constant(self):
        make = locked_axes(base_spec(), SweepAxis("omega_d1", 0, 8, 3),
                           SweepAxis("j", 0, 8, 3), parse_locks(["omega_d2=1.0"]))
        assert make(5.0, 2.0).drive2.omega_d == 1.0

    def test_no_locks_independent(self):
        make = locked_axes(base_spec(), SweepAxis("omega_d1", 0, 8, 3),
                           SweepAxis("omega_d2", 0, 8, 3))
        spec = make(2.0, 7.0)
        assert (spec.drive1.omega_d, spec.drive2.omega_d) == (2.0, 7.0)

    def test_conflicting_locks_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            locked_axes(base_spec(), SweepAxis("omega_d1", 0, 8, 3),
                        SweepAxis("j", 0, 8, 3),
                        parse_locks(["omega_d2=1.0", "omega_d2=omega_d1"]))
        with pytest.raises(ValueError, match="swept axis"):
            locked_axes(base_spec(), SweepAxis("omega_d1", 0, 8, 3),
                        SweepAxis("j", 0, 8, 3), parse_locks(["j=2.0"]))

    def test_lock_parse_errors(self):
        with pytest.raises(ValueError):
            parse_locks(["omega_d2"])
        with pytest.raises(ValueError):
            parse_locks(["bogus=1.0"])
        with pytest.raises(ValueError):
            parse_locks(["omega_d2=banana"])


class TestRunSweep:
    def test_degenerate_grid_matches_single_run(self):
        spec = ModelSpec(drive1=DrivingProtocol(omega=15.0, delta=4.0, phi=np.pi),
                         drive2=DrivingProtocol(omega=10.0, delta=7.0),
                         bath=BathSpec(R=1.0))
        clock = CycleClock.explicit(1.04)
        res = run_sweep(spec, InitialState(kind="phi_plus"),
                        SweepAxis("omega_d1", 0.0, 0.0, 1), SweepAxis("omega_d2", 0.0, 0.0, 1),
                        (1, 3), clock, dt=1e-3, depth=8)
        space = HierarchySpace.from_model(spec, 8)
        st = init_hierarchy(initial_state(InitialState(kind="phi_plus")), space)
        traj = evolve(st, spec, space, 1e-3, 3 * 1.04, sample_every=1)
        for ci, n in enumerate((1, 3)):
            k = int(np.argmin(np.abs(traj.taus - n * 1.04)))
            assert res.concurrence[ci, 0, 0] == pytest.approx(
                concurrence(traj.states[k], -1e-6), abs=1e-12)
            assert res.purity[ci, 0, 0] == pytest.approx(purity(traj.states[k]), abs=1e-12)

    def test_cell_independence_2x2(self):
        axa = SweepAxis("omega_d1", 0.0, 4.0, 2)
        axb = SweepAxis("j", 0.0, 2.0, 2)
        full = run_sweep(base_spec(), INIT, axa, axb, (2,), CLOCK, depth=6)
        for i, va in enumerate(axa.values()):
            for j, vb in enumerate(axb.values()):
                single = run_sweep(base_spec(), INIT,
                                   SweepAxis("omega_d1", va, va, 1),
                                   SweepAxis("j", vb, vb, 1), (2,), CLOCK, depth=6)
                assert single.concurrence[0, 0, 0] == full.concurrence[0, i, j]
                assert single.purity[0, 0, 0] == full.purity[0, i, j]

    def test_determinism_across_worker_counts(self):
        axa = SweepAxis("omega_d1", 0.0, 6.0, 3)
        axb = SweepAxis("omega_d2", 0.0, 6.0, 2)
        runs = [run_sweep(base_spec(), INIT, axa, axb, (1, 2), CLOCK, depth=6, workers=w)
                for w in (1, 2, 4)]
        for other in runs[1:]:
            assert np.array_equal(runs[0].concurrence, other.concurrence)
            assert np.array_equal(runs[0].purity, other.purity)
            assert runs[0].status == other.status

    def test_failed_cell_marked_not_silent(self):
        # an absurd coupling ratio blows up; the cell is marked, the rest complete
        res = run_sweep(base_spec(), INIT, SweepAxis("r", 1.0, 1e9, 2),
                        SweepAxis("j", 0.0, 0.0, 1), (1,), CLOCK, depth=6)
        assert res.status[0][0] == "ok"
        assert res.status[1][0].startswith("failed:")
        assert np.isfinite(res.concurrence[0, 0, 0])
        assert np.isnan(res.concurrence[0, 1, 0])

    def test_completeness(self):
        res = run_sweep(base_spec(), INIT, SweepAxis("omega_d1", 0.0, 8.0, 3),
                        SweepAxis("j", 0.0, 4.0, 2), (1,), CLOCK, depth=4, workers=2)
        assert res.concurrence.shape == (1, 3, 2)
        assert all(st != "pending" for row in res.status for st in row)

    def test_cycle_validation(self):
        with pytest.raises(ValueError):
            run_sweep(base_spec(), INIT, SweepAxis("j", 0, 1, 2),
                      SweepAxis("omega_d1", 0, 1, 2), (3, 1), CLOCK)
        with pytest.raises(ValueError):
            run_sweep(base_spec(), INIT, SweepAxis("j", 0, 1, 2),
                      SweepAxis("omega_d1", 0, 1, 2), (), CLOCK)
