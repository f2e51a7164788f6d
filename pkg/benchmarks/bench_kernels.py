#!/usr/bin/env python3
"""Benchmark the compiled hierarchy kernel against the numpy fallback.

Runs identical RK4 workloads through both backends at several truncation
depths and reports per-step times, the speedup, and the worst deviation
between the resulting physical matrices.
"""

import argparse
import time

import numpy as np

from heomsim import _heom_numpy
from heomsim.heom import HierarchySpace, init_hierarchy
from heomsim.model import BathSpec, DrivingProtocol, InitialState, ModelSpec, initial_state

try:
    from heomsim import _heom_kernel
except ImportError:
    _heom_kernel = None


def workload(depth):
    spec = ModelSpec(drive1=DrivingProtocol(omega=15.0, delta=4.0, omega_d=2.0, phi=np.pi),
                     drive2=DrivingProtocol(omega=10.0, delta=7.0, omega_d=1.0),
                     bath=BathSpec(R=1.0), J=1.0)
    space = HierarchySpace.from_model(spec, depth)
    mats = init_hierarchy(initial_state(InitialState(kind="phi_plus")), space).mats
    drive = (15.0, 4.0, 2.0, np.pi, 10.0, 7.0, 1.0, 0.0, 0.5)
    return mats, drive, space


def run(backend, mats, drive, space, steps):
    snap = np.array([steps], dtype=np.int64)
    m = mats.copy()
    t0 = time.perf_counter()
    snaps, _, fail = backend.propagate(m, 0.0, 1e-3, steps, 0.0, snap, drive,
                                       space.corr_amplitude, space.nu1,
                                       np.array(space.V))
    elapsed = time.perf_counter() - t0
    assert fail == -1
    return elapsed, snaps[-1]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=500)
    parser.add_argument("--depths", type=int, nargs="+", default=[4, 10, 20])
    args = parser.parse_args()

    if _heom_kernel is None:
        print("compiled kernel unavailable; benchmarking the fallback only")
    print(f"{'depth':>5} {'matrices':>9} {'numpy ms/step':>14} "
          f"{'cython ms/step':>15} {'speedup':>8} {'max dev':>10}")
    for depth in args.depths:
        mats, drive, space = workload(depth)
        t_np, phys_np = run(_heom_numpy, mats, drive, space, args.steps)
        row = (f"{depth:>5} {(depth + 1) ** 2:>9} "
               f"{1e3 * t_np / args.steps:>14.3f} ")
        if _heom_kernel is not None:
            t_cy, phys_cy = run(_heom_kernel, mats, drive, space, args.steps)
            dev = np.max(np.abs(phys_np - phys_cy))
            row += (f"{1e3 * t_cy / args.steps:>15.3f} {t_np / t_cy:>8.1f} "
                    f"{dev:>10.1e}")
        print(row)


if __name__ == "__main__":
    main()
