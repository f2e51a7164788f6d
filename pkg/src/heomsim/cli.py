"""Command-line interface: run / gp / sweep / validate.

Exit codes: 0 success, 2 configuration error, 3 integration failure,
4 validation failure. Output files are byte-identical across repeated
runs and worker counts.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, build_clock, build_initial_state, build_model
from .heom import KERNEL, HierarchySpace, IntegrationError, StabilityError, evolve, init_hierarchy
from .model import initial_state
from .observables import BranchTrackingError, geometric_phase, observable_series
from .output import write_gp_csv, write_heatmap, write_trajectory_csv
from .sweep import SweepAxis, parse_locks, run_sweep
from .validate import run_checks

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_VALIDATION = 4


def _load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    return RunConfig.load(path)


def _simulate(cfg: RunConfig):
    spec = build_model(cfg)
    init = build_initial_state(cfg)
    clock = build_clock(cfg, spec)
    space = HierarchySpace.from_model(spec, cfg["integrator.depth"])
    state = init_hierarchy(initial_state(init), space)
    tau_end = cfg["run.cycles"] * clock.tau_s
    traj = evolve(state, spec, space, cfg["integrator.dt"], tau_end,
                  sample_every=cfg["integrator.sample_stride"])
    return spec, clock, traj


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    _, clock, traj = _simulate(cfg)
    series = observable_series(traj, clock)
    write_trajectory_csv(args.out, series)
    print(f"wrote {len(series.tau)} samples to {args.out}")
    return EXIT_OK


def cmd_gp(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    if cfg["clock.mode"] == "one_excitation":
        raise ConfigError("gp requires clock.mode = two_excitation or explicit")
    _, clock, traj = _simulate(cfg)
    gp = geometric_phase(traj, clock, eigen_stride=cfg["gp.eigen_stride"])
    write_gp_csv(args.out, gp)
    if gp.degenerate_at_start:
        print("note: degenerate contributing eigenvalues at tau=0; "
              "branch assignment there is arbitrary")
    print(f"wrote {len(gp.cycles)} cycles to {args.out} "
          f"(min matched overlap {gp.min_matched_overlap:.4f})")
    return EXIT_OK


def _sweep_out_path(template: str, cycle: int) -> str:
    if "{N}" in template:
        return template.replace("{N}", str(cycle))
    stem, dot, ext = template.rpartition(".")
    if not dot:
        return f"{template}_N{cycle}"
    return f"{stem}_N{cycle}.{ext}"


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    spec = build_model(cfg)
    init = build_initial_state(cfg)
    clock = build_clock(cfg, spec)
    try:
        axis_a = SweepAxis(cfg["sweep.axis_a.parameter"], cfg["sweep.axis_a.min"],
                           cfg["sweep.axis_a.max"], cfg["sweep.axis_a.points"])
        axis_b = SweepAxis(cfg["sweep.axis_b.parameter"], cfg["sweep.axis_b.min"],
                           cfg["sweep.axis_b.max"], cfg["sweep.axis_b.points"])
        locks = parse_locks(cfg["sweep.lock"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    result = run_sweep(spec, init, axis_a, axis_b, cfg["sweep.cycles"], clock,
                       dt=cfg["integrator.dt"], depth=cfg["integrator.depth"],
                       locks=locks, workers=args.threads)
    failed = sum(1 for row in result.status for st in row if st != "ok")
    for ci, cycle in enumerate(result.cycles):
        meta = dict(result.metadata)
        meta["cycle"] = cycle
        path = _sweep_out_path(args.out, cycle)
        write_heatmap(path, result.values_a, result.values_b,
                      result.concurrence[ci], result.purity[ci],
                      result.status, meta)
        print(f"wrote {path}")
    if failed:
        print(f"warning: {failed} grid cells failed (see status column)")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    try:
        results = run_checks(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    all_passed = True
    for r in results:
        flag = "PASS" if r.passed else "FAIL"
        print(f"{flag} {r.name:<18} value {r.value:.6e} bound {r.bound:<14} "
              f"[{r.seconds:.1f}s] {r.detail}")
        all_passed &= r.passed
    if args.out:
        payload = {
            "kernel": KERNEL,
            "passed": all_passed,
            "checks": [{"name": r.name, "passed": r.passed, "value": r.value,
                        "bound": r.bound, "detail": r.detail, "seconds": r.seconds}
                       for r in results],
        }
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        print(f"wrote {args.out}")
    return EXIT_OK if all_passed else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heomsim",
        description="Hierarchy-equations-of-motion simulator for two driven "
                    "qubits in a common Lorentzian vacuum bath")
    parser.add_argument("--version", action="version", version=f"heomsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=True):
        p.add_argument("--config", help="path to a key=value run configuration")
        p.add_argument("--out", required=out_required, help="output file path")
        p.add_argument("--threads", type=int, default=1,
                       help="worker processes for grid sweeps")
        p.add_argument("--seed", type=int, default=None,
                       help="accepted for interface compatibility; the core "
                            "paths use no randomness")

    p_run = sub.add_parser("run", help="propagate one trajectory and write the observable CSV")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_gp = sub.add_parser("gp", help="geometric phase per completed cycle")
    common(p_gp)
    p_gp.set_defaults(func=cmd_gp)

    p_sweep = sub.add_parser("sweep", help="two-parameter grid sweep, one heatmap file per cycle")
    common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="run the oracle-backed validation suite")
    common(p_val, out_required=False)
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, StabilityError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, BranchTrackingError) as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION


if __name__ == "__main__":
    sys.exit(main())
