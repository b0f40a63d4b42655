"""Batch entry points: sequence odometry, single-pair registration, RPE
evaluation, and the sensitivity cutoff table.

Heavy modules are imported inside the handlers so the thread-count
environment variable can take effect before numpy loads.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time

THREADS_ENV = "ACVO_NUM_THREADS"

# SolverConfig field names settable via --param (kernel fields listed
# separately because they nest).
_KERNEL_KEYS = {"sigma", "sigma_c", "ell_c", "tau"}
_INT_KEYS = {"max_iterations"}


def _apply_thread_env() -> None:
    n = os.environ.get(THREADS_ENV)
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, n)


def build_solver_config(mode: str, params: dict[str, float]):
    from .kernels import KernelParams
    from .registration import SolverConfig

    kernel_kwargs = {k: v for k, v in params.items() if k in _KERNEL_KEYS}
    solver_kwargs = {k: (int(v) if k in _INT_KEYS else v)
                     for k, v in params.items()
                     if k not in _KERNEL_KEYS and k != "ell"}
    config = SolverConfig(mode=mode, kernel=KernelParams(**kernel_kwargs),
                          **solver_kwargs)
    # The spatial length-scale is solver state; route 'ell' to ell_init.
    if "ell" in params:
        from dataclasses import replace
        config = replace(config, ell_init=params["ell"])
    return config


def _parse_params(items: list[str]) -> dict[str, float]:
    out = {}
    for item in items:
        if "=" not in item:
            raise SystemExit(f"--param expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        out[key.strip()] = float(value)
    return out


def _print_config(config) -> None:
    print("solver configuration:")
    for name, value in sorted(vars(config).items()):
        print(f"  {name} = {value}")


def _load_clouds(args):
    """Associated frames of a sequence as an iterator of (timestamp, cloud)."""
    from . import dataset
    from .frame_pipeline import SelectionConfig, frame_to_cloud

    index = dataset.load_sequence(args.dataset)
    camera = (dataset.load_camera_config(args.intrinsics)
              if args.intrinsics else dataset.camera_config_from_defaults())
    selection = SelectionConfig(target_points=args.target_points)
    for rgb_entry, depth_entry in dataset.associate(index):
        frame = dataset.read_frame(index, rgb_entry, depth_entry, camera)
        yield frame.timestamp, frame_to_cloud(frame, selection)


def cmd_run(args) -> int:
    from . import lie
    from .evaluation import accumulate, write_trajectory
    from .frame_pipeline import InsufficientPoints
    from .registration import RegistrationFailed, register

    config = build_solver_config(args.mode, _parse_params(args.param))
    _print_config(config)

    timestamps = []
    rel_poses = []
    diag_rows = []
    prev_cloud = None
    prev_rel = lie.Pose.identity()
    for timestamp, cloud in _load_clouds(args):
        if prev_cloud is None:
            prev_cloud, timestamps = cloud, [timestamp]
            continue
        t0 = time.perf_counter()
        warned = False
        try:
            result = register(prev_cloud, cloud, config, h_init=prev_rel)
            rel = result.pose
            row = (timestamp, result.iterations, result.final_ell,
                   result.final_F, result.final_cost,
                   int(result.tracking_warning))
            warned = result.tracking_warning
        except (RegistrationFailed, InsufficientPoints) as e:
            print(f"warning: frame at {timestamp:.6f}: {e}; carrying previous "
                  "relative pose", file=sys.stderr)
            rel = prev_rel
            row = (timestamp, 0, float("nan"), float("nan"), float("nan"), 1)
            warned = True
        diag_rows.append(row + (time.perf_counter() - t0,))
        rel_poses.append(rel)
        timestamps.append(timestamp)
        prev_rel = rel
        prev_cloud = cloud
        if warned:
            print(f"tracking warning at {timestamp:.6f}", file=sys.stderr)

    if len(timestamps) < 2:
        print("error: fewer than two usable frames", file=sys.stderr)
        return 1
    write_trajectory(accumulate(timestamps, rel_poses), args.out)
    if args.diag:
        with open(args.diag, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["timestamp", "iterations", "final_ell", "F", "J",
                             "warning", "wall_time_s"])
            writer.writerows(diag_rows)
    print(f"wrote {len(timestamps)} poses to {args.out}")
    return 0


def cmd_pair(args) -> int:
    from .registration import register

    config = build_solver_config(args.mode, _parse_params(args.param))
    _print_config(config)
    clouds = []
    for timestamp, cloud in _load_clouds(args):
        clouds.append((timestamp, cloud))
        if len(clouds) > args.index + 1:
            break
    if len(clouds) < args.index + 2:
        print("error: not enough frames in sequence", file=sys.stderr)
        return 1
    (t0, X), (t1, Z) = clouds[args.index], clouds[args.index + 1]
    result = register(X, Z, config)
    print(f"frames {t0:.6f} -> {t1:.6f}")
    print("pose:")
    print(result.pose.matrix())
    print(f"iterations={result.iterations} converged={result.converged} "
          f"final_ell={result.final_ell:.4f} F={result.final_F:.6g} "
          f"J={result.final_cost:.6g} warning={result.tracking_warning}")
    if args.diag:
        with open(args.diag, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "ell", "ell_ceiling", "dJ_dell",
                             "F", "J"])
            for rec in result.history:
                writer.writerow([rec.iteration, rec.ell, rec.ell_ceiling,
                                 rec.dJ_dell, rec.F, rec.J])
    return 0


def cmd_rpe(args) -> int:
    from .evaluation import read_trajectory, rpe, write_residuals_csv

    result = rpe(read_trajectory(args.estimated), read_trajectory(args.groundtruth),
                 delta=args.delta)
    print(f"translational RPE RMSE: {result.trans_rmse:.4f} m/s")
    print(f"rotational RPE RMSE:    {result.rot_rmse:.4f} deg/s")
    if args.out:
        write_residuals_csv(result, args.out)
    return 0


def cmd_sensitivity(args) -> int:
    from .sensitivity import cutoff_table

    orders = [int(x) for x in args.orders.split(",")]
    tolerances = [float(x) for x in args.tolerances.split(",")]
    rows = cutoff_table(orders, tolerances)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["order", "tolerance", "s_cut", "k_cut"])
        for e in rows:
            writer.writerow([e.order, e.tolerance, f"{e.s_cut:.6f}",
                             f"{e.k_cut:.6f}"])
    finally:
        if args.out:
            out.close()
    return 0


def _add_sequence_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", required=True, help="TUM sequence directory")
    p.add_argument("--intrinsics", help="camera key=value config file "
                   "(default: freiburg1 calibration)")
    p.add_argument("--mode", choices=["adaptive", "fixed"], default="adaptive")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="override a solver/kernel parameter (repeatable)")
    p.add_argument("--target-points", type=int, default=3000)
    p.add_argument("--diag", help="per-frame diagnostics CSV path")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acvo",
        description="Adaptive continuous RGB-D visual odometry")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run odometry over a sequence")
    _add_sequence_args(p)
    p.add_argument("--out", required=True, help="output trajectory (TUM format)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("pair", help="register one consecutive frame pair")
    _add_sequence_args(p)
    p.add_argument("--index", type=int, default=0,
                   help="index of the first frame of the pair")
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("rpe", help="relative pose error of a trajectory")
    p.add_argument("estimated")
    p.add_argument("groundtruth")
    p.add_argument("--delta", type=float, default=1.0, help="interval [s]")
    p.add_argument("--out", help="per-interval residual CSV path")
    p.set_defaults(func=cmd_rpe)

    p = sub.add_parser("sensitivity", help="kernel cutoff table (CSV)")
    p.add_argument("--orders", default="2,4,6,8")
    p.add_argument("--tolerances", default="1e-1,1e-2,1e-3,1e-4")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sensitivity)
    return parser


def main(argv=None) -> int:
    _apply_thread_env()
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
