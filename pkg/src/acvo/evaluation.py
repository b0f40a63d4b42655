"""Trajectory accumulation, TUM-format trajectory I/O, and the
drift-per-second Relative Pose Error metric.

RPE compares, for every start time with a sample one interval later, the
estimated relative motion against the reference relative motion; the
translational residual is reported in m/s and the rotational residual in
deg/s, aggregated as RMSE.  Quaternions (w-last, TUM convention) appear
only in the file format.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial.transform import Rotation

from . import lie


class NoOverlap(RuntimeError):
    """Fewer than two matched RPE intervals between the trajectories."""


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped world-frame poses (first frame conventionally identity)."""

    timestamps: np.ndarray
    poses: tuple[lie.Pose, ...]

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=float)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "poses", tuple(self.poses))
        if ts.shape[0] != len(self.poses):
            raise ValueError("timestamp/pose count mismatch")
        if ts.shape[0] >= 2 and np.any(np.diff(ts) <= 0):
            raise ValueError("timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.poses)


@dataclass(frozen=True)
class RpeResult:
    trans_rmse: float            # m/s
    rot_rmse: float              # deg/s
    residuals: tuple[tuple[float, float, float], ...]  # (t, trans, rot)


def accumulate(timestamps, relative_poses) -> Trajectory:
    """Chain frame-to-frame poses from the identity.

    relative_poses[k] maps frame k+1 into frame k; the returned trajectory
    has one more entry than relative_poses.
    """
    poses = [lie.Pose.identity()]
    for h in relative_poses:
        poses.append(lie.compose(poses[-1], h))
    return Trajectory(np.asarray(timestamps, dtype=float), tuple(poses))


def rotation_angle_deg(R) -> float:
    # atan2 of (skew norm, trace) is well conditioned at both 0 and pi,
    # unlike plain arccos of the clamped trace.
    cos_t = np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)
    sin_t = 0.5 * np.linalg.norm(
        [R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    return float(np.degrees(np.arctan2(sin_t, cos_t)))


def _match(times_a: np.ndarray, times_b: np.ndarray, tol: float) -> dict[int, int]:
    """Nearest-timestamp index map a -> b within tol."""
    out: dict[int, int] = {}
    for ia, t in enumerate(times_a):
        ib = int(np.argmin(np.abs(times_b - t)))
        if abs(times_b[ib] - t) <= tol:
            out[ia] = ib
    return out


def rpe(
    estimated: Trajectory,
    reference: Trajectory,
    delta: float = 1.0,
    association_tolerance: float = 0.02,
) -> RpeResult:
    """Relative Pose Error over fixed-length intervals.

    For each estimate time t with t+delta available in both trajectories,
    the error transform is E = (Q_t^-1 Q_t')^-1 (P_t^-1 P_t'); both
    residuals come from this single decomposition.  Invariant to a common
    rigid transform applied to either trajectory.
    """
    if len(estimated) < 2 or len(reference) < 2:
        raise NoOverlap("need at least two poses per trajectory")
    est_to_ref = _match(estimated.timestamps, reference.timestamps,
                        association_tolerance)
    residuals = []
    for ia, t in enumerate(estimated.timestamps):
        if ia not in est_to_ref:
            continue
        ib = int(np.argmin(np.abs(estimated.timestamps - (t + delta))))
        if abs(estimated.timestamps[ib] - (t + delta)) > association_tolerance:
            continue
        if ib == ia or ib not in est_to_ref:
            continue
        P_rel = lie.compose(lie.invert(estimated.poses[ia]), estimated.poses[ib])
        Q_rel = lie.compose(lie.invert(reference.poses[est_to_ref[ia]]),
                            reference.poses[est_to_ref[ib]])
        E = lie.compose(lie.invert(Q_rel), P_rel)
        residuals.append((float(t),
                          float(np.linalg.norm(E.T)) / delta,
                          rotation_angle_deg(E.R) / delta))
    if len(residuals) < 2:
        raise NoOverlap(f"only {len(residuals)} matched intervals")
    arr = np.asarray([(r[1], r[2]) for r in residuals])
    trans_rmse, rot_rmse = np.sqrt(np.mean(arr ** 2, axis=0))
    return RpeResult(float(trans_rmse), float(rot_rmse), tuple(residuals))


def pose_from_tum(values) -> lie.Pose:
    """Pose from (tx ty tz qx qy qz qw)."""
    values = np.asarray(values, dtype=float)
    R = Rotation.from_quat(values[3:7]).as_matrix()
    return lie.Pose(R, values[:3])


def pose_to_tum(h: lie.Pose) -> np.ndarray:
    """(tx ty tz qx qy qz qw) from a pose."""
    q = Rotation.from_matrix(h.R).as_quat()
    return np.concatenate([h.T, q])


def write_trajectory(trajectory: Trajectory, path) -> None:
    """TUM text format: 'timestamp tx ty tz qx qy qz qw' per line."""
    lines = ["# timestamp tx ty tz qx qy qz qw"]
    for t, h in zip(trajectory.timestamps, trajectory.poses):
        fields = " ".join(f"{x:.9f}" for x in pose_to_tum(h))
        lines.append(f"{t:.6f} {fields}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_trajectory(path) -> Trajectory:
    times, poses = [], []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [float(x) for x in line.split()]
        times.append(parts[0])
        poses.append(pose_from_tum(parts[1:8]))
    return Trajectory(np.asarray(times), tuple(poses))


def write_residuals_csv(result: RpeResult, path) -> None:
    lines = ["timestamp,trans_residual_m_per_s,rot_residual_deg_per_s"]
    for t, tr, ro in result.residuals:
        lines.append(f"{t:.6f},{tr:.9g},{ro:.9g}")
    Path(path).write_text("\n".join(lines) + "\n")
