"""Synthetic colored clouds and sequences for tests and demos."""

from __future__ import annotations

import numpy as np

from . import lie
from .rkhs import ColoredCloud


def structured_cloud(n: int = 500, seed: int = 0, extent: float = 0.8) -> ColoredCloud:
    """Room-corner-like cloud: points on three orthogonal planes with
    smooth position-dependent labels in [0,1]^5."""
    rng = np.random.default_rng(seed)
    per = n // 3
    counts = [per, per, n - 2 * per]
    pts = []
    for axis, m in enumerate(counts):
        uv = rng.uniform(0.0, extent, size=(m, 2))
        p = np.zeros((m, 3))
        p[:, [i for i in range(3) if i != axis]] = uv
        # Mild relief so the planes are not perfectly flat.
        p[:, axis] = 0.03 * np.sin(8.0 * uv[:, 0]) * np.cos(6.0 * uv[:, 1])
        pts.append(p)
    points = np.concatenate(pts, axis=0)

    x, y, z = points.T
    labels = 0.5 + 0.5 * np.stack([
        np.sin(7.0 * x + 1.0),
        np.cos(5.0 * y),
        np.sin(6.0 * z + 0.5),
        np.cos(4.0 * (x + y)),
        np.sin(5.0 * (y + z)),
    ], axis=1)
    return ColoredCloud(points, labels)


def random_transform(rng, max_angle_deg: float, max_translation: float) -> lie.Pose:
    """Uniform random axis, angle up to max_angle_deg, translation up to
    max_translation per component norm."""
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = np.radians(rng.uniform(0.0, max_angle_deg))
    t = rng.normal(size=3)
    t *= rng.uniform(0.0, max_translation) / np.linalg.norm(t)
    return lie.Pose(lie.so3_exp(angle * axis), t)


def synthetic_sequence(n_frames: int, seed: int = 0, n_points: int = 500):
    """(clouds, true relative poses): cloud k+1 observes the scene moved by
    the inverse of the k-th relative pose, so registering consecutive
    clouds should recover the listed poses."""
    rng = np.random.default_rng(seed)
    base = structured_cloud(n_points, seed=seed)
    clouds = [base]
    rel_poses = []
    for _ in range(n_frames - 1):
        h = random_transform(rng, max_angle_deg=3.0, max_translation=0.03)
        rel_poses.append(h)
        clouds.append(clouds[-1].transformed(lie.invert(h)))
    return clouds, rel_poses
