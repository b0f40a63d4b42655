"""RGB-D frame to colored point cloud conversion.

Semi-dense point selection picks high-gradient pixels with a per-block
adaptive threshold (block median plus a margin), targeting ~3000 points per
frame; when a frame is too texture-poor, the deficit is filled by uniformly
downsampling Canny edge pixels.  Selected pixels are back-projected through
the pinhole model and labeled with normalized HSV plus normalized intensity
gradients (a 5-vector in [0,1]^5).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import cv2
import numpy as np

from .rkhs import ColoredCloud


class InsufficientPoints(RuntimeError):
    """Frame yields too few usable points to register."""

MIN_POINTS = 50


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole parameters in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0 or self.cx <= 0 or self.cy <= 0:
            raise ValueError("intrinsics must be positive")


@dataclass(frozen=True)
class Frame:
    """One RGB-D frame: 8-bit RGB image, metric depth map (0 = invalid)."""

    rgb: np.ndarray
    depth: np.ndarray
    timestamp: float
    intrinsics: Intrinsics

    def __post_init__(self):
        if self.rgb.shape[:2] != self.depth.shape:
            raise ValueError("rgb and depth dimensions differ")


@dataclass(frozen=True)
class SelectionConfig:
    target_points: int = 3000
    fallback_fraction: float = 1.0 / 3.0
    gradient_block: int = 32       # block size for the adaptive threshold
    gradient_margin: float = 7.0   # added to the block median gradient
    canny_low: float = 50.0
    canny_high: float = 150.0
    depth_min: float = 0.1
    depth_max: float = 10.0

    def __post_init__(self):
        if self.target_points <= 0:
            raise ValueError("target_points must be positive")
        if not 0.0 < self.fallback_fraction < 1.0:
            raise ValueError("fallback_fraction must lie in (0, 1)")


def _grayscale(rgb: np.ndarray) -> np.ndarray:
    return cv2.cvtColor(rgb, cv2.COLOR_RGB2GRAY).astype(np.float64)


def _gradients(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    gv, gu = np.gradient(gray)  # 3x3-equivalent central differences
    return gu, gv


def _valid_depth_mask(frame: Frame, config: SelectionConfig) -> np.ndarray:
    return (frame.depth >= config.depth_min) & (frame.depth <= config.depth_max)


def gradient_select(frame: Frame, config: SelectionConfig) -> np.ndarray:
    """Block-adaptive gradient-magnitude selection; (n, 2) array of (u, v)."""
    gray = _grayscale(frame.rgb)
    gu, gv = _gradients(gray)
    mag = np.hypot(gu, gv)
    valid = _valid_depth_mask(frame, config)

    H, W = gray.shape
    B = config.gradient_block
    n_blocks = math.ceil(H / B) * math.ceil(W / B)
    quota = max(1, math.ceil(config.target_points / n_blocks))

    picked_u, picked_v = [], []
    for v0 in range(0, H, B):
        for u0 in range(0, W, B):
            block = mag[v0:v0 + B, u0:u0 + B]
            ok = valid[v0:v0 + B, u0:u0 + B]
            thresh = np.median(block) + config.gradient_margin
            cand_v, cand_u = np.nonzero((block > thresh) & ok)
            if cand_v.size == 0:
                continue
            strengths = block[cand_v, cand_u]
            # Strongest first; ties broken by pixel index for determinism.
            order = np.lexsort((cand_v * B + cand_u, -strengths))[:quota]
            picked_u.extend(u0 + cand_u[order])
            picked_v.extend(v0 + cand_v[order])
    if not picked_u:
        return np.empty((0, 2), dtype=np.intp)
    pixels = np.stack([np.asarray(picked_u, dtype=np.intp),
                       np.asarray(picked_v, dtype=np.intp)], axis=1)
    order = np.lexsort((pixels[:, 0], pixels[:, 1]))
    return pixels[order]


def canny_fill(frame: Frame, config: SelectionConfig, exclude: np.ndarray,
               deficit: int) -> np.ndarray:
    """Uniformly downsampled valid-depth Canny edge pixels, (m, 2) (u, v)."""
    gray = _grayscale(frame.rgb).astype(np.uint8)
    edges = cv2.Canny(gray, config.canny_low, config.canny_high) > 0
    edges &= _valid_depth_mask(frame, config)
    if exclude.size:
        edges[exclude[:, 1], exclude[:, 0]] = False
    ev, eu = np.nonzero(edges)
    if ev.size == 0 or deficit <= 0:
        return np.empty((0, 2), dtype=np.intp)
    take = min(deficit, ev.size)
    idx = np.unique(np.linspace(0, ev.size - 1, take).round().astype(np.intp))
    return np.stack([eu[idx], ev[idx]], axis=1)


def select_points(frame: Frame, config: SelectionConfig | None = None) -> np.ndarray:
    """Semi-dense pixel selection, (n, 2) array of (u, v) with valid depth.

    Raises InsufficientPoints when fewer than 50 usable pixels result.
    """
    config = config or SelectionConfig()
    pixels = gradient_select(frame, config)
    if pixels.shape[0] < config.fallback_fraction * config.target_points:
        extra = canny_fill(frame, config, pixels,
                           config.target_points - pixels.shape[0])
        if extra.shape[0]:
            pixels = np.concatenate([pixels, extra], axis=0)
            order = np.lexsort((pixels[:, 0], pixels[:, 1]))
            pixels = pixels[order]
    cap = int(1.2 * config.target_points)
    if pixels.shape[0] > cap:
        idx = np.linspace(0, pixels.shape[0] - 1, cap).round().astype(np.intp)
        pixels = pixels[np.unique(idx)]
    if pixels.shape[0] < MIN_POINTS:
        raise InsufficientPoints(
            f"only {pixels.shape[0]} usable pixels selected")
    return pixels


def back_project(frame: Frame, pixels: np.ndarray) -> ColoredCloud:
    """Pinhole back-projection of selected pixels with HSV+gradient labels.

    Pixels must carry valid (positive) depth.
    """
    u = pixels[:, 0]
    v = pixels[:, 1]
    d = frame.depth[v, u]
    if np.any(d <= 0):
        raise ValueError("back_project requires positive depth at all pixels")
    K = frame.intrinsics
    points = np.stack([d * (u - K.cx) / K.fx,
                       d * (v - K.cy) / K.fy,
                       d], axis=1)

    hsv = cv2.cvtColor(frame.rgb.astype(np.float32) / 255.0, cv2.COLOR_RGB2HSV)
    hsv = hsv[v, u].astype(np.float64)
    hsv[:, 0] /= 360.0  # H in [0, 360) from the float conversion

    gray = _grayscale(frame.rgb)
    gu, gv = _gradients(gray)
    gabs = np.stack([np.abs(gu[v, u]), np.abs(gv[v, u])], axis=1)
    peak = gabs.max()
    if peak > 0:
        gabs /= peak

    return ColoredCloud(points, np.concatenate([hsv, gabs], axis=1))


def project(intrinsics: Intrinsics, points: np.ndarray) -> np.ndarray:
    """Pinhole projection to (u, v) pixel coordinates; inverse of
    back_project for positive depth."""
    points = np.asarray(points, dtype=float)
    z = points[:, 2]
    return np.stack([intrinsics.fx * points[:, 0] / z + intrinsics.cx,
                     intrinsics.fy * points[:, 1] / z + intrinsics.cy], axis=1)


def frame_to_cloud(frame: Frame, config: SelectionConfig | None = None) -> ColoredCloud:
    """select_points + back_project in one call."""
    return back_project(frame, select_points(frame, config))
