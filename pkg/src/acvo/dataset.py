"""TUM RGB-D benchmark ingestion.

Parses the on-disk sequence layout (``rgb.txt``, ``depth.txt``,
``groundtruth.txt`` with '#' comment lines), associates color and depth
streams by nearest timestamp, and loads frames with per-camera intrinsics
supplied through a plain key-value config file (the calibrations are
dataset constants, not part of the method).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

from . import lie
from .evaluation import pose_from_tum
from .frame_pipeline import Frame, Intrinsics

log = logging.getLogger(__name__)

# Default calibrations from the TUM RGB-D dataset distribution.
FREIBURG1 = {"fx": 517.3, "fy": 516.5, "cx": 318.6, "cy": 255.3,
             "depth_scale": 1.0 / 5000.0}
FREIBURG3 = {"fx": 535.4, "fy": 539.2, "cx": 320.1, "cy": 247.6,
             "depth_scale": 1.0 / 5000.0}


class MissingFile(FileNotFoundError):
    pass


class ParseError(ValueError):
    def __init__(self, path, line_number: int, message: str):
        super().__init__(f"{path}:{line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class CameraConfig:
    intrinsics: Intrinsics
    depth_scale: float = 1.0 / 5000.0  # meters per raw 16-bit unit


@dataclass(frozen=True)
class SequenceIndex:
    """Time-sorted sequence listings; groundtruth may be absent
    (validation sequences)."""

    root: Path
    rgb_entries: tuple[tuple[float, str], ...]
    depth_entries: tuple[tuple[float, str], ...]
    groundtruth_entries: tuple[tuple[float, lie.Pose], ...]
    association_tolerance: float = 0.02


def load_camera_config(path) -> CameraConfig:
    """Plain 'key = value' file with fx, fy, cx, cy and optional depth_scale."""
    values = dict(FREIBURG1)
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    for n, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(path, n, "expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in values:
            raise ParseError(path, n, f"unknown key {key!r}")
        try:
            values[key] = float(value)
        except ValueError:
            raise ParseError(path, n, f"bad number {value.strip()!r}") from None
    return CameraConfig(
        Intrinsics(values["fx"], values["fy"], values["cx"], values["cy"]),
        values["depth_scale"])


def camera_config_from_defaults(name: str = "freiburg1") -> CameraConfig:
    table = {"freiburg1": FREIBURG1, "freiburg3": FREIBURG3}
    v = table[name]
    return CameraConfig(Intrinsics(v["fx"], v["fy"], v["cx"], v["cy"]),
                        v["depth_scale"])


def _parse_listing(path: Path, n_fields: int):
    """Rows of (timestamp, fields...) with strictly increasing timestamps."""
    if not path.is_file():
        raise MissingFile(str(path))
    entries = []
    last_t = -np.inf
    for n, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 1 + n_fields:
            raise ParseError(path, n, f"expected {1 + n_fields} fields, got {len(parts)}")
        try:
            t = float(parts[0])
        except ValueError:
            raise ParseError(path, n, f"bad timestamp {parts[0]!r}") from None
        if t <= last_t:
            raise ParseError(path, n, "non-monotonic timestamp")
        last_t = t
        entries.append((t, parts[1:]))
    return entries


def load_sequence(root, association_tolerance: float = 0.02) -> SequenceIndex:
    """Index a TUM sequence directory (rgb.txt, depth.txt, groundtruth.txt)."""
    root = Path(root)
    rgb = tuple((t, f[0]) for t, f in _parse_listing(root / "rgb.txt", 1))
    depth = tuple((t, f[0]) for t, f in _parse_listing(root / "depth.txt", 1))
    gt_path = root / "groundtruth.txt"
    groundtruth = ()
    if gt_path.is_file():
        rows = _parse_listing(gt_path, 7)
        try:
            groundtruth = tuple((t, pose_from_tum([float(x) for x in f]))
                                for t, f in rows)
        except ValueError as e:
            raise ParseError(gt_path, 0, str(e)) from None
    return SequenceIndex(root, rgb, depth, groundtruth, association_tolerance)


def associate(index: SequenceIndex) -> list[tuple[tuple[float, str], tuple[float, str]]]:
    """Greedy nearest-timestamp matching of depth entries to rgb entries.

    Candidate pairs within the tolerance are taken in order of increasing
    time difference, each side used at most once (same policy as the TUM
    associate tool); the result is time-ordered.  Unmatched rgb frames are
    skipped with a logged count.
    """
    tol = index.association_tolerance
    rgb_t = np.asarray([t for t, _ in index.rgb_entries])
    depth_t = np.asarray([t for t, _ in index.depth_entries])
    candidates = []
    for i, tr in enumerate(rgb_t):
        close = np.nonzero(np.abs(depth_t - tr) <= tol)[0]
        for j in close:
            candidates.append((abs(depth_t[j] - tr), i, int(j)))
    candidates.sort()
    used_rgb, used_depth = set(), set()
    pairs = []
    for _, i, j in candidates:
        if i in used_rgb or j in used_depth:
            continue
        used_rgb.add(i)
        used_depth.add(j)
        pairs.append((index.rgb_entries[i], index.depth_entries[j]))
    skipped = len(index.rgb_entries) - len(pairs)
    if skipped:
        log.warning("associate: %d rgb frames without a depth match", skipped)
    pairs.sort(key=lambda p: p[0][0])
    return pairs


def read_frame(
    index: SequenceIndex,
    rgb_entry: tuple[float, str],
    depth_entry: tuple[float, str],
    camera: CameraConfig,
) -> Frame:
    """Decode one associated rgb/depth pair into a metric Frame."""
    rgb_path = index.root / rgb_entry[1]
    depth_path = index.root / depth_entry[1]
    bgr = cv2.imread(str(rgb_path), cv2.IMREAD_COLOR)
    if bgr is None:
        raise MissingFile(str(rgb_path))
    raw_depth = cv2.imread(str(depth_path), cv2.IMREAD_UNCHANGED)
    if raw_depth is None:
        raise MissingFile(str(depth_path))
    depth = raw_depth.astype(np.float64) * camera.depth_scale
    return Frame(cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB), depth,
                 rgb_entry[0], camera.intrinsics)
