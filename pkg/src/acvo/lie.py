"""Minimal SO(3)/SE(3) algebra on numpy arrays.

Poses are stored as an explicit rotation matrix plus translation vector;
twists as (omega, v) tangent coordinates.  Everything here is a pure
function, so the module is safe to call from any thread.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Below this rotation angle the closed-form Rodrigues coefficients lose
# digits to cancellation, so we switch to their Taylor expansions.
_SMALL_ANGLE = 1e-4

# Orthonormality drift tolerated before a pose is re-projected onto SO(3).
_ORTHO_TOL = 1e-9


class AngleNearPi(ValueError):
    """Rotation angle too close to pi for a well-conditioned logarithm."""


@dataclass(frozen=True)
class Twist:
    """Tangent coordinates of SE(3): rotational part ``omega`` [rad],
    translational part ``v`` [m]."""

    omega: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=float).reshape(3))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float).reshape(3))
        if not (np.isfinite(self.omega).all() and np.isfinite(self.v).all()):
            raise ValueError("twist components must be finite")

    @classmethod
    def zero(cls) -> "Twist":
        return cls(np.zeros(3), np.zeros(3))

    @classmethod
    def from_vector(cls, xi) -> "Twist":
        xi = np.asarray(xi, dtype=float).reshape(6)
        return cls(xi[:3], xi[3:])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.omega, self.v])

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_vector()))


@dataclass(frozen=True)
class Pose:
    """Rigid-body transform: rotation ``R`` (3x3) and translation ``T`` [m]."""

    R: np.ndarray = field(default_factory=lambda: np.eye(3))
    T: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "R", np.asarray(self.R, dtype=float).reshape(3, 3))
        object.__setattr__(self, "T", np.asarray(self.T, dtype=float).reshape(3))

    @classmethod
    def identity(cls) -> "Pose":
        return cls()

    def matrix(self) -> np.ndarray:
        """Homogeneous 4x4 form."""
        M = np.eye(4)
        M[:3, :3] = self.R
        M[:3, 3] = self.T
        return M


def hat(w) -> np.ndarray:
    """Skew-symmetric matrix such that hat(w) @ x == cross(w, x)."""
    w = np.asarray(w, dtype=float)
    return np.array([
        [0.0, -w[2], w[1]],
        [w[2], 0.0, -w[0]],
        [-w[1], w[0], 0.0],
    ])


def vee(W) -> np.ndarray:
    return np.array([W[2, 1], W[0, 2], W[1, 0]])


def _rotation_coeffs(theta: float) -> tuple[float, float]:
    """(sin t / t, (1 - cos t) / t^2) with Taylor fallback near zero."""
    if theta < _SMALL_ANGLE:
        t2 = theta * theta
        return 1.0 - t2 / 6.0, 0.5 - t2 / 24.0
    return np.sin(theta) / theta, (1.0 - np.cos(theta)) / (theta * theta)


def so3_exp(omega) -> np.ndarray:
    """Rodrigues formula with series fallback for small angles."""
    omega = np.asarray(omega, dtype=float)
    theta = float(np.linalg.norm(omega))
    a, b = _rotation_coeffs(theta)
    W = hat(omega)
    return np.eye(3) + a * W + b * (W @ W)


def _left_jacobian(omega) -> np.ndarray:
    """V matrix mapping the twist translation to the pose translation."""
    omega = np.asarray(omega, dtype=float)
    theta = float(np.linalg.norm(omega))
    W = hat(omega)
    if theta < _SMALL_ANGLE:
        t2 = theta * theta
        b = 0.5 - t2 / 24.0
        c = 1.0 / 6.0 - t2 / 120.0
    else:
        b = (1.0 - np.cos(theta)) / (theta * theta)
        c = (theta - np.sin(theta)) / (theta ** 3)
    return np.eye(3) + b * W + c * (W @ W)


def exp(xi: Twist) -> Pose:
    """Closed-form SE(3) exponential."""
    R = so3_exp(xi.omega)
    T = _left_jacobian(xi.omega) @ xi.v
    return Pose(R, T)


def so3_log(R) -> np.ndarray:
    """Rotation-vector logarithm; raises AngleNearPi within 1e-6 of pi."""
    R = np.asarray(R, dtype=float)
    cos_theta = np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)
    theta = float(np.arccos(cos_theta))
    if theta >= np.pi - 1e-6:
        raise AngleNearPi(f"rotation angle {theta} too close to pi")
    w = vee(R - R.T)  # = 2 sin(theta) * axis
    if theta < _SMALL_ANGLE:
        return 0.5 * (1.0 + theta * theta / 6.0) * w
    if theta < 3.0:
        return (theta / (2.0 * np.sin(theta))) * w
    # Near pi the sin(theta) scaling is ill-conditioned; recover the axis
    # magnitude from the symmetric part instead and orient it with w.
    aaT = ((R + R.T) / 2.0 - cos_theta * np.eye(3)) / (1.0 - cos_theta)
    i0 = int(np.argmax(np.diag(aaT)))
    axis = aaT[i0] / np.sqrt(max(aaT[i0, i0], 0.0))
    axis /= np.linalg.norm(axis)
    if np.dot(axis, w) < 0.0:
        axis = -axis
    return theta * axis


def log(h: Pose) -> Twist:
    """Inverse of exp on rotations with angle < pi - 1e-6."""
    omega = so3_log(h.R)
    v = np.linalg.solve(_left_jacobian(omega), h.T)
    return Twist(omega, v)


def apply(h: Pose, x) -> np.ndarray:
    """Act on a point (3,) or a stack of points (n, 3)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return h.R @ x + h.T
    return x @ h.R.T + h.T


def orthonormality_drift(R) -> float:
    return float(np.linalg.norm(R.T @ R - np.eye(3)))


def _project_to_so3(R) -> np.ndarray:
    U, _, Vt = np.linalg.svd(R)
    D = np.diag([1.0, 1.0, float(np.sign(np.linalg.det(U @ Vt)))])
    return U @ D @ Vt


def compose(a: Pose, b: Pose) -> Pose:
    """Group product a * b, with re-orthonormalization if the rotation has
    drifted off the manifold (long composition chains)."""
    R = a.R @ b.R
    T = a.R @ b.T + a.T
    if orthonormality_drift(R) > _ORTHO_TOL:
        R = _project_to_so3(R)
    return Pose(R, T)


def invert(h: Pose) -> Pose:
    return Pose(h.R.T, -h.R.T @ h.T)
