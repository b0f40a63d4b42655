"""Adaptive continuous RGB-D visual odometry.

Colored point clouds are embedded as functions in a reproducing kernel
Hilbert space; frame-to-frame motion is the SE(3) element maximizing their
inner product, with the spatial kernel length-scale learned online by
gradient descent on the cloud distance.
"""

from .adaptive import EllState, ell_gradient, update_ell
from .evaluation import RpeResult, Trajectory, accumulate, rpe
from .frame_pipeline import Frame, Intrinsics, SelectionConfig, back_project, select_points
from .kernels import KernelParams, color_kernel, spatial_kernel, support_radius
from .lie import Pose, Twist, apply, compose, exp, invert, log
from .registration import (
    RegistrationFailed,
    RegistrationResult,
    SolverConfig,
    pose_gradient,
    register,
)
from .rkhs import ColoredCloud, EmptyPairSet, PairSet, build_pairs, cost, inner_product
from .sensitivity import CutoffEntry, cutoff, g, laurent_approx

__all__ = [
    "ColoredCloud", "CutoffEntry", "EllState", "EmptyPairSet", "Frame",
    "Intrinsics", "KernelParams", "PairSet", "Pose", "RegistrationFailed",
    "RegistrationResult", "RpeResult", "SelectionConfig", "SolverConfig",
    "Trajectory", "Twist", "accumulate", "apply", "back_project",
    "build_pairs", "color_kernel", "compose", "cost", "cutoff",
    "ell_gradient", "exp", "g", "inner_product", "invert", "laurent_approx",
    "log", "pose_gradient", "register", "rpe", "select_points",
    "spatial_kernel", "support_radius", "update_ell",
]

__version__ = "0.1.0"
