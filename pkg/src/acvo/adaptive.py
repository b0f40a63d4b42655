"""Online learning of the spatial kernel length-scale.

One gradient-descent step on the cloud-distance cost J with respect to the
length-scale per registration iteration, with the search-interval clamping
and ceiling-reduction schedule that keeps the scale in a feasible region
and falls back to the fixed-scale behavior when the gradient is weak.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import lie
from .kernels import KernelParams
from .rkhs import ColoredCloud, EmptyPairSet, build_pairs

# |dJ/dl| below this counts as a vanishing gradient for the fallback rule.
WEAK_GRADIENT = 1e-12

# Consecutive weak-gradient iterations before a ceiling reduction is forced.
WEAK_GRADIENT_PATIENCE = 3


@dataclass(frozen=True)
class EllState:
    """Current length-scale, its (non-increasing) ceiling, and whether the
    scale has been pinned at the lower bound during this registration."""

    ell: float
    ell_max_current: float
    pinned_low: bool = False


def _weighted_sums(X: ColoredCloud, Z: ColoredCloud, params: KernelParams):
    """(sum c*k, sum c*d^2*k) over the sparsified pairs of two clouds."""
    pairs = build_pairs(X, Z, params)
    d2 = np.sum((X.points[pairs.i] - Z.points[pairs.j]) ** 2, axis=1)
    ck = pairs.c * pairs.k
    return float(np.sum(ck)), float(np.sum(ck * d2))


def cost_and_ell_gradient(
    X: ColoredCloud, Z: ColoredCloud, h: lie.Pose, params: KernelParams
) -> tuple[float, float]:
    """J(h) and dJ/dl at the current length-scale, sharing the pair sets.

    The derivative follows from d k / d l = k * d^2 / l^3 applied to the
    three sums of J; all three use the current sparsification radius.  An
    empty cross pair set contributes zero (non-overlapping clouds).
    """
    s_xx, w_xx = _weighted_sums(X, X, params)
    s_zz, w_zz = _weighted_sums(Z, Z, params)
    try:
        s_xz, w_xz = _weighted_sums(X, Z.transformed(h), params)
    except EmptyPairSet:
        s_xz, w_xz = 0.0, 0.0
    J = s_xx + s_zz - 2.0 * s_xz
    grad = (w_xx + w_zz - 2.0 * w_xz) / params.ell ** 3
    return J, grad


def ell_gradient(
    X: ColoredCloud, Z: ColoredCloud, h: lie.Pose, ell: float, params: KernelParams
) -> float:
    """dJ/dl at length-scale ``ell`` (other hyperparameters from params)."""
    return cost_and_ell_gradient(X, Z, h, params.with_ell(ell))[1]


def update_ell(state: EllState, grad: float, config) -> EllState:
    """One descent step l' = l - gamma * dJ/dl with interval control.

    If the candidate reaches the current ceiling, both are contracted by
    the reduction factor; the result is clamped to [ell_min, ceiling] and
    the low-pin flag records a clamp at the lower bound.
    """
    ell = state.ell - config.gamma_ell * grad
    ceiling = state.ell_max_current
    if ell >= ceiling:
        ell *= config.lambda_ell
        ceiling = max(ceiling * config.lambda_ell, config.ell_min)
    pinned = state.pinned_low
    if ell < config.ell_min:
        ell = config.ell_min
        pinned = True
    ell = min(ell, ceiling)
    return EllState(ell, ceiling, pinned)


def reduce_ceiling(state: EllState, config) -> EllState:
    """Weak-gradient fallback: contract the scale and its ceiling, guiding
    the search toward smaller values as in the fixed-scale solver."""
    ceiling = max(state.ell_max_current * config.lambda_ell, config.ell_min)
    ell = max(config.ell_min, min(state.ell * config.lambda_ell, ceiling))
    return replace(state, ell=ell, ell_max_current=ceiling)
