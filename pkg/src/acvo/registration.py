"""Gradient ascent of the RKHS inner product over SE(3).

The objective F(h) = <f_X, h.f_Z> is maximized by repeated left-perturbation
steps h <- exp(alpha * d) h, where d is the normalized gradient twist and
alpha comes from a backtracking (Armijo) line search.  The trial step is
warm-started from the previous accepted step so the step lengths can shrink
below the per-search floor across iterations, which is what lets the
transformation-norm convergence criterion fire.

The adaptive length-scale update (module ``adaptive``) is interleaved with
the pose steps: pose first, then one descent step on the length-scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import adaptive, lie
from .kernels import KernelParams
from .rkhs import ColoredCloud, EmptyPairSet, PairSet, build_pairs, cost, inner_product

_ARMIJO_C1 = 1e-4
_BACKTRACK = 0.5


class RegistrationFailed(RuntimeError):
    """Pair set empty even at the maximum length-scale (no overlap)."""


@dataclass(frozen=True)
class SolverConfig:
    """Solver and kernel hyperparameters (benchmark defaults).

    mode "adaptive" learns the length-scale online; mode "fixed" is the
    same loop with the learning rate forced to zero.
    """

    eps_transform: float = 1e-5   # twist-norm convergence threshold
    eps_gradient: float = 5e-5    # gradient-norm convergence threshold
    min_step: float = 0.2         # line-search multiplier floor
    max_iterations: int = 300
    kernel: KernelParams = field(default_factory=KernelParams)
    ell_init: float = 0.1
    ell_min: float = 0.039
    ell_max: float = 0.15
    gamma_ell: float = 0.3        # length-scale learning rate
    lambda_ell: float = 0.7       # length-scale reduction factor
    mode: str = "adaptive"
    initial_step: float = 1.0     # first trial step on the unit direction

    def __post_init__(self):
        if not 0.0 < self.ell_min < self.ell_init <= self.ell_max:
            raise ValueError("need 0 < ell_min < ell_init <= ell_max")
        if not 0.0 < self.lambda_ell < 1.0:
            raise ValueError("lambda_ell must lie in (0, 1)")
        if self.gamma_ell < 0.0:
            raise ValueError("gamma_ell must be non-negative")
        if min(self.eps_transform, self.eps_gradient, self.min_step) <= 0.0:
            raise ValueError("thresholds must be positive")
        if self.mode not in ("adaptive", "fixed"):
            raise ValueError("mode must be 'adaptive' or 'fixed'")

    @property
    def learns_ell(self) -> bool:
        return self.mode == "adaptive" and self.gamma_ell > 0.0


@dataclass(frozen=True)
class IterationRecord:
    """Per-iteration diagnostics row for the CSV stream."""

    iteration: int
    ell: float
    ell_ceiling: float
    dJ_dell: float
    F: float
    J: float


@dataclass(frozen=True)
class RegistrationResult:
    pose: lie.Pose
    iterations: int
    final_ell: float
    converged: bool
    tracking_warning: bool
    final_cost: float
    final_F: float
    history: tuple[IterationRecord, ...] = ()


def pose_gradient(
    X: ColoredCloud, Z: ColoredCloud, h: lie.Pose, pairs: PairSet, params: KernelParams
) -> lie.Twist:
    """Left-perturbation gradient of F at h, on pairs built at h."""
    return _gradient(X.points, lie.apply(h, Z.points), pairs, params.ell)


def _gradient(x_pts: np.ndarray, zt_pts: np.ndarray, pairs: PairSet, ell: float) -> lie.Twist:
    w = pairs.c * pairs.k / (ell * ell)
    z = zt_pts[pairs.j]
    diff = x_pts[pairs.i] - z
    grad_v = np.sum(w[:, None] * diff, axis=0)
    grad_w = np.sum(w[:, None] * np.cross(z, diff), axis=0)
    return lie.Twist(grad_w, grad_v)


def _objective(X, Z, h, params, tree):
    pairs = build_pairs(X, Z.transformed(h), params, tree=tree)
    return inner_product(pairs)


def step(
    X: ColoredCloud,
    Z: ColoredCloud,
    h: lie.Pose,
    ell: float,
    config: SolverConfig,
    trial_step: float | None = None,
    tree: cKDTree | None = None,
) -> tuple[lie.Pose, lie.Twist, dict]:
    """One ascent iteration at a fixed length-scale.

    Returns (new pose, applied step twist, diagnostics).  The pose is
    unchanged when the gradient is below threshold or no trial step along
    the line passes the Armijo test; the caller shrinks the trial scale in
    that case using diagnostics["trial_floor"].
    """
    params = config.kernel.with_ell(ell)
    if tree is None:
        tree = cKDTree(X.points)
    Zt = Z.transformed(h)
    pairs = build_pairs(X, Zt, params, tree=tree)
    F0 = inner_product(pairs)
    grad = _gradient(X.points, Zt.points, pairs, ell)
    gn = grad.norm()
    diag = {"F": F0, "F_after": F0, "gradient_norm": gn,
            "step_size": 0.0, "accepted": False, "trial_floor": 0.0}
    if gn < config.eps_gradient:
        return h, lie.Twist.zero(), diag

    direction = lie.Twist.from_vector(grad.as_vector() / gn)
    alpha0 = config.initial_step if trial_step is None else min(
        2.0 * trial_step, config.initial_step)
    floor = config.min_step * alpha0
    diag["trial_floor"] = floor

    alpha = alpha0
    while True:
        xi = lie.Twist(alpha * direction.omega, alpha * direction.v)
        h_try = lie.compose(lie.exp(xi), h)
        try:
            F_try = _objective(X, Z, h_try, params, tree)
        except EmptyPairSet:
            F_try = -math.inf
        if F_try >= F0 + _ARMIJO_C1 * alpha * gn:
            diag.update(F_after=F_try, step_size=alpha, accepted=True)
            return h_try, xi, diag
        if alpha <= floor * (1.0 + 1e-12):
            return h, lie.Twist.zero(), diag
        alpha = max(alpha * _BACKTRACK, floor)


def register(
    X: ColoredCloud,
    Z: ColoredCloud,
    config: SolverConfig | None = None,
    h_init: lie.Pose | None = None,
) -> RegistrationResult:
    """Find the pose h maximizing <f_X, h.f_Z> by line-searched ascent with
    interleaved length-scale adaptation.

    Raises RegistrationFailed when no pair survives sparsification even at
    the maximum length-scale.
    """
    config = config or SolverConfig()
    h = h_init if h_init is not None else lie.Pose.identity()
    tree = cKDTree(X.points)
    state = adaptive.EllState(config.ell_init, config.ell_max)
    trial: float | None = None
    weak_count = 0
    warning = False
    converged = False
    history: list[IterationRecord] = []
    last_F = math.nan
    tried_full_ell = False
    iteration = 0

    while iteration < config.max_iterations:
        try:
            h_new, xi, diag = step(X, Z, h, state.ell, config, trial, tree)
        except EmptyPairSet:
            if not tried_full_ell and state.ell < config.ell_max:
                # Non-overlap at the current scale: retry once at the widest
                # support before declaring failure.
                state = adaptive.EllState(config.ell_max, config.ell_max,
                                          state.pinned_low)
                tried_full_ell = True
                continue
            raise RegistrationFailed(
                "empty pair set at maximum length-scale") from None
        iteration += 1
        last_F = diag["F_after"]

        if diag["accepted"]:
            h = h_new
            trial = diag["step_size"]
        elif diag["trial_floor"] > 0.0:
            # Continue the backtracking across iterations: next search
            # starts at the floor just rejected.
            trial = _BACKTRACK * diag["trial_floor"]

        ell_used = state.ell
        if config.learns_ell:
            J, dJ = adaptive.cost_and_ell_gradient(
                X, Z, h, config.kernel.with_ell(state.ell))
            if abs(dJ) < adaptive.WEAK_GRADIENT:
                weak_count += 1
            else:
                weak_count = 0
            if weak_count >= adaptive.WEAK_GRADIENT_PATIENCE:
                state = adaptive.reduce_ceiling(state, config)
                weak_count = 0
                warning = True
            else:
                state = adaptive.update_ell(state, dJ, config)
            if state.pinned_low and abs(dJ) < adaptive.WEAK_GRADIENT:
                warning = True
        else:
            J, dJ = math.nan, math.nan
        history.append(IterationRecord(iteration - 1, ell_used,
                                       state.ell_max_current, dJ,
                                       diag["F_after"], J))

        if diag["gradient_norm"] < config.eps_gradient:
            converged = True
            break
        if diag["accepted"] and diag["step_size"] < config.eps_transform:
            converged = True
            break
        if not diag["accepted"] and diag["trial_floor"] < config.eps_transform:
            # No improving step exists above the convergence scale.
            converged = True
            break

    final_params = config.kernel.with_ell(state.ell)
    try:
        final_cost = cost(X, Z, h, final_params)
    except EmptyPairSet:
        final_cost = math.nan
    return RegistrationResult(
        pose=h,
        iterations=iteration,
        final_ell=state.ell,
        converged=converged,
        tracking_warning=warning,
        final_cost=final_cost,
        final_F=last_F,
        history=tuple(history),
    )
