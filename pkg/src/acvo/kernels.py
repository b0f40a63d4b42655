"""Squared-exponential spatial and color kernels plus the sparsification
radius that bounds pair interactions.

The sparsification threshold ``tau`` is interpreted as a cut on the
unit-variance kernel factor exp(-d^2 / 2 ell^2); the signal variance only
scales the retained values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KernelParams:
    """Hyperparameters of the spatial and color kernels.

    sigma, ell:     spatial kernel signal std-dev and length-scale [m]
    sigma_c, ell_c: color kernel signal std-dev and length-scale
    tau:            sparsification threshold on the unit-variance spatial
                    kernel value, in (0, 1)
    """

    sigma: float = 0.1
    ell: float = 0.1
    sigma_c: float = 1.0
    ell_c: float = 0.1
    tau: float = 8.315e-3

    def __post_init__(self):
        if self.sigma <= 0 or self.ell <= 0 or self.sigma_c <= 0 or self.ell_c <= 0:
            raise ValueError("kernel scales must be positive")
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must lie in (0, 1)")

    def with_ell(self, ell: float) -> "KernelParams":
        return KernelParams(self.sigma, ell, self.sigma_c, self.ell_c, self.tau)


def se_kernel(sq_dist, sigma: float, ell: float):
    """sigma^2 * exp(-d^2 / (2 ell^2)) on precomputed squared distances."""
    sq_dist = np.asarray(sq_dist, dtype=float)
    return sigma * sigma * np.exp(-sq_dist / (2.0 * ell * ell))


def spatial_kernel(x, z, sigma: float, ell: float):
    """Spatial squared-exponential kernel between points (or point stacks)."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    d2 = np.sum((x - z) ** 2, axis=-1)
    return se_kernel(d2, sigma, ell)


def color_kernel(a, b, sigma_c: float, ell_c: float):
    """Color kernel on 5-dim labels, Euclidean metric in label space."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d2 = np.sum((a - b) ** 2, axis=-1)
    return se_kernel(d2, sigma_c, ell_c)


def support_radius(ell: float, tau: float) -> float:
    """Distance at which the unit-variance spatial kernel drops to tau.

    Pairs farther apart than this are dropped during sparsification.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    return ell * np.sqrt(-2.0 * np.log(tau))
