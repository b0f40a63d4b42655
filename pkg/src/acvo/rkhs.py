"""Point clouds as functions in an RKHS: pair construction, the kernelized
inner product, and the squared-distance cost between two colored clouds.

A cloud with labels induces a function f = sum_i label_i * k(., x_i); the
inner product of two such functions reduces to a double sum of spatial
kernel values weighted by color-kernel coefficients.  Pair sums are
sparsified to pairs within the kernel support radius, found with a KD-tree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import lie
from .kernels import KernelParams, color_kernel, se_kernel, support_radius


class EmptyPairSet(RuntimeError):
    """No point pair survived sparsification (clouds too far apart or the
    length-scale is too small)."""


@dataclass(frozen=True)
class ColoredCloud:
    """3D points [m] with per-point 5-dim color-space labels."""

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=float)
        lab = np.ascontiguousarray(self.labels, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError("points must have shape (n, 3)")
        if lab.ndim != 2 or lab.shape[0] != pts.shape[0]:
            raise ValueError("labels must have one row per point")
        if pts.shape[0] == 0:
            raise ValueError("cloud must be non-empty")
        if not (np.isfinite(pts).all() and np.isfinite(lab).all()):
            raise ValueError("cloud entries must be finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", lab)

    def __len__(self) -> int:
        return self.points.shape[0]

    def transformed(self, h: lie.Pose) -> "ColoredCloud":
        return ColoredCloud(lie.apply(h, self.points), self.labels)


@dataclass(frozen=True)
class PairSet:
    """Sparsified (i, j) pairs with cached kernel values.

    i indexes the first cloud, j the second; k holds the spatial kernel
    values at ``ell_used`` and c the color-kernel coefficients.  Entries are
    sorted by (i, j), giving every reduction a fixed summation order.
    """

    i: np.ndarray
    j: np.ndarray
    k: np.ndarray
    c: np.ndarray
    ell_used: float

    def __len__(self) -> int:
        return self.i.shape[0]


def build_pairs(
    X: ColoredCloud,
    Z: ColoredCloud,
    params: KernelParams,
    tree: cKDTree | None = None,
) -> PairSet:
    """All cross pairs within the sparsification radius.

    Z is expected to be already transformed when evaluating at a pose.
    Equivalent to the brute-force double loop with the kernel threshold,
    but uses a KD-tree over X so the expected cost is O(n * m_local).
    A prebuilt tree over X.points may be passed to amortize construction.
    """
    radius = support_radius(params.ell, params.tau)
    if tree is None:
        tree = cKDTree(X.points)
    neighbor_lists = tree.query_ball_point(Z.points, r=radius)

    ii, jj = [], []
    for j, neighbors in enumerate(neighbor_lists):
        if neighbors:
            ii.extend(neighbors)
            jj.extend([j] * len(neighbors))
    if not ii:
        raise EmptyPairSet(
            f"no pairs within radius {radius:.4f} m (ell={params.ell:.4f})"
        )

    i = np.asarray(ii, dtype=np.intp)
    j = np.asarray(jj, dtype=np.intp)
    order = np.lexsort((j, i))
    i, j = i[order], j[order]

    d2 = np.sum((X.points[i] - Z.points[j]) ** 2, axis=1)
    k = se_kernel(d2, params.sigma, params.ell)
    c = color_kernel(X.labels[i], Z.labels[j], params.sigma_c, params.ell_c)
    return PairSet(i, j, k, c, params.ell)


def inner_product(pairs: PairSet) -> float:
    """<f_X, f_Z> over the sparsified pair set; this is the registration
    objective F(h) when the second cloud was transformed by h."""
    return float(np.sum(pairs.c * pairs.k))


def squared_norm(X: ColoredCloud, params: KernelParams) -> float:
    """||f_X||^2 via the self-pair path (diagonal included)."""
    return inner_product(build_pairs(X, X, params))


def cost(X: ColoredCloud, Z: ColoredCloud, h: lie.Pose, params: KernelParams) -> float:
    """J(h) = ||f_X||^2 + ||f_Z||^2 - 2 <f_X, h.f_Z>.

    Non-negative up to sparsification truncation.  The Z self-term is
    invariant under h, so it is evaluated on the untransformed cloud.
    """
    cross = build_pairs(X, Z.transformed(h), params)
    return squared_norm(X, params) + squared_norm(Z, params) - 2.0 * inner_product(cross)
