"""Sensitivity of the spatial kernel to its length-scale.

The normalized kernel g(s) = exp(-1/(2 s^2)), with s the ratio of the
length-scale to the point distance, has an essential singularity at s = 0:
its Taylor series there is identically zero.  Expanding about s = infinity
instead gives the asymptotic series

    g(s) ~ 1 - 1/2 s^-2 + 1/8 s^-4 - 1/48 s^-6 + ...

which is accurate for close point pairs but diverges as s -> 0.  Requiring
a bounded truncation error therefore induces a minimum s, i.e. a minimum
kernel value: points below that kernel value can be discarded.  ``cutoff``
turns an (expansion order, error tolerance) pair into that sparsification
threshold, expressed as a fraction of the signal variance.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

_S_MAX = 100.0       # search range for the cutoff
_GRID_POINTS = 20000


class NotAchievable(ValueError):
    """Requested tolerance cannot be met at this order within the search range."""


@dataclass(frozen=True)
class CutoffEntry:
    """Cutoff induced by truncating the large-s expansion.

    order:     highest retained power of 1/s (even)
    tolerance: uniform error bound on [s_cut, inf)
    s_cut:     minimum admissible normalized distance ratio
    k_cut:     g(s_cut); pairs with kernel value below k_cut * sigma^2 are
               outside the validity region and get dropped
    """

    order: int
    tolerance: float
    s_cut: float
    k_cut: float


def g(s):
    """Normalized kernel exp(-1/(2 s^2)); g(0) := 0 by the limit.

    Underflows to exact 0 for tiny s without raising.
    """
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    nz = s != 0.0
    with np.errstate(under="ignore", divide="ignore"):
        out[nz] = np.exp(-0.5 / (s[nz] * s[nz]))
    if out.ndim == 0:
        return float(out)
    return out


def laurent_approx(s, order: int):
    """Partial sum of the large-s expansion through the s^-order term.

    The coefficients are those of exp(-x/2) at x = s^-2:
    sum_{m=0}^{order/2} (-1)^m / (2^m m!) * s^(-2m).
    """
    if order < 2 or order % 2 != 0:
        raise ValueError("order must be an even integer >= 2")
    s = np.asarray(s, dtype=float)
    total = np.zeros_like(s)
    for m in range(order // 2 + 1):
        total += (-0.5) ** m / factorial(m) * s ** (-2 * m)
    if total.ndim == 0:
        return float(total)
    return total


def _tail_error(s, order: int):
    return np.abs(g(s) - laurent_approx(s, order))


def cutoff(order: int, tolerance: float) -> CutoffEntry:
    """Smallest s_cut with |g - approx| <= tolerance for every s >= s_cut.

    Scans a dense grid to locate the last violation, then bisects; the
    uniform (tail) criterion is re-verified on the grid.
    """
    if not 0.0 < tolerance < 1.0:
        raise ValueError("tolerance must lie in (0, 1)")
    grid = np.linspace(1e-3, _S_MAX, _GRID_POINTS)
    err = _tail_error(grid, order)
    if err[-1] > tolerance:
        raise NotAchievable(
            f"order {order} cannot reach tolerance {tolerance} for s <= {_S_MAX}")
    violations = np.nonzero(err > tolerance)[0]
    if violations.size == 0:
        s_cut = float(grid[0])
    else:
        lo, hi = grid[violations[-1]], grid[violations[-1] + 1]
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if _tail_error(np.asarray(mid), order) > tolerance:
                lo = mid
            else:
                hi = mid
        s_cut = float(hi)
    # Uniform-tail check: the error must stay within tolerance beyond s_cut.
    tail = np.linspace(s_cut, _S_MAX, 4000)
    if np.any(_tail_error(tail, order) > tolerance * (1.0 + 1e-9)):
        raise NotAchievable(
            f"error is not uniformly bounded beyond s={s_cut} at order {order}")
    return CutoffEntry(order=order, tolerance=tolerance,
                       s_cut=s_cut, k_cut=float(g(np.asarray(s_cut))))


def taylor_at_zero(order: int) -> list[float]:
    """Taylor coefficients of g about s = 0: identically zero.

    Every derivative of g is a rational function times g, and g beats any
    rational growth as s -> 0+, so all coefficients vanish even though g
    itself does not.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    return [0.0] * (order + 1)


def cutoff_table(orders, tolerances) -> list[CutoffEntry]:
    """CutoffEntry rows for every (order, tolerance) combination."""
    return [cutoff(o, t) for o in orders for t in tolerances]
