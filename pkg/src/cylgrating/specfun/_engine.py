"""Recurrence engine: whole ladders of J_n / Y_n from the order-0/1 seeds.

Direction of the three-term recurrence follows stability:

* Y_n grows with n, so upward recurrence from (Y0, Y1) is stable always.
* J_n is the minimal solution above the turning point n ~ x.  Upward from
  (J0, J1) is used only while the requested top order stays below x;
  otherwise the whole ladder comes from Miller's downward recurrence with
  the even-order normalization  J_0 + 2 J_2 + 2 J_4 + ... = 1.

The vectorized ``hankel1_span`` serves the lattice-sum module, which needs
H_n at one fixed order over many arguments p*beta; its arguments may exceed
the public 1e4 envelope, in which case the large-argument expansion is used.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ._asymptotic import asym_min_x, hankel1_large_x
from ._seeds import seed_jy
from ..errors import RangeOverflowError

_MILLER_EXTRA = 50
_RESCALE_LIMIT = 1e280
_RESCALE = 1e-280


@lru_cache(maxsize=4096)
def _seed_scalar(x: float):
    # pure in x; the per-harmonic sweeps hit the same one or two arguments
    # hundreds of times
    j0, j1, y0, y1 = seed_jy(np.array([x]))
    return float(j0[0]), float(j1[0]), float(y0[0]), float(y1[0])


def y_ladder(nmax: int, x: float) -> np.ndarray:
    """Y_0(x) .. Y_nmax(x) by upward recurrence."""
    j0, j1, y0, y1 = _seed_scalar(x)
    out = np.empty(nmax + 1)
    out[0] = y0
    if nmax >= 1:
        out[1] = y1
    yp, y = y0, y1
    for k in range(1, nmax):
        # plain floats: C doubles overflow to inf without warnings
        yp, y = y, (2.0 * k / x) * y - yp
        out[k + 1] = y
    if not np.isfinite(out[nmax]):
        raise RangeOverflowError(
            f"Y_{nmax}({x:g}) exceeds double range")
    return out


def j_ladder(nmax: int, x: float) -> np.ndarray:
    """J_0(x) .. J_nmax(x); direction chosen by the n ~ x turning point."""
    if nmax + 2 <= x:
        j0, j1, _, _ = _seed_scalar(x)
        out = np.empty(nmax + 1)
        out[0] = j0
        if nmax >= 1:
            out[1] = j1
        for k in range(1, nmax):
            out[k + 1] = (2.0 * k / x) * out[k] - out[k - 1]
        return out

    start = max(nmax, int(math.ceil(x))) + _MILLER_EXTRA
    out = np.zeros(nmax + 1)
    fp = 0.0
    f = 1e-30
    norm = 0.0
    for k in range(start, 0, -1):
        fm = (2.0 * k / x) * f - fp
        fp = f
        f = fm
        m = k - 1
        if m <= nmax:
            out[m] = f
        if m >= 2 and m % 2 == 0:
            norm += 2.0 * f
        if abs(f) > _RESCALE_LIMIT:
            f *= _RESCALE
            fp *= _RESCALE
            norm *= _RESCALE
            if m <= nmax:
                out[m:] *= _RESCALE
    norm += f  # f is now the unnormalized J_0
    if norm == 0.0 or not math.isfinite(norm):
        raise RangeOverflowError(
            f"Miller normalization failed at order {nmax}, x={x:g}")
    out /= norm
    return out


def jy_ladders(nmax: int, x: float) -> tuple[np.ndarray, np.ndarray]:
    return j_ladder(nmax, x), y_ladder(nmax, x)


def _hankel1_upward(n: int, x: np.ndarray) -> np.ndarray:
    """Vectorized H_n for x > n + 2 (upward recurrence is stable there)."""
    j0, j1, y0, y1 = seed_jy(x)
    if n == 0:
        return j0 + 1j * y0
    jp, j = j0, j1
    yp, y = y0, y1
    for k in range(1, n):
        fac = 2.0 * k / x
        jp, j = j, fac * j - jp
        yp, y = y, fac * y - yp
    return j + 1j * y


def hankel1_span(n: int, x: np.ndarray) -> np.ndarray:
    """H^(1)_n over an array of positive arguments (order n >= 0).

    Internal evaluation for the lattice sums; the argument range is not
    capped at the public envelope.  Elements are routed by size: large-x
    expansion, vectorized upward recurrence, or the scalar ladders for the
    few arguments below the turning point.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape, dtype=complex)

    big = x >= asym_min_x(n)
    if big.any():
        out[big] = hankel1_large_x(n, x[big])
    mid = ~big & (x > n + 2.0)
    if mid.any():
        out[mid] = _hankel1_upward(n, x[mid])
    rest = ~big & ~mid
    if rest.any():
        for i in np.flatnonzero(rest):
            xi = float(x[i])
            out[i] = j_ladder(n, xi)[n] + 1j * y_ladder(n, xi)[n]
    return out
