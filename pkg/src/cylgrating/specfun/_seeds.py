"""Order-0 and order-1 seed values for the recurrence engine.

For x <= 18 the ascending power series are summed in double-double
arithmetic.  The alternating terms grow to ~1e6 before cancelling, which
would cost up to ten digits in plain doubles; carrying ~32 digits through
the summation keeps the seeds accurate to a few ulp.  The argument of the
series, q = x^2/4, is formed exactly (exact product split, exact /4), so no
correlated argument error enters either.

Above 18 the large-argument expansion is already below 1e-15 relative and
takes over.
"""

from __future__ import annotations

import math

import numpy as np

from ._asymptotic import jy_large_x
from ._ddreal import dd, dd_add, dd_div_f, dd_mul, dd_neg, to_float, two_prod
from .._constants import EULER_GAMMA

_SERIES_CUT = 18.0
_MAX_K = 140
_TWO_OVER_PI = 2.0 / math.pi

# harmonic numbers H_0..H_{MAX_K+1} in double-double
_HARMONIC: list[tuple[float, float]] = [(0.0, 0.0)]
for _k in range(1, _MAX_K + 2):
    _HARMONIC.append(dd_add(_HARMONIC[-1], dd_div_f(dd(1.0), float(_k))))


def _series_jy01(x: np.ndarray):
    """J0, J1, Y0, Y1 by double-double series; x must satisfy 0 < x <= 18."""
    qh, ql = two_prod(x, x)
    q = (0.25 * qh, 0.25 * ql)  # exact: x*x split exactly, /4 exact

    one = dd(np.ones_like(x))
    half_x = dd(0.5 * x)

    t0 = one                      # (-1)^k q^k/(k!)^2
    s_j0 = t0
    t1 = half_x                   # (x/2)(-1)^k q^k/(k!(k+1)!)
    s_j1 = t1
    s_y0 = dd(np.zeros_like(x))   # sum of H_k (-1)^{k+1} q^k/(k!)^2
    v = one                       # (-1)^k q^k/(k!(k+1)!)
    s_y1 = dd_mul(v, _HARMONIC[1])  # k = 0 term carries H_0 + H_1 = 1

    for k in range(1, _MAX_K + 1):
        t0 = dd_neg(dd_div_f(dd_mul(t0, q), float(k) * float(k)))
        s_j0 = dd_add(s_j0, t0)
        s_y0 = dd_add(s_y0, dd_mul(dd_neg(t0), _HARMONIC[k]))

        t1 = dd_neg(dd_div_f(dd_mul(t1, q), float(k) * float(k + 1)))
        s_j1 = dd_add(s_j1, t1)

        v = dd_neg(dd_div_f(dd_mul(v, q), float(k) * float(k + 1)))
        s_y1 = dd_add(s_y1, dd_mul(v, dd_add(_HARMONIC[k], _HARMONIC[k + 1])))

        if np.all(np.abs(t0[0]) <= 1e-38 * (np.abs(s_j0[0]) + 1.0)):
            break

    j0 = to_float(s_j0)
    j1 = to_float(s_j1)
    lg = np.log(0.5 * x) + EULER_GAMMA
    y0 = _TWO_OVER_PI * (lg * j0 + to_float(s_y0))
    y1 = _TWO_OVER_PI * (lg * j1) - _TWO_OVER_PI / x - (0.5 * x / math.pi) * to_float(s_y1)
    return j0, j1, y0, y1


def seed_jy(x: np.ndarray):
    """Seed values (J0, J1, Y0, Y1) for an array of positive arguments."""
    x = np.asarray(x, dtype=float)
    j0 = np.empty_like(x)
    j1 = np.empty_like(x)
    y0 = np.empty_like(x)
    y1 = np.empty_like(x)

    small = x <= _SERIES_CUT
    if small.any():
        xs = x[small]
        j0[small], j1[small], y0[small], y1[small] = _series_jy01(xs)
    big = ~small
    if big.any():
        xb = x[big]
        j0[big], y0[big] = jy_large_x(0, xb)
        j1[big], y1[big] = jy_large_x(1, xb)
    return j0, j1, y0, y1
