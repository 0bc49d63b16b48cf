"""Minimal double-double arithmetic for cancellation-prone series.

An extended-precision real is an unevaluated pair ``(hi, lo)`` of doubles
with ``|lo| <= ulp(hi)/2``; the pair carries ~32 significant digits.  Only
the operations the Bessel seed series need are implemented.  Everything
works elementwise on numpy arrays as well as on Python floats, which is how
the vectorized seed evaluation reuses this module.

No FMA is assumed: products are split with Dekker's algorithm, which is
exact for operands below ~1e292 (far above anything the series produce).
"""

from __future__ import annotations

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    t = s - a
    return s, (a - (s - t)) + (b - t)


def fast_two_sum(a, b):
    # valid when |a| >= |b|
    s = a + b
    return s, b - (s - a)


def two_prod(a, b):
    p = a * b
    ta = _SPLITTER * a
    ahi = ta - (ta - a)
    alo = a - ahi
    tb = _SPLITTER * b
    bhi = tb - (tb - b)
    blo = b - bhi
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


def dd(a):
    """Promote a double (or array) to a double-double pair."""
    return a, a * 0.0


def dd_add(x, y):
    s, e = two_sum(x[0], y[0])
    e = e + (x[1] + y[1])
    return fast_two_sum(s, e)


def dd_mul(x, y):
    p, e = two_prod(x[0], y[0])
    e = e + (x[0] * y[1] + x[1] * y[0])
    return fast_two_sum(p, e)


def dd_mul_f(x, f):
    p, e = two_prod(x[0], f)
    e = e + x[1] * f
    return fast_two_sum(p, e)


def dd_div_f(x, f):
    q1 = x[0] / f
    p, e = two_prod(q1, f)
    s, t = two_sum(x[0], -p)
    q2 = (s + ((t + x[1]) - e)) / f
    return fast_two_sum(q1, q2)


def dd_neg(x):
    return -x[0], -x[1]


def to_float(x):
    return x[0] + x[1]
