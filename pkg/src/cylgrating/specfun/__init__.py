"""Real-argument cylinder functions J_n, Y_n, H^(1)_n and first derivatives.

Integer orders with |n| <= 256 and arguments in (0, 1e4] are supported;
anything outside raises :class:`~cylgrating.errors.DomainError` rather than
degrading silently.  Negative orders go through the parity identity
f_{-n} = (-1)^n f_n, derivatives through f_n' = (f_{n-1} - f_{n+1})/2.

All functions are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._engine import j_ladder, jy_ladders, y_ladder
from ..errors import DomainError

__all__ = ["CylPair", "bessel_j", "bessel_y", "hankel1", "cyl_pair",
           "MAX_ORDER", "MAX_ARGUMENT"]

MAX_ORDER = 256
MAX_ARGUMENT = 1.0e4


def _check_order(n) -> int:
    try:
        n = int(n)
    except (TypeError, ValueError):
        raise DomainError(f"order must be an integer, got {n!r}") from None
    if abs(n) > MAX_ORDER:
        raise DomainError(f"|n| = {abs(n)} beyond supported envelope {MAX_ORDER}")
    return n


def _check_x(x, allow_zero: bool = False) -> float:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise DomainError(f"argument must be finite, got {x!r}")
    if x < 0.0 or (x == 0.0 and not allow_zero):
        raise DomainError(f"argument must be positive, got {x!r}")
    if x > MAX_ARGUMENT:
        raise DomainError(f"x = {x:g} beyond supported envelope {MAX_ARGUMENT:g}")
    return x


def _parity(n: int) -> float:
    return -1.0 if n % 2 else 1.0


@dataclass(frozen=True)
class CylPair:
    """J_n, Y_n and their derivatives at one (n, x), mutually consistent.

    Satisfies the Wronskian j*yp - jp*y = 2/(pi*x) and the three-term
    recurrence to close to machine precision.
    """

    j: float
    y: float
    jp: float
    yp: float

    @property
    def h(self) -> complex:
        return complex(self.j, self.y)

    @property
    def hp(self) -> complex:
        return complex(self.jp, self.yp)


def bessel_j(n, x) -> float:
    """Bessel function of the first kind, integer order."""
    n = _check_order(n)
    x = _check_x(x, allow_zero=True)
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    sign = 1.0 if n >= 0 else _parity(n)
    return sign * float(j_ladder(abs(n), x)[abs(n)])


def bessel_y(n, x) -> float:
    """Bessel function of the second kind, integer order; x > 0 strictly."""
    n = _check_order(n)
    x = _check_x(x)
    sign = 1.0 if n >= 0 else _parity(n)
    return sign * float(y_ladder(abs(n), x)[abs(n)])


def hankel1(n, x) -> complex:
    """Hankel function of the first kind, H_n = J_n + i Y_n."""
    n = _check_order(n)
    x = _check_x(x)
    m = abs(n)
    sign = 1.0 if n >= 0 else _parity(n)
    return sign * complex(j_ladder(m, x)[m], y_ladder(m, x)[m])


def cyl_pair(n, x) -> CylPair:
    """J_n, Y_n, J_n', Y_n' bundled for one order and argument."""
    n = _check_order(n)
    x = _check_x(x)
    m = abs(n)
    jj, yy = jy_ladders(m + 1, x)
    if m == 0:
        jp = -jj[1]
        yp = -yy[1]
    else:
        jp = 0.5 * (jj[m - 1] - jj[m + 1])
        yp = 0.5 * (yy[m - 1] - yy[m + 1])
    sign = 1.0 if n >= 0 else _parity(n)
    return CylPair(j=sign * float(jj[m]), y=sign * float(yy[m]),
                   jp=sign * float(jp), yp=sign * float(yp))
