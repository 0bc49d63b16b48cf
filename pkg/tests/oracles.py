"""Independent brute-force oracles used only by the tests.

These are deliberately written from first principles (power series summed
with math.fsum, the integral representation sampled on a uniform grid, a
separately coded large-argument expansion) so they share no code path with
the package's recurrence engine.
"""

from __future__ import annotations

import math

import numpy as np

_EULER = 0.5772156649015329


def j_series(n: int, x: float) -> float:
    """J_n by its ascending power series, exactly summed term list.

    Reliable whenever the alternating terms do not dwarf the result: small
    x at any order, or any x with n >= x^2/4 (terms then decrease from the
    start).
    """
    n = abs(int(n))
    q = 0.25 * x * x
    term = 0.5 ** n * x ** n / math.factorial(n)
    terms = [term]
    for k in range(1, 600):
        term *= -q / (k * (n + k))
        terms.append(term)
        if abs(term) < 1e-20 * (abs(terms[0]) + 1e-280) and k > 5:
            break
    return math.fsum(terms)


def y_series(n: int, x: float) -> float:
    """Y_n by the ascending-series representation (log + finite + regular)."""
    n = abs(int(n))
    half = 0.5 * x
    q = half * half

    finite = [- (math.factorial(n - k - 1) / math.factorial(k)) * half ** (2 * k - n)
              for k in range(n)]

    harmonic = [0.0]
    for k in range(1, 650):
        harmonic.append(harmonic[-1] + 1.0 / k)

    regular = []
    term = half ** n / math.factorial(n)
    for k in range(0, 600):
        if k > 0:
            term *= -q / (k * (n + k))
        psi_sum = -2.0 * _EULER + harmonic[k] + harmonic[n + k]
        regular.append(term * psi_sum)
        if abs(term) < 1e-20 and k > 5:
            break
    return (math.fsum(finite) / math.pi
            + (2.0 / math.pi) * math.log(half) * j_series(n, x)
            - math.fsum(regular) / math.pi)


def j_quadrature(n: int, x: float) -> float:
    """J_n from the integral representation on a uniform full-period grid.

    The grid sum equals J_n plus aliases J_{n +- M}; M is chosen so the
    aliases sit far beyond the turning point and are below ~1e-17.
    """
    n = int(n)
    m = int(math.ceil(x + abs(n) + 60 + 8.0 * x ** (1.0 / 3.0)))
    theta = 2.0 * math.pi * np.arange(m) / m
    vals = np.cos(x * np.sin(theta) - n * theta)
    return math.fsum(vals.tolist()) / m


def y_quadrature(n: int, x: float) -> float:
    """Y_n from its oscillatory-plus-decaying integral representation.

    Gauss-Legendre on both pieces.  The oscillatory piece needs nodes in
    proportion to x; the decaying piece is integrated in the stretched
    variable u = x t so one node count covers every argument.  Keep
    n <= x/2 so the integrand has no representability spike.
    """
    n = abs(int(n))
    m1 = 300 + int(math.ceil(1.6 * x))
    nodes, weights = np.polynomial.legendre.leggauss(m1)
    t1 = 0.5 * math.pi * (nodes + 1.0)
    f1 = np.sin(x * np.sin(t1) - n * t1)
    part1 = 0.5 * math.pi * float(np.sum(weights * f1))

    tmax = 1.0
    while x * math.sinh(tmax) - n * tmax < 760.0:
        tmax += 0.25
    umax = x * tmax
    nodes2, weights2 = np.polynomial.legendre.leggauss(400)
    u = 0.5 * umax * (nodes2 + 1.0)
    t2 = u / x
    expo = -x * np.sinh(t2)
    f2 = np.exp(n * t2 + expo) + ((-1.0) ** n) * np.exp(-n * t2 + expo)
    part2 = 0.5 * umax * float(np.sum(weights2 * f2)) / x
    return (part1 - part2) / math.pi


def jy_asymptotic(n: int, x: float) -> tuple[float, float]:
    """Large-argument expansion, coded separately from the package's."""
    n = abs(int(n))
    mu = 4.0 * n * n
    p_terms = [1.0]
    q_terms = []
    c = 1.0
    for k in range(1, 60):
        c *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        target = q_terms if k % 2 else p_terms
        sign = 1.0 if (k % 4) in (0, 1) else -1.0
        target.append(sign * c)
        if abs(c) < 1e-19:
            break
    p = math.fsum(p_terms)
    q = math.fsum(q_terms)
    w = x - (2 * n + 1) * math.pi / 4.0
    com = math.sqrt(2.0 / (math.pi * x))
    return (com * (p * math.cos(w) - q * math.sin(w)),
            com * (p * math.sin(w) + q * math.cos(w)))


def bisect_root(f, lo: float, hi: float, tol: float = 1e-14) -> float:
    flo = f(lo)
    if flo == 0.0:
        return lo
    assert flo * f(hi) < 0.0, "bracket does not straddle a root"
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)
