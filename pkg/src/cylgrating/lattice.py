"""Schlömilch-type lattice sums of Hankel functions with phase factors.

The grating couples harmonics through

    I_n(beta) = sum_{p>=1} H^(1)_n(p beta) [ e^{+i p beta s} (-1)^n
                                            + e^{-i p beta s} ]

with beta = k_r d and s = sin(psi_i).  Terms decay only like p^{-1/2} with a
quasi-periodic phase, so each of the two phase sub-series is summed with an
iterated Aitken transformation applied to partial sums sampled at a stride
chosen so the sampled sequence is close to geometric (the stride maps the
per-term phase away from 1 on the unit circle).  A brute-force mode (direct
partial sums plus a summation-by-parts tail) is retained behind a flag as
the oracle.

The series diverges when beta (1 +- s) / 2pi hits an integer (a grating
order passing grazing); construction refuses to run closer to that line
than a configurable guard.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .cylinder import GratingConfig, derive_wavenumbers
from .errors import LatticeTableError, NonConvergenceError, WoodAnomalyError
from .specfun._asymptotic import modulus_series
from .specfun._engine import hankel1_span

__all__ = ["SchlomilchSum", "LatticeTable", "wood_margin", "schlomilch",
           "lattice_table"]

DEFAULT_GUARD = 1e-3
DEFAULT_MAX_TERMS = 200_000
_CHUNK = 1 << 15
_MAX_NODES = 48
_STRIDE_CAP = 2048
_MIN_TOL = 1e-10


class SchlomilchSum(NamedTuple):
    value: complex
    est_error: float   # relative to max(|value|, sub-series magnitudes)
    terms_used: int


def wood_margin(config: GratingConfig) -> float:
    """Distance of beta (1 +- sin psi_i) / 2pi from the nearest integer."""
    beta = derive_wavenumbers(config).kr * config.spacing_d
    s = config.sin_psi
    margin = math.inf
    for v in (beta * (1.0 + s) / (2.0 * math.pi),
              beta * (1.0 - s) / (2.0 * math.pi)):
        margin = min(margin, abs(v - round(v)))
    return margin


def _chunk_sum(n: int, beta: float, alpha: float, p_lo: int, p_hi: int) -> complex:
    """sum_{p=p_lo}^{p_hi} H_n(p beta) e^{i p alpha}, fixed-order evaluation."""
    total = 0.0 + 0.0j
    for lo in range(p_lo, p_hi + 1, _CHUNK):
        hi = min(lo + _CHUNK - 1, p_hi)
        p = np.arange(lo, hi + 1, dtype=float)
        h = hankel1_span(n, p * beta)
        total += complex(np.sum(h * np.exp(1j * (p * alpha))))
    return total


def _pick_stride(phase: float) -> int:
    """Smallest node stride M that puts the sampled phase far from 1.

    phase is arg(z) for the per-term factor z; the sampled sub-sequence has
    ratio z^M, and the Aitken table converges fastest when |1 - z^M| is
    large, i.e. |sin(M phase / 2)| well away from 0.
    """
    best_m, best_v = 1, abs(math.sin(0.5 * phase))
    for m in range(1, _STRIDE_CAP + 1):
        v = abs(math.sin(0.5 * m * phase))
        if v >= 0.60:
            return m
        if v > best_v:
            best_m, best_v = m, v
    return best_m


def _aitken(nodes: list[complex]) -> complex:
    """Iterated Aitken delta-squared extrapolation of a partial-sum sequence."""
    cur = list(nodes)
    val = cur[-1]
    while len(cur) >= 3:
        floor = 1e-16 * abs(cur[-1])
        if max(abs(b - a) for a, b in zip(cur, cur[1:])) <= floor:
            break  # sequence already at the noise floor; deeper columns amplify it
        nxt = []
        for s0, s1, s2 in zip(cur, cur[1:], cur[2:]):
            d1 = s1 - s0
            d2 = s2 - s1
            den = d2 - d1
            if abs(den) <= 1e-300:
                nxt.append(s2)
            else:
                nxt.append(s2 - d2 * d2 / den)
        cur = nxt
        val = cur[-1]
    return val


def _tail_bound(n: int, beta: float, phase: float, p_end: int) -> float:
    """Upper bound on |sum_{p>P}| from the Hankel envelope and oscillation."""
    env = math.sqrt(2.0 / (math.pi * (p_end + 1) * beta))
    return 2.2 * env / abs(1.0 - cmath.exp(1j * phase))


def _accelerated_subseries(n: int, beta: float, alpha: float, tol: float,
                           max_terms: int):
    """One phase sub-series sum_{p} H_n(p beta) e^{i p alpha}.

    Returns (value, est_abs, terms).  The error estimate is the difference
    between the last two transformed iterates, cross-checked against the
    analytic tail bound of the raw partial sums; if the transformation ever
    fails to beat that bound the raw sum is returned with the bound as its
    estimate.
    """
    phase = math.remainder(beta + alpha, 2.0 * math.pi)
    stride = _pick_stride(phase)
    head = max(24, int(math.ceil((n + 8.0) / beta)))

    total = _chunk_sum(n, beta, alpha, 1, min(head, max_terms))
    terms = min(head, max_terms)
    nodes: list[complex] = []
    prev_val: complex | None = None
    est = math.inf
    val = total

    while terms + stride <= max_terms:
        total += _chunk_sum(n, beta, alpha, terms + 1, terms + stride)
        terms += stride
        nodes.append(total)
        if len(nodes) >= 6 and len(nodes) % 2 == 0:
            val = _aitken(nodes)
            if prev_val is not None:
                est = abs(val - prev_val)
                if est <= tol * max(abs(val), 1e-300):
                    return val, est, terms
            prev_val = val
        if len(nodes) >= _MAX_NODES:
            nodes = nodes[1::2]
            stride *= 2

    bound = _tail_bound(n, beta, phase, terms)
    if bound < est:
        return total, bound, terms
    return val, est, terms


def _brute_subseries(n: int, beta: float, alpha: float, p_max: int):
    """Direct partial sum to p_max plus a summation-by-parts tail estimate."""
    total = _chunk_sum(n, beta, alpha, 1, p_max)

    z = cmath.exp(1j * (beta + alpha))
    u = 1.0 / (1.0 - z)
    p = np.arange(p_max + 1, p_max + 5, dtype=float)
    pp, qq = modulus_series(n, p * beta)
    # slowly varying part of the term: H_n(p beta) e^{i p alpha} = z^p h(p)
    h = (np.sqrt(2.0 / (math.pi * p * beta)) * (pp + 1j * qq)
         * cmath.exp(-1j * (2 * n + 1) * math.pi / 4.0))
    d1 = h[1] - h[0]
    d2 = h[2] - 2.0 * h[1] + h[0]
    d3 = h[3] - 3.0 * h[2] + 3.0 * h[1] - h[0]
    zp = cmath.exp(1j * ((p_max + 1) * (beta + alpha)))
    tail = zp * (h[0] * u + z * d1 * u * u + z * z * d2 * u ** 3)
    est = abs(zp * z ** 3 * d3 * u ** 4)
    return total + tail, est, p_max


def schlomilch(n: int, config: GratingConfig, tol: float = 1e-8, *,
               guard: float = DEFAULT_GUARD,
               max_terms: int = DEFAULT_MAX_TERMS,
               brute_force: bool = False,
               brute_terms: int = 1_000_000) -> SchlomilchSum:
    """Lattice sum I_n(k_r d) to relative tolerance tol.

    The two phase sub-series are evaluated separately and recombined as
    (-1)^n S+ + S-.  est_error is relative to the largest of |I_n| and the
    sub-series magnitudes (the sub-series scale matters when the
    recombination cancels, e.g. odd n at sin psi_i = 0).

    Raises WoodAnomalyError when the convergence margin is below ``guard``
    and NonConvergenceError when the term budget cannot reach ``tol``.
    """
    if tol < _MIN_TOL:
        raise NonConvergenceError(
            f"tolerance {tol:g} below the supported floor {_MIN_TOL:g}")
    margin = wood_margin(config)
    if margin <= guard:
        raise WoodAnomalyError(
            f"Wood anomaly: grating-order margin {margin:.3e} <= guard {guard:.3e}")

    m = abs(n)
    sign = -1.0 if (n < 0 and m % 2) else 1.0

    beta = derive_wavenumbers(config).kr * config.spacing_d
    s = config.sin_psi
    alpha = beta * s

    if brute_force:
        runner = lambda a: _brute_subseries(m, beta, a, brute_terms)  # noqa: E731
    else:
        runner = lambda a: _accelerated_subseries(m, beta, a, 0.5 * tol, max_terms)  # noqa: E731

    s_plus, est_p, t_p = runner(alpha)
    if alpha == 0.0:
        # sin psi_i = 0: both sub-series are identical term by term
        s_minus, est_m, t_m = s_plus, est_p, t_p
    else:
        s_minus, est_m, t_m = runner(-alpha)

    parity = -1.0 if m % 2 else 1.0
    value = parity * s_plus + s_minus
    scale = max(abs(value), abs(s_plus), abs(s_minus), 1e-300)
    est = (est_p + est_m) / scale
    terms = t_p + (0 if alpha == 0.0 else t_m)
    if not brute_force and est > tol:
        raise NonConvergenceError(
            f"lattice sum order {n}: est_error {est:.3e} > tol {tol:g} "
            f"after {terms} terms", est_error=est, terms_used=terms)
    return SchlomilchSum(value=sign * value, est_error=est, terms_used=terms)


@dataclass(frozen=True)
class LatticeTable:
    """I_n over all orders |n| <= max_order plus convergence metadata.

    Negative orders are filled from the parity identity I_{-n} = (-1)^n I_n
    (computed once, mirrored).
    """

    max_order: int
    values: np.ndarray      # complex, index n + max_order
    est_error: np.ndarray
    terms_used: np.ndarray
    wood_margin: float

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.max_order, self.max_order + 1)

    def value(self, n: int) -> complex:
        if abs(n) > self.max_order:
            raise IndexError(f"order {n} outside table |n| <= {self.max_order}")
        return complex(self.values[n + self.max_order])

    def difference_matrix(self, N: int) -> np.ndarray:
        """Matrix L[i, j] = I_{n_i - n_j} for n_i, n_j in -N..N."""
        return self.difference_block(N, N)

    def difference_block(self, rows: int, cols: int) -> np.ndarray:
        """Rectangular block L[i, j] = I_{n_i - m_j}, n in -rows..rows,
        m in -cols..cols (the field synthesis feeds more output harmonics
        than the solver carries)."""
        if rows + cols > self.max_order:
            raise IndexError(
                f"difference block needs orders up to {rows + cols}, "
                f"table holds {self.max_order}")
        ni = np.arange(-rows, rows + 1)
        mj = np.arange(-cols, cols + 1)
        return self.values[(ni[:, None] - mj[None, :]) + self.max_order]


def lattice_table(N: int, config: GratingConfig, tol: float = 1e-8, *,
                  guard: float = DEFAULT_GUARD,
                  max_terms: int = DEFAULT_MAX_TERMS,
                  span: int | None = None) -> LatticeTable:
    """Build I_n for all |n| <= 2N (the solver needs order differences).

    ``span`` widens the order range beyond the default 2N; the field
    synthesis asks for extra output harmonics when evaluating close to the
    neighbouring cylinder.
    """
    margin = wood_margin(config)
    if margin <= guard:
        raise WoodAnomalyError(
            f"Wood anomaly: grating-order margin {margin:.3e} <= guard {guard:.3e}")
    span = max(2 * N, span if span is not None else 0)
    values = np.zeros(2 * span + 1, dtype=complex)
    est = np.zeros(2 * span + 1)
    terms = np.zeros(2 * span + 1, dtype=int)
    failed: list[int] = []
    for n in range(0, span + 1):
        try:
            res = schlomilch(n, config, tol, guard=guard, max_terms=max_terms)
        except NonConvergenceError:
            failed.append(n)
            continue
        parity = -1.0 if n % 2 else 1.0
        values[span + n] = res.value
        values[span - n] = parity * res.value
        est[span + n] = est[span - n] = res.est_error
        terms[span + n] = terms[span - n] = res.terms_used
    if failed:
        raise LatticeTableError(
            f"lattice table failed to converge at orders {failed}", failed)
    return LatticeTable(max_order=span, values=values, est_error=est,
                        terms_used=terms, wood_margin=margin)
