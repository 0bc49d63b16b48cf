"""Isolated dielectric circular cylinder at oblique incidence.

Geometry: identical cylinders of radius a parallel to the z axis, centres
on the y axis with spacing d.  A plane wave arrives tilted by theta_i from
the z axis (theta_i = pi/2 is normal incidence) with in-plane angle phi_i
from the x axis; psi_i = pi + phi_i.  Time convention e^{-i omega t} is
suppressed throughout, outgoing waves carry Hankel functions of the first
kind.  The convention flips some signs relative to e^{+i omega t}
treatments of the same problem.

This module produces the per-harmonic normalized 2x2 single-scattering
matrix with rows (E, H) and columns (TM, TE).  Two independent evaluation
routes are provided: ``scatter_matrix`` assembles the matrix from the
individual building blocks (the production path), while ``wait_matrix``
evaluates the classical closed forms for the same quantities and exists to
cross-check the first route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._constants import ETA_0, XI_0
from .errors import ConfigError, EvanescentInteriorError, ResonanceError
from .specfun import CylPair, cyl_pair
from .specfun._engine import j_ladder

__all__ = [
    "GratingConfig", "Wavenumbers", "CylinderBlocks", "SingleScatterMatrix",
    "SingleScatterTable", "derive_wavenumbers", "coupling_factor", "blocks",
    "scatter_matrix", "wait_matrix", "dimensional_scatter", "build_scatter_table",
]

_SINGULARITY_RTOL = 1e-13
_COS_SNAP = 1e-14


def _cos_theta(theta_i: float) -> float:
    """cos(theta_i), snapped to exactly 0 at normal incidence.

    math.cos(pi/2) is ~6e-17, not 0; the snap keeps the analytically exact
    decoupling (F = 0, k_z = 0) exact in floating point as well.
    """
    c = math.cos(theta_i)
    return 0.0 if abs(c) < _COS_SNAP else c


@dataclass(frozen=True)
class GratingConfig:
    """Physical problem statement: geometry, material, incidence, amplitudes.

    Angles are radians here; the CLI converts from degrees.  e0v is the TM
    (vertically polarized) incident amplitude in V/m, h0v the TE amplitude
    in A/m.
    """

    radius_a: float
    spacing_d: float
    eps_r: float
    mu_r: float
    k0: float
    theta_i: float
    phi_i: float = 0.0
    e0v: float = 1.0
    h0v: float = 1.0

    def __post_init__(self):
        for name in ("radius_a", "spacing_d", "eps_r", "mu_r", "k0",
                     "theta_i", "phi_i", "e0v", "h0v"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ConfigError(f"{name} must be a finite number, got {v!r}")
        if self.radius_a <= 0.0:
            raise ConfigError(f"radius_a must be positive, got {self.radius_a}")
        if self.spacing_d <= 2.0 * self.radius_a:
            raise ConfigError(
                "spacing_d must exceed 2*radius_a (non-overlapping cylinders): "
                f"d = {self.spacing_d}, 2a = {2.0 * self.radius_a}")
        if self.k0 <= 0.0:
            raise ConfigError(f"k0 must be positive, got {self.k0}")
        if self.eps_r <= 0.0 or self.mu_r <= 0.0:
            raise ConfigError("eps_r and mu_r must be positive (lossless dielectric)")
        if not (0.0 < self.theta_i <= math.pi / 2.0):
            raise ConfigError(
                f"theta_i must lie in (0, pi/2], got {self.theta_i}")
        ct = _cos_theta(self.theta_i)
        if self.eps_r * self.mu_r <= ct * ct:
            raise EvanescentInteriorError(
                "eps_r*mu_r <= cos^2(theta_i): interior wave evanescent "
                f"(eps_r*mu_r = {self.eps_r * self.mu_r}, cos^2 = {ct * ct})")

    @property
    def psi_i(self) -> float:
        return math.pi + self.phi_i

    @property
    def sin_psi(self) -> float:
        # sin(pi + phi) = -sin(phi); this form avoids the rounding of pi and
        # keeps sin_psi exactly 0 for phi_i = 0.
        return -math.sin(self.phi_i)


@dataclass(frozen=True)
class Wavenumbers:
    """Free-space, transverse, axial and interior-transverse wavenumbers."""

    k0: float
    kr: float
    kz: float
    k1: float


def derive_wavenumbers(config: GratingConfig) -> Wavenumbers:
    """k_r = k0 sin(theta), k_z = k0 cos(theta), k1 = k0 sqrt(eps mu - cos^2)."""
    st = math.sin(config.theta_i)
    ct = _cos_theta(config.theta_i)
    em = config.eps_r * config.mu_r
    if em <= ct * ct:
        raise EvanescentInteriorError(
            "eps_r*mu_r <= cos^2(theta_i): interior wave evanescent")
    if em == 1.0:
        # zero contrast: k1 equals kr identically; assign (not recompute) so
        # downstream cancellations are exact
        k1 = config.k0 * st
    else:
        k1 = config.k0 * math.sqrt(em - ct * ct)
    return Wavenumbers(k0=config.k0, kr=config.k0 * st, kz=config.k0 * ct, k1=k1)


def coupling_factor(config: GratingConfig) -> float:
    """TM/TE cross-coupling constant (mu eps - 1) cos(theta) / (mu eps - cos^2)."""
    ct = _cos_theta(config.theta_i)
    em = config.eps_r * config.mu_r
    return (em - 1.0) * ct / (em - ct * ct)


@dataclass(frozen=True)
class CylinderBlocks:
    """Per-harmonic building blocks of the single-scattering matrix."""

    order: int
    c: complex          # J_n(k_r a) / H_n(k_r a)
    a_eps: complex      # Wronskian-quotient block, zeta = eps_r
    a_mu: complex       # Wronskian-quotient block, zeta = mu_r
    b_eps: complex      # cross block carrying the impedance
    b_mu: complex       # cross block carrying the admittance
    coupling: float     # the cross-coupling constant
    eta0: float = ETA_0
    xi0: float = XI_0


def _radial_values(n: int, config: GratingConfig):
    """Signed-order J/H values and derivatives at k_r a and k_1 a."""
    wn = derive_wavenumbers(config)
    x = wn.kr * config.radius_a
    y = wn.k1 * config.radius_a
    m = abs(n)
    px = cyl_pair(m, x)
    jl = j_ladder(m + 1, y)
    jy = float(jl[m])
    jyp = -float(jl[1]) if m == 0 else 0.5 * float(jl[m - 1] - jl[m + 1])
    if n < 0 and m % 2:
        # parity f_{-n} = (-1)^n f_n, same factor on the derivative
        px = CylPair(j=-px.j, y=-px.y, jp=-px.jp, yp=-px.yp)
        jy, jyp = -jy, -jyp
    return wn, x, y, px, jy, jyp


def blocks(n: int, config: GratingConfig) -> CylinderBlocks:
    """Building blocks c_n, a_n, b_n of the per-harmonic 2x2 matrix."""
    wn, x, y, px, jy, jyp = _radial_values(n, config)
    h = px.h
    hp = px.hp
    ratio = wn.kr / wn.k1

    w_jh_eps = jy * hp - config.eps_r * ratio * jyp * h
    w_jh_mu = jy * hp - config.mu_r * ratio * jyp * h
    scale_eps = abs(jy * hp) + abs(config.eps_r * ratio * jyp * h)
    scale_mu = abs(jy * hp) + abs(config.mu_r * ratio * jyp * h)
    if abs(w_jh_eps) < _SINGULARITY_RTOL * scale_eps:
        raise ResonanceError(
            f"J/H cross-Wronskian (eps branch) vanishes at n={n}: resonance")
    if abs(w_jh_mu) < _SINGULARITY_RTOL * scale_mu:
        raise ResonanceError(
            f"J/H cross-Wronskian (mu branch) vanishes at n={n}: resonance")

    w_jj_eps = jy * px.jp - config.eps_r * ratio * jyp * px.j
    w_jj_mu = jy * px.jp - config.mu_r * ratio * jyp * px.j

    f = coupling_factor(config)
    nf = n * f / x
    b_eps = 1j * XI_0 * nf * (jy * h) / w_jh_eps
    b_mu = 1j * ETA_0 * nf * (jy * h) / w_jh_mu

    return CylinderBlocks(
        order=n,
        c=px.j / h,
        a_eps=w_jj_eps / w_jh_eps,
        a_mu=w_jj_mu / w_jh_mu,
        b_eps=b_eps,
        b_mu=b_mu,
        coupling=f,
    )


@dataclass(frozen=True)
class SingleScatterMatrix:
    """Normalized 2x2 single-scattering matrix, rows (E, H), cols (TM, TE)."""

    order: int
    matrix: np.ndarray

    @property
    def e_tm(self) -> complex:
        return self.matrix[0, 0]

    @property
    def e_te(self) -> complex:
        return self.matrix[0, 1]

    @property
    def h_tm(self) -> complex:
        return self.matrix[1, 0]

    @property
    def h_te(self) -> complex:
        return self.matrix[1, 1]


def scatter_matrix(n: int, config: GratingConfig) -> SingleScatterMatrix:
    """Production path: assemble the normalized matrix from the blocks.

    Layout: [[e_tm, e_te], [h_tm, h_te]] where the columns give the response
    to unit-normalized TM / TE excitation and the rows are the scattered
    E_z / H_z harmonics.
    """
    blk = blocks(n, config)
    p = blk.b_eps * blk.b_mu
    denom = 1.0 + p
    if abs(denom) < _SINGULARITY_RTOL * max(1.0, abs(p)):
        raise ResonanceError(f"1 + b_eps*b_mu vanishes at n={n}: resonance")

    gamma_em = -(blk.a_eps + p * blk.c) / denom
    gamma_me = -(blk.a_mu + p * blk.c) / denom
    cross_em = (blk.b_mu * (blk.a_eps - blk.c)) / denom
    cross_me = (blk.b_eps * (blk.a_mu - blk.c)) / denom

    m = np.array([[gamma_em, -cross_me],
                  [cross_em, gamma_me]], dtype=complex)
    return SingleScatterMatrix(order=n, matrix=m)


def wait_matrix(n: int, config: GratingConfig) -> SingleScatterMatrix:
    """Independent verification path: the classical closed forms.

    Uses the log-derivative brackets D_zeta = H'/(xH) - zeta J'/(yJ), the
    shared resonance denominator T, and the Wronskian-reduced off-diagonal
    forms.  Algebraically identical to :func:`scatter_matrix` but computed
    through entirely different intermediates.
    """
    wn, x, y, px, jy, jyp = _radial_values(n, config)
    ct = _cos_theta(config.theta_i)
    h = px.h

    d_eps = px.hp / (x * h) - config.eps_r * jyp / (y * jy)
    d_mu = px.hp / (x * h) - config.mu_r * jyp / (y * jy)
    qdiff = 1.0 / (y * y) - 1.0 / (x * x)

    t = d_eps * d_mu - (n * ct * qdiff) ** 2
    t_scale = abs(d_eps * d_mu) + (n * ct * qdiff) ** 2
    if abs(t) < _SINGULARITY_RTOL * t_scale:
        raise ResonanceError(f"resonance denominator T vanishes at n={n}")

    xh2 = (x * h) ** 2
    two_over_pit = 2.0 / (math.pi * t)
    e_tm = -px.j / h + 1j * two_over_pit * d_mu / xh2
    h_te = -px.j / h + 1j * two_over_pit * d_eps / xh2
    h_tm = -ETA_0 * two_over_pit * n * ct * qdiff / xh2
    e_te = XI_0 * two_over_pit * n * ct * qdiff / xh2

    m = np.array([[e_tm, e_te], [h_tm, h_te]], dtype=complex)
    return SingleScatterMatrix(order=n, matrix=m)


def dimensional_scatter(n: int, config: GratingConfig) -> np.ndarray:
    """Dimensional single-scattering coefficients.

    The normalized matrix right-multiplied by diag(E0v sin, H0v sin): column
    one then carries V/m amplitudes, column two A/m.
    """
    st = math.sin(config.theta_i)
    amp = np.array([config.e0v * st, config.h0v * st])
    return scatter_matrix(n, config).matrix * amp[np.newaxis, :]


@dataclass(frozen=True)
class SingleScatterTable:
    """scatter_matrix evaluated over all harmonics |n| <= N."""

    config: GratingConfig
    truncation: int
    mats: np.ndarray  # shape (2N+1, 2, 2), ordered n = -N..N

    @property
    def orders(self) -> np.ndarray:
        n = self.truncation
        return np.arange(-n, n + 1)

    def mat(self, n: int) -> np.ndarray:
        if abs(n) > self.truncation:
            raise IndexError(f"harmonic {n} outside table |n| <= {self.truncation}")
        return self.mats[n + self.truncation]


def build_scatter_table(N: int, config: GratingConfig) -> SingleScatterTable:
    if N < 0:
        raise ConfigError(f"truncation must be >= 0, got {N}")
    mats = np.empty((2 * N + 1, 2, 2), dtype=complex)
    for n in range(-N, N + 1):
        mats[n + N] = scatter_matrix(n, config).matrix
    return SingleScatterTable(config=config, truncation=N, mats=mats)
