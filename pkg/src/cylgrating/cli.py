"""Config ingestion, pipeline orchestration, and machine-readable output.

Pipeline: wavenumbers -> single-scatter table -> lattice table -> solve ->
payload (coefficients, lattice sums, field scan, amplitudes, or the
self-validation suite).  Output is CSV with a ``#``-prefixed envelope
header, or an equivalent JSON document; identical run specs produce
byte-identical files.

Angles are degrees at this interface and radians everywhere inside.
"""

from __future__ import annotations

import argparse
import cmath
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .cylinder import (GratingConfig, blocks, build_scatter_table,
                       derive_wavenumbers, scatter_matrix, wait_matrix)
from .errors import ConfigError, EngineError
from .fields import (FieldGrid, LocalPoint, feed_orders_needed,
                     grating_amplitude, grid_scan, incident_ez, single_amplitude)
from .lattice import DEFAULT_GUARD, lattice_table, schlomilch, wood_margin
from .solver import (assemble, default_truncation, residual, single_scattering,
                     solve_direct, solve_neumann, CoefficientSet)
from .specfun import bessel_j, hankel1
from ._constants import XI_0

__all__ = ["RunSpec", "ResultEnvelope", "parse_run_spec", "run", "main"]

_CONFIG_KEYS = {
    "radius": float, "spacing": float, "eps_r": float, "mu_r": float,
    "k0": float, "wavelength": float, "theta_deg": float, "phi_deg": float,
    "e0v": float, "h0v": float, "truncation": int, "method": str,
    "order": int, "tol": float, "field_tol": float, "guard": float,
}
_MIN_TOL = 1e-10


@dataclass(frozen=True)
class RunSpec:
    """Fully validated run description (physics config + numerics knobs)."""

    config: GratingConfig
    truncation: int | None = None        # None: default_truncation
    method: str = "direct"               # "direct" | "neumann"
    order: int = 4                       # Neumann order K
    tol: float = 1e-8                    # lattice tolerance
    field_tol: float = 1e-8
    guard: float = DEFAULT_GUARD
    out: str | None = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.method not in ("direct", "neumann"):
            raise ConfigError(f"method must be direct or neumann, got {self.method!r}")
        if self.method == "neumann" and not (1 <= self.order <= 16):
            raise ConfigError(f"neumann order must be in [1, 16], got {self.order}")
        if self.tol < _MIN_TOL or self.field_tol < _MIN_TOL:
            raise ConfigError(f"tolerances must be >= {_MIN_TOL:g}")
        if self.truncation is not None and not (1 <= self.truncation <= 64):
            raise ConfigError(f"truncation must be in [1, 64], got {self.truncation}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.fmt!r}")

    def resolved_truncation(self) -> int:
        return self.truncation if self.truncation is not None else \
            default_truncation(self.config)


def parse_run_spec(text: str | None, overrides: dict | None = None) -> RunSpec:
    """Merge a flat TOML document with flag overrides into a RunSpec.

    Overrides win field by field.  Unknown keys, type mismatches and
    violated invariants all raise ConfigError naming the offender.
    """
    values: dict = {}
    if text:
        try:
            doc = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config parse error: {exc}") from exc
        for key, val in doc.items():
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            want = _CONFIG_KEYS[key]
            if want is float and isinstance(val, (int, float)) and not isinstance(val, bool):
                val = float(val)
            if not isinstance(val, want) or isinstance(val, bool):
                raise ConfigError(f"config key {key!r} must be {want.__name__}")
            values[key] = val
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val

    if "k0" in values and "wavelength" in values:
        raise ConfigError("give k0 or wavelength, not both")
    if "wavelength" in values:
        wl = values.pop("wavelength")
        if wl <= 0:
            raise ConfigError(f"wavelength must be positive, got {wl}")
        values["k0"] = 2.0 * math.pi / wl
    for required in ("radius", "spacing", "eps_r", "mu_r", "k0", "theta_deg"):
        if required not in values:
            raise ConfigError(f"missing required config key {required!r}")

    config = GratingConfig(
        radius_a=values["radius"],
        spacing_d=values["spacing"],
        eps_r=values["eps_r"],
        mu_r=values["mu_r"],
        k0=values["k0"],
        theta_i=math.radians(values["theta_deg"]),
        phi_i=math.radians(values.get("phi_deg", 0.0)),
        e0v=values.get("e0v", 1.0),
        h0v=values.get("h0v", 1.0),
    )
    return RunSpec(
        config=config,
        truncation=values.get("truncation"),
        method=values.get("method", "direct"),
        order=values.get("order", 4),
        tol=values.get("tol", 1e-8),
        field_tol=values.get("field_tol", 1e-8),
        guard=values.get("guard", DEFAULT_GUARD),
        out=values.get("out"),
        fmt=values.get("fmt", "csv"),
    )


@dataclass
class ResultEnvelope:
    """Header metadata written in front of every payload."""

    subcommand: str
    spec: dict
    derived: dict
    columns: list[str] = field(default_factory=list)
    rows: list[list] = field(default_factory=list)

    def header_items(self):
        yield "engine", f"cylgrating {__version__}"
        yield "subcommand", self.subcommand
        for key in sorted(self.spec):
            yield key, self.spec[key]
        for key in sorted(self.derived):
            yield key, self.derived[key]
        yield "rows", len(self.rows)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def render_csv(env: ResultEnvelope) -> str:
    buf = io.StringIO()
    for key, val in env.header_items():
        buf.write(f"# {key}={_fmt(val)}\n")
    buf.write(",".join(env.columns) + "\n")
    for row in env.rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def render_json(env: ResultEnvelope) -> str:
    doc = {
        "envelope": dict(env.header_items()),
        "columns": env.columns,
        "rows": env.rows,
    }
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def read_csv(text: str):
    """Parse an emitted CSV back into (envelope dict, columns, rows)."""
    envelope: dict[str, str] = {}
    columns: list[str] = []
    rows: list[list[str]] = []
    for line in text.splitlines():
        if not line:
            continue
        if line.startswith("# "):
            key, _, val = line[2:].partition("=")
            envelope[key] = val
        elif not columns:
            columns = line.split(",")
        else:
            rows.append(line.split(","))
    return envelope, columns, rows


def _spec_echo(spec: RunSpec) -> dict:
    cfg = spec.config
    return {
        "radius": cfg.radius_a, "spacing": cfg.spacing_d,
        "eps_r": cfg.eps_r, "mu_r": cfg.mu_r, "k0": cfg.k0,
        "theta_deg": math.degrees(cfg.theta_i), "phi_deg": math.degrees(cfg.phi_i),
        "e0v": cfg.e0v, "h0v": cfg.h0v,
        "method": spec.method, "order": spec.order,
        "tol": spec.tol, "field_tol": spec.field_tol, "guard": spec.guard,
        "truncation": spec.resolved_truncation(),
    }


def _derived(spec: RunSpec) -> dict:
    wn = derive_wavenumbers(spec.config)
    return {
        "kr": wn.kr, "kz": wn.kz, "k1": wn.k1,
        "wood_margin": wood_margin(spec.config),
        # the TE amplitude h0v corresponds to a horizontally polarized
        # incident electric field E0h = h0v * xi0
        "e0h_implied": spec.config.h0v * XI_0,
    }


def _solve(spec: RunSpec, span: int | None = None):
    n = spec.resolved_truncation()
    single = build_scatter_table(n, spec.config)
    lat = lattice_table(n, spec.config, spec.tol, guard=spec.guard, span=span)
    if spec.method == "direct":
        coeffs = solve_direct(assemble(n, single, lat))
    else:
        coeffs = solve_neumann(spec.order, n, single, lat)
    return single, lat, coeffs


def _complex_cols(prefix: str, names) -> list[str]:
    cols = []
    for name in names:
        cols += [f"{prefix}{name}_re", f"{prefix}{name}_im"]
    return cols


_ENTRY_NAMES = ("e_tm", "e_te", "h_tm", "h_te")


def _flatten22(m: np.ndarray) -> list[float]:
    out = []
    for val in (m[0, 0], m[0, 1], m[1, 0], m[1, 1]):
        out += [float(val.real), float(val.imag)]
    return out


def run(spec: RunSpec, subcommand: str, extra: dict | None = None) -> ResultEnvelope:
    """Execute one subcommand and return the filled envelope."""
    extra = extra or {}
    env = ResultEnvelope(subcommand=subcommand, spec=_spec_echo(spec),
                         derived=_derived(spec))

    if subcommand == "coeffs":
        _, lat, coeffs = _solve(spec)
        env.derived["residual"] = coeffs.residual
        if coeffs.neumann_ratio is not None:
            env.derived["neumann_ratio"] = coeffs.neumann_ratio
        env.columns = (["n"] + _complex_cols("atil_", _ENTRY_NAMES)
                       + _complex_cols("a_", _ENTRY_NAMES))
        dims = coeffs.dimensional(spec.config)
        for i, n in enumerate(coeffs.orders):
            env.rows.append([int(n)] + _flatten22(coeffs.mats[i]) + _flatten22(dims[i]))

    elif subcommand == "lattice":
        n = spec.resolved_truncation()
        lat = lattice_table(n, spec.config, spec.tol, guard=spec.guard)
        env.columns = ["n", "i_re", "i_im", "est_error", "terms_used"]
        for i, order in enumerate(lat.orders):
            v = lat.values[i]
            env.rows.append([int(order), float(v.real), float(v.imag),
                             float(lat.est_error[i]), int(lat.terms_used[i])])

    elif subcommand == "fields":
        grid: FieldGrid = extra["grid"]
        pol = extra["pol"]
        n = spec.resolved_truncation()
        span = n + feed_orders_needed(spec.config, max(grid.radii), spec.field_tol)
        _, lat, coeffs = _solve(spec, span=span)
        env.derived["residual"] = coeffs.residual
        env.columns = ["s", "r", "phi", "z", "ez_re", "ez_im", "hz_re", "hz_im",
                       "truncation", "tail_est", "status"]
        for row in grid_scan(coeffs, spec.config, lat, grid, pol, spec.field_tol):
            p = row.point
            if row.sample is None:
                env.rows.append([p.s, p.r, p.phi, p.z,
                                 float("nan"), float("nan"), float("nan"), float("nan"),
                                 0, float("nan"), row.error.replace(",", ";")])
            else:
                smp = row.sample
                env.rows.append([p.s, p.r, p.phi, p.z,
                                 smp.ez.real, smp.ez.imag, smp.hz.real, smp.hz.imag,
                                 smp.truncation, smp.tail_est, "ok"])

    elif subcommand == "amplitude":
        nphi = extra.get("nphi", 73)
        _, lat, coeffs = _solve(spec)
        env.derived["residual"] = coeffs.residual
        env.columns = (["phi"] + _complex_cols("grating_", _ENTRY_NAMES)
                       + _complex_cols("single_", _ENTRY_NAMES))
        for j in range(nphi):
            phi = 2.0 * math.pi * j / nphi
            g = grating_amplitude(phi, coeffs).matrix
            s = single_amplitude(phi, spec.config).matrix
            env.rows.append([phi] + _flatten22(g) + _flatten22(s))

    elif subcommand == "validate":
        env.columns = ["check", "status", "detail"]
        for name, ok, detail in _validation_suite(spec):
            env.rows.append([name, "ok" if ok else "FAIL", detail])

    else:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    return env


def _validation_suite(spec: RunSpec):
    """Runtime invariant checks on this configuration."""
    cfg = spec.config
    wn = derive_wavenumbers(cfg)

    err = abs(wn.kr ** 2 + wn.kz ** 2 - cfg.k0 ** 2) / cfg.k0 ** 2
    yield "wavenumber-identity", err <= 1e-14, f"rel err {err:.2e}"

    worst = 0.0
    for n in range(-8, 9):
        a = scatter_matrix(n, cfg).matrix
        b = wait_matrix(n, cfg).matrix
        scale = float(np.max(np.abs(a))) or 1.0
        worst = max(worst, float(np.max(np.abs(a - b))) / scale)
    yield "dual-path-single-scattering", worst <= 1e-10, f"max rel diff {worst:.2e}"

    worst = 0.0
    x = wn.kr * cfg.radius_a
    y = wn.k1 * cfg.radius_a
    for n in (1, 2, 3):
        blk = blocks(n, cfg)
        lhs = blk.b_eps * blk.b_mu
        jy = bessel_j(n, y)
        jyp = 0.5 * (bessel_j(n - 1, y) - bessel_j(n + 1, y))
        h = hankel1(n, x)
        hp = 0.5 * (hankel1(n - 1, x) - hankel1(n + 1, x))
        wjh_e = jy * hp - cfg.eps_r * (wn.kr / wn.k1) * jyp * h
        wjh_m = jy * hp - cfg.mu_r * (wn.kr / wn.k1) * jyp * h
        rhs = -((n * blk.coupling / x) ** 2) * (jy * h) ** 2 / (wjh_e * wjh_m)
        scale = max(abs(lhs), abs(rhs), 1e-300)
        worst = max(worst, abs(lhs - rhs) / scale)
    yield "cross-block-product", worst <= 1e-12, f"max rel defect {worst:.2e}"

    n = spec.resolved_truncation()
    try:
        single = build_scatter_table(n, cfg)
        lat = lattice_table(n, cfg, spec.tol, guard=spec.guard)
    except EngineError as exc:
        yield "lattice-table", False, str(exc)
        return
    yield "lattice-tolerance", bool(np.all(lat.est_error <= spec.tol)), \
        f"max est {float(np.max(lat.est_error)):.2e}"

    par = 0.0
    for m in (1, 2, 5):
        a = schlomilch(m, cfg, spec.tol, guard=spec.guard).value
        b = schlomilch(-m, cfg, spec.tol, guard=spec.guard).value
        par = max(par, abs(b - (-1.0) ** m * a) / max(abs(a), 1e-300))
    yield "lattice-parity", par <= 1e-10, f"max rel defect {par:.2e}"

    coeffs = solve_direct(assemble(n, single, lat))
    res = residual(coeffs, single, lat)
    yield "direct-residual", res <= 1e-10, f"residual {res:.2e}"

    if cfg.eps_r != 1.0 or cfg.mu_r != 1.0:
        guess = CoefficientSet(truncation=n, psi_i=cfg.psi_i,
                               mats=single_scattering(n, single),
                               method="neumann", residual=0.0)
        res1 = residual(guess, single, lat)
        yield "single-scattering-residual-orders", res1 > res, \
            f"single {res1:.2e} vs direct {res:.2e}"

    m = 4 * n + 1
    worst = 0.0
    mats = [grating_amplitude(2.0 * math.pi * j / m, coeffs).matrix for j in range(m)]
    for order in range(-n, n + 1):
        rec = sum(v * cmath.exp(-1j * order * 2.0 * math.pi * j / m)
                  for j, v in enumerate(mats)) / m
        worst = max(worst, float(np.max(np.abs(rec - coeffs.mat(order)))))
    yield "amplitude-fourier-round-trip", worst <= 1e-10, f"max err {worst:.2e}"

    worst = 0.0
    for (r, phi, z) in ((0.2 * cfg.spacing_d, 0.4, 0.0),
                        (0.45 * cfg.spacing_d, 2.2, 0.3),
                        (0.7 * cfg.spacing_d, -1.1, -0.2)):
        p = LocalPoint(s=0, r=r, phi=phi, z=z)
        got = incident_ez(cfg, p, 1e-10)
        xg = r * math.cos(phi)
        yg = r * math.sin(phi)
        ref = (math.sin(cfg.theta_i) * cfg.e0v
               * cmath.exp(1j * wn.kr * (xg * math.cos(cfg.psi_i)
                                         + yg * math.sin(cfg.psi_i)))
               * cmath.exp(-1j * wn.kz * z))
        worst = max(worst, abs(got - ref) / abs(ref))
    yield "incident-plane-wave-resummation", worst <= 1e-10, f"max rel err {worst:.2e}"


def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat TOML config file")
    p.add_argument("--radius", type=float, help="cylinder radius a (m)")
    p.add_argument("--spacing", type=float, help="grating period d (m)")
    p.add_argument("--eps-r", dest="eps_r", type=float, help="relative permittivity")
    p.add_argument("--mu-r", dest="mu_r", type=float, help="relative permeability")
    p.add_argument("--k0", type=float, help="free-space wavenumber (rad/m)")
    p.add_argument("--wavelength", type=float, help="free-space wavelength (m)")
    p.add_argument("--theta-deg", dest="theta_deg", type=float,
                   help="obliquity angle from the cylinder axis, degrees")
    p.add_argument("--phi-deg", dest="phi_deg", type=float,
                   help="in-plane incidence angle from x, degrees")
    p.add_argument("--e0v", type=float, help="TM incident amplitude (V/m)")
    p.add_argument("--h0v", type=float, help="TE incident amplitude (A/m)")
    p.add_argument("--truncation", type=int, help="harmonic truncation N")
    p.add_argument("--method", choices=("direct", "neumann"))
    p.add_argument("--order", type=int, help="Neumann order K")
    p.add_argument("--tol", type=float, help="lattice-sum tolerance")
    p.add_argument("--field-tol", dest="field_tol", type=float)
    p.add_argument("--guard", type=float, help="Wood-anomaly margin guard")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"))


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cylgrating",
        description="Multiple scattering by an infinite grating of dielectric "
                    "cylinders at oblique incidence")
    sub = ap.add_subparsers(dest="subcommand", required=True)
    for name, helptext in (
            ("coeffs", "solved multiple-scattering coefficient matrices"),
            ("lattice", "Schlomilch lattice-sum table"),
            ("fields", "exterior E_z/H_z over a local-frame grid"),
            ("amplitude", "far-field amplitude matrices vs angle"),
            ("validate", "run the invariant suite on this configuration")):
        p = sub.add_parser(name, help=helptext)
        _add_common_flags(p)
        if name == "fields":
            p.add_argument("--pol", choices=("TM", "TE"), default="TM")
            p.add_argument("--rmin", type=float)
            p.add_argument("--rmax", type=float)
            p.add_argument("--nr", type=int, default=5)
            p.add_argument("--phi-min-deg", dest="phi_min_deg", type=float, default=0.0)
            p.add_argument("--phi-max-deg", dest="phi_max_deg", type=float, default=315.0)
            p.add_argument("--nphi", type=int, default=8)
            p.add_argument("--z", type=float, default=0.0)
            p.add_argument("--cyl-index", dest="cyl_index", type=int, default=0)
        if name == "amplitude":
            p.add_argument("--nphi", type=int, default=73)
    return ap


_OVERRIDE_KEYS = ("radius", "spacing", "eps_r", "mu_r", "k0", "wavelength",
                  "theta_deg", "phi_deg", "e0v", "h0v", "truncation", "method",
                  "order", "tol", "field_tol", "guard", "out", "fmt")


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text = None
        if args.config:
            with open(args.config, "r", encoding="utf-8") as fh:
                text = fh.read()
        overrides = {k: getattr(args, k, None) for k in _OVERRIDE_KEYS}
        spec = parse_run_spec(text, overrides)

        extra: dict = {}
        if args.subcommand == "fields":
            cfg = spec.config
            rmin = args.rmin if args.rmin is not None else 1.1 * cfg.radius_a
            rmax = args.rmax if args.rmax is not None else 0.75 * cfg.spacing_d
            if not (cfg.radius_a < rmin <= rmax < cfg.spacing_d):
                raise ConfigError(
                    f"field grid radii must satisfy a < rmin <= rmax < d, got "
                    f"[{rmin}, {rmax}]")
            radii = tuple(np.linspace(rmin, rmax, args.nr).tolist())
            phis = tuple(math.radians(v) for v in
                         np.linspace(args.phi_min_deg, args.phi_max_deg, args.nphi))
            extra["grid"] = FieldGrid(radii=radii, phis=phis, z=args.z,
                                      s=args.cyl_index)
            extra["pol"] = args.pol
        elif args.subcommand == "amplitude":
            if args.nphi < 1:
                raise ConfigError("--nphi must be >= 1")
            extra["nphi"] = args.nphi

        env = run(spec, args.subcommand, extra)
        payload = render_json(env) if spec.fmt == "json" else render_csv(env)
        if spec.out:
            with open(spec.out, "w", encoding="utf-8") as fh:
                fh.write(payload)
        else:
            sys.stdout.write(payload)
        if args.subcommand == "validate":
            failed = [row for row in env.rows if row[1] != "ok"]
            for row in env.rows:
                print(f"{row[1]:4s} {row[0]}: {row[2]}", file=sys.stderr)
            return 1 if failed else 0
        return 0
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
