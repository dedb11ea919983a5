"""Command-line front end.

    fplane-gerstner <command> [config flags] [--config FILE] [--out PATH] [--format csv|json]

Configuration flags mirror the keys of a run configuration file (see
:mod:`fplane_gerstner.runconfig`); a value given on the command line wins over
the file.  Latitude is taken in degrees.

Exit codes: 0 success, 1 a verification check failed, 2 usage error,
3 the requested physics is infeasible (inadmissible current, label outside the
fluid, current below -g/f_hat, stratification with a current).
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import kinematics as kin
from . import stratification as strat
from .errors import GerstnerError, InfeasibleError, UnsupportedConfigError
from .model import FlowConfig, coriolis_parameters, dispersion_gap, pollard_residual, solve_dispersion, validate_config
from .runconfig import ConfigFileError, RunConfig, load
from .surface import classify_current, surface_mesh
from .verification import MUTATIONS, GridSpec, mutate, run_full_certification

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Infeasible(Exception):
    pass


# ---------------------------------------------------------------- output


def _cell(value):
    """Render one value; floats use the shortest round-trip repr."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "" if not math.isfinite(value) else repr(float(value))
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value


def render_table(columns, rows, fmt, description):
    if fmt == "json":
        names = [name for name, _ in columns]
        doc = {
            "description": description,
            "columns": [{"name": n, "unit": u} for n, u in columns],
            "rows": [{n: _json_value(v) for n, v in zip(names, row)} for row in rows],
        }
        return json.dumps(doc, indent=1) + "\n"
    header = [f"{n}[{u}]" if u else n for n, u in columns]
    lines = [f"# {description}", ",".join(header)]
    lines += [",".join(_cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _emit(text, args):
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# ---------------------------------------------------------------- config


_CONFIG_FLAGS = {
    # flag: (RunConfig key, type, help)
    "--lat-deg": ("lat_deg", float, "latitude in degrees, open interval (-90, 90)"),
    "--wavenumber": ("wavenumber", float, "wavenumber k [1/m]"),
    "--current": ("current", float, "uniform current c0 [m/s]"),
    "--branch": ("branch", str, "dispersion branch: east (c > 0) or west (c < 0)"),
    "--r0": ("r0", float, "free-surface label at s = 0 [m], negative"),
    "--s0": ("s0", float, "meridional half-width of the band [m]"),
    "--rho": ("rho", float, "reference density [kg/m^3]"),
    "--p0": ("p0", float, "atmospheric pressure [Pa]"),
    "--omega": ("omega", float, "rotation rate override [rad/s]"),
    "--g": ("g", float, "gravity override [m/s^2]"),
    "--profile": ("profile", str, "density profile: constant, linear:<slope> or exp:<rate>"),
    "--tolerance": ("tolerance", float, "relative tolerance for root finding and checks"),
}


def _add_common(p, default_format="csv"):
    group = p.add_argument_group("configuration")
    group.add_argument("--config", metavar="FILE", help="key = value run configuration file")
    for flag, (dest, typ, help_) in _CONFIG_FLAGS.items():
        kwargs = {"choices": ("east", "west")} if dest == "branch" else {}
        group.add_argument(flag, dest=dest, type=typ, default=None, help=help_, **kwargs)
    out = p.add_argument_group("output")
    out.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    out.add_argument("--format", choices=("csv", "json"), default=default_format)


def run_config(args) -> RunConfig:
    base = load(args.config) if args.config else RunConfig()
    return base.merged({dest: getattr(args, dest) for dest, _, _ in _CONFIG_FLAGS.values()})


def build_config(rc: RunConfig) -> FlowConfig:
    constants = rc.constants()
    coriolis = coriolis_parameters(math.radians(rc.lat_deg), constants)
    if coriolis.f_hat > 0 and not rc.current > -constants.g / coriolis.f_hat:
        raise Infeasible(f"current {rc.current!r} m/s violates c0 > -g/f_hat = "
                         f"{-constants.g / coriolis.f_hat:.6g} m/s")
    config = rc.flow_config()
    report = validate_config(config)
    if not report.ok:
        v = report.violations[0]
        raise UsageError(f"invalid configuration: {v.constraint}: {v.message} (value {v.value!r})")
    return config


def _counts(text, n, names):
    try:
        values = [int(v) for v in text.lower().split("x")]
    except ValueError:
        raise UsageError(f"--grid expects {'x'.join(names)} integers, got {text!r}") from None
    if len(values) != n or any(v < 1 for v in values):
        raise UsageError(f"--grid expects {n} positive integers {'x'.join(names)}, got {text!r}")
    return values


def _range(text, flag):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"{flag} expects START:STOP, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise UsageError(f"{flag} needs finite START < STOP, got {text!r}")
    return lo, hi


# ---------------------------------------------------------------- commands


def parse_sweep(text):
    """``wavenumber:START:STOP:N`` or ``current:START:STOP:N`` (linear spacing)."""
    parts = text.split(":")
    if len(parts) != 4 or parts[0] not in ("wavenumber", "current"):
        raise UsageError(f"--sweep expects wavenumber|current:START:STOP:N, got {text!r}")
    try:
        start, stop, n = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError:
        raise UsageError(f"--sweep bounds must be numbers and N an integer, got {text!r}") from None
    if n < 1 or not (math.isfinite(start) and math.isfinite(stop)) or stop < start:
        raise UsageError(f"--sweep needs finite START <= STOP and N >= 1, got {text!r}")
    if n > 1 and start == stop:
        raise UsageError(f"--sweep with N > 1 needs START < STOP, got {text!r}")
    if parts[0] == "wavenumber" and start <= 0:
        raise UsageError(f"wavenumber sweep must stay positive, got {text!r}")
    return parts[0], np.linspace(start, stop, n)


def cmd_dispersion(args):
    rc = run_config(args)
    if rc.wavenumber <= 0:
        raise UsageError("wavenumber must be positive")
    constants = rc.constants()
    coriolis = coriolis_parameters(math.radians(rc.lat_deg), constants)
    ks, c0s = np.array([rc.wavenumber]), np.array([rc.current])
    if args.sweep:
        key, values = parse_sweep(args.sweep)
        if key == "wavenumber":
            ks = values
        else:
            c0s = values
    rows = []
    for k in ks:
        for c0 in c0s:
            # the discriminant stays positive slightly past the bound, so test the bound itself
            feasible = coriolis.f_hat == 0 or c0 > -constants.g / coriolis.f_hat
            try:
                c_plus, c_minus = solve_dispersion(k, c0, coriolis, constants)
            except InfeasibleError:
                feasible = False
            if not feasible:
                rows.append([rc.lat_deg, k, c0, False, None, None, None, None])
                continue
            gap = pollard = None
            if c0 == 0:
                gap = dispersion_gap(c_plus, coriolis)
                pollard = pollard_residual(c_plus, k, coriolis, constants)
            rows.append([rc.lat_deg, k, c0, True, c_plus, c_minus, gap, pollard])
    columns = [("lat_deg", "deg"), ("wavenumber", "1/m"), ("current", "m/s"), ("feasible", ""),
               ("c_plus", "m/s"), ("c_minus", "m/s"), ("pollard_gap", "m^2/s^4"),
               ("pollard_residual", "m^2/s^4")]
    desc = ("phase speeds of both branches; pollard_gap = f^2 c_plus^2 and pollard_residual is "
            "Pollard's relation evaluated at c_plus (both only when current = 0); "
            "infeasible rows have current <= -g/f_hat")
    _emit(render_table(columns, rows, args.format, desc), args)
    return EXIT_OK


def _band_or_fail(config):
    report = classify_current(config)
    if report.s_range is None:
        failed = [(i, m) for i, ok, m in report.constraints if not ok]
        if failed:
            detail = "; ".join(f"constraint {i} violated (margin {m:.6g})" for i, m in failed)
        else:
            detail = "empty meridional band"
        if failed and failed[0][0] == "adverse-limit":
            detail += (f"; the current must satisfy |c0| < |c| e^(2 k r0) = "
                       f"{abs(config.c) * math.exp(2 * config.k * config.r0):.6g} m/s")
        raise Infeasible(f"inadmissible current c0 = {config.c0!r} m/s: {detail}")
    return report


def cmd_surface(args):
    config = build_config(run_config(args))
    n_s, n_q = _counts(args.grid, 2, ("NS", "NQ")) if "x" in args.grid else (*_counts(args.grid, 1, ("NS",)), 0)
    report = _band_or_fail(config)
    lo, hi = report.s_range
    s = np.linspace(lo, hi, n_s)
    q = np.linspace(0.0, config.wavelength, n_q, endpoint=False) if n_q else None
    profile = surface_mesh(config, s, q, args.t)
    columns = [("s", "m"), ("r_of_s", "m"), ("amplitude", "m")]
    if q is None:
        rows = [[si, ri, ai] for si, ri, ai in zip(profile.s, profile.r_of_s, profile.amplitude)]
        desc = "free-surface label r(s) and amplitude e^(k(r - m(s)))/k over the admissible band"
    else:
        columns += [("q", "m"), ("x", "m"), ("y", "m"), ("z", "m")]
        rows = [[profile.s[i], profile.r_of_s[i], profile.amplitude[i], q[j], *profile.mesh[i, j]]
                for i in range(n_s) for j in range(n_q)]
        desc = (f"free-surface label r(s), amplitude and surface points (x, y, z) at t = {args.t!r} s")
    desc += f"; case {report.case_id or 'equatorial'}, current class {report.current_class}"
    _emit(render_table(columns, rows, args.format, desc), args)
    return EXIT_OK


def _parse_label(text):
    try:
        q, s, r = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--label expects q,s,r in metres, got {text!r}") from None
    return q, s, r


def cmd_trajectory(args):
    config = build_config(run_config(args))
    (n_t,) = _counts(args.grid, 1, ("NT",))
    labels = [_parse_label(t) for t in args.label] or [(0.0, 0.0, config.r0)]
    t_end = config.period if args.t is None else args.t
    if not t_end > 0:
        raise UsageError("--t (end time) must be positive")
    times = np.linspace(0.0, t_end, n_t)
    rows = []
    for idx, (q, s, r) in enumerate(labels):
        label = kin.LabelPoint(q, s, r)
        if not kin.in_domain(label, config):
            raise Infeasible(f"label ({q!r}, {s!r}, {r!r}) lies outside the fluid domain xi < 0")
        X = kin.position(label, times, config)
        U = kin.velocity(label, times, config)
        for j, t in enumerate(times):
            x, y, z = X[j]
            rows.append([idx, q, s, r, t, x, y, z, *U[j], x + config.c0 * t - q, z - r])
    columns = [("label", ""), ("q", "m"), ("s", "m"), ("r", "m"), ("t", "s"), ("x", "m"), ("y", "m"),
               ("z", "m"), ("u", "m/s"), ("v", "m/s"), ("w", "m/s"), ("drift", "m"), ("lift", "m")]
    desc = ("particle paths; drift = x + c0 t - q and lift = z - r trace a circle of radius "
            "e^xi/k in the frame moving with the current")
    _emit(render_table(columns, rows, args.format, desc), args)
    return EXIT_OK


def cmd_field(args):
    config = build_config(run_config(args))
    n_x, n_z = _counts(args.grid, 2, ("NX", "NZ"))
    t = 0.0 if args.t is None else args.t
    s = args.s
    crest = config.r0 + math.exp(config.k * config.r0) / config.k
    x_lo, x_hi = _range(args.x_range, "--x-range") if args.x_range else (0.0, config.wavelength)
    z_lo, z_hi = _range(args.z_range, "--z-range") if args.z_range else (crest - 4 / config.k, crest + 1.0)
    xs = np.linspace(x_lo, x_hi, n_x)
    zs = np.linspace(z_lo, z_hi, n_z)
    Z, X = np.meshgrid(zs, xs, indexing="ij")
    try:
        q, r = kin.invert_flow_map(X, Z, s, t, config, on_fail="nan")
    except GerstnerError as exc:
        raise Infeasible(f"cannot sample the field at s = {s!r} m: {exc}") from None
    ok = np.isfinite(q)
    label = kin.LabelPoint(np.where(ok, q, 0.0), np.full_like(q, s), np.where(ok, r, config.r0))
    U = kin.velocity(label, t, config)
    P = kin.pressure(label, config)
    W = kin.vorticity(label, t, config)
    rows = []
    for i in range(n_z):
        for j in range(n_x):
            if ok[i, j]:
                rows.append([X[i, j], Z[i, j], q[i, j], r[i, j], *U[i, j], P[i, j], *W[i, j], "ok"])
            else:
                rows.append([X[i, j], Z[i, j]] + [None] * 9 + ["above-surface"])
    columns = [("x", "m"), ("z", "m"), ("q", "m"), ("r", "m"), ("u", "m/s"), ("v", "m/s"),
               ("w", "m/s"), ("pressure", "Pa"), ("omega_x", "1/s"), ("omega_y", "1/s"),
               ("omega_z", "1/s"), ("status", "")]
    desc = f"Eulerian fields on the slice y = {s!r} m at t = {t!r} s; cells above the free surface are blank"
    _emit(render_table(columns, rows, args.format, desc), args)
    return EXIT_OK


def cmd_verify(args):
    rc = run_config(args)
    config = build_config(rc)
    n_q, n_s, n_r, n_t = _counts(args.grid, 4, ("NQ", "NS", "NR", "NT"))
    spec = GridSpec(n_q=n_q, n_s=n_s, n_r=n_r, n_t=n_t, seed=args.seed)
    profile = strat.parse_profile(rc.profile, config.rho) if rc.profile else None
    if profile is not None and config.c0 != 0:
        raise Infeasible(f"stratified checks require current = 0, got {config.c0!r} m/s")
    report = run_full_certification(mutate(config, args.mutate), spec, profile)
    if args.format == "json":
        doc = report.to_dict()
        doc["mutation"] = args.mutate
        text = json.dumps(doc, indent=1) + "\n"
    else:
        columns = [("check_id", ""), ("residual", ""), ("scale", ""), ("tol", ""), ("pass", ""),
                   ("status", ""), ("grid", "")]
        rows = [[c.check_id, c.residual, c.scale, c.tol, c.passed, c.status, c.grid] for c in report.checks]
        text = render_table(columns, rows, "csv", "certification: pass iff residual <= tol * scale "
                                                  "(residual and scale share the unit of each check)")
    _emit(text, args)
    for check in report.checks:
        print(f"{'PASS' if check.passed else 'FAIL'} {check.check_id}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_admissibility(args):
    config = build_config(run_config(args))
    report = classify_current(config)
    if args.format == "json":
        doc = report.to_dict()
        doc["admissible"] = report.admissible
        doc["current"] = config.c0
        doc["c"] = config.c
        _emit(json.dumps(doc, indent=1) + "\n", args)
    else:
        lo, hi = report.s_range if report.s_range else (None, None)
        c0_lo, c0_hi = report.c0_interval if report.c0_interval else (None, None)
        columns = [("hemisphere", ""), ("branch", ""), ("case", ""), ("current_class", ""),
                   ("current", "m/s"), ("c", "m/s"), ("admissible", ""), ("s_min", "m"), ("s_max", "m"),
                   ("c0_min", "m/s"), ("c0_max", "m/s"), ("existence_edge", "m"), ("trapped", "")]
        row = [report.hemisphere, report.branch, report.case_id, report.current_class, config.c0,
               config.c, report.admissible, lo, hi, c0_lo, c0_hi, report.existence_edge, report.trapped]
        _emit(render_table(columns, [row], "csv", report.band_rule), args)
    return EXIT_OK


def cmd_stratify(args):
    rc = run_config(args)
    config = build_config(rc)
    n_r, n_q = _counts(args.grid, 2, ("NR", "NQ"))
    profile = strat.parse_profile(rc.profile or "linear:0.01", config.rho)
    t = 0.0 if args.t is None else args.t
    s = args.s
    top = config.r0 + min(0.0, float(kin.meridional_offset(s, config)))
    r = top - np.linspace(0.0, 4.0 / config.k, n_r)
    q = np.linspace(0.0, config.wavelength, n_q, endpoint=False)
    R, Q = np.meshgrid(r, q, indexing="ij")
    label = kin.LabelPoint(Q, np.full_like(Q, s), R)
    try:
        a = strat.density_argument(R, s, config)
        rho = strat.density(R, s, profile, config)
        P = strat.stratified_pressure(R, s, profile, config)
        mass = strat.mass_conservation_residual(label, t, profile, config)
        rho_q = strat.density_q_derivative(label, t, profile, config)
        euler = np.max(np.abs(strat.stratified_euler_residual(label, t, profile, config)), axis=-1)
    except UnsupportedConfigError as exc:
        raise Infeasible(str(exc)) from None
    rows = [[Q[i, j], R[i, j], a[i, j], rho[i, j], P[i, j], mass[i, j], rho_q[i, j], euler[i, j]]
            for i in range(n_r) for j in range(n_q)]
    columns = [("q", "m"), ("r", "m"), ("a", "m"), ("density", "kg/m^3"), ("pressure", "Pa"),
               ("mass_residual", "kg/(m^3 s)"), ("rho_q", "kg/m^4"), ("euler_residual", "Pa/m")]
    desc = f"stratified run with profile {profile.name} at s = {s!r} m, t = {t!r} s"
    _emit(render_table(columns, rows, args.format, desc), args)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser():
    parser = argparse.ArgumentParser(prog="fplane-gerstner",
                                     description="Exact trapped Gerstner waves with a current on the f-plane.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dispersion", help="phase speeds, optionally swept over k or c0")
    _add_common(p)
    p.add_argument("--sweep", metavar="KEY:START:STOP:N", help="KEY is wavenumber or current")
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("surface", help="free-surface profile and optional mesh")
    _add_common(p)
    p.add_argument("--grid", default="33", help="NS or NSxNQ; NQ > 0 adds the (x, y, z) mesh")
    p.add_argument("--t", type=float, default=0.0, help="time of the mesh [s]")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("trajectory", help="particle paths over a time window")
    _add_common(p)
    p.add_argument("--label", action="append", default=[], metavar="Q,S,R", help="particle label [m]; repeatable")
    p.add_argument("--grid", default="65", help="NT time samples including both ends")
    p.add_argument("--t", type=float, default=None, help="end time [s] (default one wave period)")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("field", help="Eulerian fields on an (x, z) grid")
    _add_common(p)
    p.add_argument("--grid", default="33x33", help="NXxNZ")
    p.add_argument("--t", type=float, default=None, help="time [s]")
    p.add_argument("--s", type=float, default=0.0, help="meridional coordinate y = s [m]")
    p.add_argument("--x-range", metavar="START:STOP", help="default one wavelength from 0 [m]")
    p.add_argument("--z-range", metavar="START:STOP", help="default 4/k below the crest to 1 m above [m]")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("verify", help="run the certification suite")
    _add_common(p, default_format="json")
    p.add_argument("--grid", default="8x8x8x5", help="NQxNSxNRxNT label grid")
    p.add_argument("--seed", type=int, default=0, help="seed for the random labels")
    p.add_argument("--mutate", choices=MUTATIONS, default="none", help="deliberately break the configuration")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("admissibility", help="classify the current and report the meridional band")
    _add_common(p, default_format="json")
    p.set_defaults(func=cmd_admissibility)

    p = sub.add_parser("stratify", help="density, pressure and residuals of the stratified flow")
    _add_common(p)
    p.add_argument("--grid", default="17x8", help="NRxNQ")
    p.add_argument("--t", type=float, default=None, help="time [s]")
    p.add_argument("--s", type=float, default=0.0, help="latitude label s [m]")
    p.set_defaults(func=cmd_stratify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ConfigFileError, ValueError) as exc:
        # DomainError is a ValueError: bad latitude, wavenumber and the like
        print(f"fplane-gerstner {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (Infeasible, GerstnerError) as exc:
        print(f"fplane-gerstner {args.command}: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"fplane-gerstner {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
