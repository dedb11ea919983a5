"""Numerical certification that the flow solves the governing equations.

Each check produces a :class:`CheckResult` holding the maximum residual, the
physical scale it is measured against, and the tolerance; it passes when
``residual <= tol * scale``.  Checks never raise for physics failures, so a
broken configuration still yields a complete report.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import kinematics as kin
from .errors import GerstnerError, NoSurfaceError
from .kinematics import LabelPoint
from .model import FlowConfig, dispersion_gap, dispersion_residual, pollard_residual, solve_dispersion
from .surface import classify_current, h, solve_surface, surface_target


@dataclass
class CheckResult:
    check_id: str
    residual: float
    scale: float
    tol: float
    grid: str = ""
    status: str = "ok"
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if self.status != "ok":
            return False
        return bool(self.residual <= self.tol * self.scale)

    def to_dict(self):
        out = {
            "check_id": self.check_id,
            "residual": _finite_or_none(self.residual),
            "scale": _finite_or_none(self.scale),
            "tol": self.tol,
            "pass": self.passed,
            "status": self.status,
            "grid": self.grid,
        }
        if self.details:
            out["details"] = {k: _finite_or_none(v) for k, v in self.details.items()}
        return out


def _finite_or_none(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


@dataclass
class ResidualReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, check_id) -> CheckResult:
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def failing(self) -> list[str]:
        return [c.check_id for c in self.checks if not c.passed]

    def merge(self, other: ResidualReport) -> ResidualReport:
        merged = {c.check_id: c for c in self.checks}
        merged.update({c.check_id: c for c in other.checks})
        return ResidualReport([merged[k] for k in sorted(merged)])

    def to_dict(self):
        return {"pass": self.passed, "checks": [c.to_dict() for c in self.checks]}

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class GridSpec:
    """Label/time sampling used by :func:`run_full_certification`.

    ``depth`` is the vertical extent of the label grid in units of ``1/k``.
    """

    n_q: int = 8
    n_s: int = 8
    n_r: int = 8
    n_t: int = 5
    n_random: int = 64
    seed: int = 0
    depth: float = 4.0
    n_surface_s: int = 8
    n_surface_q: int = 8
    n_surface_t: int = 3
    kinematic_step: float = 1e-2

    def describe(self):
        return (f"{self.n_q}x{self.n_s}x{self.n_r} labels x {self.n_t} times "
                f"+ {self.n_random} random (seed {self.seed})")


def _top_label(s, config):
    """Highest admissible label ``r`` at ``s``: ``min(r0, r0 + m(s))``."""
    return np.minimum(config.r0, config.r0 + kin.meridional_offset(s, config))


def label_grid(config: FlowConfig, spec: GridSpec = GridSpec()):
    """Return ``(labels, times)``: flat label arrays and the time samples."""
    L = config.wavelength
    q = np.linspace(0.0, L, spec.n_q, endpoint=False)
    s = np.linspace(-config.s0, config.s0, spec.n_s)
    frac = np.linspace(0.0, 1.0, spec.n_r)
    Q, S, Fr = np.meshgrid(q, s, frac, indexing="ij")
    R = _top_label(S, config) - Fr * spec.depth / config.k
    rng = np.random.default_rng(spec.seed)
    qr = rng.uniform(0.0, L, spec.n_random)
    sr = rng.uniform(-config.s0, config.s0, spec.n_random)
    rr = _top_label(sr, config) - rng.uniform(0.0, spec.depth, spec.n_random) / config.k
    labels = LabelPoint(np.concatenate([Q.ravel(), qr]), np.concatenate([S.ravel(), sr]),
                        np.concatenate([R.ravel(), rr]))
    times = np.linspace(0.0, config.period, spec.n_t, endpoint=False)
    return labels, times


def _outer(labels, times):
    """Broadcast flat labels against times: shapes (N, 1) and (1, T)."""
    return LabelPoint(*(np.asarray(a)[:, None] for a in labels)), np.asarray(times)[None, :]


def eulerian_pressure_gradient(label: LabelPoint, t, config: FlowConfig) -> np.ndarray:
    """``(P_x, P_y, P_z)`` demanded by the rotating Euler equations along the flow."""
    u = kin.velocity(label, t, config)
    a = kin.acceleration(label, t, config)
    f, f_hat, rho = config.f, config.f_hat, config.rho
    px = -rho * (a[..., 0] + f_hat * u[..., 2] - f * u[..., 1])
    py = -rho * (a[..., 1] + f * u[..., 0])
    pz = -rho * (a[..., 2] - f_hat * u[..., 0] + config.g)
    return np.stack([px, py, pz], axis=-1)


def euler_label_rhs(label: LabelPoint, t, config: FlowConfig) -> np.ndarray:
    """Label-space pressure gradient required by the momentum equations, ``J grad_x P``."""
    J = kin.jacobian(label, t, config)
    return (J @ eulerian_pressure_gradient(label, t, config)[..., None])[..., 0]


def euler_label_rhs_closed_form(label: LabelPoint, t, config: FlowConfig) -> np.ndarray:
    """The same right-hand side written out term by term."""
    xi, theta = kin.phase(label, t, config)
    e = np.exp(xi)
    e2 = e * e
    cos, sin = np.cos(theta), np.sin(theta)
    k, c, c0, g = config.k, config.c, config.c0, config.g
    f, f_hat, ms, rho = config.f, config.f_hat, config.offset_rate, config.rho
    K = k * c * c + f_hat * c
    D = K - f_hat * c0 - g
    p_q = -rho * D * e * sin
    p_s = -rho * (ms * K * e2 + (f * c - f_hat * c0 * ms - g * ms) * e * cos - f * c0)
    p_r = -rho * (-K * e2 - D * e * cos + f_hat * c0 + g)
    return np.stack([p_q, p_s, p_r], axis=-1)


def euler_residual(label: LabelPoint, t, config: FlowConfig) -> np.ndarray:
    """``(P_q, P_s, P_r)`` of the pressure field minus the momentum-balance
    requirement; identically zero for a valid configuration."""
    label = LabelPoint(*np.broadcast_arrays(*label))
    grad = kin.pressure_label_gradient(label, config)
    rhs = euler_label_rhs(label, t, config)
    return grad - rhs


def _pointwise_gradient_scale(label, t, config):
    xi, _ = kin.phase(label, t, config)
    e = np.exp(xi)
    return config.k * abs(config.c) * e / (1 - e * e)


def dispersion_check(config: FlowConfig) -> CheckResult:
    res = dispersion_residual(config.c, config.k, config.c0, config.coriolis, config.constants)
    return CheckResult("dispersion", abs(res), config.g, config.tolerance, grid="phase speed")


def euler_check(config: FlowConfig, labels, times, grid="") -> CheckResult:
    L, T = _outer(labels, times)
    res = euler_residual(L, T, config)
    comp = np.max(np.abs(res), axis=tuple(range(res.ndim - 1)))
    return CheckResult("euler", float(np.max(comp)), config.rho * config.g, config.tolerance, grid,
                       details={"P_q": float(comp[0]), "P_s": float(comp[1]), "P_r": float(comp[2])})


def incompressibility_check(labels, times, config: FlowConfig, grid="", tol=1e-13) -> list[CheckResult]:
    """Trace of the velocity gradient (assembled from the Jacobian) and time
    invariance of ``det J``."""
    L, T = _outer(labels, times)
    grad = kin.velocity_gradient_from_jacobian(L, T, config)
    trace = np.trace(grad, axis1=-2, axis2=-1)
    det = np.linalg.det(kin.jacobian(L, T, config))
    det0 = np.linalg.det(kin.jacobian(L, np.zeros_like(T), config))
    closed = kin.jacobian_determinant(L, config)
    scale = config.k * abs(config.c)
    return [
        CheckResult("incompressibility.trace", float(np.max(np.abs(trace))), scale, tol, grid),
        CheckResult("incompressibility.det_time", float(np.max(np.abs(det - det0))), 1.0, tol, grid),
        CheckResult("incompressibility.det_closed", float(np.max(np.abs(det - closed))), 1.0, tol, grid),
    ]


def vorticity_check(labels, times, config: FlowConfig, grid="", tol=1e-12) -> CheckResult:
    L, T = _outer(labels, times)
    closed = kin.vorticity(L, T, config)
    assembled = kin.curl(kin.velocity_gradient_from_jacobian(L, T, config))
    scale = _pointwise_gradient_scale(L, T, config)
    rel = np.max(np.abs(closed - assembled), axis=-1) / scale
    return CheckResult("vorticity.curl", float(np.max(rel)), 1.0, tol,
                       grid + "; residual relative to k|c|e^xi/(1-e^2xi) per point")


def pressure_fd_check(labels, config: FlowConfig, grid="", tol=1e-6) -> CheckResult:
    """Analytic label gradient of the pressure against central differences."""
    step = 1e-5 / config.k
    grad = kin.pressure_label_gradient(labels, config)
    fd = []
    for i in range(3):
        up = list(labels)
        dn = list(labels)
        up[i] = np.asarray(labels[i]) + step
        dn[i] = np.asarray(labels[i]) - step
        fd.append((kin.pressure(LabelPoint(*up), config) - kin.pressure(LabelPoint(*dn), config)) / (2 * step))
    fd = np.stack(fd, axis=-1)
    scale = config.rho * config.effective_gravity
    return CheckResult("pressure.finite_difference", float(np.max(np.abs(fd - grad))), scale, tol, grid)


def decay_check(config: FlowConfig, depth_samples=(-5.0, -10.0, -20.0), n_theta=16, s=0.0,
                tol=1e-12) -> CheckResult:
    """Deviation from the deep current, normalised by ``|c| e^xi``, must be exactly 1."""
    xi = np.asarray(depth_samples, dtype=float)[:, None]
    theta = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)[None, :]
    r = xi / config.k + float(kin.meridional_offset(s, config))
    q = theta / config.k
    label = LabelPoint(*np.broadcast_arrays(q, np.full_like(r, s), r))
    u = kin.velocity(label, 0.0, config)
    dev = u - np.array([-config.c0, 0.0, 0.0])
    xi_eval, _ = kin.phase(label, 0.0, config)
    ratio = np.linalg.norm(dev, axis=-1) / (abs(config.c) * np.exp(xi_eval))
    # at theta = 0 the zonal deviation alone carries the whole amplitude
    zonal = np.abs(u[:, 0, 0] + config.c0) / (abs(config.c) * np.exp(xi_eval[:, 0]))
    worst = max(float(np.max(np.abs(ratio - 1))), float(np.max(np.abs(zonal - 1))))
    bound = float(np.max(np.abs(dev[np.argmin(xi[:, 0])]))) / abs(config.c)
    # u = -c0 + wave part is stored in one double: recovering the wave part
    # loses eps |c0| / (|c| e^xi) relative accuracy, which bounds what is measurable
    floor = 4 * np.finfo(float).eps * abs(config.c0) / (abs(config.c) * math.exp(float(np.min(xi))))
    return CheckResult("decay", worst, 1.0, max(tol, floor),
                       f"xi in {list(map(float, depth_samples))}, {n_theta} phases",
                       details={"v_max": float(np.max(np.abs(u[..., 1]))),
                                "deepest_relative_deviation": bound,
                                "rounding_floor": floor})


def surface_samples(config: FlowConfig, n: int):
    """Latitude labels inside the admissible band (None when there is no surface)."""
    report = classify_current(config)
    if report.s_range is None:
        return None
    lo, hi = report.s_range
    if not report.trapped:
        return np.linspace(lo, hi, n)
    # stay strictly inside: the surface does not exist on the far side of s = 0
    return lo + (hi - lo) * np.linspace(0.02, 0.98, n)


def surface_root_check(config: FlowConfig, s_samples) -> CheckResult:
    target = surface_target(config)
    r = np.array([solve_surface(s, config) for s in s_samples])
    res = np.abs(h(r, s_samples, config) - target)
    return CheckResult("surface.root", float(np.max(res)), abs(target), config.tolerance,
                       f"{len(s_samples)} latitude samples",
                       details={"r0_error": abs(solve_surface(0.0, config) - config.r0)})


def _kinematic_residual(config, s, q, t, step, s_scale):
    r = np.array([solve_surface(si, config) for si in s])
    ds = step * s_scale
    r_up = np.array([solve_surface(si + ds, config) for si in s])
    r_dn = np.array([solve_surface(si - ds, config) for si in s])
    dq = step * config.wavelength
    dt = step * config.period
    S, Q, T = np.meshgrid(s, q, t, indexing="ij")
    R = np.broadcast_to(r[:, None, None], S.shape)
    Rup = np.broadcast_to(r_up[:, None, None], S.shape)
    Rdn = np.broadcast_to(r_dn[:, None, None], S.shape)
    X = lambda qq, ss, rr, tt: kin.position(LabelPoint(qq, ss, rr), tt, config)
    d_q = (X(Q + dq, S, R, T) - X(Q - dq, S, R, T)) / (2 * dq)
    d_s = (X(Q, S + ds, Rup, T) - X(Q, S - ds, Rdn, T)) / (2 * ds)
    d_t = (X(Q, S, R, T + dt) - X(Q, S, R, T - dt)) / (2 * dt)
    eta_x = d_q[..., 2] / d_q[..., 0]
    eta_y = d_s[..., 2] - eta_x * d_s[..., 0]
    eta_t = d_t[..., 2] - eta_x * d_t[..., 0]
    vel = kin.velocity(LabelPoint(Q, S, R), T, config)
    res = vel[..., 2] - (eta_t + vel[..., 0] * eta_x + vel[..., 1] * eta_y)
    return float(np.max(np.abs(res)))


def boundary_check(config: FlowConfig, s_samples, q_samples, t_samples, step=1e-2) -> list[CheckResult]:
    """Dynamic (P = P0) and kinematic conditions on the free surface.

    The kinematic condition is tested on the parametric surface
    ``X(q, s, t) = position((q, s, r(s)), t)``: slopes and the rate of change
    of the surface elevation follow from central differences with relative
    step ``step`` and ``step/2``; the observed convergence order is recorded.
    """
    s = np.asarray(s_samples, dtype=float)
    q = np.asarray(q_samples, dtype=float)
    t = np.asarray(t_samples, dtype=float)
    r = np.array([solve_surface(si, config) for si in s])
    S, Q = np.meshgrid(s, q, indexing="ij")
    P = kin.pressure(LabelPoint(Q, S, np.broadcast_to(r[:, None], S.shape)), config)
    grid = f"{len(s)} x {len(q)} surface labels x {len(t)} times"
    dynamic = CheckResult("boundary.dynamic", float(np.max(np.abs(P - config.P0))),
                          config.rho * config.g * abs(config.r0), 1e-10, grid)
    # meridional differencing must not leave the band; the samples keep >= 1% clearance
    s_scale = 1e-2 * (np.ptp(s) if np.ptp(s) > 0 else 1.0 / config.k)
    coarse = _kinematic_residual(config, s, q, t, step, s_scale)
    fine = _kinematic_residual(config, s, q, t, step / 2, s_scale)
    order = math.log2(coarse / fine) if fine > 0 and coarse > 0 else math.inf
    # the condition is exact, so only O(step^2) discretisation error may remain
    kinematic = CheckResult("boundary.kinematic", fine, abs(config.c), 10 * step ** 2, grid,
                            status="ok" if order >= 1.9 else "order-too-low",
                            details={"coarse": coarse, "fine": fine, "order": order, "step": step})
    return [dynamic, kinematic]


def pollard_gap_check(config: FlowConfig, dps=50, tol=1e-10) -> CheckResult:
    """With no current, Pollard's relation at the Gerstner root equals ``-f^2 c^2``.

    The root is recomputed in extended precision because the residual of the
    quartic is ill-conditioned relative to the tiny gap.
    """
    with mpmath.workdps(dps):
        c_plus, c_minus = solve_dispersion(config.k, 0.0, config.coriolis, config.constants, dps=dps)
        c = c_plus if config.branch == "east" else c_minus
        res = pollard_residual(c, config.k, config.coriolis, config.constants)
        gap = dispersion_gap(c, config.coriolis)
    scale = float(gap) if gap != 0 else config.g ** 2
    return CheckResult("dispersion.pollard_gap", float(abs(res + gap)), scale, tol,
                       f"mpmath {dps} digits", details={"gap": float(gap)})


def _no_surface(check_id, message):
    return CheckResult(check_id, math.nan, 1.0, 0.0, status="no-surface", details={"message": message})


def run_full_certification(config: FlowConfig, grid_spec: GridSpec = GridSpec(), profile=None) -> ResidualReport:
    """Run every check over the grid described by ``grid_spec``.

    Deterministic for fixed inputs.  Pass a stratification ``profile`` to add
    the mass conservation and stratified momentum checks (requires c0 = 0).
    """
    from . import stratification as strat

    labels, times = label_grid(config, grid_spec)
    grid = grid_spec.describe()
    checks = [dispersion_check(config)]
    try:
        checks.append(euler_check(config, labels, times, grid))
        checks.extend(incompressibility_check(labels, times, config, grid))
        checks.append(vorticity_check(labels, times, config, grid))
        checks.append(pressure_fd_check(labels, config, grid))
    except GerstnerError as exc:
        checks.append(CheckResult("fields", math.nan, 1.0, 0.0, status="error",
                                  details={"message": str(exc)}))
    checks.append(decay_check(config))
    if config.c0 == 0:
        checks.append(pollard_gap_check(config))

    s = surface_samples(config, grid_spec.n_surface_s)
    ids = ("surface.root", "boundary.dynamic", "boundary.kinematic")
    if s is None:
        checks.extend(_no_surface(i, "current not admissible: empty meridional band") for i in ids)
    else:
        q = np.linspace(0.0, config.wavelength, grid_spec.n_surface_q, endpoint=False)
        t = np.linspace(0.0, config.period, grid_spec.n_surface_t, endpoint=False)
        try:
            surface_checks = [surface_root_check(config, s)]
            surface_checks += boundary_check(config, s, q, t, grid_spec.kinematic_step)
        except NoSurfaceError as exc:
            surface_checks = [_no_surface(i, str(exc)) for i in ids]
        checks.extend(surface_checks)

    if profile is not None:
        L, T = _outer(labels, times)
        scale = abs(config.c) * config.rho * config.k
        mass = np.abs(strat.mass_conservation_residual(L, T, profile, config))
        rho_q = np.abs(strat.density_q_derivative(L, T, profile, config))
        euler = np.abs(strat.stratified_euler_residual(L, T, profile, config))
        checks += [
            CheckResult("stratified.mass", float(mass.max()), scale, 1e-12, grid),
            CheckResult("stratified.rho_q", float(rho_q.max()), 1.0, 1e-13, grid),
            CheckResult("stratified.euler", float(euler.max()), config.rho * config.g, 1e-10, grid),
        ]
    return ResidualReport(checks)


MUTATIONS = ("none", "wrong-dispersion", "zero-offset", "flip-offset")


def mutate(config: FlowConfig, kind: str) -> FlowConfig:
    """Deliberately break a configuration (for mutation testing)."""
    if kind == "none":
        return config
    if kind == "wrong-dispersion":
        return config.replace(c=config.c * (1 + 1e-6))
    if kind == "zero-offset":
        return config.replace(offset_slope=0.0)
    if kind == "flip-offset":
        return config.replace(offset_slope=-config.offset_rate)
    raise ValueError(f"unknown mutation {kind!r}; choose from {', '.join(MUTATIONS)}")
