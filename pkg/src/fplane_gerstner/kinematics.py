"""The exact Lagrangian flow map and the fields derived from it.

A particle with labels ``(q, s, r)`` sits at

    x = q - c0 t - exp(xi)/k sin(theta)
    y = s
    z = r + exp(xi)/k cos(theta)

with ``xi = k (r - m(s))`` and ``theta = k (q - c t)``.  Every function here
broadcasts over array-valued labels and times.  Vectors come back with a
trailing axis of length 3 and matrices with trailing shape ``(3, 3)``.

Matrix layout follows the label-row convention: ``jacobian(...)[..., i, j]``
is the derivative of coordinate ``j`` (x, y, z) with respect to label ``i``
(q, s, r).  The velocity gradient is returned the usual way round,
``velocity_gradient(...)[..., i, j] = dU_i/dx_j``.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, DomainError, OutOfFluidError
from .model import FlowConfig


class LabelPoint(NamedTuple):
    q: float | np.ndarray
    s: float | np.ndarray
    r: float | np.ndarray


class Phase(NamedTuple):
    xi: float | np.ndarray
    theta: float | np.ndarray


class FlowState(NamedTuple):
    position: np.ndarray
    velocity: np.ndarray
    time: float | np.ndarray


def meridional_offset(s, config: FlowConfig):
    """``m(s) = f c s / (f_hat c0 + g)`` in metres."""
    return config.offset_rate * np.asarray(s, dtype=float)


def phase(label: LabelPoint, t, config: FlowConfig) -> Phase:
    """Return ``(xi, theta)``; raises DomainError wherever ``xi >= 0``."""
    q, s, r = (np.asarray(a, dtype=float) for a in label)
    k = config.k
    xi = k * (r - meridional_offset(s, config))
    if np.any(xi >= 0):
        raise DomainError(
            f"label outside the fluid domain: xi = k[r - m(s)] must be negative "
            f"(max xi = {np.max(xi):.6g})")
    theta = k * (q - config.c * np.asarray(t, dtype=float))
    return Phase(xi, theta)


def in_domain(label: LabelPoint, config: FlowConfig):
    """Boolean mask of labels with ``|s| <= s0`` and ``r - m(s) <= r0``."""
    q, s, r = (np.asarray(a, dtype=float) for a in label)
    return (np.abs(s) <= config.s0) & (r - meridional_offset(s, config) <= config.r0)


def _ecs(label, t, config):
    xi, theta = phase(label, t, config)
    e, cos, sin = np.broadcast_arrays(np.exp(xi), np.cos(theta), np.sin(theta))
    return e, cos, sin, np.broadcast_arrays(*label, t)


def position(label: LabelPoint, t, config: FlowConfig) -> np.ndarray:
    e, cos, sin, (q, s, r, t) = _ecs(label, t, config)
    k = config.k
    x = q - config.c0 * t - e * sin / k
    z = r + e * cos / k
    return np.stack([x, np.array(s, dtype=float), z], axis=-1)


def velocity(label: LabelPoint, t, config: FlowConfig) -> np.ndarray:
    e, cos, sin, _ = _ecs(label, t, config)
    c = config.c
    u = -config.c0 + c * e * cos
    w = c * e * sin
    return np.stack([u, np.zeros_like(u), w], axis=-1)


def acceleration(label: LabelPoint, t, config: FlowConfig) -> np.ndarray:
    e, cos, sin, _ = _ecs(label, t, config)
    a = config.k * config.c ** 2 * e
    du = a * sin
    return np.stack([du, np.zeros_like(du), -a * cos], axis=-1)


def flow_state(label: LabelPoint, t, config: FlowConfig) -> FlowState:
    return FlowState(position(label, t, config), velocity(label, t, config), t)


def _matrix(rows):
    return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)


def jacobian(label: LabelPoint, t, config: FlowConfig) -> np.ndarray:
    """Jacobian of the flow map; rows are d/dq, d/ds, d/dr."""
    e, cos, sin, _ = _ecs(label, t, config)
    ms = config.offset_rate
    ec, es = e * cos, e * sin
    zero, one = np.zeros_like(ec), np.ones_like(ec)
    return _matrix([
        [1 - ec, zero, -es],
        [ms * es, one, -ms * ec],
        [-es, zero, 1 + ec],
    ])


def jacobian_rate(label: LabelPoint, t, config: FlowConfig) -> np.ndarray:
    """Time derivative of :func:`jacobian` at fixed labels."""
    e, cos, sin, _ = _ecs(label, t, config)
    ms = config.offset_rate
    a = config.k * config.c * e
    zero = np.zeros_like(a)
    return _matrix([
        [-a * sin, zero, a * cos],
        [-ms * a * cos, zero, -ms * a * sin],
        [a * cos, zero, a * sin],
    ])


def jacobian_determinant(label: LabelPoint, config: FlowConfig):
    """Closed form ``1 - exp(2 xi)``; time independent."""
    xi, _ = phase(label, 0.0, config)
    return -np.expm1(2 * xi)


def jacobian_inverse(label: LabelPoint, t, config: FlowConfig) -> np.ndarray:
    e, cos, sin, _ = _ecs(label, t, config)
    ms = config.offset_rate
    ec, es, e2 = e * cos, e * sin, e * e
    det = 1 - e2
    zero = np.zeros_like(ec)
    adj = _matrix([
        [1 + ec, zero, es],
        [-ms * es, det, ms * (ec - e2)],
        [es, zero, 1 - ec],
    ])
    return adj / det[..., None, None]


def velocity_gradient(label: LabelPoint, t, config: FlowConfig) -> np.ndarray:
    """Eulerian velocity gradient ``G[i, j] = dU_i/dx_j`` in closed form."""
    e, cos, sin, _ = _ecs(label, t, config)
    ms = config.offset_rate
    a = config.c * config.k * e / (1 - e * e)
    zero = np.zeros_like(a)
    return _matrix([
        [-a * sin, a * ms * (e - cos), a * (cos - e)],
        [zero, zero, zero],
        [a * (cos + e), -a * ms * sin, a * sin],
    ])


def velocity_gradient_from_jacobian(label: LabelPoint, t, config: FlowConfig) -> np.ndarray:
    """Velocity gradient assembled from the Jacobian by the chain rule.

    With label rows, ``dJ/dt = J G^T``, hence ``G = (J^-1 dJ/dt)^T``.
    """
    prod = jacobian_inverse(label, t, config) @ jacobian_rate(label, t, config)
    return np.swapaxes(prod, -1, -2)


def curl(grad: np.ndarray) -> np.ndarray:
    """Curl ``(w_y - v_z, u_z - w_x, v_x - u_y)`` of a gradient ``G[i, j] = dU_i/dx_j``."""
    g = grad
    return np.stack([
        g[..., 2, 1] - g[..., 1, 2],
        g[..., 0, 2] - g[..., 2, 0],
        g[..., 1, 0] - g[..., 0, 1],
    ], axis=-1)


def vorticity(label: LabelPoint, t, config: FlowConfig) -> np.ndarray:
    """Closed-form vorticity of the flow."""
    e, cos, sin, _ = _ecs(label, t, config)
    k, c = config.k, config.c
    e2 = e * e
    denom = 1 - e2
    b = k * c * config.offset_rate
    return np.stack([
        -b * e * sin / denom,
        -2 * k * c * e2 / denom,
        b * (e * cos - e2) / denom,
    ], axis=-1)


def pressure(label: LabelPoint, config: FlowConfig):
    """Pressure in Pa; independent of q and t and equal to P0 at ``(r0, s=0)``."""
    q, s, r = (np.asarray(a, dtype=float) for a in label)
    xi, _ = phase(label, 0.0, config)
    k, G, r0 = config.k, config.effective_gravity, config.r0
    field = G / (2 * k) * np.exp(2 * xi) + config.f * config.c0 * s - G * r
    ref = G / (2 * k) * math.exp(2 * k * r0) - G * r0
    return config.rho * (field - ref) + config.P0


def pressure_label_gradient(label: LabelPoint, config: FlowConfig) -> np.ndarray:
    """Analytic ``(P_q, P_s, P_r)``."""
    xi, _ = phase(label, 0.0, config)
    e2 = np.exp(2 * xi)
    rho, G = config.rho, config.effective_gravity
    p_s = rho * (config.f * config.c0 - G * config.offset_rate * e2)
    p_r = rho * G * np.expm1(2 * xi)
    return np.stack([np.zeros_like(p_s), p_s, p_r], axis=-1)


def _mismatch(q, r, x, z, m, t, config):
    k = config.k
    e = np.exp(k * (r - m))
    th = k * (q - config.c * t)
    return q - config.c0 * t - e * np.sin(th) / k - x, r + e * np.cos(th) / k - z, e, th


def _fixed_point(q, r, x, z, m, t, top, tol, max_iter, config):
    """Iterate the contraction; returns ``(q, r, iterations, converged)``."""
    k = config.k
    rate = math.exp(k * config.r0)
    for it in range(1, max_iter + 1):
        e = np.exp(k * (r - m))
        th = k * (q - config.c * t)
        q_new = x + config.c0 * t + e * np.sin(th) / k
        r_new = np.minimum(z - e * np.cos(th) / k, top)
        step = np.hypot(q_new - q, r_new - r)
        q, r = q_new, r_new
        # a-posteriori bound on the distance to the fixed point
        if np.all(step * rate / (1 - rate) <= tol):
            return q, r, it, True
    return q, r, max_iter, False


def _newton(q, r, x, z, m, t, top, tol, max_iter, config):
    """Damped Newton; returns ``(q, r, iterations)``.  Points it cannot
    settle are left for the caller to detect from the mismatch."""
    fx, fz, e, th = _mismatch(q, r, x, z, m, t, config)
    it = 0
    for it in range(1, max_iter + 1):
        norm = np.hypot(fx, fz)
        done = norm <= tol
        if np.all(done):
            break
        ec, es = e * np.cos(th), e * np.sin(th)
        det = 1 - e * e
        # [[1 - ec, -es], [-es, 1 + ec]] (dq, dr) = -(fx, fz)
        dq = -((1 + ec) * fx + es * fz) / det
        dr = -(es * fx + (1 - ec) * fz) / det
        lam = np.where(done, 0.0, 1.0)
        for _ in range(40):
            qn, rn = q + lam * dq, np.minimum(r + lam * dr, top)
            fxn, fzn, en, thn = _mismatch(qn, rn, x, z, m, t, config)
            worse = np.hypot(fxn, fzn) > norm
            if not np.any(worse):
                break
            lam = np.where(worse, 0.5 * lam, lam)
        stalled = np.all(np.hypot(fxn, fzn) >= norm)
        q, r, fx, fz, e, th = qn, rn, fxn, fzn, en, thn
        if stalled:
            break
    return q, r, it


def invert_flow_map(x, z, s, t, config: FlowConfig, *, method="newton", tol=1e-11,
                    max_iter=None, r_surface=None, full_output=False, on_fail="raise"):
    """Find labels ``(q, r)`` of the particle at physical ``(x, z)`` on the
    meridional slice ``y = s`` at time ``t``.

    ``method`` is ``"newton"`` (damped Newton warm-started at ``(x + c0 t, z)``)
    or ``"fixed-point"`` (the contraction ``q = x + c0 t + e^xi/k sin theta``,
    ``r = z - e^xi/k cos theta``, with rate at most ``e^{k r0}``).  Newton can
    cycle when ``e^{k r0}`` is close to 1; points it leaves unsettled are
    handed to the contraction.  Iterates are kept in ``xi <= k r0``.  ``tol``
    is the position error in metres; it is raised to a few ulps of
    ``|x|, |z|`` when those are large.

    Points that cannot be reached from inside the domain, or whose label lies
    above ``r_surface``, raise OutOfFluidError.  ``r_surface`` defaults to the
    free-surface label from :func:`fplane_gerstner.surface.solve_surface`;
    pass ``np.inf`` to skip that check.  With ``on_fail="nan"`` such points
    get NaN labels instead.  With ``full_output`` the iteration count is
    returned as a third value.
    """
    if method not in ("newton", "fixed-point"):
        raise ValueError(f"unknown method {method!r}")
    if on_fail not in ("raise", "nan"):
        raise ValueError(f"on_fail must be 'raise' or 'nan', got {on_fail!r}")
    x, z, s, t = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x, z, s, t)))
    m = meridional_offset(s, config)
    tol = np.maximum(tol, 8 * np.finfo(float).eps * np.maximum(np.abs(x), np.abs(z)))
    rate = math.exp(config.k * config.r0)
    fp_iter = 2 * math.ceil(math.log(1e-12) / math.log(rate)) + 10
    # projecting onto xi <= k r0 keeps every iterate where the map contracts
    top = config.r0 + m
    q = x + config.c0 * t
    r = np.minimum(z, top)
    if method == "fixed-point":
        q, r, it, converged = _fixed_point(q, r, x, z, m, t, top, tol,
                                           fp_iter if max_iter is None else max_iter, config)
        if not converged and on_fail == "raise":
            fx, fz, _, _ = _mismatch(q, r, x, z, m, t, config)
            raise ConvergenceError("fixed-point inversion did not converge",
                                   residual=float(np.max(np.hypot(fx, fz))), iterations=it)
        slack = 2 * tol
    else:
        q, r, it = _newton(q, r, x, z, m, t, top, tol, 100 if max_iter is None else max_iter, config)
        fx, fz, _, _ = _mismatch(q, r, x, z, m, t, config)
        retry = np.hypot(fx, fz) > tol
        if np.any(retry):
            sub = tuple(a[retry] for a in (x, z, m, t, top, tol))
            xs, zs, ms, ts, tops, tols = sub
            qs, rs, extra, _ = _fixed_point(xs + config.c0 * ts, np.minimum(zs, tops), xs, zs, ms, ts,
                                            tops, tols, fp_iter, config)
            # polish with Newton from the contracted start
            qs, rs, more = _newton(qs, rs, xs, zs, ms, ts, tops, tols, 100, config)
            q, r = np.array(q, dtype=float), np.array(r, dtype=float)
            q[retry], r[retry] = qs, rs
            it += extra + more
        slack = tol
    fx, fz, _, _ = _mismatch(q, r, x, z, m, t, config)
    unreached = np.hypot(fx, fz) > slack
    if on_fail == "raise" and np.any(unreached & (r < top)):
        raise ConvergenceError("inversion did not converge",
                               residual=float(np.max(np.hypot(fx, fz))), iterations=it)
    if on_fail == "raise" and np.any(unreached):
        raise OutOfFluidError(
            f"{int(np.count_nonzero(unreached))} point(s) lie above every admissible label")
    if r_surface is None:
        from .surface import solve_surface  # surface builds on this module
        r_surface = np.vectorize(lambda si: solve_surface(si, config), otypes=[float])(s)
    above = r > r_surface + tol
    if on_fail == "nan":
        bad = unreached | above
        q, r = np.where(bad, np.nan, q), np.where(bad, np.nan, r)
    elif np.any(above):
        raise OutOfFluidError(
            f"{int(np.count_nonzero(above))} point(s) lie above the free surface")
    q, r = q[()], r[()]
    if full_output:
        return q, r, it
    return q, r
