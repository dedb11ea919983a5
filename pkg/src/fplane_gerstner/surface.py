"""Trapped free surface and the admissibility of a uniform zonal current.

At each latitude label ``s`` the free surface is the label ``r(s) <= r0`` on
which the pressure equals the atmospheric value.  That is the root of

    h(r, s) = G/(2k) exp(2k[r - m(s)]) + f c0 s - G r  =  h(r0, 0),

with ``G = f_hat c0 + g``.  ``h`` is strictly decreasing in ``r`` and blows up
as ``r -> -inf``, so a root below ``r0`` exists exactly when
``A(s) = h(r0, s) - h(r0, 0) < 0`` (or ``= 0``, giving ``r(s) = r0``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import DomainError, NoSurfaceError
from .kinematics import LabelPoint, meridional_offset, position
from .model import FlowConfig

Hemisphere = Literal["north", "south", "equator"]
CurrentClass = Literal["following", "adverse", "none"]


def h(r, s, config: FlowConfig):
    G, k = config.effective_gravity, config.k
    xi = k * (np.asarray(r, dtype=float) - meridional_offset(s, config))
    return G / (2 * k) * np.exp(2 * xi) + config.f * config.c0 * np.asarray(s, dtype=float) - G * r


def h_r(r, s, config: FlowConfig):
    """``dh/dr = G (exp(2k[r - m(s)]) - 1)``, negative inside the domain."""
    xi = config.k * (np.asarray(r, dtype=float) - meridional_offset(s, config))
    return config.effective_gravity * np.expm1(2 * xi)


def surface_target(config: FlowConfig) -> float:
    """``h(r0, 0)``, the value of h on the free surface."""
    G, k, r0 = config.effective_gravity, config.k, config.r0
    return G / (2 * k) * math.exp(2 * k * r0) - G * r0


def existence_margin(s, config: FlowConfig):
    """``A1(s) + A2(s) = h(r0, s) - h(r0, 0)``; a surface exists where it is <= 0.

    Evaluated in the cancellation-free form
    ``G/(2k) e^{2k r0} (exp(-2k m(s)) - 1) + f c0 s``.
    """
    s = np.asarray(s, dtype=float)
    G, k = config.effective_gravity, config.k
    a1 = G / (2 * k) * math.exp(2 * k * config.r0) * np.expm1(-2 * k * meridional_offset(s, config))
    return a1 + config.f * config.c0 * s


def existence_margin_slope(s, config: FlowConfig):
    """``d(A1 + A2)/ds = f (c0 - c exp(2k[r0 - m(s)]))``."""
    m = meridional_offset(s, config)
    return config.f * (config.c0 - config.c * np.exp(2 * config.k * (config.r0 - m)))


def solve_surface(s: float, config: FlowConfig, tol: float | None = None) -> float:
    """Return the free-surface label ``r(s)``.

    The root is bracketed starting from ``[r0 - 1/k, r0]``, the lower end pushed
    down geometrically until h exceeds the target, then polished by Newton
    steps safeguarded by bisection.  ``tol`` is in metres (default
    ``tolerance * max(1, |r0|)``); on return ``|h(r) - target| <= |h_r| tol``.
    """
    s = float(s)
    if tol is None:
        tol = config.tolerance * max(1.0, abs(config.r0))
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    r0, k = config.r0, config.k
    target = surface_target(config)
    margin = float(existence_margin(s, config))
    if margin > 0:
        raise NoSurfaceError(
            f"no free surface at s={s:.6g} m: h(r0, s) - h(r0, 0) = {margin:.6g} > 0", value=margin, s=s)
    if margin == 0:
        return r0

    def F(r):
        return float(h(r, s, config)) - target

    if not h_r(r0, s, config) < 0:
        raise DomainError(f"h is not decreasing at r0 for s={s:.6g}; label outside the domain")
    hi = r0
    span = 1.0 / k
    lo = r0 - span
    while F(lo) < 0:
        span *= 2
        lo = r0 - span
        if span > 1e12 / k:
            raise NoSurfaceError(f"could not bracket the surface root at s={s:.6g}", value=margin, s=s)

    r = hi + F(hi) / -float(h_r(hi, s, config))
    r = min(max(r, lo), hi)
    for _ in range(200):
        val = F(r)
        slope = float(h_r(r, s, config))
        assert slope < 0, "h must decrease throughout the bracket"
        if abs(val) <= abs(slope) * tol:
            break
        if val > 0:
            lo = r
        else:
            hi = r
        step = -val / slope
        r_new = r + step
        if not lo < r_new < hi:
            r_new = 0.5 * (lo + hi)
        r = r_new
    # one extra Newton step brings the residual down to rounding level
    r = min(r - F(r) / float(h_r(r, s, config)), r0)
    return r


def surface_slope(s, r, config: FlowConfig):
    """``r'(s)`` from implicit differentiation of the surface equation."""
    e2 = np.exp(2 * config.k * (np.asarray(r, dtype=float) - meridional_offset(s, config)))
    return config.f / config.effective_gravity * (config.c0 - config.c * e2) / (1 - e2)


def trapping_margin(s, r, config: FlowConfig):
    """Signed slack of the trapping condition ``sign(s) f (c0 - c e^{2k[r - m(s)]}) < 0``.

    Positive when ``r'(s)`` points towards ``r0`` (the wave decays away from ``s = 0``).
    """
    s = np.asarray(s, dtype=float)
    e2 = np.exp(2 * config.k * (np.asarray(r, dtype=float) - meridional_offset(s, config)))
    return -np.sign(s) * config.f * (config.c0 - config.c * e2)


@dataclass
class AdmissibilityCheck:
    ok: bool
    margins: dict[str, float]


def check_admissibility(config: FlowConfig, s: float) -> AdmissibilityCheck:
    """Evaluate the three restrictions at latitude label ``s``.

    Margins are signed slacks, positive when satisfied:

    ``fcs``       f c s > 0
    ``A1+A2``     -(A1(s) + A2(s)), the surface existence condition
    ``trapping``  the trapping sign condition evaluated at ``r = r0``
    """
    margins = {
        "fcs": config.f * config.c * s,
        "A1+A2": -float(existence_margin(s, config)),
        "trapping": float(trapping_margin(s, config.r0, config)),
    }
    return AdmissibilityCheck(all(v > 0 for v in margins.values()), margins)


@dataclass
class AdmissibilityReport:
    hemisphere: Hemisphere
    branch: str
    current_class: CurrentClass
    case_id: str | None
    s_range: tuple[float, float] | None
    constraints: list[tuple[str, bool, float]] = field(default_factory=list)
    c0_interval: tuple[float, float] | None = None
    existence_edge: float | None = None
    trapped: bool = True
    band_rule: str = ("operational: connected component of {f c s > 0, A1+A2 < 0, "
                      "trapping at r(s)} adjacent to s = 0, capped at s0")

    @property
    def admissible(self) -> bool:
        return self.s_range is not None

    def to_dict(self):
        return {
            "hemisphere": self.hemisphere,
            "branch": self.branch,
            "current_class": self.current_class,
            "case_id": self.case_id,
            "s_range": list(self.s_range) if self.s_range else None,
            "c0_interval": list(self.c0_interval) if self.c0_interval else None,
            "existence_edge": self.existence_edge,
            "trapped": self.trapped,
            "constraints": [{"id": i, "satisfied": ok, "margin": m} for i, ok, m in self.constraints],
            "band_rule": self.band_rule,
        }


_CASES = {
    (1, "east"): "I-1", (1, "west"): "I-2",
    (-1, "east"): "II-1", (-1, "west"): "II-2",
}


def adverse_limit(config: FlowConfig) -> float:
    """``c e^{2k r0}``: the largest adverse current magnitude (signed like c)."""
    return config.c * math.exp(2 * config.k * config.r0)


def _band_ok(s, config):
    if existence_margin(s, config) >= 0:
        return False
    r = solve_surface(s, config)
    return trapping_margin(s, r, config) > 0


def _bisect_edge(pred, good, bad, xtol):
    while abs(bad - good) > xtol:
        mid = 0.5 * (good + bad)
        if mid == good or mid == bad:
            break  # adjacent doubles: xtol is below the spacing at this magnitude
        if pred(mid):
            good = mid
        else:
            bad = mid
    return good


def existence_edge(config: FlowConfig, direction: float, xtol: float | None = None) -> float | None:
    """First zero of ``A1 + A2`` on the side ``sign(s) = direction``, or None.

    ``A1 + A2`` is convex along that side, so its first zero is bracketed by
    doubling once the slope has turned positive.
    """
    if config.f == 0:
        return None
    xtol = xtol or 1e-12 * config.s0
    A = lambda s: float(existence_margin(direction * s, config))
    slope_inf = direction * config.f * config.c0
    if slope_inf <= 0:
        return None
    hi = config.s0
    while A(hi) < 0:
        hi *= 2
        if hi > 1e20:
            return None
    lo = 0.0
    # find a point inside the negative dip first
    probe = hi
    while probe > xtol and A(probe) >= 0:
        probe *= 0.5
    if probe <= xtol:
        return 0.0
    lo = probe
    return direction * _bisect_edge(lambda s: A(s) < 0, lo, hi, xtol)


def classify_current(config: FlowConfig, step: float | None = None) -> AdmissibilityReport:
    """Classify the current and find the admissible meridional band.

    The band is scanned outward from ``s = 0`` in steps of ``step`` (default
    ``1e-3 s0``) on the side where ``f c s > 0``; the first failing step is
    refined by bisection.
    """
    f, c, c0 = config.f, config.c, config.c0
    step = step or 1e-3 * config.s0
    if c * c0 < 0:
        cls = "following"
    elif c * c0 > 0:
        cls = "adverse"
    else:
        cls = "none"

    if f == 0:
        # equator: h has no s dependence, the surface is r = r0 everywhere but not trapped
        return AdmissibilityReport(
            hemisphere="equator", branch=config.branch, current_class=cls, case_id=None,
            s_range=(-config.s0, config.s0), constraints=[("fcs", False, 0.0)], trapped=False,
            band_rule="equatorial: surface r(s) = r0 for all s; no meridional trapping")

    hemi_sign = 1 if f > 0 else -1
    case_id = _CASES[(hemi_sign, config.branch)]
    hemisphere = "north" if f > 0 else "south"
    direction = 1.0 if f * c > 0 else -1.0
    g_bound = -config.g / config.f_hat if config.f_hat > 0 else -math.inf
    lim = adverse_limit(config)
    if c > 0:
        follow_iv, adverse_iv = (g_bound, 0.0), (0.0, lim)
        in_follow = g_bound < c0 <= 0
        in_adverse = 0 < c0 < lim
    else:
        follow_iv, adverse_iv = (0.0, math.inf), (max(lim, g_bound), 0.0)
        in_follow = c0 >= 0
        in_adverse = lim < c0 < 0
    interval = adverse_iv if cls == "adverse" else follow_iv

    slope0 = float(existence_margin_slope(0.0, config))
    constraints = [
        ("fcs", True, abs(f * c) * config.s0),
        ("adverse-limit", direction * slope0 < 0, -direction * slope0),
    ]
    edge = existence_edge(config, direction)
    report = AdmissibilityReport(
        hemisphere=hemisphere, branch=config.branch, current_class=cls, case_id=case_id,
        s_range=None, constraints=constraints, c0_interval=interval, existence_edge=edge)
    if not (in_follow or in_adverse) or direction * slope0 >= 0:
        report.current_class = "none"
        return report

    pred = lambda a: _band_ok(direction * a, config)
    good, a = 0.0, 0.0
    xtol = 1e-9 * config.s0
    while True:
        a_next = min(a + step, config.s0)
        if not pred(a_next):
            good = _bisect_edge(pred, a, a_next, xtol)
            break
        good = a = a_next
        if a >= config.s0:
            break
    if good <= 0:
        report.current_class = "none"
        return report
    report.s_range = (0.0, good) if direction > 0 else (-good, 0.0)
    report.constraints.append(("band", True, good))
    return report


@dataclass
class SurfaceProfile:
    s: np.ndarray
    r_of_s: np.ndarray
    amplitude: np.ndarray
    mesh: np.ndarray | None = None
    q: np.ndarray | None = None
    t: float | None = None

    @property
    def samples(self):
        return np.column_stack([self.s, self.r_of_s])


def surface_mesh(config: FlowConfig, s_grid, q_grid=None, t: float = 0.0) -> SurfaceProfile:
    """Sample ``r(s)`` on ``s_grid`` and, if ``q_grid`` is given, the physical
    surface points ``position((q, s, r(s)), t)`` with shape ``(ns, nq, 3)``."""
    s_grid = np.asarray(s_grid, dtype=float)
    r = np.array([solve_surface(s, config) for s in s_grid])
    amp = np.exp(config.k * (r - meridional_offset(s_grid, config))) / config.k
    mesh = None
    if q_grid is not None:
        q_grid = np.asarray(q_grid, dtype=float)
        S, Q = np.meshgrid(s_grid, q_grid, indexing="ij")
        R = np.broadcast_to(r[:, None], S.shape)
        mesh = position(LabelPoint(Q, S, R), t, config)
    return SurfaceProfile(s_grid, r, amp, mesh, q_grid, t)
