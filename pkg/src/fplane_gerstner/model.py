"""Physical constants, flow configuration and the dispersion relation.

The wave phase speed ``c`` of the f-plane Gerstner solution with a uniform
current ``c0`` solves the quadratic

    k c**2 + f_hat c - f_hat c0 - g = 0,

whose roots straddle zero whenever ``c0 > -g / f_hat``.  Because ``f_hat`` is
of the order of 1e-4 s^-1 while ``sqrt(4 k g)`` is of order one, the root of
smaller magnitude is recovered from the product of the roots rather than by
direct subtraction.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import mpmath

from .errors import DomainError, InfeasibleError

Branch = Literal["east", "west"]

DEFAULT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class PhysicalConstants:
    """Earth rotation rate ``Omega`` [rad/s] and gravity ``g`` [m/s^2]."""

    Omega: float = 7.29e-5
    g: float = 9.81

    def __post_init__(self):
        if not self.Omega >= 0:
            raise DomainError(f"Omega must be >= 0, got {self.Omega!r}")
        if not self.g > 0:
            raise DomainError(f"g must be > 0, got {self.g!r}")


EARTH = PhysicalConstants()


class CoriolisPair(NamedTuple):
    phi: float
    f: float
    f_hat: float


def coriolis_parameters(phi: float, constants: PhysicalConstants = EARTH) -> CoriolisPair:
    """Return the f-plane Coriolis pair ``(f, f_hat)`` at latitude ``phi`` (rad).

    Raises DomainError unless ``-pi/2 < phi < pi/2``.
    """
    phi = float(phi)
    if not -math.pi / 2 < phi < math.pi / 2:
        raise DomainError(f"latitude must lie in the open interval (-pi/2, pi/2) rad, got {phi!r}")
    two_omega = 2.0 * constants.Omega
    return CoriolisPair(phi, two_omega * math.sin(phi), two_omega * math.cos(phi))


def _roots(k, c0, f_hat, g, sqrt):
    forcing = f_hat * c0 + g
    disc = f_hat * f_hat + 4 * k * forcing
    if not disc > 0:
        raise InfeasibleError(
            f"dispersion discriminant is not positive ({float(disc):.6g}); "
            f"the current must exceed -g/f_hat", discriminant=disc)
    root = sqrt(disc)
    # f_hat >= 0, so -(f_hat + root) carries no cancellation; c_plus follows from Vieta
    c_minus = -(f_hat + root) / (2 * k)
    c_plus = 2 * forcing / (f_hat + root)
    return c_plus, c_minus


def solve_dispersion(k, c0, coriolis: CoriolisPair, constants: PhysicalConstants = EARTH,
                     dps: int | None = None):
    """Return ``(c_plus, c_minus)``, the eastward and westward phase speeds.

    With ``dps`` set, the roots are computed with mpmath at that many decimal
    digits and returned as ``mpf``; the inputs are taken as exact binary
    values.  This is useful when comparing against other dispersion relations
    whose difference is far below double precision rounding of ``c``.
    """
    if not k > 0:
        raise DomainError(f"wavenumber must be positive, got {k!r}")
    if dps is None:
        return _roots(float(k), float(c0), coriolis.f_hat, constants.g, math.sqrt)
    with mpmath.workdps(dps):
        c_plus, c_minus = _roots(mpmath.mpf(k), mpmath.mpf(c0), mpmath.mpf(coriolis.f_hat),
                                 mpmath.mpf(constants.g), mpmath.sqrt)
        return +c_plus, +c_minus


def _promote(c, *values):
    # keep mpmath arithmetic exact-to-precision instead of rounding float products first
    if isinstance(c, mpmath.mpf):
        return tuple(mpmath.mpf(v) for v in values)
    return values


def dispersion_residual(c, k, c0, coriolis: CoriolisPair, constants: PhysicalConstants = EARTH):
    """``k c**2 + f_hat c - f_hat c0 - g`` in m/s^2; zero on the dispersion curve."""
    k, c0, f_hat, g = _promote(c, k, c0, coriolis.f_hat, constants.g)
    return k * c * c + f_hat * c - f_hat * c0 - g


def pollard_residual(c, k, coriolis: CoriolisPair, constants: PhysicalConstants = EARTH):
    """Residual of Pollard's dispersion relation in the form
    ``k**2 c**4 - 4 Omega**2 c**2 + 2 g f_hat c - g**2``.

    Only evaluated, never solved.
    """
    k, Omega, g, f_hat = _promote(c, k, constants.Omega, constants.g, coriolis.f_hat)
    c2 = c * c
    return k * k * c2 * c2 - 4 * Omega ** 2 * c2 + 2 * g * f_hat * c - g * g


def dispersion_gap(c, coriolis: CoriolisPair):
    """``f**2 c**2``: the gap between the current-free Gerstner and Pollard relations."""
    (f,) = _promote(c, coriolis.f)
    return f ** 2 * c * c


@dataclass(frozen=True)
class FlowConfig:
    """All parameters of one wave-current configuration.

    Use :meth:`from_latitude` to build a consistent configuration; the raw
    constructor accepts any values so that deliberately broken configurations
    can be validated or used in mutation tests.

    ``offset_slope`` overrides the meridional offset slope ``dm/ds`` (normally
    ``f c / (f_hat c0 + g)``); it exists for mutation testing only.
    """

    constants: PhysicalConstants
    coriolis: CoriolisPair
    k: float
    c0: float
    branch: Branch
    c: float
    r0: float = -10.0
    s0: float = 1.0e5
    rho: float = 1025.0
    P0: float = 101325.0
    tolerance: float = DEFAULT_TOLERANCE
    offset_slope: float | None = field(default=None, compare=True)

    @classmethod
    def from_latitude(cls, phi: float, k: float, c0: float = 0.0, branch: Branch = "east",
                      r0: float = -10.0, s0: float = 1.0e5, rho: float = 1025.0,
                      P0: float = 101325.0, constants: PhysicalConstants = EARTH,
                      tolerance: float = DEFAULT_TOLERANCE) -> FlowConfig:
        """Build a configuration whose phase speed solves the dispersion relation."""
        if branch not in ("east", "west"):
            raise DomainError(f"branch must be 'east' or 'west', got {branch!r}")
        coriolis = coriolis_parameters(phi, constants)
        if coriolis.f_hat > 0 and not c0 > -constants.g / coriolis.f_hat:
            raise DomainError(
                f"current c0={c0!r} m/s violates c0 > -g/f_hat = {-constants.g / coriolis.f_hat:.6g} m/s")
        c_plus, c_minus = solve_dispersion(k, c0, coriolis, constants)
        c = c_plus if branch == "east" else c_minus
        return cls(constants=constants, coriolis=coriolis, k=float(k), c0=float(c0),
                   branch=branch, c=c, r0=float(r0), s0=float(s0), rho=float(rho),
                   P0=float(P0), tolerance=float(tolerance))

    def replace(self, **changes) -> FlowConfig:
        return dataclasses.replace(self, **changes)

    @property
    def f(self) -> float:
        return self.coriolis.f

    @property
    def f_hat(self) -> float:
        return self.coriolis.f_hat

    @property
    def g(self) -> float:
        return self.constants.g

    @property
    def effective_gravity(self) -> float:
        """``f_hat c0 + g``, the combination that plays the role of gravity."""
        return self.coriolis.f_hat * self.c0 + self.constants.g

    @property
    def offset_rate(self) -> float:
        """Slope ``dm/ds`` of the linear meridional offset ``m(s)``."""
        if self.offset_slope is not None:
            return self.offset_slope
        return self.coriolis.f * self.c / self.effective_gravity

    @property
    def period(self) -> float:
        """Wave period ``2 pi / (k |c|)`` seen by a particle, in seconds."""
        return 2 * math.pi / (self.k * abs(self.c))

    @property
    def wavelength(self) -> float:
        return 2 * math.pi / self.k


class Violation(NamedTuple):
    constraint: str
    message: str
    value: float


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def add(self, constraint, message, value):
        self.violations.append(Violation(constraint, message, float(value)))


def validate_config(config: FlowConfig) -> ValidationReport:
    """Check every invariant of ``config``; never raises."""
    report = ValidationReport()
    const = config.constants
    phi, f, f_hat = config.coriolis
    if not -math.pi / 2 < phi < math.pi / 2:
        report.add("latitude", "latitude must lie in (-pi/2, pi/2) rad", phi)
    else:
        expected = coriolis_parameters(phi, const)
        err = math.hypot(f - expected.f, f_hat - expected.f_hat)
        if err > 1e-12 * max(2 * const.Omega, 1e-300):
            report.add("coriolis", "f, f_hat inconsistent with latitude and Omega", err)
    if not config.k > 0:
        report.add("k>0", "wavenumber must be positive", config.k)
    if not config.rho > 0:
        report.add("rho>0", "density must be positive", config.rho)
    if not config.s0 > 0:
        report.add("s0>0", "meridional half-width must be positive", config.s0)
    if not config.r0 < 0:
        report.add("r0<0", "surface label depth r0 must be negative", config.r0)
    if not config.tolerance > 0:
        report.add("tolerance>0", "tolerance must be positive", config.tolerance)
    if f_hat > 0:
        bound = -const.g / f_hat
        if not config.c0 > bound:
            report.add("c0>-g/f_hat", f"current must exceed -g/f_hat = {bound:.6g} m/s", config.c0)
    if config.branch not in ("east", "west"):
        report.add("branch", "branch must be 'east' or 'west'", float("nan"))
    elif config.branch == "east" and not config.c > 0:
        report.add("branch-sign", "east branch requires c > 0", config.c)
    elif config.branch == "west" and not config.c < 0:
        report.add("branch-sign", "west branch requires c < 0", config.c)
    if config.k > 0:
        res = dispersion_residual(config.c, config.k, config.c0, config.coriolis, const)
        if not abs(res) <= config.tolerance * const.g:
            report.add("dispersion", "phase speed does not solve k c^2 + f_hat c - f_hat c0 - g = 0", res)
    return report
