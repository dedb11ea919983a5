"""Stratified variant of the solution (current-free case only).

The density depends on the labels only through ``a = e^{2 xi}/(2k) - r``::

    rho(r, s) = F(a),      P = g Fa(a) + P0 - g Fa(e^{2k r0}/(2k) - r0),

where ``Fa`` is the antiderivative of ``F`` with ``Fa(0) = 0``.  Profiles are
supplied as a pair of callables; both must be stateless and vectorised over
numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, UnsupportedConfigError
from .kinematics import LabelPoint, jacobian_inverse, phase
from .model import FlowConfig


@dataclass(frozen=True)
class DensityProfile:
    """Density law ``F`` with antiderivative ``F_anti`` and derivative ``dF``."""

    F: Callable
    F_anti: Callable
    dF: Callable
    name: str = "custom"

    def check(self, a_max: float = 100.0, n: int = 201, rtol: float = 1e-6) -> list[str]:
        """Sampled self-consistency checks; returns a list of problems (empty if fine)."""
        problems = []
        a = np.linspace(a_max / n, a_max, n)
        F = np.asarray(self.F(a), dtype=float)
        if np.any(F <= 0):
            problems.append("F must be positive on (0, inf)")
        if np.any(np.diff(F) < 0):
            problems.append("F must be non-decreasing")
        if abs(float(self.F_anti(0.0))) > 0:
            problems.append("F_anti(0) must be 0")
        step = 1e-5 * a_max
        fd = (self.F_anti(a + step) - self.F_anti(a - step)) / (2 * step)
        if np.max(np.abs(fd - F)) > rtol * np.max(np.abs(F)):
            problems.append("F_anti' does not match F")
        fd = (self.F(a + step) - self.F(a - step)) / (2 * step)
        if np.max(np.abs(fd - self.dF(a))) > rtol * max(np.max(np.abs(self.dF(a))), np.max(np.abs(F)) / a_max):
            problems.append("dF does not match F'")
        return problems


def constant_profile(rho: float) -> DensityProfile:
    return DensityProfile(
        F=lambda a: np.full_like(np.asarray(a, dtype=float), rho),
        F_anti=lambda a: rho * np.asarray(a, dtype=float),
        dF=lambda a: np.zeros_like(np.asarray(a, dtype=float)),
        name="constant",
    )


def linear_profile(rho: float, slope: float) -> DensityProfile:
    """``F(a) = rho (1 + slope a)``; ``slope`` in 1/m, must be >= 0."""
    if slope < 0:
        raise DomainError("linear profile slope must be >= 0 for a non-decreasing density")
    return DensityProfile(
        F=lambda a: rho * (1 + slope * np.asarray(a, dtype=float)),
        F_anti=lambda a: rho * (np.asarray(a, dtype=float) + 0.5 * slope * np.asarray(a, dtype=float) ** 2),
        dF=lambda a: np.full_like(np.asarray(a, dtype=float), rho * slope),
        name=f"linear:{slope!r}",
    )


def exponential_profile(rho: float, rate: float) -> DensityProfile:
    """``F(a) = rho exp(rate a)``; ``rate`` in 1/m, must be >= 0."""
    if rate < 0:
        raise DomainError("exponential profile rate must be >= 0 for a non-decreasing density")
    if rate == 0:
        return constant_profile(rho)
    return DensityProfile(
        F=lambda a: rho * np.exp(rate * np.asarray(a, dtype=float)),
        F_anti=lambda a: rho * np.expm1(rate * np.asarray(a, dtype=float)) / rate,
        dF=lambda a: rho * rate * np.exp(rate * np.asarray(a, dtype=float)),
        name=f"exp:{rate!r}",
    )


def parse_profile(spec: str, rho: float) -> DensityProfile:
    """Build a named profile: ``constant``, ``linear:<slope>`` or ``exp:<rate>``."""
    kind, _, arg = spec.strip().partition(":")
    if kind == "constant" and not arg:
        return constant_profile(rho)
    try:
        value = float(arg)
    except ValueError:
        raise ValueError(f"bad profile specification {spec!r}") from None
    if kind == "linear":
        return linear_profile(rho, value)
    if kind == "exp":
        return exponential_profile(rho, value)
    raise ValueError(f"unknown profile {kind!r}; expected constant, linear:<slope> or exp:<rate>")


def _require_no_current(config):
    if config.c0 != 0:
        raise UnsupportedConfigError(
            f"stratified solution requires c0 = 0, got c0 = {config.c0!r} m/s")


def density_argument(r, s, config: FlowConfig):
    """``a = e^{2 xi}/(2k) - r``, positive below the surface."""
    xi, _ = phase(LabelPoint(0.0, s, r), 0.0, config)
    return np.exp(2 * xi) / (2 * config.k) - np.asarray(r, dtype=float)


def density(r, s, profile: DensityProfile, config: FlowConfig):
    _require_no_current(config)
    return profile.F(density_argument(r, s, config))


def stratified_pressure(r, s, profile: DensityProfile, config: FlowConfig):
    _require_no_current(config)
    k, r0 = config.k, config.r0
    ref = math.exp(2 * k * r0) / (2 * k) - r0
    return config.g * profile.F_anti(density_argument(r, s, config)) + config.P0 - config.g * profile.F_anti(ref)


def density_label_gradient(label: LabelPoint, profile: DensityProfile, config: FlowConfig) -> np.ndarray:
    """``(rho_q, rho_s, rho_r)`` by the chain rule through ``a``."""
    _require_no_current(config)
    q, s, r = label
    xi, _ = phase(label, 0.0, config)
    e2 = np.exp(2 * xi)
    dF = profile.dF(e2 / (2 * config.k) - np.asarray(r, dtype=float))
    rho_s = -dF * e2 * config.offset_rate
    rho_r = dF * np.expm1(2 * xi)
    return np.stack([np.zeros_like(rho_s), rho_s, rho_r], axis=-1)


def density_gradient(label: LabelPoint, t, profile: DensityProfile, config: FlowConfig) -> np.ndarray:
    """Eulerian ``(rho_x, rho_y, rho_z)`` from the label gradient via ``J^-1``."""
    grad_labels = density_label_gradient(label, profile, config)
    return (jacobian_inverse(label, t, config) @ grad_labels[..., None])[..., 0]


def mass_conservation_residual(label: LabelPoint, t, profile: DensityProfile, config: FlowConfig):
    """``c (rho_x (e^xi cos theta - 1) + rho_z e^xi sin theta)``; zero for an exact solution."""
    _require_no_current(config)
    xi, theta = phase(label, t, config)
    e = np.exp(xi)
    grad = density_gradient(label, t, profile, config)
    return config.c * (grad[..., 0] * (e * np.cos(theta) - 1) + grad[..., 2] * e * np.sin(theta))


def density_q_derivative(label: LabelPoint, t, profile: DensityProfile, config: FlowConfig):
    """``rho_q`` rebuilt from the Eulerian gradient: ``rho_x x_q + rho_z z_q``."""
    xi, theta = phase(label, t, config)
    e = np.exp(xi)
    grad = density_gradient(label, t, profile, config)
    return grad[..., 0] * (1 - e * np.cos(theta)) - grad[..., 2] * e * np.sin(theta)


def stratified_euler_residual(label: LabelPoint, t, profile: DensityProfile, config: FlowConfig) -> np.ndarray:
    """Label-space pressure gradient of the stratified pressure minus the
    momentum balance evaluated with the local density."""
    _require_no_current(config)
    q, s, r = label
    xi, theta = phase(label, t, config)
    e = np.exp(xi)
    e2 = e * e
    cos, sin = np.cos(theta), np.sin(theta)
    k, c, g = config.k, config.c, config.g
    f, f_hat, ms = config.f, config.coriolis.f_hat, config.offset_rate
    a = e2 / (2 * k) - np.asarray(r, dtype=float)
    F = profile.F(a)
    # analytic gradient of g Fa(a): g F(a) grad(a)
    p_q = np.zeros_like(F)
    p_s = -g * F * e2 * ms
    p_r = g * F * np.expm1(2 * xi)
    K = k * c * c + f_hat * c
    D = K - g
    rhs_q = -F * D * e * sin
    rhs_s = -F * (ms * K * e2 + (f * c - g * ms) * e * cos)
    rhs_r = -F * (-K * e2 - D * e * cos + g)
    return np.stack([p_q - rhs_q, p_s - rhs_s, p_r - rhs_r], axis=-1)
