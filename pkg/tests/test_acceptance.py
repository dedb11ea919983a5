"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test records a single PASS/FAIL line (shown in the terminal summary) and
then asserts it.  Run on their own with::

    pytest tests/test_acceptance.py -v
"""
import math

import mpmath
import numpy as np
import pytest

from conftest import CRITERION_CONFIGS, adverse_config, make_config
from fplane_gerstner import EARTH, LabelPoint, PhysicalConstants, coriolis_parameters
from fplane_gerstner import kinematics as kin
from fplane_gerstner import stratification as strat
from fplane_gerstner import surface as surf
from fplane_gerstner import verification as ver
from fplane_gerstner.model import dispersion_residual, pollard_residual, solve_dispersion


def _configs():
    return {name: build() for name, build in sorted(CRITERION_CONFIGS.items())}


def _grid_residual(config):
    labels, times = ver.label_grid(config, ver.GridSpec())
    L, T = ver._outer(labels, times)
    return L, T


def _euler_max(config):
    L, T = _grid_residual(config)
    generic = np.abs(ver.euler_residual(L, T, config))
    closed = np.abs(kin.pressure_label_gradient(L, config) - ver.euler_label_rhs_closed_form(L, T, config))
    return np.maximum(generic, closed).reshape(-1, 3).max(axis=0)


def _incompressibility(config):
    L, T = _grid_residual(config)
    trace = np.trace(kin.velocity_gradient_from_jacobian(L, T, config), axis1=-2, axis2=-1)
    det = np.linalg.det(kin.jacobian(L, T, config))
    det_err = np.abs(det - kin.jacobian_determinant(L, config))
    return float(np.max(np.abs(trace))), float(np.max(det_err))


def test_criterion_01_euler_exactness(verdict):
    worst = {}
    for name, config in _configs().items():
        worst[name] = float(_euler_max(config).max()) / (config.rho * config.g)
    ok = all(v < 1e-12 for v in worst.values())
    detail = ", ".join(f"{n} {v:.2e}" for n, v in worst.items())
    assert verdict(1, f"max Euler residual / (rho g) < 1e-12 [{detail}]", ok)


def test_criterion_02_incompressibility(verdict):
    rows = {name: _incompressibility(config) for name, config in _configs().items()}
    ok = all(tr < 1e-13 and det < 1e-13 for tr, det in rows.values())
    detail = ", ".join(f"{n} trace {tr:.1e} det {det:.1e}" for n, (tr, det) in rows.items())
    assert verdict(2, f"|trace grad U| and |det J - (1 - e^2xi)| < 1e-13 [{detail}]", ok)


def test_criterion_03_dispersion(verdict):
    worst_res = 0.0
    for config in _configs().values():
        for c in solve_dispersion(config.k, config.c0, config.coriolis, config.constants):
            worst_res = max(worst_res, abs(dispersion_residual(c, config.k, config.c0, config.coriolis,
                                                               config.constants)) / config.g)
    # no rotation: c = +-sqrt(g/k)
    still = PhysicalConstants(Omega=0.0)
    worst_still = 0.0
    for lat in (-60.0, 0.0, 45.0):
        for k in (1e-3, 0.01, 0.3):
            for c0 in (-1.0, 0.0, 2.0):
                cp, cm = solve_dispersion(k, c0, coriolis_parameters(math.radians(lat), still), still)
                ref = math.sqrt(still.g / k)
                worst_still = max(worst_still, abs(cp - ref) / ref, abs(cm + ref) / ref)
    # equator: c = (-Omega +- sqrt(Omega^2 + k (g + 2 Omega c0))) / k, evaluated in 40 digits
    worst_eq = 0.0
    cor = coriolis_parameters(0.0)
    with mpmath.workdps(40):
        Om, g = mpmath.mpf(EARTH.Omega), mpmath.mpf(EARTH.g)
        for k in (1e-3, 0.01, 0.3):
            for c0 in (-100.0, -0.5, 0.0, 3.0):
                root = mpmath.sqrt(Om ** 2 + k * (g + 2 * Om * c0))
                ref = ((-Om + root) / k, (-Om - root) / k)
                got = solve_dispersion(k, c0, cor)
                worst_eq = max(worst_eq, *(float(abs((a - b) / b)) for a, b in zip(got, ref)))
    ok = worst_res < 1e-12 and worst_still < 1e-12 and worst_eq < 1e-12
    assert verdict(3, f"residual/g {worst_res:.1e} < 1e-12; Omega=0 rel {worst_still:.1e} < 1e-12; "
                      f"equatorial closed form rel {worst_eq:.1e} < 1e-12", ok)


def test_criterion_04_pollard_gap(verdict):
    worst = 0.0
    for lat in (-70.0, -30.0, 10.0, 45.0, 80.0):
        for k in (1e-3, 0.01, 0.2):
            cor = coriolis_parameters(math.radians(lat))
            with mpmath.workdps(50):
                for c in solve_dispersion(k, 0.0, cor, dps=50):
                    gap = cor.f ** 2 * c * c
                    res = pollard_residual(c, k, cor)
                    worst = max(worst, float(abs(res + gap) / gap))
    assert verdict(4, f"Pollard residual at the c0 = 0 roots equals -f^2 c^2, rel {worst:.1e} < 1e-10",
                   worst < 1e-10)


def test_criterion_05_vorticity(verdict):
    rng = np.random.default_rng(5)
    worst = 0.0
    for config in _configs().values():
        n = 100
        s = rng.uniform(-config.s0, config.s0, n)
        xi = -rng.uniform(0.05, 6.0, n)
        r = xi / config.k + kin.meridional_offset(s, config)
        q = rng.uniform(0.0, config.wavelength, n)
        t = rng.uniform(0.0, config.period, n)
        label = LabelPoint(q, s, r)
        closed = kin.vorticity(label, t, config)
        assembled = kin.curl(kin.velocity_gradient_from_jacobian(label, t, config))
        rel = np.linalg.norm(closed - assembled, axis=-1) / np.linalg.norm(closed, axis=-1)
        worst = max(worst, float(rel.max()))
    eq = make_config(0.0, 0.01, 0.3)
    L, T = _grid_residual(eq)
    w = kin.vorticity(L, T, eq)
    eq_zero = bool(np.all(w[..., 0] == 0) and np.all(w[..., 2] == 0))
    assert verdict(5, f"closed-form vorticity vs curl from the Jacobian rel {worst:.1e} < 1e-12; "
                      f"first and third components vanish at the equator: {eq_zero}",
                   worst < 1e-12 and eq_zero)


def test_criterion_06_free_surface(verdict):
    r0_err = h_rel = p_rel = 0.0
    decreasing = True
    for name, config in _configs().items():
        r0_err = max(r0_err, abs(surf.solve_surface(0.0, config) - config.r0))
        s = ver.surface_samples(config, 24)
        r = np.array([surf.solve_surface(si, config) for si in s])
        target = surf.surface_target(config)
        h_rel = max(h_rel, float(np.max(np.abs(surf.h(r, s, config) - target))) / abs(target))
        q = np.linspace(0.0, config.wavelength, 16, endpoint=False)
        S, Q = np.meshgrid(s, q, indexing="ij")
        P = kin.pressure(LabelPoint(Q, S, np.broadcast_to(r[:, None], S.shape)), config)
        p_rel = max(p_rel, float(np.max(np.abs(P - config.P0))) / (config.rho * config.g * abs(config.r0)))
        report = surf.classify_current(config)
        if report.trapped:
            lo, hi = report.s_range
            s_line = np.linspace(lo, hi, 41)
            amp = surf.surface_mesh(config, s_line).amplitude
            order = np.argsort(np.abs(s_line))
            decreasing &= bool(np.all(np.diff(amp[order]) < 0))
    ok = r0_err < 1e-12 and h_rel < 1e-12 and p_rel < 1e-10 and decreasing
    assert verdict(6, f"r(0) - r0 {r0_err:.1e} m; h residual rel {h_rel:.1e}; surface pressure "
                      f"{p_rel:.1e} rho g |r0|; amplitude strictly decreasing in |s|: {decreasing}", ok)


CASES = {"I-1": (45.0, "east"), "I-2": (45.0, "west"), "II-1": (-45.0, "east"), "II-2": (-45.0, "west")}


@pytest.mark.parametrize("case", sorted(CASES))
def test_criterion_07_admissibility(case, verdict):
    lat, branch = CASES[case]
    fractions = (0.25, 0.5, 0.9, 0.99, 1.01, 1.2)
    signs, bands = [], []
    for a in fractions:
        config = adverse_config(lat, 0.01, a, branch)
        lim = surf.adverse_limit(config)
        signs.append(np.sign(config.f * (config.c0 - lim)))
        report = surf.classify_current(config)
        assert report.case_id == case
        bands.append(report.s_range)
    below = [sg for a, sg in zip(fractions, signs) if a < 1]
    above = [sg for a, sg in zip(fractions, signs) if a > 1]
    flips = len(set(below)) == 1 and len(set(above)) == 1 and below[0] == -above[0]
    transition = all(b is not None for a, b in zip(fractions, bands) if a < 1) and \
        all(b is None for a, b in zip(fractions, bands) if a > 1)
    config = adverse_config(lat, 0.01, 0.5, branch)
    coarse = surf.classify_current(config, step=2e-3 * config.s0).s_range
    fine = surf.classify_current(config, step=5e-4 * config.s0).s_range
    width_c, width_f = coarse[1] - coarse[0], fine[1] - fine[0]
    stable = abs(width_c - width_f) / width_f
    assert verdict(7, f"case {case}: f(c0 - c e^(2k r0)) flips sign {flips}; band nonempty -> empty "
                      f"{transition}; band edge change under step refinement {stable:.1e} < 1%",
                   flips and transition and stable < 0.01 and width_f < config.s0)


def test_criterion_08_boundary_kinematics(verdict):
    orders = {}
    for name, config in _configs().items():
        s = ver.surface_samples(config, 6)
        q = np.linspace(0.0, config.wavelength, 6, endpoint=False)
        t = np.linspace(0.0, config.period, 3, endpoint=False)
        residuals = [ver._kinematic_residual(config, s, q, t, h, 1e-2 * (np.ptp(s) or 1 / config.k))
                     for h in (2e-2, 1e-2, 5e-3)]
        orders[name] = min(math.log2(residuals[i] / residuals[i + 1]) for i in range(2))
    ok = all(o >= 1.9 for o in orders.values())
    detail = ", ".join(f"{n} {o:.3f}" for n, o in orders.items())
    assert verdict(8, f"kinematic condition residual converges at order >= 1.9 [{detail}]", ok)


def test_criterion_09_decay(verdict):
    worst, v_max = 0.0, 0.0
    for config in (make_config(45.0, 0.01), make_config(0.0, 0.01), make_config(-60.0, 0.1),
                   make_config(30.0, 0.02, branch="west")):
        xi = np.array([-5.0, -10.0, -20.0])[:, None]
        theta = np.linspace(0.0, 2 * np.pi, 32, endpoint=False)[None, :]
        s = 0.3 * config.s0
        r = xi / config.k + kin.meridional_offset(s, config)
        label = LabelPoint(*np.broadcast_arrays(theta / config.k, s, r))
        u = kin.velocity(label, 0.0, config)
        xi_now, _ = kin.phase(label, 0.0, config)
        amp = np.hypot(u[..., 0] + config.c0, u[..., 2]) / (abs(config.c) * np.exp(xi_now))
        crest = np.abs(u[:, 0, 0] + config.c0) / (abs(config.c) * np.exp(xi_now[:, 0]))
        worst = max(worst, float(np.max(np.abs(amp - 1))), float(np.max(np.abs(crest - 1))))
        v_max = max(v_max, float(np.max(np.abs(u[..., 1]))))
    assert verdict(9, f"|u + c0| / (|c| e^xi) - 1 = {worst:.1e} < 1e-12 at xi in {{-5, -10, -20}} "
                      f"(c0 = 0); max |v| = {v_max}", worst < 1e-12 and v_max == 0.0)


def test_criterion_10_stratification(verdict):
    mass = rho_q = euler = 0.0
    for config in (make_config(45.0, 0.01), make_config(0.0, 0.01), make_config(-30.0, 0.05)):
        profile = strat.linear_profile(config.rho, 0.01)
        L, T = _grid_residual(config)
        mass = max(mass, float(np.max(np.abs(strat.mass_conservation_residual(L, T, profile, config))))
                   / (abs(config.c) * config.rho * config.k))
        rho_q = max(rho_q, float(np.max(np.abs(strat.density_q_derivative(L, T, profile, config)))))
        euler = max(euler, float(np.max(np.abs(strat.stratified_euler_residual(L, T, profile, config))))
                    / (config.rho * config.g))
    ok = mass < 1e-12 and rho_q < 1e-13 and euler < 1e-10
    assert verdict(10, f"F = rho(1 + 0.01 a): mass residual {mass:.1e} (scaled by |c| rho k) < 1e-12; "
                       f"|rho_q| {rho_q:.1e} kg/m^4 < 1e-13; Euler {euler:.1e} rho g < 1e-10", ok)


def test_criterion_11_mutation_sensitivity(verdict):
    lines = []
    ok = True
    for name, config in _configs().items():
        broken = ver.mutate(config, "wrong-dispersion")
        euler = float(_euler_max(broken).max()) / (config.rho * config.g)
        trace, det = _incompressibility(broken)
        caught = euler >= 1e-12 and trace < 1e-13 and det < 1e-13
        ok &= caught
        lines.append(f"{name} Euler {euler:.1e}")
    for name, config in _configs().items():
        if config.f == 0:
            continue
        comp = _euler_max(ver.mutate(config, "zero-offset")) / (config.rho * config.g)
        caught = comp[1] >= 1e-12
        ok &= caught
        lines.append(f"{name} zero offset P_s {comp[1]:.1e}")
    assert verdict(11, "c (1 + 1e-6) fails criterion 1 with criterion 2 intact; m = 0 off the equator "
                       "fails the P_s component [" + ", ".join(lines) + "]", ok)
