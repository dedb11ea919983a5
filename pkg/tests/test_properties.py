"""Property-based checks over randomly drawn configurations."""
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from fplane_gerstner import FlowConfig, LabelPoint, validate_config
from fplane_gerstner import kinematics as kin
from fplane_gerstner import surface as surf
from fplane_gerstner import verification as ver
from fplane_gerstner.runconfig import RunConfig, loads

latitudes = st.floats(-80.0, 80.0)
wavenumbers = st.floats(1e-3, 0.5)
currents = st.floats(-5.0, 5.0)
branches = st.sampled_from(["east", "west"])


def build(lat, k, c0, branch):
    return FlowConfig.from_latitude(math.radians(lat), k, c0, branch)


@settings(max_examples=60, deadline=None)
@given(latitudes, wavenumbers, currents, branches)
def test_built_configs_validate(lat, k, c0, branch):
    cfg = build(lat, k, c0, branch)
    assert validate_config(cfg).ok


@settings(max_examples=40, deadline=None)
@given(latitudes, wavenumbers, currents, branches, st.integers(0, 2 ** 32 - 1))
def test_field_identities_hold_everywhere(lat, k, c0, branch, seed):
    cfg = build(lat, k, c0, branch)
    rng = np.random.default_rng(seed)
    n = 32
    s = rng.uniform(-cfg.s0, cfg.s0, n)
    r = kin.meridional_offset(s, cfg) - rng.uniform(1e-3, 8.0, n) / k
    label = LabelPoint(rng.uniform(0, cfg.wavelength, n), s, r)
    t = rng.uniform(0, cfg.period, n)
    res = ver.euler_residual(label, t, cfg)
    assert np.max(np.abs(res)) < 1e-12 * cfg.rho * cfg.g
    J = kin.jacobian(label, t, cfg)
    np.testing.assert_allclose(np.linalg.det(J), kin.jacobian_determinant(label, cfg), atol=1e-13)
    trace = np.trace(kin.velocity_gradient_from_jacobian(label, t, cfg), axis1=-2, axis2=-1)
    assert np.max(np.abs(trace)) < 1e-13 * max(1.0, k * abs(cfg.c))


@settings(max_examples=40, deadline=None)
@given(latitudes.filter(lambda x: abs(x) > 1), wavenumbers, st.floats(-0.9, 0.9), branches, st.floats(0.02, 0.98))
def test_surface_root_agrees_with_brent(lat, k, fraction, branch, where):
    base = build(lat, k, 0.0, branch)
    cfg = build(lat, k, fraction * surf.adverse_limit(base), branch)
    band = surf.classify_current(cfg).s_range
    if band is None:
        return
    s = band[0] + where * (band[1] - band[0])
    r = surf.solve_surface(s, cfg)
    target = surf.surface_target(cfg)
    lo = cfg.r0 - 1.0 / k
    while surf.h(lo, s, cfg) < target:
        lo -= 10.0 / k
    ref = brentq(lambda x: surf.h(x, s, cfg) - target, lo, cfg.r0, xtol=1e-14, rtol=1e-15)
    assert abs(r - ref) <= 1e-9 * max(1.0, abs(ref))


@settings(max_examples=30, deadline=None)
@given(latitudes, wavenumbers, currents, st.integers(0, 2 ** 32 - 1))
def test_inversion_recovers_labels(lat, k, c0, seed):
    cfg = build(lat, k, c0, "east")
    rng = np.random.default_rng(seed)
    n = 16
    s = rng.uniform(-cfg.s0, cfg.s0, n)
    top = cfg.r0 + np.minimum(0.0, kin.meridional_offset(s, cfg))
    r = top - rng.uniform(0.0, 5.0, n) / k
    q = rng.uniform(-cfg.wavelength, cfg.wavelength, n)
    t = float(rng.uniform(0, cfg.period))
    x = kin.position(LabelPoint(q, s, r), t, cfg)
    q2, r2 = kin.invert_flow_map(x[:, 0], x[:, 2], s, t, cfg, r_surface=np.inf)
    back = kin.position(LabelPoint(q2, s, r2), t, cfg)
    scale = max(1.0, float(np.max(np.abs(x))))
    assert np.max(np.abs(back - x)) < 1e-10 * scale


@settings(max_examples=60, deadline=None)
@given(st.floats(-89.0, 89.0), st.floats(1e-4, 1.0), st.floats(-50.0, 50.0), branches,
       st.floats(-500.0, -0.1), st.floats(1.0, 1e7), st.one_of(st.none(), st.floats(1e-14, 1e-6)))
def test_config_text_round_trip(lat, k, c0, branch, r0, s0, tol):
    rc = RunConfig(lat_deg=lat, wavenumber=k, current=c0, branch=branch, r0=r0, s0=s0, tolerance=tol)
    again = loads(rc.dumps())
    assert again == rc
    assert again.flow_config() == rc.flow_config()
