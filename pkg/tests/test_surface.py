import math

import numpy as np
import pytest

from conftest import adverse_config, make_config
from fplane_gerstner import LabelPoint, NoSurfaceError
from fplane_gerstner import kinematics as kin
from fplane_gerstner import surface as surf


def test_existence_margin_matches_direct_difference():
    cfg = adverse_config()
    s = np.linspace(-1e5, 1e5, 11)
    direct = surf.h(cfg.r0, s, cfg) - surf.surface_target(cfg)
    np.testing.assert_allclose(surf.existence_margin(s, cfg), direct, atol=1e-9)


def test_existence_margin_slope_against_differences():
    cfg = adverse_config(fraction=0.8)
    s = np.linspace(-5e4, 5e4, 7)
    d = 1.0
    fd = (surf.existence_margin(s + d, cfg) - surf.existence_margin(s - d, cfg)) / (2 * d)
    np.testing.assert_allclose(fd, surf.existence_margin_slope(s, cfg), rtol=1e-6, atol=1e-12)


def test_h_r_is_derivative_of_h():
    cfg = make_config(-30.0, 0.05, -0.1)
    r = np.linspace(-200.0, -11.0, 9)
    d = 1e-4
    fd = (surf.h(r + d, 2e4, cfg) - surf.h(r - d, 2e4, cfg)) / (2 * d)
    np.testing.assert_allclose(fd, surf.h_r(r, 2e4, cfg), rtol=1e-6)


def test_surface_at_centre_is_r0(cfg45):
    assert surf.solve_surface(0.0, cfg45) == cfg45.r0


@pytest.mark.parametrize("build", [lambda: make_config(45.0, 0.01), lambda: adverse_config(),
                                   lambda: make_config(-30.0, 0.05, -0.1)])
def test_surface_root_solves_h(build):
    cfg = build()
    band = surf.classify_current(cfg).s_range
    target = surf.surface_target(cfg)
    for s in np.linspace(*band, 9)[1:]:
        r = surf.solve_surface(s, cfg)
        assert r <= cfg.r0
        assert abs(surf.h(r, s, cfg) - target) <= 1e-12 * abs(target)


def test_surface_is_absent_on_the_wrong_side(cfg45):
    with pytest.raises(NoSurfaceError) as err:
        surf.solve_surface(-1e4, cfg45)
    assert err.value.value > 0 and err.value.s == -1e4


def test_equatorial_surface_is_flat(cfg_equator):
    for s in (-1e5, 0.0, 3e4):
        assert surf.solve_surface(s, cfg_equator) == cfg_equator.r0


def test_surface_slope_matches_differences():
    cfg = adverse_config(fraction=0.3)
    s, d = 2e4, 10.0
    fd = (surf.solve_surface(s + d, cfg) - surf.solve_surface(s - d, cfg)) / (2 * d)
    r = surf.solve_surface(s, cfg)
    assert surf.surface_slope(s, r, cfg) == pytest.approx(fd, rel=1e-6)


def test_surface_pressure_is_atmospheric():
    cfg = adverse_config()
    s = np.linspace(0.0, 4e4, 5)
    r = np.array([surf.solve_surface(si, cfg) for si in s])
    P = kin.pressure(LabelPoint(0.0, s, r), cfg)
    np.testing.assert_allclose(P, cfg.P0, rtol=0, atol=1e-10 * cfg.rho * cfg.g * abs(cfg.r0))


def test_amplitude_decays_away_from_centre():
    cfg = make_config(-30.0, 0.05, -0.1)
    lo, hi = surf.classify_current(cfg).s_range
    assert hi == 0.0 and lo < 0
    profile = surf.surface_mesh(cfg, np.linspace(hi, lo, 30))
    assert np.all(np.diff(profile.amplitude) < 0)


def test_surface_mesh_shapes_and_points(cfg45):
    s = np.linspace(0.0, 5e4, 4)
    q = np.linspace(0.0, cfg45.wavelength, 6, endpoint=False)
    prof = surf.surface_mesh(cfg45, s, q, t=3.0)
    assert prof.mesh.shape == (4, 6, 3)
    assert prof.samples.shape == (4, 2)
    np.testing.assert_array_equal(prof.mesh[..., 1], np.broadcast_to(s[:, None], (4, 6)))
    expected = kin.position(LabelPoint(q[2], s[1], prof.r_of_s[1]), 3.0, cfg45)
    np.testing.assert_allclose(prof.mesh[1, 2], expected)


def test_classification_without_current(cfg45):
    rep = surf.classify_current(cfg45)
    assert rep.case_id == "I-1" and rep.hemisphere == "north"
    assert rep.current_class == "none"
    assert rep.s_range == (0.0, cfg45.s0)
    assert rep.trapped and rep.admissible


def test_classification_following_current_keeps_full_band():
    cfg = make_config(45.0, 0.01, -2.0)
    rep = surf.classify_current(cfg)
    assert rep.current_class == "following"
    assert rep.s_range == (0.0, cfg.s0)


def test_classification_adverse_band_shrinks_with_current():
    widths = []
    for a in (0.3, 0.6, 0.9):
        rep = surf.classify_current(adverse_config(fraction=a))
        assert rep.current_class == "adverse"
        widths.append(rep.s_range[1] - rep.s_range[0])
    assert widths[0] >= widths[1] > widths[2] > 0


def test_adverse_current_beyond_limit_is_inadmissible():
    rep = surf.classify_current(adverse_config(fraction=1.05))
    assert not rep.admissible
    assert rep.current_class == "none"
    failed = [i for i, ok, _ in rep.constraints if not ok]
    assert failed == ["adverse-limit"]


def test_band_edge_is_where_trapping_or_existence_fails():
    cfg = adverse_config(fraction=0.5)
    rep = surf.classify_current(cfg)
    edge = rep.s_range[1]
    assert edge < cfg.s0
    beyond = edge * (1 + 1e-6)
    ok_inside = surf.existence_margin(edge * 0.999, cfg) < 0
    r_out = surf.solve_surface(beyond, cfg) if surf.existence_margin(beyond, cfg) < 0 else None
    assert ok_inside
    assert r_out is None or surf.trapping_margin(beyond, r_out, cfg) <= 0


def test_existence_edge_beyond_band(cfg45):
    cfg = adverse_config(fraction=0.5)
    edge = surf.existence_edge(cfg, 1.0)
    assert edge > surf.classify_current(cfg).s_range[1]
    assert abs(surf.existence_margin(edge, cfg)) < 1e-6 * surf.surface_target(cfg)
    assert surf.existence_edge(cfg45, 1.0) is None


def test_equator_report(cfg_equator):
    rep = surf.classify_current(cfg_equator)
    assert rep.hemisphere == "equator" and not rep.trapped
    assert rep.s_range == (-cfg_equator.s0, cfg_equator.s0)


@pytest.mark.parametrize("lat, branch, case", [(45.0, "east", "I-1"), (45.0, "west", "I-2"),
                                               (-45.0, "east", "II-1"), (-45.0, "west", "II-2")])
def test_mirror_cases_have_mirrored_bands(lat, branch, case):
    rep = surf.classify_current(adverse_config(lat, 0.01, 0.5, branch))
    ref = surf.classify_current(adverse_config(45.0, 0.01, 0.5, "east"))
    assert rep.case_id == case
    width = rep.s_range[1] - rep.s_range[0]
    assert width == pytest.approx(ref.s_range[1] - ref.s_range[0], rel=1e-3)
    cfg = adverse_config(lat, 0.01, 0.5, branch)
    side = rep.s_range[1] if rep.s_range[1] > 0 else rep.s_range[0]
    assert cfg.f * cfg.c * side > 0


def test_check_admissibility_margins(cfg45):
    good = surf.check_admissibility(cfg45, 1e4)
    bad = surf.check_admissibility(cfg45, -1e4)
    assert good.ok and not bad.ok
    assert set(good.margins) == {"fcs", "A1+A2", "trapping"}


def test_report_to_dict_is_json_ready(cfg45):
    import json
    doc = surf.classify_current(cfg45).to_dict()
    assert json.loads(json.dumps(doc))["case_id"] == "I-1"


def test_adverse_limit_value(cfg45):
    assert surf.adverse_limit(cfg45) == pytest.approx(cfg45.c * math.exp(2 * cfg45.k * cfg45.r0))


def test_edge_bisection_terminates_below_double_spacing():
    # near the equator the existence edge can sit around 1e12 m, where doubles are
    # spaced ~1e-4 m apart, far coarser than the default xtol of 1e-12 s0
    edge = surf._bisect_edge(lambda s: s < 1e12 + 0.3, 0.0, 2e12, 1e-7)
    assert abs(edge - (1e12 + 0.3)) < 1e-3
