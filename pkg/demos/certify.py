"""Certify a handful of configurations, then break them on purpose.

A correct configuration passes every check at rounding level.  Nudging the
phase speed off the dispersion root by one part in a million shows up in the
momentum balance immediately, while volume conservation does not notice: it
holds for any c.  Dropping the meridional offset m(s) upsets only the
s-component of the balance.
"""
import math

from fplane_gerstner import FlowConfig, GridSpec, mutate, run_full_certification
from fplane_gerstner.surface import adverse_limit

grid = GridSpec(n_q=6, n_s=6, n_r=6, n_t=4)
north = FlowConfig.from_latitude(math.radians(45.0), k=0.01)
configs = {
    "equator": FlowConfig.from_latitude(0.0, k=0.01),
    "45N": north,
    "30S following": FlowConfig.from_latitude(math.radians(-30.0), k=0.05, c0=-0.1),
    "45N adverse": FlowConfig.from_latitude(math.radians(45.0), k=0.01, c0=0.5 * adverse_limit(north)),
}

for name, cfg in configs.items():
    report = run_full_certification(cfg, grid)
    euler = report["euler"]
    print(f"{name:14s} pass={report.passed}  Euler residual {euler.residual:.2e} Pa/m "
          f"(limit {euler.tol * euler.scale:.1e})")

print()
for kind in ("wrong-dispersion", "zero-offset", "flip-offset"):
    report = run_full_certification(mutate(north, kind), grid)
    d = report["euler"].details
    print(f"{kind:17s} failing: {', '.join(report.failing())}")
    print(f"{'':17s} P_q {d['P_q']:.1e}  P_s {d['P_s']:.1e}  P_r {d['P_r']:.1e}")
