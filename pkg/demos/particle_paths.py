"""Particle paths at 45 N with and without a current.

Every particle runs round a circle of radius e^xi / k in the frame that moves
with the current, so after one period it is back where it started (relative to
that frame).  Deep particles barely move off the straight line x = q - c0 t.
"""
import math

import numpy as np

from fplane_gerstner import FlowConfig, LabelPoint, position, velocity

for c0 in (0.0, 1.5):
    cfg = FlowConfig.from_latitude(math.radians(45.0), k=0.01, c0=c0)
    print(f"c0 = {c0} m/s: c = {cfg.c:.6f} m/s, period = {cfg.period:.3f} s")

    t = np.linspace(0.0, cfg.period, 201)
    for r in (cfg.r0, -100.0, -1000.0):
        label = LabelPoint(0.0, 2.0e4, r)
        x = position(label, t, cfg)
        dx = x[:, 0] + cfg.c0 * t - label.q
        dz = x[:, 2] - label.r
        radius = np.hypot(dx, dz)
        gap = np.hypot(dx[-1] - dx[0], dz[-1] - dz[0])
        print(f"  r = {r:8.1f} m  radius {radius.mean():10.4e} m  "
              f"(spread {np.ptp(radius):.1e})  closure error {gap:.1e} m")

    u = velocity(LabelPoint(0.0, 0.0, -2000.0), t, cfg)
    print(f"  deep particle: max |u + c0| = {np.max(np.abs(u[:, 0] + c0)):.2e} m/s, v = {np.max(np.abs(u[:, 1]))}")
