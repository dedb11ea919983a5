"""The free surface narrows towards the pole and an adverse current shrinks the band.

For an eastward wave in the northern hemisphere the surface only exists for
s >= 0.  Its label r(s) sinks as s grows, so the wave amplitude e^(k(r - m))/k
decays away from s = 0.  An eastward current c0 pulls the edge of the band in,
and once c0 reaches c e^(2 k r0) nothing is left.
"""
import math

import numpy as np

from fplane_gerstner import FlowConfig, classify_current, surface_mesh
from fplane_gerstner.surface import adverse_limit

cfg = FlowConfig.from_latitude(math.radians(45.0), k=0.01)
band = classify_current(cfg).s_range
prof = surface_mesh(cfg, np.linspace(*band, 6))
print("no current, 45 N")
for s, r, a in zip(prof.s, prof.r_of_s, prof.amplitude):
    print(f"  s = {s:9.0f} m   r(s) = {r:9.4f} m   amplitude = {a:8.4f} m")

lim = adverse_limit(cfg)
print(f"\nadverse limit c e^(2 k r0) = {lim:.4f} m/s")
for frac in (0.2, 0.5, 0.8, 0.95, 0.99, 1.01):
    c0 = frac * lim
    rep = classify_current(FlowConfig.from_latitude(math.radians(45.0), k=0.01, c0=c0))
    width = "empty" if rep.s_range is None else f"[{rep.s_range[0]:.0f}, {rep.s_range[1]:.1f}] m"
    print(f"  c0 = {c0:7.3f} m/s ({rep.current_class:9s}) band {width}")
