"""A density that grows with depth rides along with the same particle paths.

With no current the density can be any non-decreasing function F of
a = e^(2 xi)/(2k) - r.  Density is then constant along particle paths
(mass is conserved) and the pressure g F_anti(a) + const balances the
momentum equations with the local density.
"""
import math

import numpy as np

from fplane_gerstner import FlowConfig, LabelPoint
from fplane_gerstner import stratification as strat

cfg = FlowConfig.from_latitude(math.radians(45.0), k=0.01)
rng = np.random.default_rng(0)
n = 2000
s = rng.uniform(0.0, cfg.s0, n)
r = cfg.r0 - rng.uniform(0.0, 400.0, n)
label = LabelPoint(rng.uniform(0.0, cfg.wavelength, n), s, r)
t = rng.uniform(0.0, cfg.period, n)

for spec in ("constant", "linear:0.01", "exp:0.002"):
    prof = strat.parse_profile(spec, cfg.rho)
    rho = strat.density(r, s, prof, cfg)
    mass = np.abs(strat.mass_conservation_residual(label, t, prof, cfg)).max()
    euler = np.abs(strat.stratified_euler_residual(label, t, prof, cfg)).max()
    print(f"{spec:12s} density {rho.min():8.1f} .. {rho.max():8.1f} kg/m^3   "
          f"mass residual {mass:.1e}   momentum residual {euler:.1e} Pa/m")
