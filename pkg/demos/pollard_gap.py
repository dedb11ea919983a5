"""How far the current-free phase speed is from Pollard's relation.

At the root of k c^2 + f_hat c - g = 0, Pollard's quartic
k^2 c^4 - 4 Omega^2 c^2 + 2 g f_hat c - g^2 does not vanish: it equals -f^2 c^2.
That number is tiny next to the individual terms (about g^2 ~ 96), so it is
evaluated with 50 significant digits.
"""
import math

import mpmath

from fplane_gerstner import coriolis_parameters, dispersion_gap, pollard_residual, solve_dispersion

k = 0.01
print(f"{'lat':>5} {'c_plus [m/s]':>20} {'f^2 c^2':>12} {'Pollard residual':>18} {'relative mismatch':>18}")
for lat in (0.0, 15.0, 30.0, 45.0, 60.0, 75.0):
    cor = coriolis_parameters(math.radians(lat))
    with mpmath.workdps(50):
        c, _ = solve_dispersion(k, 0.0, cor, dps=50)
        gap = dispersion_gap(c, cor)
        res = pollard_residual(c, k, cor)
        rel = abs(res + gap) / gap if gap else abs(res)
    print(f"{lat:5.0f} {float(c):20.15f} {float(gap):12.4e} {float(res):18.4e} {float(rel):18.1e}")
