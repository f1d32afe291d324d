"""Closed-form constants against one long path.

For fixed c, TV(t)/t tends to m = mu coth(c mu) and (TV(t) - m t)/sqrt(t)
has variance sigma^2.  Here we print the constants and compare the slope to
a single long simulated path.

    python demos/02_limit_constants.py
"""

import math

from truncvar import analytics as an
from truncvar import SimulationParams, simulate_bm, tv_exact, utv_exact

print("    c     mu      m_tv    var_tv     m_utv   var_utv   E T_D")
for c in (0.1, 0.5, 1.0):
    for mu in (0.0, 0.3, 1.0, -1.0):
        k = an.limit_constants(c, mu)
        print(f"{c:5.2f} {mu:6.2f} {k.m_tv:9.4f} {k.var_tv:9.4f} {k.m_utv:9.4f} {k.var_utv:9.4f} {k.mean_T_D:7.4f}")

# the variance tends to 1/3 for any drift as c -> 0
for c in (1e-1, 1e-2, 1e-4):
    print(f"var_tv(c={c:g}, mu=2) = {an.tv_limit_var(c, 2.0):.10f}")

# and the fourth moments behind the renewal argument
print(f"\nE T_D^4 / c^8 at mu = 0: {an.fourth_moment_T_D(1.0, 0.0):.6f} (277/21 = {277 / 21:.6f})")
print(f"E Z_D^4 / c^4 at mu = 0: {an.fourth_moment_Z_D(1.0, 0.0):.1f}")

c, mu, T = 1.0, 1.0, 2000.0
path = simulate_bm(SimulationParams(drift_mu=mu, horizon_T=T, step_dt=1e-3, seed=7))
# the discretised path misses the true extrema; shift c as the campaigns do
c_eff = c - 2 * 0.5825971579390106 * math.sqrt(1e-3)
print(f"\none path, c = {c}, mu = {mu}, T = {T:g}")
print(f"TV(T)/T  = {tv_exact(path, c_eff).value / T:.4f}   m_tv  = {an.tv_limit_mean(c, mu):.4f}")
print(f"UTV(T)/T = {utv_exact(path, c_eff).value / T:.4f}   m_utv = {an.utv_limit_mean(c, mu):.4f}")
