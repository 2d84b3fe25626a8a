"""Ballistic versus diffusive spreading on the triangular lattice.

The same intermediate generator drives two walks: a biased one (four of
the six directions) whose mean squared displacement turns ballistic,
and an unbiased one that stays diffusive.  Exact moment series come
from Wald-type identities; a Monte Carlo endpoint cloud confirms them.
"""

import numpy as np

from renewalk import montecarlo as mc
from renewalk import stopped, walks
from renewalk.laws import DefectiveGeometric, Geometric
from renewalk.montecarlo import SimConfig
from renewalk.stopped import StoppedSpec

p0, q, qs = 0.7, 0.8, 0.5
never_stop = 1.0 - qs
horizon = 2000

closed = stopped.dbp_stops_bernoulli(p0, q, qs, horizon)
biased = walks.triangular_msd("biased", closed.mean, closed.second_moment)
unbiased = walks.triangular_msd("unbiased", closed.mean, closed.second_moment)

print("exact mean squared displacement:")
print("        t      biased  biased/t^2    unbiased  unbiased/t")
for t in (10, 100, 500, 2000):
    print(
        f"   {t:>6d} {biased[t]:11.1f} {biased[t]/t**2:11.6f}"
        f" {unbiased[t]:11.2f} {unbiased[t]/t:11.6f}"
    )
print(f"   ballistic coefficient (3/16) (1-Q_S) p0^2 = {3/16*never_stop*p0**2:.6f}")
print(f"   diffusion coefficient  (1-Q_S) p0         = {never_stop*p0:.6f}")

step = walks.triangular_walk(True)
print()
print(f"biased step law: mean step {np.round(step.mean_step, 6)}, E |xi|^2 = "
      f"{step.second_moment.sum():.1f}")

spec = StoppedSpec(Geometric(p0), DefectiveGeometric(qs, 1 - q), horizon)
cfg = SimConfig(seed=88, replicas=50_000, horizon=horizon)
pos = mc.sample_walk_endpoint(step, spec, cfg, horizon)
cart = pos @ step.basis.T
print()
print(f"Monte Carlo at t = {horizon} with {cfg.replicas:,} walkers:")
print(f"   empirical MSD {float((cart**2).sum(axis=1).mean()):11.1f}"
      f"   exact {biased[horizon]:11.1f}")
print(f"   empirical drift (x1, x2) = ({cart[:,0].mean():.3f}, {cart[:,1].mean():.3f})"
      f"   exact x2 drift {np.sqrt(3)/4 * closed.mean[horizon]:.3f}")
