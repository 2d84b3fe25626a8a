"""A Bernoulli counter frozen at an independent geometric time.

Builds the exact finite-time law of the stopped count, checks it against
a million simulated paths, and prints the closed-form infinite-time
limits (expected frozen count 3.5, variance 10.85 for the reference
parameters p0 = 0.7, q = 0.8).
"""

import numpy as np

from renewalk import montecarlo as mc
from renewalk import stopped
from renewalk.laws import INFINITY, Geometric
from renewalk.montecarlo import SimConfig
from renewalk.stopped import StoppedSpec

spec = StoppedSpec(inner=Geometric(0.7), stop=Geometric(0.2), horizon=40)
table = stopped.stopped_state_table(spec)
mean = stopped.stopped_moments(spec, 1)
second = stopped.stopped_moments(spec, 2)

print("P[M(t) = m] for small m, t:")
print("   t:   " + "".join(f"{t:>9d}" for t in (0, 1, 2, 5, 10, 40)))
for m in range(5):
    row = "".join(f"{table.probs[m, t]:9.4f}" for t in (0, 1, 2, 5, 10, 40))
    print(f"   m={m}: {row}")
print(f"column sums: min {table.row_sums().min():.12f}, max {table.row_sums().max():.12f}")

print()
print("running moments:")
for t in (1, 5, 10, 20, 40):
    print(f"   t={t:>3d}   E M = {mean[t]:8.5f}   Var M = {second[t] - mean[t]**2:8.5f}")

summary = stopped.geometric_stop_asymptotics(spec.inner, 0.8)
print()
print(f"closed-form limits: E M = {summary.mean}, Var M = {summary.variance}")
print(f"P[M(inf) = 0] = {summary.state_masses[0]:.6f}, total mass {summary.state_mass_sum():.12f}")

cfg = SimConfig(seed=2024, replicas=1_000_000, horizon=4096)
spec_big = StoppedSpec(spec.inner, spec.stop, 4096)
frozen = mc.sample_stopped_value(spec_big, cfg, INFINITY)
print()
print(f"Monte Carlo with {cfg.replicas:,} paths:")
print(f"   mean {frozen.mean():.4f}  variance {frozen.var():.4f}")
emp0 = float((frozen == 0).mean())
print(f"   P[M(inf) = 0] = {emp0:.6f} (exact {summary.state_masses[0]:.6f})")
