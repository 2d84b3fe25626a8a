"""How hard it is to stop a process determines how wildly it fluctuates.

Sweep the stopping law's total mass Q_S from 0 (never stops) to 1
(always stops).  In between, the count's variance grows like
(1-Q_S) Q_S p0^2 t^2: sample paths split into a frozen and a
ballistic population, and the fluctuation peaks where the split is
even.  The time-dependent maximizer approaches 1/2 quickly.
"""

import numpy as np

from renewalk import stopped

p0, q = 0.7, 0.8
horizon = 200

print("Var M(t) for several stopping masses (q0 = 0.3, q = 0.8):")
grid = (0.0, 0.25, 0.5, 0.75, 1.0)
curves = {qs: stopped.dbp_stops_bernoulli(p0, q, qs, horizon) for qs in grid}
print("      t " + "".join(f"  Q_S={qs:<5g}" for qs in grid))
for t in (5, 20, 50, 100, 200):
    cells = "".join(f"{curves[qs].variance[t]:10.2f}" for qs in grid)
    print(f"   {t:>4d} {cells}")

print()
print("t^2 coefficient of the variance vs the prediction (1-Q_S) Q_S p0^2:")
t_big = 4000
for qs in grid:
    series = stopped.dbp_stops_bernoulli(p0, q, qs, t_big)
    print(
        f"   Q_S={qs:<5g} ratio {series.variance[t_big] / t_big**2:10.6f}"
        f"   prediction {(1 - qs) * qs * p0**2:10.6f}"
    )

print()
closed = stopped.dbp_stops_bernoulli(p0, q, 0.5, 1000)
print("never-stop probability that maximizes the variance:")
for t in (2, 5, 10, 50, 200, 1000):
    print(f"   t={t:>5d}   lambda_max = {closed.lambda_max[t]:.6f}")
print("   (the asymptotic maximizer is 1/2)")
