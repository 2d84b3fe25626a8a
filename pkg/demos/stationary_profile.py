"""The universal stationary profile of rarely stopped walks.

A geometrically stopped walk has an exact stationary law on the lattice
(a Fourier integral).  As the stopping probability vanishes, the
rescaled endpoint profile forgets the inner waiting law entirely: biased
walks land on a one-sided exponential, unbiased ones on a Laplace
density, and the general one-dimensional limit is an exponential
mixture of stable densities.
"""

import numpy as np
from scipy import stats as sps

from renewalk import montecarlo as mc
from renewalk import ness, walks
from renewalk.laws import INFINITY, Geometric, ShiftedPoisson
from renewalk.montecarlo import SimConfig
from renewalk.stopped import StoppedSpec

inner = Geometric(0.7)
q = 0.8
grid = ness.lattice_ness(walks.line_walk(0.5), inner, q, 120)
print(f"lattice stationary law (q = {q}): mass in box {grid.mass_in_box:.9f}")
print("   x:      0      1      2      5     10     20")
print("   P: " + " ".join(f"{grid.prob([x]):6.4f}" for x in (0, 1, 2, 5, 10, 20)))

print()
print("continuous limits:")
lap = ness.laplace_curve(1.0, y=np.linspace(-6, 6, 7))
print("   unbiased -> Laplace:      ", np.round(lap.density, 4))
ose = ness.one_sided_exp_curve(1.0, y=np.linspace(0, 6, 7))
print("   biased   -> one-sided exp:", np.round(ose.density, 4))
mix = ness.stable_mixture_density(np.array([0.0, 1.0, 3.0]), 2.0)
print("   stable mixture at alpha=2 equals the Laplace law:",
      np.round(mix, 6), "=", np.round(ness.laplace_density(np.array([0.0, 1.0, 3.0]), 2.0), 6))

print()
print("universality: two inner laws, one limit (p = 0.01, 100k walkers)")
jitter = np.random.default_rng(9)
exp_cdf = lambda t: np.where(t < 0, 0.0, 1.0 - np.exp(-np.clip(t, 0, None)))
for label, law, seed in (("bernoulli", inner, 1), ("shifted poisson", ShiftedPoisson(1.0), 2)):
    spec = StoppedSpec(law, Geometric(0.01), 20_000)
    cfg = SimConfig(seed=seed, replicas=100_000, horizon=20_000)
    frozen = mc.sample_stopped_value(spec, cfg, INFINITY)
    lam = ness.ness_scale(law, 0.99)
    y = mc.dequantize(frozen, jitter, one_sided=True) / lam
    ks = sps.kstest(y, exp_cdf).statistic
    print(f"   {label:<16s} rescale length {lam:7.2f}   KS to unit exponential {ks:.4f}")
