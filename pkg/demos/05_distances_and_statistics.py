"""Distances and statistics for strategy distributions.

The exact 1-D Wasserstein distance compares weighted atom sets through
their quantile functions; its sliced version averages projections inside
the simplex hyperplane and is the workhorse for comparing ensembles in
dimension 3 and up.  The uniform-simplex covariance closes the loop
between the noise model of the agent simulation and the diffusion
coefficient of its Fokker-Planck limit.
"""

import numpy as np

from gamekinetics import (ParticleEnsemble, make_generator, marginal_histogram,
                          sample_simplex_uniform, sliced_w1, uniform_simplex_covariance,
                          w1_1d)

print("W1 between {0.1, 0.2} and {0.3, 0.4}:", w1_1d([0.1, 0.2], None, [0.3, 0.4], None))
print("W1 between a Dirac at 0 and a Dirac at 1:", w1_1d([0.0], None, [1.0], None))

rng = make_generator(0)
ens_a = ParticleEnsemble.uniform(sample_simplex_uniform(rng, 500, 3))
ens_b = ParticleEnsemble.uniform(sample_simplex_uniform(rng, 500, 3))
print("\nsliced W1 between two uniform-simplex clouds:",
      round(sliced_w1(ens_a, ens_b, n_proj=64, seed=1), 5))
print("sliced W1 of a cloud against itself:", sliced_w1(ens_a, ens_a, n_proj=8, seed=1))

# histogram of one coordinate; edge atoms go right, so a Dirac at 1 is
# counted in the last bin
pts = np.vstack([np.tile([0.0, 1.0], (3, 1)), np.tile([1.0, 0.0], (7, 1))])
hist = marginal_histogram(ParticleEnsemble.uniform(pts), axis=0, n_bins=5)
print("\nhistogram masses for 0.3 at p1=0 and 0.7 at p1=1:", hist.masses)

for d in (2, 3):
    q = uniform_simplex_covariance(d)
    emp = np.cov(sample_simplex_uniform(rng, 100_000, d).T)
    print(f"\nuniform-simplex covariance d={d}: analytic\n{q}\nempirical\n{emp}")
