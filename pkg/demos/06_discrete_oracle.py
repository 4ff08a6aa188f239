"""Exhaustive search over m-ary phases and how it approaches the continuous optimum."""

# %% Enumerate the m-UQP for growing m
import numpy as np

from uqp import brute_force, refine
from uqp.scenarios import RandomSpec, random_hermitian

R = random_hermitian(RandomSpec(4, 4, seed=11))
for m in (2, 4, 8, 16, 32):
    res = brute_force(R, m)
    print(f"m={m:3d}: value {res.value:.6f} after {res.evaluations} candidates")

# %% Local polishing of the discrete optimum recovers the continuous value
phases, value = refine(R, brute_force(R, 32))
print(f"refined value {value:.6f}, phases (rad) {np.round(phases, 4)}")
