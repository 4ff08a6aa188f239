"""MERIT: a local optimum plus a certified bound on how far it can be from the global one."""

# %% A rank-deficient random instance, small enough to check by enumeration
import numpy as np

from uqp import MeritConfig, RandomSpec, brute_force, merit, random_hermitian, refine

R = random_hermitian(RandomSpec(4, 2, seed=5))
rep = merit(R, MeritConfig(seed=0))
print(f"objective {rep.objective:.6f}  gamma {rep.gamma:.6f}  converged {rep.converged}")
print(f"certified interval [{rep.lower_bound:.6f}, {rep.upper_bound:.6f}]")

# %% Ground truth: exhaustive search over 64 phase levels, then local polishing
_, best = refine(R, brute_force(R, 64))
print(f"refined oracle value {best:.6f}  inside interval: {rep.lower_bound - 1e-9 <= best <= rep.upper_bound + 1e-9}")

# %% A harder instance: the alpha0 = 0 phase stalls and the certificate is a ratio below one
R = random_hermitian(RandomSpec(8, 2, seed=19))
rep = merit(R, MeritConfig(seed=19))
print(f"n=8 d=2 seed 19: gamma {rep.gamma:.4f}, final residual {rep.residual_final:.2e}")
print(f"the objective is at least {100 * rep.gamma:.1f}% of the certified upper bound on the optimum")
