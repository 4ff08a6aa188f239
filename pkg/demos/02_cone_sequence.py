"""Splitting a matrix at a hyper point into an eigen-part and a non-negative part."""

# %% Find a hyper point of a random matrix
import numpy as np

from uqp import cone_sequence, dominance_rho, local_optimize, rho_floor
from uqp.linalg import unimodular

rng = np.random.default_rng(2)
n = 6
X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
R = X @ X.conj().T + 0.1 * np.eye(n)
s, _ = local_optimize(R, rng.uniform(0, 2 * np.pi, n))
z = unimodular(s)

# %% The sequence settles after two updates and has s as an eigenvector with eigenvalue n * rho
rho = rho_floor(R, s) + 0.5
seq = cone_sequence(R, s, rho)
R0, R1, R2 = seq.matrices
print("||R(1) - R(0)|| =", np.linalg.norm(R1 - R0))
print("||R(2) - R(1)|| =", np.linalg.norm(R2 - R1))
print("||R(2) s - n rho s|| =", np.linalg.norm(R2 @ z - n * rho * z))

# %% Raising rho to the dominance threshold makes s the top eigenvector of the limit
rho_star = max(rho, dominance_rho(seq)) + 1e-9
w, V = np.linalg.eigh(cone_sequence(R, s, rho_star).limit)
print(f"rho needed for dominance: {dominance_rho(seq):.4f}")
print("alignment of top eigenvector with s:", abs(np.vdot(V[:, -1], z / np.sqrt(n))))
