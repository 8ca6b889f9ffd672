"""Max-weight matching with a duality certificate, and the flat cone.

The scheduler solves an assignment problem every slot.  The solver
returns row and column potentials (w, w_tilde) with w_i + wt_j >= q_ij
everywhere and total potential equal to the matching weight, which
certifies optimality without enumerating permutations.

Matrices of the form q_ij = w_i + wt_j are special: every permutation
touches each row and column exactly once, so every matching has the
same weight and the scheduler is free to pick any of them.  That
indifference is what lets the queue vector drift along this set.
"""

import itertools

import numpy as np

from iqswitch import argmax_set, max_weight_matching

rng = np.random.default_rng(3)
q = rng.integers(0, 20, size=(4, 4)).astype(np.float64)

res = max_weight_matching(q)
print("queue matrix:")
print(q.astype(int))
print(f"optimal schedule: row i -> column {[int(c) for c in res.perm]}, "
      f"weight {res.weight:.0f}")
print(f"row potentials    {np.round(res.w, 6)}")
print(f"column potentials {np.round(res.w_tilde, 6)}")

cover = res.w[:, None] + res.w_tilde[None, :] - q
print(f"min cover slack {cover.min():.2e} (>= 0: potentials dominate q)")
print(f"duality gap {abs(res.w.sum() + res.w_tilde.sum() - res.weight):.2e}")
print()

# brute force agrees
best = max(q[range(4), p].sum() for p in itertools.permutations(range(4)))
print(f"enumeration over 4! permutations gives {best:.0f} (same)")
print()

# additive matrices tie every matching
w = rng.uniform(0, 5, size=4)
wt = rng.uniform(0, 5, size=4)
flat = w[:, None] + wt[None, :]
ties = argmax_set(flat)
print(f"additive matrix w_i + wt_j: {len(ties)} of {24} matchings are optimal")
weights = {round(float(flat[range(4), p].sum()), 9)
           for p in itertools.permutations(range(4))}
print(f"distinct matching weights on it: {sorted(weights)}")
