"""Evaluate the closed-form bounds without running any simulation.

Three families of formulas:
  - a policy-independent lower bound on the mean total queue length,
    driven by arrival variance over the drift gap epsilon;
  - a two-sided bracket for the max-weight policy whose centre scales
    like 1/epsilon and whose slack is o(1/epsilon);
  - moment and tail caps from a negative-drift argument, used for the
    perpendicular component and for any reflected walk with bounded
    jumps.
"""

import numpy as np

from iqswitch import (
    DriftParams,
    bernoulli_scaled_limit,
    bernoulli_uniform,
    drift_moment_bound,
    drift_tail_bound,
    heavy_traffic_bracket,
    ssc_moment_constant,
    universal_lower_bound,
)

n = 3
print(f"uniform Bernoulli switch, n={n}")
print(f"{'eps':>6} {'lower bnd':>10} {'bracket low':>12} {'bracket high':>13} "
      f"{'eps*centre':>11}")
for eps in (0.2, 0.1, 0.05, 0.02, 0.01):
    model = bernoulli_uniform(n, eps)
    ulb = universal_lower_bound(model)
    rep = heavy_traffic_bracket(model, r=2)
    centre = 0.5 * (rep.lower + rep.upper)
    print(f"{eps:>6} {ulb:>10.2f} {rep.lower:>12.1f} {rep.upper:>13.1f} "
          f"{eps * rep.terms['leading']:>11.4f}")

print(f"scaled mean limit as eps -> 0: {bernoulli_scaled_limit(n):.6f}")
print()

print("moment caps for the perpendicular component (collapse regime):")
for r in (1, 2):
    m = ssc_moment_constant(bernoulli_uniform(2, 0.1), r)
    print(f"  order {r}: E[||q_perp||^{r}]^(1/{r}) <= {m:.4f}")
print()

print("drift caps for a reflected walk with up-probability 0.3:")
params = DriftParams(kappa=0.0, eta=0.4, d_max=1.0)
exact_mean = (0.3 / 0.7) / (1 - 0.3 / 0.7)
print(f"  exact stationary mean {exact_mean:.4f}, "
      f"cap {drift_moment_bound(params, 1):.1f}")
rho = 0.3 / 0.7
print(f"  {'m':>3} {'exact tail':>11} {'cap':>8}")
for m in (0, 2, 4, 8):
    print(f"  {m:>3} {rho ** (m + 1):>11.5f} {drift_tail_bound(params, m):>8.5f}")
