"""Click-number statistics: exact moments and the Gaussian-shaped fit.

The total click count is a cheap whole-distribution diagnostic: its first
k moments need only the all-ones marginals on subsets of up to k modes.
A two-parameter exponential w(x) = exp(A + Bx + Cx^2) fitted to the first
two moments summarizes the whole histogram.
"""

import numpy as np

from gbsmock import (
    build_output_covariance,
    click_moments_empirical,
    click_moments_theoretical,
    fit_click_gaussian,
    greedy_sample,
    random_instance,
)

n, L = 10, 50000
state = build_output_covariance(random_instance(n, seed=11))

theory = click_moments_theoretical(state, n, 3)
print("theoretical click moments (mean, mu2, mu3):",
      [round(m, 4) for m in theory])

samples = greedy_sample(state, n, 2, L, seed=4)
empirical = click_moments_empirical(samples, 3)
print("empirical (greedy k=2)                   :",
      [round(m, 4) for m in empirical])

# Fit the discretized-Gaussian weight to the exact mean and variance.
a, b, c = fit_click_gaussian(theory[0], theory[1], n)
x = np.arange(n + 1)
fitted = np.exp(a + b * x + c * x**2)
histogram = np.bincount(samples.samples.sum(axis=1), minlength=n + 1) / L

print("\nclicks  fitted   empirical")
for k in range(n + 1):
    bar = "#" * int(60 * fitted[k])
    print(f"  {k:2d}   {fitted[k]:.4f}   {histogram[k]:.4f}  {bar}")
