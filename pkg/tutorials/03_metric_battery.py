"""Scoring sample sets: Ursell correlations, cross-entropy, and the HOG rate.

Connected (Ursell) correlations isolate genuine k-mode structure; an
order-k mockup nulls them up to order k but not beyond.  Cross-entropy
under the ground truth turns two sample files into a single likelihood
comparison, summarized by the HOG rate.
"""

import itertools

import numpy as np

from gbsmock import (
    as_marginal_oracle,
    bitstring_probability,
    build_output_covariance,
    delta_bounds,
    empirical_marginal_table,
    greedy_sample,
    hog_rate,
    random_instance,
    sample_thermal,
    tvd,
    ursell,
    ursell_empirical,
    xe_estimate,
)

n, L = 6, 50000
state = build_output_covariance(random_instance(n, seed=5))
oracle = as_marginal_oracle(state)

# Ground-truth connected correlations decay quickly with order.
for k in (2, 3, 4):
    values = [
        abs(ursell(oracle(modes)).value)
        for modes in itertools.combinations(range(n), k)
    ]
    print(f"median |d^{k}| of the ground truth: {np.median(values):.2e}")

# An order-2 mockup cancels pair correlations but not triple ones.
greedy2 = greedy_sample(oracle, n, 2, L, seed=2)
pair_res = [
    abs(ursell_empirical(greedy2, m).value - ursell(oracle(m)).value)
    for m in itertools.combinations(range(n), 2)
]
triple_res = [
    abs(ursell_empirical(greedy2, m).value - ursell(oracle(m)).value)
    for m in itertools.combinations(range(n), 3)
]
print(f"\ngreedy k=2 residuals: order 2 {np.median(pair_res):.2e}, "
      f"order 3 {np.median(triple_res):.2e}")

# Cross-entropy: which of two sample sets looks more like the ground truth?
def log_prob(bits):
    return float(np.log(bitstring_probability(state, bits)))

probs1 = np.array([oracle((a,)).probs[1] for a in range(n)])
thermal = sample_thermal(probs1, 2000, seed=3)
greedy_small = greedy_sample(oracle, n, 2, 2000, seed=3)

xe_g, se_g = xe_estimate(greedy_small, log_prob)
xe_t, se_t = xe_estimate(thermal, log_prob)
print(f"\nXE greedy  = {xe_g:.4f} +/- {se_g:.4f}")
print(f"XE thermal = {xe_t:.4f} +/- {se_t:.4f}")
print("HOG rate (greedy as 'experiment' vs thermal mockup):",
      hog_rate(xe_g, xe_t, 2000))

# Finite-sample TVD differences are biased towards zero; report bounds.
modes = (0, 2, 4)
ideal = oracle(modes).probs
delta_e = tvd(empirical_marginal_table(greedy_small, modes).probs, ideal)
delta_m = tvd(empirical_marginal_table(thermal, modes).probs, ideal)
lower, upper = delta_bounds(delta_e, delta_m)
print(f"\ndelta TVD on {modes}: estimate {delta_m - delta_e:+.4f}, "
      f"bounds [{lower:+.4f}, {upper:+.4f}]")
