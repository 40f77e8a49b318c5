"""The four classical mockup samplers, ranked by marginal fidelity.

Each sampler reproduces the ground truth's marginals up to some order k:
uniform (k = 0), thermal (k = 1), the TAP-trained Ising model (k = 2 in
spirit), and the greedy heuristic (any k).  Higher order means a smaller
total variation distance on small-subset marginals.
"""

import itertools

import numpy as np

from gbsmock import (
    as_marginal_oracle,
    build_output_covariance,
    empirical_marginal_table,
    fit_tap,
    gibbs_sample,
    greedy_sample,
    marginal_table,
    random_instance,
    sample_thermal,
    sample_uniform,
    spin_moments,
    tvd,
)

n, L = 8, 20000
state = build_output_covariance(random_instance(n, seed=7))
oracle = as_marginal_oracle(state)

# Order 0: ignore the instance entirely.
uniform = sample_uniform(n, L, seed=1)

# Order 1: independent coin flips with the right single-mode rates.
probs1 = np.array([oracle((a,)).probs[1] for a in range(n)])
thermal = sample_thermal(probs1, L, seed=1)

# Order 2 via mean-field inverse Ising: spin moments -> TAP -> Gibbs.
means, cov = spin_moments(state)
model = fit_tap(means, cov)
tap = gibbs_sample(model, L, burn_in=2000, thinning=5, seed=1)

# The greedy heuristic matches marginals of any chosen order directly.
greedy2 = greedy_sample(oracle, n, 2, L, seed=1)
greedy3 = greedy_sample(oracle, n, 3, L, seed=1)

print(f"mean TVD over all 3-mode marginals ({L} samples each):")
triples = list(itertools.combinations(range(n), 3))
for name, samples in [
    ("uniform", uniform),
    ("thermal", thermal),
    ("tap", tap),
    ("greedy k=2", greedy2),
    ("greedy k=3", greedy3),
]:
    values = [
        tvd(empirical_marginal_table(samples, t).probs, oracle(t).probs)
        for t in triples
    ]
    print(f"  {name:11s} {np.mean(values):.4f}")
