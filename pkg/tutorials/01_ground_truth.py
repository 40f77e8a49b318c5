"""Ground truth for a small GBS experiment with threshold detectors.

Builds the output covariance matrix of a random squeezed-light instance,
evaluates exact click-pattern probabilities through the Torontonian, and
shows that marginal tables are cheap even when the full distribution is not.
"""

import itertools

import numpy as np

from gbsmock import (
    bitstring_probability,
    build_output_covariance,
    marginal_table,
    random_instance,
)

# A 6-mode interferometer fed by 3 squeezers (transmission 0.9).
instance = random_instance(6, seed=42)
state = build_output_covariance(instance)

print("modes:", state.n_modes)
print("p(no detector clicks) = 1/sqrt(det sigma) =", state.vacuum_probability())

# Exact probability of an arbitrary click pattern.
pattern = [1, 0, 1, 1, 0, 0]
print("p(101100) =", bitstring_probability(state, pattern))

# At 6 modes we can still enumerate everything and check normalization.
total = 0.0
for bits in itertools.product((0, 1), repeat=6):
    total += bitstring_probability(state, bits)
print("sum over all 64 patterns =", total)

# Marginal tables only ever touch 2^k patterns on k modes, so they stay
# affordable at any system size.  Mode 0 is the leftmost bit of the index.
table = marginal_table(state, (1, 4))
print("\ntwo-mode marginal on modes (1, 4):")
for idx, p in enumerate(table.probs):
    print(f"  p({idx >> 1}{idx & 1}) = {p:.6f}")

# The theoretical mean click number needs only the N single-mode tables.
mean_clicks = sum(marginal_table(state, (a,)).probs[1] for a in range(6))
print("\nmean click number =", mean_clicks)
