import numpy as np
import pytest

from gbsmock import bitstring_probability, build_output_covariance, random_instance


def full_distribution(state):
    """Exact probability vector over all 2^n patterns, mode 0 as MSB."""
    n = state.n_modes
    probs = np.empty(2**n)
    for z in range(2**n):
        bits = [(z >> (n - 1 - i)) & 1 for i in range(n)]
        probs[z] = bitstring_probability(state, bits)
    return probs


def marginalize(dist, n, modes):
    """Sum a full 2^n distribution down to a subset table (first mode = MSB)."""
    k = len(modes)
    out = np.zeros(2**k)
    for z in range(2**n):
        idx = 0
        for pos, m in enumerate(modes):
            idx |= ((z >> (n - 1 - m)) & 1) << (k - 1 - pos)
        out[idx] += dist[z]
    return out


@pytest.fixture
def small_state():
    return build_output_covariance(random_instance(6, seed=42))


@pytest.fixture
def make_state():
    def _make(n, seed, **kwargs):
        return build_output_covariance(random_instance(n, seed=seed, **kwargs))

    return _make
