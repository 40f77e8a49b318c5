"""Synthetic experiment instances for tests, demos and benchmarks."""

from __future__ import annotations

import numpy as np
import scipy.stats

from .gaussian_state import GBSInstance


def random_instance(
    n_output: int,
    n_input: int | None = None,
    *,
    seed=None,
    squeezing_range: tuple[float, float] = (0.3, 1.0),
    transmission: float = 0.9,
) -> GBSInstance:
    """Random lossy sub-unitary interferometer with random squeezing.

    The transformation is a block of a Haar-random unitary scaled by
    sqrt(transmission), so all singular values are <= 1.
    """
    if n_input is None:
        n_input = n_output if n_output % 2 == 0 else n_output + 1
    rng = np.random.default_rng(seed)
    dim = max(n_output, n_input)
    u = scipy.stats.unitary_group.rvs(dim, random_state=rng)
    t = np.sqrt(transmission) * u[:n_output, :n_input]
    lo, hi = squeezing_range
    squeezing = rng.uniform(lo, hi, size=n_input // 2)
    return GBSInstance(
        n_output=n_output, n_input=n_input, squeezing=squeezing, transformation=t
    )
