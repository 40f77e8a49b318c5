"""Exact click-pattern probabilities via the Torontonian.

The probability of a bit string with click set S is Tor(O_S)/sqrt(det sigma)
with O_S = I - (sigma^{-1})_S, where the submatrix rule keeps rows/columns
j and j + N for clicked modes j.  The Torontonian is an inclusion-exclusion
sum over subsets of the click modes, so the cost is O(|S|^3 2^|S|).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, DimensionError, DomainError
from .gaussian_state import GaussianState, reduce_state

DEFAULT_CLICK_BUDGET = 30
DEFAULT_SUBSET_CAP = 20

_NEGATIVE_PROB_TOL = -1e-12


@dataclass(frozen=True)
class ClickPattern:
    """Bit string over modes; clicks holds the sorted indices of the ones."""

    bits: tuple
    clicks: tuple

    @classmethod
    def from_bits(cls, bits) -> "ClickPattern":
        bits = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in bits):
            raise DomainError("bits must be 0 or 1")
        clicks = tuple(i for i, b in enumerate(bits) if b)
        return cls(bits=bits, clicks=clicks)


@dataclass(frozen=True)
class MarginalTable:
    """Probabilities of all 2^k patterns on a mode subset.

    Pattern index encodes bits with the first listed mode as the most
    significant bit.
    """

    modes: tuple
    probs: np.ndarray

    def __post_init__(self):
        modes = tuple(int(m) for m in self.modes)
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "probs", probs)
        k = len(modes)
        if len(set(modes)) != k:
            raise DimensionError("duplicate modes in marginal table")
        if probs.shape != (2**k,):
            raise DimensionError(f"expected {2**k} probabilities, got {probs.shape}")
        if probs.min() < _NEGATIVE_PROB_TOL:
            raise DomainError(f"negative probability {probs.min():.3g} in table")
        if abs(probs.sum() - 1.0) > 1e-9:
            raise DomainError(f"table sums to {probs.sum():.12g}, not 1")
        probs.setflags(write=False)

    @property
    def order(self) -> int:
        return len(self.modes)

    def drop_last_mode(self) -> "MarginalTable":
        """Sum out the least significant (last listed) mode."""
        folded = self.probs.reshape(-1, 2).sum(axis=1)
        return MarginalTable(modes=self.modes[:-1], probs=folded)

    def moment(self, positions=None) -> float:
        """E[product of z over the given table positions] (all by default)."""
        k = self.order
        if positions is None:
            positions = range(k)
        mask = 0
        for pos in positions:
            mask |= 1 << (k - 1 - pos)
        idx = np.arange(2**k)
        return float(self.probs[(idx & mask) == mask].sum())


def torontonian(a: np.ndarray) -> float:
    """Inclusion-exclusion sum over subsets Z of the click modes.

    Tor(A) = sum_Z (-1)^(m - |Z|) / sqrt(det(I - A_Z)); the overall parity
    factor makes each 1/sqrt term equal to a no-click marginal probability
    of the complement subset, so the result is a bona fide probability when
    divided by sqrt(det sigma).
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2 != 0:
        raise DimensionError(f"matrix must be square with even size, got {a.shape}")
    m = a.shape[0] // 2
    total = 0.0
    for mask in range(2**m):
        modes = [j for j in range(m) if mask >> j & 1]
        idx = np.array(modes + [j + m for j in modes], dtype=int)
        sub = np.eye(2 * len(modes), dtype=complex) - a[np.ix_(idx, idx)]
        if len(modes) == 0:
            term = 1.0
        else:
            sign, log_det = np.linalg.slogdet(sub)
            if abs(sign.imag) > 1e-8 or sign.real <= 0:
                raise DomainError(
                    f"det(I - A_Z) not positive for click subset {tuple(modes)}"
                )
            term = np.exp(-0.5 * log_det)
        total += term if (m - len(modes)) % 2 == 0 else -term
    return total


def bitstring_probability(
    state: GaussianState,
    pattern,
    *,
    click_budget: int = DEFAULT_CLICK_BUDGET,
    strict: bool = False,
) -> float:
    """Exact probability of one click pattern on the given state."""
    if not isinstance(pattern, ClickPattern):
        pattern = ClickPattern.from_bits(pattern)
    if len(pattern.bits) != state.n_modes:
        raise DimensionError(
            f"pattern has {len(pattern.bits)} bits, state has {state.n_modes} modes"
        )
    n_clicks = len(pattern.clicks)
    if n_clicks > click_budget:
        message = (
            f"{n_clicks} clicks exceeds the budget of {click_budget}; "
            f"cost grows as O(|S|^3 2^|S|)"
        )
        if strict:
            raise BudgetError(message)
        warnings.warn(message, stacklevel=2)
    if n_clicks == 0:
        return state.vacuum_probability()
    n = state.n_modes
    idx = np.array(list(pattern.clicks) + [j + n for j in pattern.clicks], dtype=int)
    o_s = np.eye(2 * n_clicks, dtype=complex) - state.inverse[np.ix_(idx, idx)]
    return torontonian(o_s) * state.vacuum_probability()


def marginal_table(
    state: GaussianState,
    modes,
    *,
    subset_cap: int = DEFAULT_SUBSET_CAP,
) -> MarginalTable:
    """Exact marginal table over a mode subset (cost ~ 3^k determinants)."""
    modes = tuple(int(m) for m in modes)
    k = len(modes)
    if k > subset_cap:
        raise BudgetError(f"subset of size {k} exceeds the cap of {subset_cap}")
    reduced = reduce_state(state, modes)
    probs = np.empty(2**k)
    for pattern_index in range(2**k):
        bits = [(pattern_index >> (k - 1 - pos)) & 1 for pos in range(k)]
        probs[pattern_index] = bitstring_probability(reduced, bits)
    if probs.min() < _NEGATIVE_PROB_TOL:
        raise DomainError(f"marginal probability {probs.min():.3g} below round-off")
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    return MarginalTable(modes=modes, probs=probs)


def spin_moments(state: GaussianState):
    """Spin means and covariance under s = 2z - 1, from 1- and 2-mode tables.

    Returns (means, covariance) with covariance diagonal 1 - means^2.
    """
    n = state.n_modes
    p_one = np.empty(n)
    for a in range(n):
        p_one[a] = marginal_table(state, (a,)).probs[1]
    means = 2.0 * p_one - 1.0
    cov = np.diag(1.0 - means**2)
    for a in range(n):
        for b in range(a + 1, n):
            p_both = marginal_table(state, (a, b)).probs[3]
            c = 4.0 * (p_both - p_one[a] * p_one[b])
            cov[a, b] = cov[b, a] = c
    return means, cov
