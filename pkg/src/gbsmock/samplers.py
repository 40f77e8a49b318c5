"""Classical mockup samplers: uniform, thermal, TAP Boltzmann machine, greedy.

Every sampler is deterministic given its seed.  Order-k samplers target the
ground-truth marginal tables on subsets of at most k modes; the marginal
oracle is any callable mapping a tuple of mode indices to a MarginalTable.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.special

from .errors import (
    BudgetError,
    ConditioningError,
    ConvergenceError,
    DimensionError,
    DomainError,
)
from .gaussian_state import GaussianState
from .probability import MarginalTable, marginal_table

_MAGNETIZATION_CLAMP = 1.0 - 1e-12
_TAP_RIDGE = 1e-10

DEFAULT_BURN_IN = 15000
DEFAULT_THINNING = 900


@dataclass(frozen=True)
class IsingModel:
    """Fields h and symmetric zero-diagonal couplings J over spins s = 2z - 1."""

    n: int
    h: np.ndarray
    coupling: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        coupling = np.asarray(self.coupling, dtype=float)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "coupling", coupling)
        if h.shape != (self.n,) or coupling.shape != (self.n, self.n):
            raise DimensionError("field/coupling shapes inconsistent with n")
        if not (np.all(np.isfinite(h)) and np.all(np.isfinite(coupling))):
            raise DomainError("fields and couplings must be finite")
        if np.max(np.abs(coupling - coupling.T)) > 1e-12:
            raise DomainError("coupling matrix must be symmetric")
        if np.max(np.abs(np.diag(coupling))) > 0:
            raise DomainError("coupling matrix must have zero diagonal")
        h.setflags(write=False)
        coupling.setflags(write=False)


@dataclass(frozen=True)
class BoltzmannMachine:
    """General-order exponential family: map from mode subsets to coefficients."""

    n: int
    terms: dict

    def __post_init__(self):
        for subset in self.terms:
            if len(subset) < 1 or tuple(sorted(subset)) != tuple(subset):
                raise DomainError(f"subset key {subset} must be sorted and non-empty")
            if len(set(subset)) != len(subset):
                raise DomainError(f"subset key {subset} has duplicates")


@dataclass
class SampleSet:
    """L bit strings of length n_modes plus provenance metadata."""

    n_modes: int
    samples: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.uint8)
        if samples.ndim != 2 or samples.shape[1] != self.n_modes:
            raise DimensionError(
                f"samples must be (L, {self.n_modes}), got {samples.shape}"
            )
        if samples.shape[0] < 1:
            raise DomainError("a sample set needs at least one sample")
        if samples.max(initial=0) > 1:
            raise DomainError("samples must be over {0, 1}")
        self.samples = samples

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]


def as_marginal_oracle(source):
    """Adapt a GaussianState (or pass through a callable) to the oracle protocol."""
    if isinstance(source, GaussianState):
        cache = {}

        def oracle(modes):
            key = tuple(int(m) for m in modes)
            if key not in cache:
                cache[key] = marginal_table(source, key)
            return cache[key]

        return oracle
    if callable(source):
        return source
    raise TypeError(f"cannot build a marginal oracle from {type(source)!r}")


def sample_uniform(n_modes: int, n_samples: int, seed=None) -> SampleSet:
    """Order-0 approximation: i.i.d. uniform bits."""
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    samples = rng.integers(0, 2, size=(n_samples, n_modes), dtype=np.uint8)
    return SampleSet(n_modes, samples, {"sampler": "uniform", "seed": seed})


def sample_thermal(one_mode_probs, n_samples: int, seed=None) -> SampleSet:
    """Order-1 approximation: each bit independent with its ideal mean."""
    probs = np.asarray(one_mode_probs, dtype=float)
    if np.any(probs < 0) or np.any(probs > 1):
        raise DomainError("one-mode probabilities must lie in [0, 1]")
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    samples = (rng.random((n_samples, probs.size)) < probs).astype(np.uint8)
    return SampleSet(probs.size, samples, {"sampler": "thermal", "seed": seed})


def fit_tap(means, cov) -> IsingModel:
    """Invert spin means/covariance into Ising parameters via the TAP equations.

    Pairs whose TAP discriminant goes negative fall back to the naive
    mean-field coupling -(C^-1)_ab with a warning.
    """
    means = np.asarray(means, dtype=float)
    cov = np.asarray(cov, dtype=float)
    n = means.size
    if cov.shape != (n, n):
        raise DimensionError("covariance shape inconsistent with means")
    means = np.clip(means, -_MAGNETIZATION_CLAMP, _MAGNETIZATION_CLAMP)

    try:
        cinv = np.linalg.inv(cov)
    except np.linalg.LinAlgError:
        try:
            cinv = np.linalg.inv(cov + _TAP_RIDGE * np.eye(n))
        except np.linalg.LinAlgError as exc:
            raise ConditioningError(
                "spin covariance is singular even with ridge regularization"
            ) from exc

    disc = 1.0 - 8.0 * cinv * np.outer(means, means)
    with np.errstate(invalid="ignore"):
        tap = -2.0 * cinv / (1.0 + np.sqrt(disc))
    naive = -cinv
    bad = disc < 0
    np.fill_diagonal(bad, False)
    if bad.any():
        warnings.warn(
            f"TAP discriminant negative for {bad.sum()} pairs; "
            "using naive mean-field coupling there",
            stacklevel=2,
        )
    coupling = np.where(bad, naive, tap)
    np.fill_diagonal(coupling, 0.0)
    coupling = 0.5 * (coupling + coupling.T)

    # Standard TAP field inversion with the Onsager reaction term; the
    # magnetization factor on that term is essential for unbiased one-mode
    # marginals when the means sit away from zero.
    h = (
        np.arctanh(means)
        - coupling @ means
        + means * ((coupling**2) @ (1.0 - means**2))
    )
    return IsingModel(n=n, h=h, coupling=coupling)


def gibbs_sample(
    model: IsingModel,
    n_samples: int,
    *,
    burn_in: int = DEFAULT_BURN_IN,
    thinning: int = DEFAULT_THINNING,
    seed=None,
    iid_runs: bool = False,
) -> SampleSet:
    """Sequential-sweep Gibbs sampler over the Ising model, O(N^2 L) time.

    With ``iid_runs`` each sample comes from its own independent chain
    (cost multiplied by L).
    """
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    if burn_in < 0 or thinning < 1:
        raise DomainError("burn_in must be >= 0 and thinning >= 1")
    metadata = {
        "sampler": "gibbs",
        "seed": seed,
        "burn_in": burn_in,
        "thinning": thinning,
        "iid_runs": iid_runs,
    }
    if iid_runs:
        children = np.random.SeedSequence(seed).spawn(n_samples)
        rows = [
            _gibbs_chain(model, 1, burn_in, thinning, np.random.default_rng(child))
            for child in children
        ]
        return SampleSet(model.n, np.vstack(rows), metadata)
    rng = np.random.default_rng(seed)
    samples = _gibbs_chain(model, n_samples, burn_in, thinning, rng)
    return SampleSet(model.n, samples, metadata)


def _gibbs_chain(model, n_samples, burn_in, thinning, rng):
    from ._kernels import gibbs_sweeps

    n = model.n
    spins = (2 * rng.integers(0, 2, size=n) - 1).astype(np.float64)
    out = np.empty((n_samples, n), dtype=np.uint8)
    total_sweeps = burn_in + n_samples * thinning
    chunk = max(1, min(total_sweeps, 1 << 16))
    kept = 0
    done = 0
    while done < total_sweeps:
        this = min(chunk, total_sweeps - done)
        uniforms = rng.random((this, n))
        kept = gibbs_sweeps(
            model.h, model.coupling, spins, uniforms, done, burn_in, thinning, out, kept
        )
        done += this
    assert kept == n_samples
    return out


def greedy_sample(oracle, n_modes: int, order: int, n_samples: int, seed=None) -> SampleSet:
    """Greedy placement of an L x N bit matrix matching order-k marginals.

    Columns 1..k are filled row by row against the first-k-modes table;
    each later column is chosen to minimize the summed l1 distance over all
    order-k subsets ending at that column, with row shuffles in between.
    Runs in O(N^k 2^k L) time.
    """
    from ._kernels import greedy_column_pass

    oracle = as_marginal_oracle(oracle)
    k = order
    if k < 1 or k > n_modes:
        raise DomainError(f"order must be in [1, {n_modes}], got {k}")
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    samples = np.zeros((n_samples, n_modes), dtype=np.uint8)

    # Phase 1: the first k columns, matched jointly against their k-mode table.
    ideal = oracle(tuple(range(k))).probs
    counts = np.zeros(2**k)
    for i in range(n_samples):
        target = (i + 1) * ideal
        scores = np.abs(counts + 1.0 - target) - np.abs(counts - target)
        tied = np.flatnonzero(scores <= scores.min() + 1e-9)
        pattern = int(tied[rng.integers(tied.size)]) if tied.size > 1 else int(tied[0])
        counts[pattern] += 1.0
        for pos in range(k):
            samples[i, pos] = (pattern >> (k - 1 - pos)) & 1
    samples = samples[rng.permutation(n_samples)]

    # Phase 2: one column at a time, tracking all order-k subsets ending here.
    weights = 2 ** np.arange(k - 2, -1, -1, dtype=np.int64) if k > 1 else None
    for j in range(k, n_modes):
        subsets = list(itertools.combinations(range(j), k - 1))
        ideal_tables = np.stack(
            [oracle(sub + (j,)).probs for sub in subsets]
        )
        if k == 1:
            bases = np.zeros((n_samples, 1), dtype=np.int64)
        else:
            members = np.array(subsets, dtype=np.int64)
            bases = samples[:, members].astype(np.int64) @ weights
        counts = np.zeros((len(subsets), 2**k))
        column = np.empty(n_samples, dtype=np.uint8)
        greedy_column_pass(bases, counts, ideal_tables, rng.random(n_samples), column)
        samples[:, j] = column
        samples = samples[rng.permutation(n_samples)]

    return SampleSet(
        n_modes, samples, {"sampler": "greedy", "order": k, "seed": seed}
    )


def decorrelate(sample_set: SampleSet, keep_fraction: float, seed=None) -> SampleSet:
    """Subsample without replacement and shuffle, reducing row correlations."""
    if not 0.0 < keep_fraction <= 1.0:
        raise DomainError("keep_fraction must be in (0, 1]")
    n_keep = int(round(keep_fraction * sample_set.n_samples))
    if n_keep < 1:
        raise DomainError(
            f"keep_fraction {keep_fraction} keeps no samples out of "
            f"{sample_set.n_samples}"
        )
    rng = np.random.default_rng(seed)
    chosen = rng.choice(sample_set.n_samples, size=n_keep, replace=False)
    metadata = dict(sample_set.metadata)
    metadata.update({"decorrelated": True, "keep_fraction": keep_fraction})
    return SampleSet(sample_set.n_modes, sample_set.samples[chosen], metadata)


def _enumerate_bits(n: int) -> np.ndarray:
    """All 2^n bit rows; mode 0 is the most significant bit of the row index."""
    idx = np.arange(2**n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1)
    return ((idx[:, None] >> shifts) & 1).astype(np.float64)


def train_exact_bm(
    oracle,
    n_modes: int,
    order: int,
    *,
    tol: float = 1e-9,
    max_iter: int = 200,
) -> BoltzmannMachine:
    """Fit the maximum-entropy distribution matching all marginals up to k.

    Damped Newton ascent on the convex dual; model moments are computed by
    exact 2^n enumeration, so this is a desk-scale verification tool.
    """
    if n_modes > 16:
        raise BudgetError(f"exact training enumerates 2^{n_modes} states; cap is 16")
    oracle = as_marginal_oracle(oracle)
    subsets = [
        sub
        for size in range(1, order + 1)
        for sub in itertools.combinations(range(n_modes), size)
    ]
    targets = np.array([oracle(sub).moment() for sub in subsets])

    bits = _enumerate_bits(n_modes)
    features = np.stack(
        [bits[:, list(sub)].prod(axis=1) for sub in subsets], axis=1
    )

    lam = np.zeros(len(subsets))
    for _ in range(max_iter):
        energy = features @ lam
        log_z = scipy.special.logsumexp(energy)
        weights = np.exp(energy - log_z)
        moments = weights @ features
        grad = moments - targets
        residual = np.max(np.abs(grad))
        if residual < tol:
            return BoltzmannMachine(
                n=n_modes, terms=dict(zip(subsets, lam.tolist()))
            )
        hessian = features.T @ (weights[:, None] * features) - np.outer(moments, moments)
        step = np.linalg.solve(hessian + 1e-12 * np.eye(len(subsets)), grad)
        # Backtracking line search on the dual objective.
        objective = log_z - lam @ targets
        scale = 1.0
        while scale > 1e-8:
            trial = lam - scale * step
            trial_obj = scipy.special.logsumexp(features @ trial) - trial @ targets
            if trial_obj < objective:
                break
            scale *= 0.5
        lam = lam - scale * step
    raise ConvergenceError(
        f"max-entropy training stalled with moment residual {residual:.3g} "
        f"after {max_iter} iterations"
    )


def bm_exact_distribution(model, *, max_modes: int = 20) -> np.ndarray:
    """Exact probability vector over all 2^n bit strings (test oracle).

    The row index encodes bits with mode 0 as the most significant bit.
    """
    n = model.n
    if n > max_modes:
        raise BudgetError(f"enumeration over 2^{n} states exceeds cap of {max_modes}")
    if isinstance(model, IsingModel):
        spins = 2.0 * _enumerate_bits(n) - 1.0
        energy = spins @ model.h + 0.5 * np.einsum(
            "ia,ab,ib->i", spins, model.coupling, spins
        )
    elif isinstance(model, BoltzmannMachine):
        bits = _enumerate_bits(n)
        energy = np.zeros(2**n)
        for subset, lam in model.terms.items():
            energy += lam * bits[:, list(subset)].prod(axis=1)
    else:
        raise TypeError(f"unsupported model type {type(model)!r}")
    energy -= energy.max()
    probs = np.exp(energy)
    probs /= probs.sum()
    return probs
