"""Comparison statistics between sample sets and the ground truth.

Covers Ursell (connected) correlations under two equivalent definitions,
total variation distance, KL divergence and its cross-entropy estimator,
the HOG rate, click-number moments with their Gaussian fit, bootstrapped
Pearson correlation, and heuristic finite-sample bounds.  Natural
logarithms are used throughout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.special

from .errors import BudgetError, ConvergenceError, DimensionError, DomainError
from .probability import MarginalTable
from .samplers import SampleSet

_URSELL_RECURSION_CAP = 8
_URSELL_MGF_CAP = 5
_MGF_STEP = 1e-3


@dataclass(frozen=True)
class UrsellValue:
    modes: tuple
    order: int
    value: float


@dataclass
class MetricReport:
    """Per-subset metric values with recomputable aggregates."""

    metric: str
    subsets: list
    values: list
    bounds: list | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def aggregate(self) -> dict:
        values = np.asarray(self.values, dtype=float)
        std = float(values.std(ddof=1)) if values.size > 1 else 0.0
        return {
            "mean": float(values.mean()),
            "std": std,
            "sem": std / math.sqrt(values.size) if values.size > 1 else 0.0,
            "count": int(values.size),
        }

    def to_dict(self) -> dict:
        record = {
            "metric": self.metric,
            "subsets": [list(s) for s in self.subsets],
            "values": [float(v) for v in self.values],
            "aggregate": self.aggregate,
            "metadata": self.metadata,
        }
        if self.bounds is not None:
            record["bounds"] = [list(b) for b in self.bounds]
        return record

    @classmethod
    def from_dict(cls, record: dict) -> "MetricReport":
        return cls(
            metric=record["metric"],
            subsets=[tuple(s) for s in record["subsets"]],
            values=list(record["values"]),
            bounds=[tuple(b) for b in record["bounds"]] if "bounds" in record else None,
            metadata=record.get("metadata", {}),
        )


def empirical_marginal_table(sample_set: SampleSet, modes) -> MarginalTable:
    """Unsmoothed empirical table over a mode subset, from raw counts."""
    modes = tuple(int(m) for m in modes)
    k = len(modes)
    cols = sample_set.samples[:, list(modes)].astype(np.int64)
    weights = 2 ** np.arange(k - 1, -1, -1, dtype=np.int64)
    indices = cols @ weights
    counts = np.bincount(indices, minlength=2**k).astype(float)
    return MarginalTable(modes=modes, probs=counts / counts.sum())


def _partitions(items: tuple):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def ursell(table: MarginalTable) -> UrsellValue:
    """Connected correlation by the partition recursion.

    Order 1 reports the shift E[z] - 1/2; singleton factors inside the
    recursion use the plain mean.
    """
    k = table.order
    if k > _URSELL_RECURSION_CAP:
        raise BudgetError(f"partition recursion capped at order {_URSELL_RECURSION_CAP}")
    if k == 1:
        return UrsellValue(table.modes, 1, table.moment() - 0.5)

    memo = {}

    def moment(positions):
        return table.moment(positions)

    def connected(positions: tuple) -> float:
        if positions in memo:
            return memo[positions]
        total = moment(positions)
        for part in _partitions(positions):
            if len(part) == 1:
                continue
            product = 1.0
            for block in part:
                block = tuple(block)
                if len(block) == 1:
                    product *= moment(block)
                else:
                    product *= connected(block)
            total -= product
        memo[positions] = total
        return total

    value = connected(tuple(range(k)))
    return UrsellValue(table.modes, k, value)


def ursell_mgf(table: MarginalTable) -> UrsellValue:
    """Connected correlation as a mixed derivative of the log-MGF at zero.

    Central finite differences with one Richardson extrapolation level;
    independent cross-check for the partition recursion.  Order 1 returns
    the plain mean (unshifted).
    """
    import mpmath

    k = table.order
    if k > _URSELL_MGF_CAP:
        raise BudgetError(f"log-MGF differentiation capped at order {_URSELL_MGF_CAP}")
    idx = np.arange(2**k)
    bits = (idx[:, None] >> np.arange(k - 1, -1, -1)) & 1

    # The 2^k signed evaluations cancel almost completely at high orders,
    # so the log-MGF is evaluated in extended precision.
    with mpmath.workdps(50):
        probs = [mpmath.mpf(p) for p in table.probs]

        def log_mgf(r):
            return mpmath.log(
                mpmath.fsum(
                    p * mpmath.exp(mpmath.fdot(row, r))
                    for p, row in zip(probs, bits.tolist())
                )
            )

        def central(h):
            total = mpmath.mpf(0)
            for signs in itertools.product((-1, 1), repeat=k):
                parity = 1 if signs.count(-1) % 2 == 0 else -1
                total += parity * log_mgf([h * s for s in signs])
            return total / (2 * h) ** k

        h = mpmath.mpf(_MGF_STEP)
        coarse = central(h)
        fine = central(h / 2)
        value = float((4 * fine - coarse) / 3)
    return UrsellValue(table.modes, k, value)


def ursell_empirical(sample_set: SampleSet, modes) -> UrsellValue:
    """Ursell value of the empirical marginal table over the given modes."""
    return ursell(empirical_marginal_table(sample_set, modes))


def tvd(p, q) -> float:
    """Total variation distance (1/2) sum |p - q|."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DimensionError(f"shape mismatch {p.shape} vs {q.shape}")
    for name, vec in (("p", p), ("q", q)):
        if abs(vec.sum() - 1.0) > 1e-6:
            raise DomainError(f"{name} sums to {vec.sum():.8g}, not 1")
    return 0.5 * float(np.abs(p - q).sum())


def kl(p, q) -> float:
    """KL divergence sum p log(p/q); p must be absolutely continuous wrt q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DimensionError(f"shape mismatch {p.shape} vs {q.shape}")
    support = p > 0
    bad = support & (q <= 0)
    if bad.any():
        raise DomainError(
            f"q vanishes on outcome {int(np.flatnonzero(bad)[0])} where p > 0"
        )
    return float(np.sum(p[support] * np.log(p[support] / q[support])))


def xe_estimate(sample_set: SampleSet, ideal_logprob):
    """Cross-entropy estimate -(1/n) sum log q(z_i) and its standard error."""
    log_q = np.array([ideal_logprob(row) for row in sample_set.samples], dtype=float)
    if not np.all(np.isfinite(log_q)):
        offender = int(np.flatnonzero(~np.isfinite(log_q))[0])
        raise DomainError(f"ideal probability vanishes on sample {offender}")
    mean = -float(log_q.mean())
    if log_q.size > 1:
        se = float(log_q.std(ddof=1)) / math.sqrt(log_q.size)
    else:
        se = 0.0
    return mean, se


def hog_rate(xe_experiment: float, xe_mockup: float, n_samples: int) -> float:
    """Logistic score 1 / (1 + exp(-n * dXE)) with dXE = XE_mockup - XE_experiment.

    Saturates to 0 or 1 in floating point for large n.
    """
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    return float(scipy.special.expit(n_samples * (xe_mockup - xe_experiment)))


def surjection_count(power: int, blocks: int) -> int:
    """Number of surjections from a power-set onto `blocks` labelled cells."""
    return sum(
        (-1) ** i * math.comb(blocks, i) * (blocks - i) ** power
        for i in range(blocks + 1)
    )


def click_moments_theoretical(oracle, n_modes: int, order: int) -> list:
    """Exact click-number moments [mean, mu2, ..] from all-ones marginals.

    Raw moments come from the surjection expansion over subsets of up to
    `order` modes, so the cost is C(N, order) marginal evaluations.
    """
    from .samplers import as_marginal_oracle

    if order > 3:
        raise BudgetError("click-moment expansion capped at order 3")
    if order < 1:
        raise DomainError("order must be >= 1")
    oracle = as_marginal_oracle(oracle)

    all_ones = {}
    for size in range(1, order + 1):
        total = 0.0
        for sub in itertools.combinations(range(n_modes), size):
            total += oracle(sub).moment()
        all_ones[size] = total

    raw = [1.0]
    for power in range(1, order + 1):
        raw.append(
            sum(
                surjection_count(power, size) * all_ones[size]
                for size in range(1, power + 1)
            )
        )
    mean = raw[1]
    moments = [mean]
    for power in range(2, order + 1):
        central = sum(
            math.comb(power, i) * raw[i] * (-mean) ** (power - i)
            for i in range(power + 1)
        )
        moments.append(central)
    return moments


def click_moments_empirical(sample_set: SampleSet, order: int) -> list:
    """Sample click-number moments [mean, mu2, ..] of the per-string counts."""
    clicks = sample_set.samples.sum(axis=1).astype(float)
    mean = float(clicks.mean())
    moments = [mean]
    for power in range(2, order + 1):
        moments.append(float(np.mean((clicks - mean) ** power)))
    return moments


def fit_click_gaussian(mu1: float, mu2: float, n_modes: int, *, tol=1e-8, max_iter=100):
    """Coefficients (A, B, C) of w(x) = exp(A + Bx + Cx^2) on x in {0..n}.

    Damped Newton on (B, C) until the normalized distribution's mean and
    variance match mu1 and mu2 within tolerance; A absorbs normalization.
    """
    if mu2 <= 0:
        raise DomainError("mu2 must be positive")
    x = np.arange(n_modes + 1, dtype=float)
    b, c = mu1 / mu2, -0.5 / mu2

    def stats(bb, cc):
        log_w = bb * x + cc * x**2
        log_w -= log_w.max()
        w = np.exp(log_w)
        w /= w.sum()
        m1 = float(w @ x)
        m2 = float(w @ x**2)
        m3 = float(w @ x**3)
        m4 = float(w @ x**4)
        return m1, m2, m3, m4

    def residual_norm(bb, cc):
        m1, m2, _, _ = stats(bb, cc)
        return max(abs(m1 - mu1), abs(m2 - m1**2 - mu2))

    for _ in range(max_iter):
        m1, m2, m3, m4 = stats(b, c)
        res = np.array([m1 - mu1, m2 - (mu2 + mu1**2)])
        if residual_norm(b, c) < tol:
            log_w = b * x + c * x**2
            a = -float(scipy.special.logsumexp(log_w))
            return a, b, c
        # Jacobian of the raw moments is the covariance of (x, x^2).
        jac = np.array(
            [
                [m2 - m1**2, m3 - m1 * m2],
                [m3 - m1 * m2, m4 - m2**2],
            ]
        )
        step = np.linalg.solve(jac, res)
        scale = 1.0
        base = residual_norm(b, c)
        while scale > 1e-10:
            if residual_norm(b - scale * step[0], c - scale * step[1]) < base:
                break
            scale *= 0.5
        b -= scale * step[0]
        c -= scale * step[1]
    raise ConvergenceError(
        f"click-distribution fit stalled with residual {residual_norm(b, c):.3g}"
    )


def pearson_bootstrap(x, y, *, resamples: int = 500, seed=None):
    """Pearson r plus its standard deviation over paired bootstrap resamples."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise DimensionError("x and y must be equal-length 1-d arrays of size >= 2")
    if x.std() == 0 or y.std() == 0:
        raise DomainError("zero variance input; Pearson r undefined")
    r = float(np.corrcoef(x, y)[0, 1])
    rng = np.random.default_rng(seed)
    draws = []
    for _ in range(resamples):
        idx = rng.integers(0, x.size, size=x.size)
        xs, ys = x[idx], y[idx]
        if xs.std() == 0 or ys.std() == 0:
            continue
        draws.append(np.corrcoef(xs, ys)[0, 1])
    stddev = float(np.std(draws, ddof=1)) if len(draws) > 1 else 0.0
    return r, stddev


def delta_bounds(delta_e_hat: float, delta_m_hat: float):
    """Heuristic (lower, upper) bounds on the distance difference.

    The empirical estimate delta_m - delta_e is biased towards zero, so it
    bounds the true difference on the zero side; the opposite side is
    bounded by the corresponding single-distance estimate.
    """
    if delta_e_hat < 0 or delta_m_hat < 0:
        raise DomainError("distance estimates must be >= 0")
    estimate = delta_m_hat - delta_e_hat
    if estimate < 0:
        return (-delta_e_hat, estimate)
    if estimate > 0:
        return (estimate, delta_m_hat)
    return (-delta_e_hat, delta_m_hat)
