"""Command-line orchestration: build states, generate samples, score them.

Subcommands: build, sample, analyze, compare, import-ustc.  Exit codes:
0 success, 1 runtime failure, 2 usage error.  All randomness flows from a
single --seed through per-purpose derived sub-seeds, so every run is
reproducible from its recorded configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import zlib

import numpy as np

from . import data_io, metrics, probability, samplers
from .errors import DomainError, GBSMockError, UsageError
from .gaussian_state import build_output_covariance, reduce_state
from .probability import bitstring_probability, marginal_table

_LOW_POWER_BIAS = 0.3


def derive_seed(seed, purpose: str):
    """Stable per-purpose sub-seed from the user's master seed."""
    if seed is None:
        return None
    return np.random.SeedSequence([int(seed), zlib.crc32(purpose.encode())])


def _click_probabilities(state) -> np.ndarray:
    return np.array(
        [marginal_table(state, (a,)).probs[1] for a in range(state.n_modes)]
    )


def _cmd_build(args) -> int:
    instance = data_io.load_instance(args.instance)
    state = build_output_covariance(instance)
    p_click = _click_probabilities(state)
    summary = {
        "n_output": instance.n_output,
        "n_input": instance.n_input,
        "log_det_sigma": state.log_det,
        "p_all_zeros": state.vacuum_probability(),
        "mean_click_number": float(p_click.sum()),
        "one_mode_click_probabilities": p_click.tolist(),
    }
    text = json.dumps(summary, sort_keys=True, indent=1)
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_sample(args) -> int:
    instance = data_io.load_instance(args.instance)
    state = build_output_covariance(instance)
    n = state.n_modes
    method = args.method
    if method == "uniform":
        sample_set = samplers.sample_uniform(
            n, args.samples, derive_seed(args.seed, "uniform")
        )
    elif method == "thermal":
        sample_set = samplers.sample_thermal(
            _click_probabilities(state), args.samples, derive_seed(args.seed, "thermal")
        )
    elif method == "tap":
        means, cov = probability.spin_moments(state)
        p_click = (means + 1.0) / 2.0
        if np.mean(np.abs(p_click - 0.5)) > _LOW_POWER_BIAS:
            print(
                "warning: one-mode marginals are strongly biased away from 1/2; "
                "the mean-field sampler degrades on such low-power instances",
                file=sys.stderr,
            )
        model = samplers.fit_tap(means, cov)
        sample_set = samplers.gibbs_sample(
            model,
            args.samples,
            burn_in=args.burn_in,
            thinning=args.thinning,
            seed=derive_seed(args.seed, "gibbs"),
        )
    elif method == "greedy":
        if args.order is None:
            raise UsageError("--order is required for the greedy sampler")
        print(
            f"greedy sampler cost model: O(N^k 2^k L) = "
            f"O({n}^{args.order} * {2**args.order} * {args.samples})",
            file=sys.stderr,
        )
        sample_set = samplers.greedy_sample(
            state, n, args.order, args.samples, derive_seed(args.seed, "greedy")
        )
    else:
        raise DomainError(f"unknown sampler method {method!r}")
    sample_set.metadata.update(
        {"seed": args.seed, "instance": os.path.basename(args.instance)}
    )
    data_io.save_samples(sample_set, args.out)
    return 0


def _draw_subsets(n_modes, subset_size, n_subsets, rng):
    if subset_size > n_modes:
        raise DomainError(f"subset size {subset_size} exceeds {n_modes} modes")
    subsets = []
    seen = set()
    attempts = 0
    while len(subsets) < n_subsets and attempts < 50 * n_subsets:
        modes = tuple(
            sorted(int(m) for m in rng.choice(n_modes, size=subset_size, replace=False))
        )
        attempts += 1
        if modes not in seen:
            seen.add(modes)
            subsets.append(modes)
    return subsets


def _cmd_analyze(args) -> int:
    instance = data_io.load_instance(args.instance)
    state = build_output_covariance(instance)
    sample_set = data_io.load_samples(args.samples)
    reference = data_io.load_samples(args.reference) if args.reference else None
    rng = np.random.default_rng(derive_seed(args.seed, "subsets"))
    config = {
        "metric": args.metric,
        "subset_size": args.subset_size,
        "n_subsets": args.n_subsets,
        "seed": args.seed,
        "samples": os.path.basename(args.samples),
    }

    if args.metric == "clicks":
        report = _analyze_clicks(state, sample_set, config)
    else:
        subsets = _draw_subsets(state.n_modes, args.subset_size, args.n_subsets, rng)
        if args.metric == "tvd":
            report = _analyze_distance(
                state, sample_set, reference, subsets, config, metrics.tvd, "tvd"
            )
        elif args.metric == "kl":
            report = _analyze_distance(
                state, sample_set, reference, subsets, config, _kl_vs_ideal, "kl"
            )
        elif args.metric == "ursell":
            report = _analyze_ursell(state, sample_set, subsets, config, rng)
        else:
            raise DomainError(f"unknown metric {args.metric!r}")
    data_io.save_report(report, args.out, fmt=args.format)
    return 0


def _kl_vs_ideal(empirical, ideal):
    # The ideal distribution is always the second argument, so absolute
    # continuity holds whenever it is strictly positive.
    return metrics.kl(empirical, ideal)


def _analyze_distance(state, sample_set, reference, subsets, config, func, name):
    values, bounds = [], []
    per_mode = []
    for modes in subsets:
        ideal = marginal_table(state, modes).probs
        mockup = metrics.empirical_marginal_table(sample_set, modes).probs
        delta_m = func(mockup, ideal)
        if reference is not None:
            experiment = metrics.empirical_marginal_table(reference, modes).probs
            delta_e = func(experiment, ideal)
            value = delta_m - delta_e
            bounds.append(metrics.delta_bounds(delta_e, delta_m))
        else:
            value = delta_m
        values.append(value)
        per_mode.append(value / len(modes))
    config = dict(config, log_base="natural", per_mode_mean=float(np.mean(per_mode)))
    return metrics.MetricReport(
        metric=name if reference is None else f"delta_{name}",
        subsets=subsets,
        values=values,
        bounds=bounds if reference is not None else None,
        metadata=config,
    )


def _analyze_ursell(state, sample_set, subsets, config, rng):
    ideal_values, empirical_values = [], []
    for modes in subsets:
        ideal_values.append(metrics.ursell(marginal_table(state, modes)).value)
        empirical_values.append(metrics.ursell_empirical(sample_set, modes).value)
    r, stddev = metrics.pearson_bootstrap(
        ideal_values,
        empirical_values,
        seed=derive_seed(config["seed"], "bootstrap") if config["seed"] is not None else None,
    )
    config = dict(
        config,
        ideal_values=[float(v) for v in ideal_values],
        pearson_r=r,
        pearson_r_stddev=stddev,
    )
    return metrics.MetricReport(
        metric="ursell", subsets=subsets, values=empirical_values, metadata=config
    )


def _analyze_clicks(state, sample_set, config):
    n = state.n_modes
    clicks = sample_set.samples.sum(axis=1)
    histogram = np.bincount(clicks, minlength=n + 1) / sample_set.n_samples
    theoretical = metrics.click_moments_theoretical(state, n, 2)
    a, b, c = metrics.fit_click_gaussian(theoretical[0], theoretical[1], n)
    x = np.arange(n + 1, dtype=float)
    fitted = np.exp(a + b * x + c * x**2)
    config = dict(
        config,
        theoretical_moments=[float(m) for m in theoretical],
        empirical_moments=[float(m) for m in metrics.click_moments_empirical(sample_set, 3)],
        gaussian_fit={"A": a, "B": b, "C": c},
        fitted_distribution=fitted.tolist(),
    )
    return metrics.MetricReport(
        metric="clicks",
        subsets=[(int(k),) for k in range(n + 1)],
        values=histogram.tolist(),
        metadata=config,
    )


def _restrict(sample_set, prefix):
    if prefix is None:
        return sample_set
    return samplers.SampleSet(
        prefix, sample_set.samples[:, :prefix], dict(sample_set.metadata)
    )


def _select(sample_set, click_number, max_samples):
    clicks = sample_set.samples.sum(axis=1)
    if click_number is not None:
        rows = np.flatnonzero(clicks == click_number)
    else:
        rows = np.arange(sample_set.n_samples)
    rows = rows[:max_samples]
    if rows.size == 0:
        raise DomainError(
            f"no samples with click number {click_number}; cannot estimate XE"
        )
    return samplers.SampleSet(
        sample_set.n_modes, sample_set.samples[rows], dict(sample_set.metadata)
    )


def _cmd_compare(args) -> int:
    instance = data_io.load_instance(args.instance)
    state = build_output_covariance(instance)
    if args.prefix_modes is not None:
        state = reduce_state(state, range(args.prefix_modes))
    experiment = _restrict(data_io.load_samples(args.samples_a), args.prefix_modes)
    mockup = _restrict(data_io.load_samples(args.samples_b), args.prefix_modes)
    experiment = _select(experiment, args.click_number, args.max_samples)
    mockup = _select(mockup, args.click_number, args.max_samples)

    def log_prob(bits):
        p = bitstring_probability(
            state, bits, click_budget=args.click_budget, strict=args.strict
        )
        if p <= 0:
            raise DomainError("ideal probability vanished on a sample")
        return float(np.log(p))

    xe_a, se_a = metrics.xe_estimate(experiment, log_prob)
    xe_b, se_b = metrics.xe_estimate(mockup, log_prob)
    n_eff = min(experiment.n_samples, mockup.n_samples)
    report = metrics.MetricReport(
        metric="delta_xe",
        subsets=[tuple(range(state.n_modes))],
        values=[xe_b - xe_a],
        metadata={
            "xe_experiment": xe_a,
            "xe_experiment_se": se_a,
            "xe_mockup": xe_b,
            "xe_mockup_se": se_b,
            "delta_xe_se": float(np.hypot(se_a, se_b)),
            "hog_rate": metrics.hog_rate(xe_a, xe_b, n_eff),
            "n_experiment": experiment.n_samples,
            "n_mockup": mockup.n_samples,
            "click_number": args.click_number,
            "prefix_modes": args.prefix_modes,
            "log_base": "natural",
        },
    )
    data_io.save_report(report, args.out, fmt=args.format)
    return 0


def _cmd_import_ustc(args) -> int:
    data_io.import_ustc(args.squeezing, args.real, args.imag, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gbsmock",
        description="Mockup samplers and statistical benchmarks for "
        "threshold-detector Gaussian boson sampling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="validate an instance and summarize its state")
    p.add_argument("--instance", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("sample", help="generate mockup samples")
    p.add_argument("--instance", required=True)
    p.add_argument(
        "--method", required=True, choices=["uniform", "thermal", "tap", "greedy"]
    )
    p.add_argument("--samples", type=int, required=True, help="number of bit strings")
    p.add_argument("--order", type=int, help="marginal order for the greedy sampler")
    p.add_argument("--seed", type=int)
    p.add_argument("--burn-in", type=int, default=samplers.DEFAULT_BURN_IN)
    p.add_argument("--thinning", type=int, default=samplers.DEFAULT_THINNING)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("analyze", help="score a sample file against the ground truth")
    p.add_argument("--instance", required=True)
    p.add_argument("--samples", required=True)
    p.add_argument(
        "--reference", help="second sample file; metrics become differences vs it"
    )
    p.add_argument("--metric", required=True, choices=["tvd", "kl", "ursell", "clicks"])
    p.add_argument("--subset-size", type=int, default=3)
    p.add_argument("--n-subsets", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("compare", help="cross-entropy difference between two sample files")
    p.add_argument("--instance", required=True)
    p.add_argument("--samples-a", required=True, help="experiment samples")
    p.add_argument("--samples-b", required=True, help="mockup samples")
    p.add_argument(
        "--click-number",
        type=int,
        help="restrict to bit strings with this many clicks (first matches in file order)",
    )
    p.add_argument("--max-samples", type=int, default=1000)
    p.add_argument(
        "--prefix-modes", type=int, help="marginalize to the first m modes before scoring"
    )
    p.add_argument("--click-budget", type=int, default=probability.DEFAULT_CLICK_BUDGET)
    p.add_argument("--strict", action="store_true", help="fail instead of warn over budget")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("import-ustc", help="convert published text files to canonical JSON")
    p.add_argument("--squeezing", required=True)
    p.add_argument("--real", required=True)
    p.add_argument("--imag", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_import_ustc)

    return parser


def main(argv=None) -> int:
    threads = os.environ.get("GBSMOCK_THREADS")
    if threads:
        try:
            import numba

            numba.set_num_threads(max(1, int(threads)))
        except (ImportError, ValueError):
            pass
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (GBSMockError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
