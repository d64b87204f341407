"""Outage margins for maximal-ratio combining over flat Rayleigh fading.

Monte Carlo estimator of the mean-SNR margin needed so that the post-combining
SNR of N branches stays above a reference level except with a given outage
probability, together with the exact closed form (the combined power of N
independent unit-mean exponential branches is Erlang-N, i.e. chi-square with
2N degrees of freedom up to scale).

This is a reduced-fidelity sanity mechanism for receive-branch-reduction
losses: flat-fading penalties upper-bound wideband simulated losses, which
benefit from frequency diversity and coding. Tapped-delay-line channels, OFDM
waveforms and channel coding are out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

# Minimum expected tail-sample count for a usable quantile estimate.
MIN_TAIL_SAMPLES = 100


@dataclass(frozen=True)
class OutageSpec:
    """Parameters of one Monte Carlo outage-margin estimation."""

    branches: int
    outage_prob: float
    samples: int
    seed: int
    partitions: int = 1

    def __post_init__(self) -> None:
        if self.branches < 1:
            raise ConfigurationError(f"branch count must be >= 1, got {self.branches}")
        if not 0.0 < self.outage_prob <= 0.5:
            raise ConfigurationError(
                f"outage probability must lie in (0, 0.5], got {self.outage_prob}"
            )
        if self.samples < 1:
            raise ConfigurationError(f"sample count must be >= 1, got {self.samples}")
        if self.samples * self.outage_prob < MIN_TAIL_SAMPLES:
            raise ConfigurationError(
                f"samples x outage_prob must be >= {MIN_TAIL_SAMPLES} for a stable "
                f"quantile (got {self.samples * self.outage_prob:.1f})"
            )
        if not 1 <= self.partitions <= self.samples:
            raise ConfigurationError(
                f"partition count must lie in [1, samples], got {self.partitions}"
            )


def _combined_power_samples(spec: OutageSpec) -> np.ndarray:
    """Post-MRC power samples: sums of N unit-mean exponential branch powers.

    Generation is split into independently seeded partitions so the work may be
    spread across workers; the result is deterministic for a given
    (seed, samples, partitions) triple.
    """
    children = np.random.SeedSequence(spec.seed).spawn(spec.partitions)
    base, extra = divmod(spec.samples, spec.partitions)
    parts = []
    for index, child in enumerate(children):
        count = base + (1 if index < extra else 0)
        if count == 0:
            continue
        generator = np.random.Generator(np.random.Philox(child))
        parts.append(generator.standard_exponential((count, spec.branches)).sum(axis=1))
    return np.concatenate(parts)


def _order_statistic_index(samples: int, outage_prob: float) -> int:
    # ceil(samples * p) with a relative-epsilon guard against the binary
    # representation of p pushing an exact product just above an integer.
    product = samples * outage_prob
    return max(1, math.ceil(product - 1e-12 * samples))


def mrc_outage_snr_db(spec: OutageSpec) -> float:
    """Monte Carlo mean-SNR margin (dB) for the requested outage probability.

    The margin is -10*log10(q) where q is the empirical outage_prob-quantile of
    the combined branch power, estimated by the order statistic at index
    ceil(samples * outage_prob).
    """
    powers = _combined_power_samples(spec)
    k = _order_statistic_index(spec.samples, spec.outage_prob)
    quantile = float(np.partition(powers, k - 1)[k - 1])
    return -10.0 * math.log10(quantile)


def erlang_cdf(branches: int, x: float) -> float:
    """CDF of the sum of `branches` unit-mean exponentials (exact finite sum)."""
    if branches < 1:
        raise ValueError(f"branch count must be >= 1, got {branches}")
    if x <= 0:
        return 0.0
    term = 1.0
    total = 1.0
    for k in range(1, branches):
        term *= x / k
        total += term
    return 1.0 - math.exp(-x) * total


def erlang_quantile(branches: int, probability: float) -> float:
    """Inverse of :func:`erlang_cdf` by bisection to double precision."""
    if not 0.0 < probability < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {probability}")
    lo, hi = 0.0, 1.0
    while erlang_cdf(branches, hi) < probability:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if erlang_cdf(branches, mid) < probability:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def closed_form_outage_margin_db(branches: int, outage_prob: float) -> float:
    """Exact counterpart of :func:`mrc_outage_snr_db` via the Erlang quantile."""
    return -10.0 * math.log10(erlang_quantile(branches, outage_prob))


@dataclass(frozen=True)
class BranchReductionPenalty:
    """SNR penalty of a branch-count reduction, with the array-gain part split out."""

    n_from: int
    n_to: int
    penalty_db: float
    array_gain_db: float
    margin_from_db: float
    margin_to_db: float


def branch_reduction_penalty_db(
    n_from: int,
    n_to: int,
    outage_prob: float,
    samples: int,
    seed: int,
    partitions: int = 1,
) -> BranchReductionPenalty:
    """Monte Carlo outage-margin penalty of reducing MRC branches from/to.

    The penalty already contains the MRC array gain (the combined power of N
    branches has mean N); the 10*log10(n_from/n_to) array-gain share is also
    reported on its own.
    """
    if n_from < n_to:
        raise ValueError(
            f"branch reduction requires n_from >= n_to, got {n_from} -> {n_to}"
        )
    margin_to = mrc_outage_snr_db(OutageSpec(n_to, outage_prob, samples, seed, partitions))
    margin_from = mrc_outage_snr_db(OutageSpec(n_from, outage_prob, samples, seed, partitions))
    return BranchReductionPenalty(
        n_from=n_from,
        n_to=n_to,
        penalty_db=margin_to - margin_from,
        array_gain_db=10.0 * math.log10(n_from / n_to),
        margin_from_db=margin_from,
        margin_to_db=margin_to,
    )


def closed_form_penalty_db(n_from: int, n_to: int, outage_prob: float) -> float:
    """Exact branch-reduction penalty from the closed-form quantiles."""
    if n_from < n_to:
        raise ValueError(
            f"branch reduction requires n_from >= n_to, got {n_from} -> {n_to}"
        )
    return closed_form_outage_margin_db(n_to, outage_prob) - closed_form_outage_margin_db(
        n_from, outage_prob
    )
