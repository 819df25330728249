"""Statistical kernel: sample aggregation plus the shared fairness/efficiency formulas.

All functions are pure and reentrant. Sample sets are plain sequences of finite
floats; insertion order is preserved by callers that need warmup trimming.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DegenerateInputError, UndefinedCVError


@dataclass(frozen=True)
class Statistics:
    """Summary of one sample set.

    ``cv`` is None when the mean is non-positive (explicit undefined marker,
    never NaN). ``stddev`` uses the n-1 divisor and is 0.0 for n == 1.
    """

    mean: float
    stddev: float
    median: float
    p95: float
    p99: float
    cv: float | None
    n: int


def _check_samples(samples: Sequence[float]) -> None:
    if len(samples) == 0:
        raise DegenerateInputError("sample set must contain at least one value")
    for v in samples:
        if not math.isfinite(v):
            raise DegenerateInputError(f"non-finite sample value: {v!r}")


def percentile(samples: Sequence[float], p: float) -> float:
    """Nearest-rank percentile: value at 1-based index ceil(p*n/100) of the sort.

    ``p`` must lie in (0, 100]. p=100 is the maximum.
    """
    _check_samples(samples)
    if not 0.0 < p <= 100.0:
        raise ValueError(f"percentile p must be in (0, 100], got {p}")
    n = len(samples)
    # p*n first: keeps integer-valued ranks exact in float (95*100/100 == 95.0).
    rank = math.ceil((p * n) / 100.0)
    rank = min(max(rank, 1), n)
    return sorted(samples)[rank - 1]


def compute_stats(samples: Sequence[float]) -> Statistics:
    """Aggregate one sample set into mean/stddev/median/P95/P99/CV."""
    _check_samples(samples)
    n = len(samples)
    mean = math.fsum(samples) / n
    if n > 1:
        var = math.fsum((v - mean) ** 2 for v in samples) / (n - 1)
        stddev = math.sqrt(var)
    else:
        stddev = 0.0
    ordered = sorted(samples)

    def _rank(p: float) -> float:
        return ordered[min(max(math.ceil((p * n) / 100.0), 1), n) - 1]

    cv = stddev / mean if mean > 0 else None
    return Statistics(
        mean=mean,
        stddev=stddev,
        median=_rank(50.0),
        p95=_rank(95.0),
        p99=_rank(99.0),
        cv=cv,
        n=n,
    )


def coefficient_of_variation(samples: Sequence[float]) -> float:
    """Dispersion normalized by mean (sigma/mu). Errors when the mean is <= 0."""
    _check_samples(samples)
    stats = compute_stats(samples)
    if stats.mean <= 0:
        raise UndefinedCVError(f"cv undefined for mean {stats.mean}")
    return stats.stddev / stats.mean


def jains_index(throughputs: Sequence[float]) -> float:
    """Fairness of a share vector: (sum x)^2 / (n * sum x^2), in [1/n, 1].

    Equals 1.0 iff all shares are equal. All-zero input is rejected rather
    than defining 0/0.
    """
    _check_samples(throughputs)
    for v in throughputs:
        if v < 0:
            raise DegenerateInputError(f"negative throughput {v}")
    total = math.fsum(throughputs)
    squares = math.fsum(v * v for v in throughputs)
    if squares == 0.0:
        raise DegenerateInputError("jains_index undefined for all-zero throughputs")
    return (total * total) / (len(throughputs) * squares)


def scaling_efficiency(throughput_at_n: float, throughput_at_1: float, n: int) -> float:
    """Observed throughput at width n relative to perfect linear scaling."""
    if throughput_at_1 <= 0:
        raise DegenerateInputError(f"baseline throughput must be positive, got {throughput_at_1}")
    if n < 1:
        raise DegenerateInputError(f"scale factor must be >= 1, got {n}")
    return throughput_at_n / (n * throughput_at_1)


def degradation_percent(baseline: float, observed: float) -> float:
    """Relative loss versus a baseline, in percent. Negative means improvement."""
    if baseline <= 0:
        raise DegenerateInputError(f"baseline must be positive, got {baseline}")
    return (baseline - observed) / baseline * 100.0
