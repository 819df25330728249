"""Normalized scoring, grading, and comparison against the ideal-partition baseline.

Scores are always in [0, 1]; a score of 1.0 means the measured system is at or
beyond the baseline for that metric. Deviations are signed percentages where
positive means the measured system beats the baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .errors import CatalogError, DegenerateInputError, WeightError


class Direction(Enum):
    LOWER_BETTER = "lower_better"
    HIGHER_BETTER = "higher_better"
    BOOLEAN_TRUE = "boolean_true"


GRADE_THRESHOLDS: tuple[tuple[float, str], ...] = (
    (95.0, "A+"),
    (90.0, "A"),
    (85.0, "B+"),
    (80.0, "B"),
    (70.0, "C"),
    (60.0, "D"),
)

# Absorbs float artifacts like 0.70 * 100 == 69.999999999999986 at grade edges.
_EDGE_EPS = 1e-9


@dataclass(frozen=True)
class MetricScore:
    """Per-metric normalized score plus signed/absolute baseline deviation."""

    metric_id: str
    score: float
    mig_deviation_percent: float
    mig_gap_percent: float


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def metric_score(actual: float, expected: float, direction: Direction) -> float:
    """Normalize one observation against its baseline.

    lower_better  -> clamp(expected / actual)
    higher_better -> clamp(actual / expected)
    boolean_true  -> actual interpreted as 0 or 1
    """
    if direction is Direction.BOOLEAN_TRUE:
        if actual not in (0, 1, 0.0, 1.0, True, False):
            raise DegenerateInputError(f"boolean metric takes 0 or 1, got {actual!r}")
        return 1.0 if actual else 0.0
    if expected <= 0 or not math.isfinite(expected):
        raise CatalogError(f"expected baseline must be positive and finite, got {expected}")
    if direction is Direction.LOWER_BETTER:
        if actual <= 0:
            raise DegenerateInputError(f"lower_better score undefined for actual {actual}")
        return _clamp01(expected / actual)
    return _clamp01(actual / expected)


def mig_deviation(actual: float, expected: float, direction: Direction) -> float:
    """Signed deviation from the baseline, in percent; positive means better."""
    if expected <= 0 or not math.isfinite(expected):
        raise CatalogError(f"expected baseline must be positive and finite, got {expected}")
    if direction is Direction.BOOLEAN_TRUE:
        return 0.0 if actual else -100.0
    if direction is Direction.LOWER_BETTER:
        return (expected - actual) / expected * 100.0
    return (actual - expected) / expected * 100.0


def make_metric_score(metric_id: str, actual: float, expected: float, direction: Direction) -> MetricScore:
    dev = mig_deviation(actual, expected, direction)
    return MetricScore(
        metric_id=metric_id,
        score=metric_score(actual, expected, direction),
        mig_deviation_percent=dev,
        mig_gap_percent=abs(dev),
    )


def category_score(scores: list[MetricScore]) -> float:
    """Arithmetic mean of member scores."""
    if not scores:
        raise DegenerateInputError("category_score requires at least one metric score")
    return math.fsum(s.score for s in scores) / len(scores)


def validate_weights(weights: Mapping[str, float]) -> None:
    for name, w in weights.items():
        if not 0.0 <= w <= 1.0:
            raise WeightError(f"weight for {name!r} out of [0, 1]: {w}")
    total = math.fsum(weights.values())
    if abs(total - 1.0) > 1e-9:
        raise WeightError(f"weights sum to {total!r}, expected 1.0")


def overall_score(category_scores: Mapping[str, float], weights: Mapping[str, float]) -> float:
    """Weighted sum over all categories; requires every weighted category present."""
    validate_weights(weights)
    missing = set(weights) - set(category_scores)
    if missing:
        raise DegenerateInputError(f"missing category scores: {sorted(missing)}")
    return math.fsum(weights[c] * category_scores[c] for c in weights)


def grade_of(overall: float) -> str:
    """Letter grade for an overall score in [0, 1]."""
    if not 0.0 <= overall <= 1.0:
        raise ValueError(f"overall score out of [0, 1]: {overall}")
    pct = overall * 100.0
    for threshold, letter in GRADE_THRESHOLDS:
        if pct >= threshold - _EDGE_EPS:
            return letter
    return "F"


def graceful_degradation_score(no_crash: bool, error_returned: bool, recovered: bool) -> float:
    """Composite resource-exhaustion handling score in percent (0..100)."""
    return 100.0 * (0.4 * bool(no_crash) + 0.3 * bool(error_returned) + 0.3 * bool(recovered))
