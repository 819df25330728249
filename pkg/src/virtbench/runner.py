"""Benchmark orchestration: config validation, metric evaluation, scoring,
report assembly, and report-to-report comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .calibration import MODES
from .catalog import Catalog
from .errors import CompareError, ConfigError
from .evaluators import EvalContext, RawOutcome, WorkloadShape, evaluate_metric
from .reporting import BenchmarkReport, CategoryScore, ComparisonEntry, ComparisonReport, MetricResult
from .scoring import Direction, grade_of, metric_score, mig_deviation
from .stats import Statistics, compute_stats

BENCHMARK_VERSION = "1.0.0"
DEFAULT_SEED = 42
REGRESSION_POINTS = 5.0


@dataclass
class RunConfig:
    system: str
    iterations: int = 100
    warmup: int = 10
    tenants: int = 1
    memory_limit_mb: int | None = None
    compute_limit_percent: float | None = None
    metric_filter: list[str] | None = None
    seed: int = DEFAULT_SEED
    calibration_path: str | None = None
    workload: WorkloadShape = field(default_factory=WorkloadShape)

    def __post_init__(self) -> None:
        if self.system not in MODES:
            raise ConfigError(f"unknown system {self.system!r}; expected one of {MODES}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.warmup < 0:
            raise ConfigError(f"warmup must be >= 0, got {self.warmup}")
        if self.tenants < 1:
            raise ConfigError(f"tenants must be >= 1, got {self.tenants}")
        if self.compute_limit_percent is not None and not 0 < self.compute_limit_percent <= 100:
            raise ConfigError(f"compute limit must be in (0, 100], got {self.compute_limit_percent}")
        if self.memory_limit_mb is not None and self.memory_limit_mb <= 0:
            raise ConfigError(f"memory limit must be positive, got {self.memory_limit_mb}")


def _score_observation(actual: float, expected: float, direction: Direction) -> tuple[float, float]:
    """(score, signed deviation). A zero-cost observation on a lower-is-better
    metric is ideal, which the ratio formula cannot express; treat it as 1.0."""
    deviation = mig_deviation(actual, expected, direction)
    if direction is Direction.LOWER_BETTER and actual <= 0.0:
        return 1.0, deviation
    return metric_score(actual, expected, direction), deviation


def _result_from_outcome(catalog: Catalog, metric_id: str, outcome: RawOutcome) -> MetricResult:
    mdef = catalog.lookup(metric_id)
    stats: Statistics | None = None
    value: float | None = None
    passed: bool | None = None
    if outcome.kind == "sampled":
        stats = compute_stats(outcome.samples)
        actual = stats.mean
    elif outcome.kind == "scalar":
        value = outcome.value
        actual = value
    else:
        passed = outcome.passed
        actual = 1.0 if passed else 0.0
    score, deviation = _score_observation(actual, mdef.mig_expected, mdef.direction)
    return MetricResult(
        id=metric_id,
        name=mdef.name,
        category=mdef.category.display,
        unit=mdef.unit,
        kind=outcome.kind,
        statistics=stats,
        value=value,
        passed=passed,
        detail=outcome.detail,
        score=score,
        mig_expected=mdef.mig_expected,
        mig_deviation_percent=deviation,
        mig_gap_percent=abs(deviation),
    )


def _resolve_filter(catalog: Catalog, metric_filter: list[str] | None) -> tuple[str, ...]:
    if metric_filter is None:
        return catalog.ordered_ids()
    requested = set(metric_filter)
    unknown = requested - set(catalog.ordered_ids())
    if unknown:
        raise ConfigError(f"unknown metrics in filter: {sorted(unknown)}")
    return tuple(mid for mid in catalog.ordered_ids() if mid in requested)


def _weighted_overall(catalog: Catalog, cat_scores: dict[str, float]) -> float:
    """Weighted score; for partial runs the weights renormalize over the
    categories actually present."""
    weights = {slug: w for slug, w in catalog.weights.items() if slug in cat_scores}
    total_w = math.fsum(weights.values())
    if total_w <= 0:
        raise ConfigError("no weighted categories present in run")
    return math.fsum(w * cat_scores[slug] for slug, w in weights.items()) / total_w


def run_benchmark(config: RunConfig, catalog: Catalog) -> BenchmarkReport:
    """Evaluate the configured metric set and assemble the scored report."""
    ordered = _resolve_filter(catalog, config.metric_filter)
    ctx = EvalContext(config, catalog.calibration)
    results = [_result_from_outcome(catalog, mid, evaluate_metric(ctx, mid)) for mid in ordered]

    by_slug: dict[str, list[float]] = {}
    for r in results:
        slug = catalog.lookup(r.id).category.slug
        by_slug.setdefault(slug, []).append(r.score)
    cat_scores = {slug: math.fsum(scores) / len(scores) for slug, scores in by_slug.items()}

    weighted = _weighted_overall(catalog, cat_scores)
    # Native is the ceiling, not a system being held to the baseline, so its
    # report carries no parity figure.
    parity = None
    if config.system != "native":
        parity = math.fsum(r.score for r in results) / len(results)

    categories = [
        CategoryScore(name=c.display, score=cat_scores[c.slug])
        for c in (catalog.lookup(mid).category for mid in ordered)
    ]
    # preserve catalog category order, one entry per present category
    seen: set[str] = set()
    unique_categories = []
    for c in categories:
        if c.name not in seen:
            seen.add(c.name)
            unique_categories.append(c)

    return BenchmarkReport(
        benchmark_version=BENCHMARK_VERSION,
        system_name=config.system,
        iterations=config.iterations,
        warmup=config.warmup,
        tenants=config.tenants,
        memory_limit_mb=config.memory_limit_mb,
        compute_limit_percent=config.compute_limit_percent,
        seed=config.seed,
        metric_filter=list(config.metric_filter) if config.metric_filter is not None else None,
        generated_at=datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        metrics=results,
        categories=unique_categories,
        weighted_score=weighted,
        unweighted_parity=parity,
        grade=grade_of(weighted),
    )


def compare_reports(current: BenchmarkReport, baseline: BenchmarkReport,
                    regression_points: float = REGRESSION_POINTS) -> ComparisonReport:
    """Per-metric deltas of means and scores versus a baseline report."""
    if baseline.benchmark_version.split(".")[0] != current.benchmark_version.split(".")[0]:
        raise CompareError(
            f"incompatible report versions: {current.benchmark_version} vs {baseline.benchmark_version}")
    base_by_id = {m.id: m for m in baseline.metrics}
    entries = []
    regressions = 0
    for m in current.metrics:
        base = base_by_id.get(m.id)
        if base is None:
            entries.append(ComparisonEntry(id=m.id, status="new", mean_delta=None, score_delta=None))
            continue
        cur_mean = m.point_estimate()
        base_mean = base.point_estimate()
        mean_delta = None if cur_mean is None or base_mean is None else cur_mean - base_mean
        score_delta = m.score - base.score
        status = "regression" if score_delta * 100.0 < -regression_points else "ok"
        if status == "regression":
            regressions += 1
        entries.append(ComparisonEntry(id=m.id, status=status, mean_delta=mean_delta, score_delta=score_delta))
    return ComparisonReport(
        current_system=current.system_name,
        baseline_system=baseline.system_name,
        entries=entries,
        regression_count=regressions,
        overall_delta=current.weighted_score - baseline.weighted_score,
    )
