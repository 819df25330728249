"""Report serialization: canonical JSON, CSV, and a human-readable text summary.

The JSON form is canonical: fixed key order, two-space indentation, shortest
round-trip float rendering. Re-emitting a parsed report reproduces the bytes
exactly, and the timestamp is the only field that varies between runs at a
fixed seed.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import CompareError
from .stats import Statistics

TIMESTAMP_PLACEHOLDER = "1970-01-01T00:00:00Z"


@dataclass(frozen=True)
class MetricResult:
    id: str
    name: str
    category: str
    unit: str
    kind: str  # "sampled" | "scalar" | "boolean"
    statistics: Statistics | None
    value: float | None
    passed: bool | None
    detail: dict[str, float] | None
    score: float
    mig_expected: float
    mig_deviation_percent: float
    mig_gap_percent: float

    def point_estimate(self) -> float | None:
        """The single number summarizing this metric (mean, scalar, or None)."""
        if self.kind == "sampled":
            return self.statistics.mean
        if self.kind == "scalar":
            return self.value
        return None


@dataclass(frozen=True)
class CategoryScore:
    name: str
    score: float


@dataclass(frozen=True)
class BenchmarkReport:
    benchmark_version: str
    system_name: str
    iterations: int
    warmup: int
    tenants: int
    memory_limit_mb: int | None
    compute_limit_percent: float | None
    seed: int
    metric_filter: list[str] | None
    generated_at: str
    metrics: list[MetricResult]
    categories: list[CategoryScore]
    weighted_score: float
    unweighted_parity: float | None
    grade: str


@dataclass(frozen=True)
class ComparisonEntry:
    id: str
    status: str  # "ok" | "regression" | "new"
    mean_delta: float | None
    score_delta: float | None


@dataclass(frozen=True)
class ComparisonReport:
    current_system: str
    baseline_system: str
    entries: list[ComparisonEntry]
    regression_count: int
    overall_delta: float


# ---------------------------------------------------------------- JSON form

def _metric_obj(m: MetricResult) -> dict:
    obj: dict = {
        "id": m.id,
        "name": m.name,
        "category": m.category,
        "unit": m.unit,
        "kind": m.kind,
    }
    if m.kind == "sampled":
        s = m.statistics
        obj["statistics"] = {
            "mean": s.mean, "stddev": s.stddev, "median": s.median,
            "p95": s.p95, "p99": s.p99, "cv": s.cv, "n": s.n,
        }
    elif m.kind == "scalar":
        obj["value"] = m.value
    else:
        obj["outcome"] = "pass" if m.passed else "fail"
    if m.detail is not None:
        obj["detail"] = dict(m.detail)
    obj["score"] = m.score
    obj["mig_comparison"] = {
        "mig_expected": m.mig_expected,
        "mig_deviation_percent": m.mig_deviation_percent,
        "mig_gap_percent": m.mig_gap_percent,
    }
    return obj


def report_to_dict(report: BenchmarkReport) -> dict:
    return {
        "benchmark_version": report.benchmark_version,
        "system": {"name": report.system_name},
        "config": {
            "iterations": report.iterations,
            "warmup": report.warmup,
            "tenants": report.tenants,
            "memory_limit_mb": report.memory_limit_mb,
            "compute_limit_percent": report.compute_limit_percent,
            "seed": report.seed,
            "metric_filter": report.metric_filter,
        },
        "generated_at": report.generated_at,
        "metrics": [_metric_obj(m) for m in report.metrics],
        "categories": [{"name": c.name, "score": c.score} for c in report.categories],
        "overall": {
            "weighted_score": report.weighted_score,
            "unweighted_parity": report.unweighted_parity,
            "grade": report.grade,
        },
    }


def emit_json(report: BenchmarkReport) -> bytes:
    return (json.dumps(report_to_dict(report), indent=2) + "\n").encode("utf-8")


def _metric_from_obj(obj: dict) -> MetricResult:
    stats = None
    if "statistics" in obj:
        s = obj["statistics"]
        stats = Statistics(mean=s["mean"], stddev=s["stddev"], median=s["median"],
                           p95=s["p95"], p99=s["p99"], cv=s["cv"], n=s["n"])
    passed = None
    if "outcome" in obj:
        passed = obj["outcome"] == "pass"
    mc = obj["mig_comparison"]
    return MetricResult(
        id=obj["id"], name=obj["name"], category=obj["category"], unit=obj["unit"],
        kind=obj["kind"], statistics=stats, value=obj.get("value"), passed=passed,
        detail=obj.get("detail"), score=obj["score"],
        mig_expected=mc["mig_expected"],
        mig_deviation_percent=mc["mig_deviation_percent"],
        mig_gap_percent=mc["mig_gap_percent"],
    )


def report_from_dict(data: dict) -> BenchmarkReport:
    try:
        cfg = data["config"]
        overall = data["overall"]
        return BenchmarkReport(
            benchmark_version=data["benchmark_version"],
            system_name=data["system"]["name"],
            iterations=cfg["iterations"],
            warmup=cfg["warmup"],
            tenants=cfg["tenants"],
            memory_limit_mb=cfg["memory_limit_mb"],
            compute_limit_percent=cfg["compute_limit_percent"],
            seed=cfg["seed"],
            metric_filter=cfg["metric_filter"],
            generated_at=data["generated_at"],
            metrics=[_metric_from_obj(m) for m in data["metrics"]],
            categories=[CategoryScore(c["name"], c["score"]) for c in data["categories"]],
            weighted_score=overall["weighted_score"],
            unweighted_parity=overall["unweighted_parity"],
            grade=overall["grade"],
        )
    except (KeyError, TypeError) as exc:
        raise CompareError(f"report schema mismatch: missing {exc}") from None


def load_report(path: str | Path) -> BenchmarkReport:
    p = Path(path)
    if not p.exists():
        raise CompareError(f"baseline report not found: {p}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CompareError(f"baseline report is not valid JSON: {p}: {exc}") from None
    return report_from_dict(data)


def normalize_json_bytes(raw: bytes) -> bytes:
    """Replace the timestamp so reports can be compared byte-for-byte."""
    data = json.loads(raw.decode("utf-8"))
    data["generated_at"] = TIMESTAMP_PLACEHOLDER
    return (json.dumps(data, indent=2) + "\n").encode("utf-8")


# ----------------------------------------------------------------- CSV form

CSV_HEADER = [
    "metric_id", "name", "category", "unit", "mean", "stddev", "median",
    "p95", "p99", "cv", "score", "mig_expected", "mig_deviation_percent",
    "mig_gap_percent",
]


def _cell(x: float | int | None) -> str:
    if x is None:
        return ""
    return repr(x)


def emit_csv(report: BenchmarkReport) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for m in report.metrics:
        if m.kind == "sampled":
            s = m.statistics
            row_stats = [_cell(s.mean), _cell(s.stddev), _cell(s.median),
                         _cell(s.p95), _cell(s.p99), _cell(s.cv)]
        elif m.kind == "scalar":
            row_stats = [_cell(m.value), "", "", "", "", ""]
        else:
            row_stats = ["", "", "", "", "", ""]
        writer.writerow([m.id, m.name, m.category, m.unit, *row_stats,
                         _cell(m.score), _cell(m.mig_expected),
                         _cell(m.mig_deviation_percent), _cell(m.mig_gap_percent)])
    return buf.getvalue().encode("utf-8")


# ----------------------------------------------------------------- TXT form

def _fmt_pct(x: float | None) -> str:
    return "--" if x is None else f"{x * 100.0:.1f}%"


def emit_txt(report: BenchmarkReport) -> bytes:
    lines = []
    banner = f" virtbench {report.benchmark_version} | system: {report.system_name} "
    rule = "=" * max(52, len(banner))
    lines.append(rule)
    lines.append(banner)
    lines.append(rule)
    lines.append(f"generated: {report.generated_at}   seed: {report.seed}")
    lines.append(f"iterations: {report.iterations}   warmup: {report.warmup}   tenants: {report.tenants}")
    lines.append("")
    lines.append("Category scores")
    for c in report.categories:
        lines.append(f"  {c.name:<18} {c.score:6.3f}")
    lines.append("")
    lines.append(f"Overall: {_fmt_pct(report.weighted_score)}  Grade: {report.grade}  "
                 f"MIG parity: {_fmt_pct(report.unweighted_parity)}")
    lines.append("")
    lines.append("Worst 5 metrics by score")
    worst = sorted(report.metrics, key=lambda m: (m.score, m.id))[:5]
    for m in worst:
        lines.append(f"  {m.id:<10} {m.name:<34} {m.score:6.3f}")
    lines.append("")
    return ("\n".join(lines)).encode("utf-8")


def render_comparison(cmp: ComparisonReport) -> str:
    lines = [
        f"Comparison: {cmp.current_system} vs baseline {cmp.baseline_system}",
        f"overall weighted delta: {cmp.overall_delta * 100.0:+.2f} points",
    ]
    for e in cmp.entries:
        if e.status == "new":
            lines.append(f"  {e.id:<10} new metric (no baseline)")
            continue
        mean_part = "" if e.mean_delta is None else f"mean delta {e.mean_delta:+.4g}  "
        lines.append(f"  {e.id:<10} {mean_part}score delta {e.score_delta * 100.0:+.2f} pts  [{e.status}]")
    if cmp.regression_count:
        lines.append(f"REGRESSIONS: {cmp.regression_count}")
    else:
        lines.append("No regressions.")
    return "\n".join(lines) + "\n"


def write_reports(report: BenchmarkReport, prefix: str | Path) -> dict[str, Path]:
    """Write <prefix>.json/.csv/.txt; returns the created paths."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    paths = {
        "json": Path(f"{prefix}.json"),
        "csv": Path(f"{prefix}.csv"),
        "txt": Path(f"{prefix}.txt"),
    }
    paths["json"].write_bytes(emit_json(report))
    paths["csv"].write_bytes(emit_csv(report))
    paths["txt"].write_bytes(emit_txt(report))
    return paths
