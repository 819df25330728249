"""virtbench: a 56-metric benchmark for GPU virtualization layers.

Runs every metric against deterministic simulated backends (native, two
software-virtualization profiles, and an ideal hardware-partition profile),
scores each against baseline expectations, and emits JSON/CSV/TXT reports.
"""

from .catalog import Catalog, MetricDef, MetricId, load_catalog
from .reporting import BenchmarkReport, MetricResult, emit_csv, emit_json, emit_txt
from .runner import RunConfig, compare_reports, run_benchmark
from .scoring import Direction, grade_of, metric_score, mig_deviation, overall_score
from .stats import Statistics, compute_stats, jains_index, percentile

__version__ = "1.0.0"

__all__ = [
    "Catalog",
    "MetricDef",
    "MetricId",
    "load_catalog",
    "BenchmarkReport",
    "MetricResult",
    "emit_csv",
    "emit_json",
    "emit_txt",
    "RunConfig",
    "compare_reports",
    "run_benchmark",
    "Direction",
    "grade_of",
    "metric_score",
    "mig_deviation",
    "overall_score",
    "Statistics",
    "compute_stats",
    "jains_index",
    "percentile",
    "__version__",
]
