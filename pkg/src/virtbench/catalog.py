"""Registry of the 56 benchmark metrics and the category weight table.

The catalog structure (ids, names, units, directions) is fixed; the
per-metric baseline values and category weights are data, loaded from the
shipped calibration file and optionally overridden by a user file.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from .calibration import CATEGORY_SLUGS, CalibrationData, load_calibration
from .errors import CatalogError, MetricNotFoundError
from .scoring import Direction, validate_weights


@dataclass(frozen=True)
class Category:
    tag: str       # id prefix, e.g. "OH"
    slug: str      # weights/calibration key, e.g. "overhead"
    display: str   # report label, e.g. "Overhead"


CATEGORIES: tuple[Category, ...] = (
    Category("OH", "overhead", "Overhead"),
    Category("IS", "isolation", "Isolation"),
    Category("LLM", "llm", "LLM"),
    Category("BW", "bandwidth", "Memory Bandwidth"),
    Category("CACHE", "cache", "Cache"),
    Category("PCIE", "pcie", "PCIe"),
    Category("NCCL", "nccl", "NCCL/P2P"),
    Category("SCHED", "scheduling", "Scheduling"),
    Category("FRAG", "fragmentation", "Fragmentation"),
    Category("ERR", "error_recovery", "Error Recovery"),
)

_CATEGORY_BY_TAG = {c.tag: c for c in CATEGORIES}
_CATEGORY_BY_SLUG = {c.slug: c for c in CATEGORIES}

assert tuple(c.slug for c in CATEGORIES) == CATEGORY_SLUGS

DEFAULT_WEIGHTS: dict[str, float] = {
    "overhead": 0.15,
    "isolation": 0.20,
    "llm": 0.20,
    "bandwidth": 0.10,
    "cache": 0.08,
    "pcie": 0.07,
    "nccl": 0.05,
    "scheduling": 0.07,
    "fragmentation": 0.04,
    "error_recovery": 0.04,
}

UNITS = frozenset({
    "microseconds", "nanoseconds", "milliseconds", "percent", "ratio_0_1",
    "ratio", "GBps", "TFLOPS", "count", "boolean", "allocs_per_s", "CV",
    "variance", "factor",
})

_LOW = Direction.LOWER_BETTER
_HIGH = Direction.HIGHER_BETTER
_BOOL = Direction.BOOLEAN_TRUE

# id, name, description, unit, direction
_METRIC_ROWS: tuple[tuple[str, str, str, str, Direction], ...] = (
    ("OH-001", "Kernel Launch Latency", "Time from kernel launch call to execution start", "microseconds", _LOW),
    ("OH-002", "Memory Allocation Latency", "Device memory allocation completion time", "microseconds", _LOW),
    ("OH-003", "Memory Free Latency", "Device memory release completion time", "microseconds", _LOW),
    ("OH-004", "Context Creation Overhead", "Additional context creation time", "microseconds", _LOW),
    ("OH-005", "API Interception Overhead", "Per-call cost of the interception hook path", "nanoseconds", _LOW),
    ("OH-006", "Shared Region Lock Contention", "Wait time on the shared accounting region lock", "microseconds", _LOW),
    ("OH-007", "Memory Tracking Overhead", "Per-allocation accounting cost", "nanoseconds", _LOW),
    ("OH-008", "Rate Limiter Overhead", "Token bucket admission check latency", "nanoseconds", _LOW),
    ("OH-009", "NVML Polling Overhead", "CPU share consumed by utilization monitoring", "percent", _LOW),
    ("OH-010", "Total Throughput Degradation", "End-to-end throughput loss versus the unvirtualized baseline", "percent", _LOW),
    ("IS-001", "Memory Limit Accuracy", "Observed allocatable memory versus the configured limit", "percent", _HIGH),
    ("IS-002", "Memory Limit Enforcement", "Latency from over-quota request to denial", "microseconds", _LOW),
    ("IS-003", "SM Utilization Accuracy", "Achieved compute utilization versus the configured limit", "percent", _HIGH),
    ("IS-004", "SM Limit Response Time", "Latency to converge after a compute-limit change", "milliseconds", _LOW),
    ("IS-005", "Cross-Tenant Memory Isolation", "No memory visibility between tenants", "boolean", _BOOL),
    ("IS-006", "Cross-Tenant Compute Isolation", "Per-tenant performance retained under co-tenancy", "ratio_0_1", _HIGH),
    ("IS-007", "QoS Consistency", "Performance variation under contention", "CV", _LOW),
    ("IS-008", "Fairness Index", "Jain's fairness of tenant throughputs", "ratio_0_1", _HIGH),
    ("IS-009", "Noisy Neighbor Impact", "Degradation caused by one saturating co-tenant", "percent", _LOW),
    ("IS-010", "Fault Isolation", "Faults in one tenant leave others unaffected", "boolean", _BOOL),
    ("LLM-001", "Attention Kernel Throughput", "Attention-shaped compute throughput proxy", "TFLOPS", _HIGH),
    ("LLM-002", "KV Cache Allocation Speed", "Sustained rate of growing cache allocations", "allocs_per_s", _HIGH),
    ("LLM-003", "Batch Size Scaling", "Throughput retention as batch size grows", "ratio", _HIGH),
    ("LLM-004", "Token Generation Latency", "Time to first token; inter-token latency in detail", "milliseconds", _LOW),
    ("LLM-005", "Memory Pool Efficiency", "Pool allocation overhead versus direct allocation", "percent", _LOW),
    ("LLM-006", "Multi-Stream Performance", "Concurrent stream pipeline efficiency", "percent", _HIGH),
    ("LLM-007", "Large Tensor Allocation", "Latency of a >1 GB allocation on a fragmented heap", "milliseconds", _LOW),
    ("LLM-008", "Mixed Precision Support", "Half-precision versus single-precision throughput", "ratio", _HIGH),
    ("LLM-009", "Dynamic Batching Impact", "Latency variance across a varying batch schedule", "variance", _LOW),
    ("LLM-010", "Multi-GPU Scaling", "Tensor-parallel scaling efficiency", "factor", _HIGH),
    ("BW-001", "Memory Bandwidth Isolation", "Per-tenant bandwidth retained under contention", "percent", _HIGH),
    ("BW-002", "Bandwidth Fairness Index", "Jain's fairness of tenant bandwidth shares", "ratio_0_1", _HIGH),
    ("BW-003", "Memory Bus Saturation Point", "Concurrent streams needed to approach peak bandwidth", "count", _LOW),
    ("BW-004", "Bandwidth Interference Impact", "Bandwidth drop caused by a competing workload", "percent", _LOW),
    ("CACHE-001", "L2 Cache Hit Rate", "Cache hit rate under multi-tenant load", "percent", _HIGH),
    ("CACHE-002", "Cache Eviction Rate", "Evictions caused by co-tenant traffic", "percent", _LOW),
    ("CACHE-003", "Working Set Collision Impact", "Performance drop from overlapping working sets", "percent", _LOW),
    ("CACHE-004", "Cache Contention Overhead", "Extra latency attributable to cache contention", "percent", _LOW),
    ("PCIE-001", "Host-to-Device Bandwidth", "Host-to-device transfer rate", "GBps", _HIGH),
    ("PCIE-002", "Device-to-Host Bandwidth", "Device-to-host transfer rate", "GBps", _HIGH),
    ("PCIE-003", "PCIe Contention Impact", "Transfer bandwidth drop under multi-tenant traffic", "percent", _LOW),
    ("PCIE-004", "Pinned Memory Performance", "Pinned versus pageable transfer ratio", "ratio", _HIGH),
    ("NCCL-001", "AllReduce Latency", "Collective allreduce completion time", "microseconds", _LOW),
    ("NCCL-002", "AllGather Bandwidth", "Achieved allgather bandwidth", "GBps", _HIGH),
    ("NCCL-003", "P2P GPU Bandwidth", "Direct device-to-device transfer rate", "GBps", _HIGH),
    ("NCCL-004", "Broadcast Bandwidth", "Broadcast collective bandwidth", "GBps", _HIGH),
    ("SCHED-001", "Context Switch Latency", "Time to switch between contexts", "microseconds", _LOW),
    ("SCHED-002", "Kernel Launch Overhead", "Minimal kernel end-to-end launch time", "microseconds", _LOW),
    ("SCHED-003", "Stream Concurrency Efficiency", "Efficiency of concurrent stream execution", "percent", _HIGH),
    ("SCHED-004", "Preemption Latency", "Delay before higher-priority work preempts", "milliseconds", _LOW),
    ("FRAG-001", "Fragmentation Index", "Free-memory fragmentation after churn", "percent", _LOW),
    ("FRAG-002", "Allocation Latency Degradation", "Late-versus-early allocation latency ratio under churn", "ratio", _LOW),
    ("FRAG-003", "Memory Compaction Efficiency", "Contiguous memory recovered by compaction", "percent", _HIGH),
    ("ERR-001", "Error Detection Latency", "Time to detect and report a device error", "microseconds", _LOW),
    ("ERR-002", "Error Recovery Time", "Time to restore a usable device state after an error", "microseconds", _LOW),
    ("ERR-003", "Graceful Degradation Score", "Composite resource-exhaustion handling score", "percent", _HIGH),
)

METRIC_IDS: tuple[str, ...] = tuple(row[0] for row in _METRIC_ROWS)
VALID_METRIC_IDS: frozenset[str] = frozenset(METRIC_IDS)

EXPECTED_CATEGORY_COUNTS = {
    "OH": 10, "IS": 10, "LLM": 10, "BW": 4, "CACHE": 4,
    "PCIE": 4, "NCCL": 4, "SCHED": 4, "FRAG": 3, "ERR": 3,
}


@dataclass(frozen=True)
class MetricId:
    category_tag: str
    ordinal: int

    @classmethod
    def parse(cls, text: str) -> "MetricId":
        tag, _, num = text.partition("-")
        if tag not in _CATEGORY_BY_TAG or not num.isdigit():
            raise MetricNotFoundError(f"malformed metric id {text!r}")
        return cls(tag, int(num))

    def __str__(self) -> str:
        return f"{self.category_tag}-{self.ordinal:03d}"


@dataclass(frozen=True)
class MetricDef:
    id: str
    name: str
    description: str
    unit: str
    direction: Direction
    mig_expected: float

    @property
    def category(self) -> Category:
        return _CATEGORY_BY_TAG[self.id.split("-", 1)[0]]


class Catalog:
    """Immutable after construction; safe for shared concurrent reads."""

    def __init__(self, defs: list[MetricDef], weights: dict[str, float], calibration: CalibrationData):
        self._defs = tuple(defs)
        self._by_id = {d.id: d for d in defs}
        self.weights = dict(weights)
        self.calibration = calibration
        self._validate()

    def _validate(self) -> None:
        if len(self._defs) != 56 or len(self._by_id) != 56:
            raise CatalogError(f"catalog must hold exactly 56 unique metrics, got {len(self._defs)}")
        counts: dict[str, int] = {}
        for d in self._defs:
            counts[d.category.tag] = counts.get(d.category.tag, 0) + 1
            if d.unit not in UNITS:
                raise CatalogError(f"{d.id}: unknown unit {d.unit!r}")
            if not (d.mig_expected == d.mig_expected and abs(d.mig_expected) != float("inf")):
                raise CatalogError(f"{d.id}: baseline must be finite")
        if counts != EXPECTED_CATEGORY_COUNTS:
            raise CatalogError(f"per-category counts wrong: {counts}")
        validate_weights(self.weights)

    @property
    def defs(self) -> tuple[MetricDef, ...]:
        return self._defs

    def lookup(self, metric_id: str) -> MetricDef:
        try:
            return self._by_id[metric_id]
        except KeyError:
            raise MetricNotFoundError(f"unknown metric id {metric_id!r}") from None

    def category_of(self, metric_id: str) -> Category:
        return self.lookup(metric_id).category

    def ordered_ids(self) -> tuple[str, ...]:
        return METRIC_IDS


def category_by_slug(slug: str) -> Category:
    return _CATEGORY_BY_SLUG[slug]


def load_catalog(baseline_file: str | Path | None = None) -> Catalog:
    """Build the 56-metric catalog from shipped defaults plus optional overrides."""
    calibration = load_calibration(baseline_file, valid_ids=VALID_METRIC_IDS)
    missing = VALID_METRIC_IDS - set(calibration.baselines)
    if missing:
        raise CatalogError(f"calibration provides no baseline for: {sorted(missing)}")
    defs = [
        MetricDef(id=mid, name=name, description=desc, unit=unit, direction=direction,
                  mig_expected=calibration.baselines[mid])
        for mid, name, desc, unit, direction in _METRIC_ROWS
    ]
    weights = dict(DEFAULT_WEIGHTS)
    weights.update(calibration.weights)
    return Catalog(defs, weights, calibration)


def with_baseline(catalog: Catalog, metric_id: str, value: float) -> MetricDef:
    """Convenience for tests: a def equal to the cataloged one with a new baseline."""
    return replace(catalog.lookup(metric_id), mig_expected=value)
