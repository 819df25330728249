"""Parameterized device + virtualization-layer model.

A Backend owns one virtual clock, one heap, one compute-quota token bucket,
and one seeded RNG. All latencies and rates come from the BackendModel, which
is loaded from the calibration file per system mode. Software-virtualized
modes (hami, fcsp) pay interception costs on every call path; native and mig
pay none.

A backend instance is single-owner: operations occur in one serial order so
virtual time is well defined. Multi-tenant effects are closed-form contention
models, not wall-clock threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from enum import Enum

import numpy as np

from ..calibration import MODES, CalibrationData
from ..errors import CalibrationError
from .bucket import TokenBucket
from .clock import VirtualClock
from .heap import SimHeap

SOFTWARE_MODES = ("hami", "fcsp")

# One compute token = 1 microsecond of full-device work.
FULL_RATE_TOKENS_PER_S = 1_000_000.0
BUCKET_BURST_S = 0.05


@dataclass(frozen=True)
class BackendModel:
    """Calibrated simulation parameters for one system mode."""

    mode: str
    # Base API latencies (microseconds).
    base_launch_us: float
    base_alloc_us: float
    base_free_us: float
    base_context_us: float
    # Interception path costs (nanoseconds); zero for native and mig.
    hook_ns: float
    quota_check_ns: float
    tracking_ns: float
    rate_check_ns: float
    # Shared-region lock model.
    lock_mean_us: float
    lock_jitter_us: float
    # Memory.
    mem_capacity_bytes: int
    mem_limit_bytes: int
    # Compute quota.
    sm_limit_percent: float
    # Bandwidth contention model.
    solo_bandwidth_gbps: float
    contention_alpha: float
    stream_gbps: float
    # L2 cache model.
    l2_hit_solo: float
    l2_eviction_per_tenant: float
    # PCIe model.
    pcie_h2d_gbps: float
    pcie_d2h_gbps: float
    pinned_speedup: float
    pcie_contention_alpha: float
    # Collective-communication model.
    nccl_allreduce_us: float
    nccl_gather_gbps: float
    p2p_gbps: float
    bcast_gbps: float
    # Scheduling model.
    ctx_switch_us: float
    preempt_ms: float
    stream_concurrency_pct: float
    # Monitoring model.
    poll_interval_ms: float
    poll_cost_us: float
    # Sampling noise (relative, uniform +-jitter_frac) applied per draw.
    jitter_frac: float
    # Workload-level efficiency relative to native.
    throughput_factor: float
    # Enforcement quality.
    sm_enforce_err: float
    limit_bias_frac: float
    limit_response_ms: float
    # Multi-tenant quality.
    compute_contention_alpha: float
    qos_cv: float
    fairness_skew: float
    bw_fairness_skew: float
    noisy_impact_pct: float
    # Inference workload model.
    attn_time_us: float
    pool_overhead_pct: float
    stream_penalty: float
    alloc_per_gb_us: float
    alloc_scan_step_us: float
    fp16_speedup: float
    batch_penalty: float
    gpu_scaling_penalty: float
    # Fault handling.
    err_detect_us: float
    err_recover_us: float
    fault_crashes: float = 0.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise CalibrationError(f"unknown mode {self.mode!r}")
        if self.mem_limit_bytes > self.mem_capacity_bytes:
            raise CalibrationError("mem_limit_bytes exceeds mem_capacity_bytes")
        if not 0 < self.sm_limit_percent <= 100:
            raise CalibrationError(f"sm_limit_percent out of (0, 100]: {self.sm_limit_percent}")
        if self.mode not in SOFTWARE_MODES:
            for name in ("hook_ns", "quota_check_ns", "tracking_ns", "rate_check_ns"):
                if getattr(self, name) != 0:
                    raise CalibrationError(f"{self.mode} mode must have {name} = 0")
        for f in fields(self):
            if f.name in ("mode", "rng_seed"):
                continue
            value = getattr(self, f.name)
            if not math.isfinite(value) or value < 0:
                raise CalibrationError(f"{self.mode}.{f.name} must be finite and >= 0, got {value}")

    @property
    def is_software(self) -> bool:
        return self.mode in SOFTWARE_MODES

    @classmethod
    def from_calibration(cls, mode: str, calibration: CalibrationData, *,
                         mem_limit_mb: int | None = None,
                         compute_limit_percent: float | None = None,
                         rng_seed: int = 0) -> "BackendModel":
        params = calibration.sim(mode)
        known = {f.name for f in fields(cls)} - {"mode", "rng_seed"}
        unknown = set(params) - known
        if unknown:
            raise CalibrationError(f"unknown sim parameters for {mode}: {sorted(unknown)}")
        missing = known - set(params) - {"fault_crashes"}
        if missing:
            raise CalibrationError(f"missing sim parameters for {mode}: {sorted(missing)}")
        kwargs: dict = dict(params)
        for int_field in ("mem_capacity_bytes", "mem_limit_bytes"):
            kwargs[int_field] = int(kwargs[int_field])
        if mem_limit_mb is not None:
            kwargs["mem_limit_bytes"] = int(mem_limit_mb) * 1024 * 1024
        if compute_limit_percent is not None:
            kwargs["sm_limit_percent"] = float(compute_limit_percent)
        return cls(mode=mode, rng_seed=rng_seed, **kwargs)

    def reseeded(self, seed: int) -> "BackendModel":
        return replace(self, rng_seed=seed)


class FaultKind(Enum):
    OOM_EXHAUSTION = "oom_exhaustion"
    KERNEL_ERROR = "kernel_error"


@dataclass(frozen=True)
class KernelOutcome:
    admitted_at_ns: int
    launch_overhead_us: float
    wait_us: float


@dataclass(frozen=True)
class AllocResult:
    status: str  # "ok" | "quota_denied" | "oom"
    handle: int | None
    latency_us: float

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class BulkAllocResult:
    handle: int | None
    latencies_us: np.ndarray
    total_us: float


@dataclass(frozen=True)
class FaultReport:
    detect_us: float
    recover_us: float
    no_crash: bool
    error_returned: bool
    recovered: bool


class Backend:
    """One simulated system under test, owning clock, heap, bucket, and RNG."""

    def __init__(self, model: BackendModel, *, heap_capacity: int | None = None) -> None:
        self.model = model
        self.clock = VirtualClock()
        self.rng = np.random.Generator(np.random.PCG64(model.rng_seed))
        self.heap = SimHeap(heap_capacity if heap_capacity is not None else model.mem_capacity_bytes)
        # Enforcement under-reports slightly on imperfect layers (limit_bias_frac).
        self.quota_limit_bytes = int(model.mem_limit_bytes * (1.0 - model.limit_bias_frac))
        rate = FULL_RATE_TOKENS_PER_S * (model.sm_limit_percent / 100.0) * (1.0 + model.sm_enforce_err)
        self.bucket = TokenBucket(rate, rate * BUCKET_BURST_S)
        self._pending_rate: tuple[int, float] | None = None

    # -- sampling helpers ---------------------------------------------------

    def _jitter(self) -> float:
        jf = self.model.jitter_frac
        if jf <= 0:
            return 1.0
        return 1.0 + self.rng.uniform(-jf, jf)

    def _jitter_vec(self, n: int) -> np.ndarray:
        jf = self.model.jitter_frac
        if jf <= 0:
            return np.ones(n)
        return 1.0 + self.rng.uniform(-jf, jf, size=n)

    def sample_value(self, base: float) -> float:
        """One jittered model-value draw (no clock semantics)."""
        return base * self._jitter()

    def sample_latency_us(self, base_us: float) -> float:
        """One jittered latency draw; advances virtual time."""
        lat = base_us * self._jitter()
        self.clock.advance_us(lat)
        return lat

    # -- compute path -------------------------------------------------------

    def _maybe_apply_pending_rate(self) -> None:
        if self._pending_rate is not None and self.clock.now_ns >= self._pending_rate[0]:
            self.bucket.refill(self.clock.now_ns)
            self.bucket.rate = self._pending_rate[1]
            self._pending_rate = None

    def set_sm_limit(self, percent: float) -> None:
        """Schedule a compute-limit change; it takes effect after the mode's
        configured detection/apply delay (limit_response_ms)."""
        rate = FULL_RATE_TOKENS_PER_S * (percent / 100.0) * (1.0 + self.model.sm_enforce_err)
        effective_at = self.clock.now_ns + int(round(self.model.limit_response_ms * 1e6))
        self._pending_rate = (effective_at, rate)

    def launch_path_us(self) -> float:
        m = self.model
        extra_ns = (m.hook_ns + m.rate_check_ns) if m.is_software else 0.0
        return m.base_launch_us + extra_ns / 1000.0

    def submit_kernel(self, work_tokens: float, tenants: int = 1) -> KernelOutcome:
        """Admit work through the quota bucket, then pay the launch path.

        Admission never rejects: if tokens are short the call waits in virtual
        time for the refill. Work larger than the bucket is metered out in
        bucket-sized chunks, so the long-run admitted rate never exceeds the
        configured one. The wait is how the compute limit manifests.
        """
        total_wait_ns = 0
        remaining = work_tokens
        while remaining > 0:
            self._maybe_apply_pending_rate()
            chunk = min(remaining, self.bucket.bucket_max)
            wait_ns = self.bucket.wait_time_ns(chunk, self.clock.now_ns)
            if wait_ns > 0:
                self.clock.advance_ns(wait_ns)
                total_wait_ns += wait_ns
                self._maybe_apply_pending_rate()
            self.bucket.try_take(chunk, self.clock.now_ns)
            remaining -= chunk
        admitted_at = self.clock.now_ns
        overhead = self.launch_path_us() * self._jitter() + self.sample_lock_wait(tenants)
        self.clock.advance_us(overhead)
        return KernelOutcome(admitted_at_ns=admitted_at,
                             launch_overhead_us=overhead + total_wait_ns / 1000.0,
                             wait_us=total_wait_ns / 1000.0)

    def workload_throughput(self, ops: int = 10_000, unit_cost_us: float = 100.0) -> float:
        """Fixed synthetic workload rate in ops/s; scales with the mode's
        end-to-end throughput factor."""
        elapsed_us = ops * unit_cost_us / self.model.throughput_factor
        self.clock.advance_us(elapsed_us)
        return ops / (elapsed_us * 1e-6)

    # -- memory path --------------------------------------------------------

    def _alloc_path_us(self, nbytes: int, tenants: int) -> float:
        m = self.model
        extra_ns = (m.quota_check_ns + m.tracking_ns) if m.is_software else 0.0
        size_us = m.alloc_per_gb_us * (nbytes / (1024 ** 3))
        return m.base_alloc_us + extra_ns / 1000.0 + size_us + self.sample_lock_wait(tenants)

    def sim_alloc(self, nbytes: int, tenants: int = 1) -> AllocResult:
        """Quota check first (denial is cheap for software modes), then first-fit."""
        m = self.model
        if self.heap.used_bytes + nbytes > self.quota_limit_bytes:
            if m.is_software:
                denial = m.quota_check_ns / 1000.0 + self.sample_lock_wait(tenants)
            else:
                denial = m.base_alloc_us * self._jitter()
            self.clock.advance_us(denial)
            return AllocResult("quota_denied", None, denial)
        handle, examined = self.heap.alloc(nbytes)
        lat = (self._alloc_path_us(nbytes, tenants) + examined * m.alloc_scan_step_us) * self._jitter()
        self.clock.advance_us(lat)
        if handle is None:
            return AllocResult("oom", None, lat)
        return AllocResult("ok", handle, lat)

    def sim_free(self, handle: int, tenants: int = 1) -> float:
        m = self.model
        extra_ns = m.tracking_ns if m.is_software else 0.0
        self.heap.free(handle)
        lat = (m.base_free_us + extra_ns / 1000.0 + self.sample_lock_wait(tenants)) * self._jitter()
        self.clock.advance_us(lat)
        return lat

    def alloc_run(self, count: int, nbytes_each: int, tenants: int = 1) -> BulkAllocResult:
        """Back-to-back allocation burst, vectorized.

        The blocks are contiguous and released together, so the heap records
        them as one segment; per-call latencies are still drawn individually.
        """
        m = self.model
        total_bytes = count * nbytes_each
        if self.heap.used_bytes + total_bytes > self.quota_limit_bytes:
            denial = (m.quota_check_ns / 1000.0 if m.is_software else m.base_alloc_us) + self.sample_lock_wait(tenants)
            self.clock.advance_us(denial)
            return BulkAllocResult(None, np.empty(0), denial)
        handle, examined = self.heap.alloc(total_bytes)
        base = self._alloc_path_us(nbytes_each, tenants) + examined * m.alloc_scan_step_us
        lats = base * self._jitter_vec(count)
        total = float(lats.sum())
        self.clock.advance_us(total)
        if handle is None:
            return BulkAllocResult(None, lats, total)
        return BulkAllocResult(handle, lats, total)

    # -- interception path probes --------------------------------------------

    def intercept_probe_ns(self) -> float:
        """Cost of one intercepted no-op call; zero where nothing intercepts."""
        if self.model.hook_ns <= 0:
            return 0.0
        cost = self.model.hook_ns * self._jitter()
        self.clock.advance_ns(int(round(cost)))
        return cost

    def accounting_probe_ns(self) -> float:
        """Per-allocation tracking cost on the accounting structures."""
        if self.model.tracking_ns <= 0:
            return 0.0
        cost = self.model.tracking_ns * self._jitter()
        self.clock.advance_ns(int(round(cost)))
        return cost

    def rate_check_probe_ns(self) -> float:
        """One admission check against the token bucket state."""
        if self.model.rate_check_ns <= 0:
            return 0.0
        cost = self.model.rate_check_ns * self._jitter()
        self.clock.advance_ns(int(round(cost)))
        return cost

    # -- contention models --------------------------------------------------

    def sample_lock_wait(self, concurrent_tenants: int) -> float:
        """Shared accounting-region wait; zero for native/mig and for one tenant."""
        m = self.model
        if not m.is_software or concurrent_tenants <= 1:
            return 0.0
        spread = self.rng.uniform(-m.lock_jitter_us, m.lock_jitter_us) if m.lock_jitter_us > 0 else 0.0
        return max(0.0, (concurrent_tenants - 1) * (m.lock_mean_us + spread))

    def effective_bandwidth(self, tenants: int) -> float:
        """Per-tenant achieved bandwidth (GB/s) under the contention model."""
        if tenants < 1:
            raise ValueError(f"tenants must be >= 1, got {tenants}")
        m = self.model
        return m.solo_bandwidth_gbps / (1.0 + m.contention_alpha * (tenants - 1))

    def stream_aggregate_bandwidth(self, streams: int) -> float:
        """Aggregate bandwidth achieved by N concurrent copy streams."""
        m = self.model
        return min(m.solo_bandwidth_gbps, streams * m.stream_gbps)

    def cache_hit_rate(self, tenants: int, working_set_overlap: float) -> float:
        if tenants < 1:
            raise ValueError(f"tenants must be >= 1, got {tenants}")
        if not 0.0 <= working_set_overlap <= 1.0:
            raise ValueError(f"overlap must be in [0, 1], got {working_set_overlap}")
        m = self.model
        return max(0.0, m.l2_hit_solo - m.l2_eviction_per_tenant * (tenants - 1) * working_set_overlap)

    def pcie_contended_fraction(self, tenants: int) -> float:
        """Fraction of solo PCIe bandwidth retained at the given tenancy."""
        m = self.model
        return 1.0 / (1.0 + m.pcie_contention_alpha * (tenants - 1))

    def nvml_poll_overhead_percent(self) -> float:
        m = self.model
        if m.poll_cost_us <= 0:
            return 0.0
        return m.poll_cost_us / (m.poll_interval_ms * 1000.0) * 100.0

    # -- faults ---------------------------------------------------------------

    def inject_fault(self, kind: FaultKind) -> FaultReport:
        m = self.model
        detect = m.err_detect_us * self._jitter()
        recover = m.err_recover_us * self._jitter()
        self.clock.advance_us(detect + recover)
        if m.fault_crashes:
            return FaultReport(detect, recover, False, False, False)
        return FaultReport(detect, recover, True, True, True)
