"""Deterministic virtual-time simulation of a device and its virtualization layer."""

from .backend import (
    Backend,
    BackendModel,
    AllocResult,
    BulkAllocResult,
    FaultKind,
    FaultReport,
    KernelOutcome,
    FULL_RATE_TOKENS_PER_S,
)
from .bucket import TokenBucket
from .clock import VirtualClock
from .heap import SimHeap

__all__ = [
    "Backend",
    "BackendModel",
    "AllocResult",
    "BulkAllocResult",
    "FaultKind",
    "FaultReport",
    "KernelOutcome",
    "FULL_RATE_TOKENS_PER_S",
    "TokenBucket",
    "VirtualClock",
    "SimHeap",
]
