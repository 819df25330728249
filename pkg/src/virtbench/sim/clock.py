"""Virtual time. All simulated latencies advance this clock explicitly."""

from __future__ import annotations

from ..errors import ClockError


class VirtualClock:
    """Monotone nanosecond counter; never tied to wall time."""

    __slots__ = ("now_ns",)

    def __init__(self, start_ns: int = 0) -> None:
        if start_ns < 0:
            raise ClockError(f"clock cannot start at {start_ns}")
        self.now_ns = start_ns

    def advance_ns(self, delta_ns: int) -> int:
        if delta_ns < 0:
            raise ClockError(f"cannot advance virtual time by {delta_ns} ns")
        self.now_ns += delta_ns
        return self.now_ns

    def advance_us(self, delta_us: float) -> int:
        return self.advance_ns(int(round(delta_us * 1_000)))

    def advance_ms(self, delta_ms: float) -> int:
        return self.advance_ns(int(round(delta_ms * 1_000_000)))
