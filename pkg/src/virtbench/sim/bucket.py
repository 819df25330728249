"""Token bucket used to enforce compute quotas in virtual time."""

from __future__ import annotations

from ..errors import ClockError


class TokenBucket:
    """Tokens accrue at ``rate`` per virtual second up to ``bucket_max``.

    Refill follows tokens = min(bucket_max, tokens + rate * dt); dt is derived
    from the caller-supplied virtual timestamps, so the bucket itself holds no
    clock.
    """

    __slots__ = ("tokens", "bucket_max", "rate", "last_refill_ns")

    def __init__(self, rate: float, bucket_max: float, *, start_full: bool = True, now_ns: int = 0) -> None:
        if rate <= 0:
            raise ValueError(f"rate must be positive, got {rate}")
        if bucket_max <= 0:
            raise ValueError(f"bucket_max must be positive, got {bucket_max}")
        self.rate = rate
        self.bucket_max = bucket_max
        self.tokens = bucket_max if start_full else 0.0
        self.last_refill_ns = now_ns

    def refill(self, now_ns: int) -> float:
        """Advance the bucket to ``now_ns`` and return the available tokens."""
        if now_ns < self.last_refill_ns:
            raise ClockError(f"refill time {now_ns} precedes last refill {self.last_refill_ns}")
        dt_s = (now_ns - self.last_refill_ns) / 1e9
        self.tokens = min(self.bucket_max, self.tokens + self.rate * dt_s)
        self.last_refill_ns = now_ns
        return self.tokens

    def try_take(self, amount: float, now_ns: int) -> bool:
        self.refill(now_ns)
        if self.tokens + 1e-12 >= amount:
            self.tokens = max(0.0, self.tokens - amount)
            return True
        return False

    def wait_time_ns(self, amount: float, now_ns: int) -> int:
        """Virtual wait until ``amount`` tokens would be available (0 if ready)."""
        self.refill(now_ns)
        deficit = amount - self.tokens
        if deficit <= 0:
            return 0
        return int(round(deficit / self.rate * 1e9 + 0.5))
