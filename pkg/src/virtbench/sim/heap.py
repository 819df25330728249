"""First-fit free-list device-memory model.

Free blocks are kept disjoint, sorted by offset, and coalesced eagerly, so
fragmentation develops exactly the way repeated alloc/free churn produces it.
"""

from __future__ import annotations

from ..errors import DegenerateInputError, InvalidFreeError


class SimHeap:
    """Byte-granular arena with first-fit placement and eager coalescing."""

    __slots__ = ("capacity_bytes", "free_list", "allocations", "used_bytes", "_next_handle")

    def __init__(self, capacity_bytes: int) -> None:
        if capacity_bytes <= 0:
            raise ValueError(f"capacity must be positive, got {capacity_bytes}")
        self.capacity_bytes = capacity_bytes
        self.free_list: list[tuple[int, int]] = [(0, capacity_bytes)]
        self.allocations: dict[int, tuple[int, int]] = {}
        self.used_bytes = 0
        self._next_handle = 1

    def alloc(self, nbytes: int) -> tuple[int | None, int]:
        """First-fit allocate; returns (handle or None, free blocks examined)."""
        if nbytes <= 0:
            raise ValueError(f"allocation size must be positive, got {nbytes}")
        for i, (offset, length) in enumerate(self.free_list):
            if length >= nbytes:
                if length == nbytes:
                    del self.free_list[i]
                else:
                    self.free_list[i] = (offset + nbytes, length - nbytes)
                handle = self._next_handle
                self._next_handle += 1
                self.allocations[handle] = (offset, nbytes)
                self.used_bytes += nbytes
                return handle, i + 1
        return None, len(self.free_list)

    def free(self, handle: int) -> int:
        """Return a block to the free list, merging with adjacent free blocks."""
        try:
            offset, length = self.allocations.pop(handle)
        except KeyError:
            raise InvalidFreeError(f"unknown or already-freed handle {handle}") from None
        self.used_bytes -= length
        # Insertion point by offset; neighbors may coalesce.
        lo, hi = 0, len(self.free_list)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.free_list[mid][0] < offset:
                lo = mid + 1
            else:
                hi = mid
        start, end = offset, offset + length
        if lo > 0:
            p_off, p_len = self.free_list[lo - 1]
            if p_off + p_len == start:
                start = p_off
                lo -= 1
                del self.free_list[lo]
        if lo < len(self.free_list):
            n_off, n_len = self.free_list[lo]
            if n_off == end:
                end = n_off + n_len
                del self.free_list[lo]
        self.free_list.insert(lo, (start, end - start))
        return length

    def total_free(self) -> int:
        return self.capacity_bytes - self.used_bytes

    def largest_free(self) -> int:
        return max((length for _, length in self.free_list), default=0)

    def fragmentation_index(self) -> float:
        """1 - largest_free/total_free; 0.0 means one contiguous free region."""
        total = self.total_free()
        if total <= 0:
            raise DegenerateInputError("fragmentation undefined with zero free memory")
        return 1.0 - self.largest_free() / total

    def live_handles(self) -> list[int]:
        return list(self.allocations)

    def check_invariants(self) -> None:
        """Full-scan structural check; raises AssertionError on corruption."""
        prev_end = -1
        free_total = 0
        for offset, length in self.free_list:
            assert length > 0, "empty free block"
            assert offset > prev_end, "free blocks unsorted or adjacent (uncoalesced)"
            assert offset + length <= self.capacity_bytes, "free block out of bounds"
            prev_end = offset + length
            free_total += length
        alloc_total = sum(length for _, length in self.allocations.values())
        assert alloc_total == self.used_bytes, "used_bytes out of sync"
        assert free_total + self.used_bytes == self.capacity_bytes, "conservation violated"
        spans = sorted(
            [(o, l, False) for o, l in self.free_list]
            + [(o, l, True) for o, l in self.allocations.values()]
        )
        cursor = 0
        for offset, length, _ in spans:
            assert offset >= cursor, "overlapping blocks"
            cursor = offset + length
