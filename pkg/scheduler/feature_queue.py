"""Fixed-length history of per-frame feature snapshots.

The queue holds the current snapshot plus the four previous ones by default; pushing onto
a full queue evicts the oldest entry.
"""

from collections import deque
from typing import Optional

from core.frames import FeatureSnapshot

DEFAULT_QUEUE_CAPACITY = 5


class FeatureQueue:
    """Ring buffer of FeatureSnapshot, newest last."""

    def __init__(self, capacity: int = DEFAULT_QUEUE_CAPACITY) -> None:
        if capacity < 1:
            raise ValueError(f"queue capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._entries: deque[FeatureSnapshot] = deque(maxlen=capacity)

    def push(self, snapshot: FeatureSnapshot) -> None:
        """Append the newest snapshot; frame indices must strictly increase."""
        if self._entries and snapshot.frame_index <= self._entries[-1].frame_index:
            raise ValueError(
                f"frame {snapshot.frame_index} pushed after frame {self._entries[-1].frame_index}"
            )
        self._entries.append(snapshot)

    @property
    def current(self) -> FeatureSnapshot:
        if not self._entries:
            raise IndexError("feature queue is empty")
        return self._entries[-1]

    @property
    def entries(self) -> tuple[FeatureSnapshot, ...]:
        """Snapshots oldest first."""
        return tuple(self._entries)

    def previous(self) -> Optional[FeatureSnapshot]:
        """Most recent snapshot before the current one."""
        if len(self._entries) < 2:
            return None
        return self._entries[-2]

    def nearest(self, frame_index: int, oldest_allowed: int) -> Optional[FeatureSnapshot]:
        """Previous snapshot whose frame index is nearest to frame_index.

        Only snapshots older than the current one and not older than oldest_allowed are
        candidates. Ties go to the older snapshot.
        """
        best: Optional[FeatureSnapshot] = None
        for snapshot in list(self._entries)[:-1]:
            if snapshot.frame_index < oldest_allowed:
                continue
            # Entries are oldest first, so strict < keeps the older one on ties
            if best is None or abs(snapshot.frame_index - frame_index) < abs(best.frame_index - frame_index):
                best = snapshot
        return best

    def __len__(self) -> int:
        return len(self._entries)
