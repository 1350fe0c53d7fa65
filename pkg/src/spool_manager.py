"""
Spool Manager for the shuffle.

Provides per-partition append-only spools, in memory or spilled to disk
through diskcache. Spilled spools of one run live in their own
``skc-spool-*`` directory under the spill directory, so concurrent runs and
leftovers of killed runs never share a deque.
"""

import shutil
import tempfile
import threading
from pathlib import Path
from typing import Any, Iterator, List, Optional

from diskcache import Deque

from .logger import get_logger

logger = get_logger(__name__)

RUN_DIR_PREFIX = "skc-spool-"


class MemorySpool:
    """List-backed spool; appends are serialized by a lock."""

    def __init__(self):
        self._items: List[Any] = []
        self._lock = threading.Lock()

    def append(self, item: Any) -> None:
        with self._lock:
            self._items.append(item)

    def __iter__(self) -> Iterator[Any]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def clear(self) -> None:
        self._items = []


class SpoolManager:
    """Owns one spool per partition."""

    def __init__(self, partitions: int, spill_dir: Optional[str] = None):
        """
        Initialize spools.

        Args:
            partitions: Number of partitions
            spill_dir: Directory for file-backed spools (None = in memory)
        """
        self.partitions = partitions
        self.spill_dir = Path(spill_dir) if spill_dir else None
        self.run_dir: Optional[Path] = None
        self.spools: List[Any] = []

        if self.spill_dir is not None:
            self.spill_dir.mkdir(parents=True, exist_ok=True)
            self.run_dir = Path(tempfile.mkdtemp(prefix=RUN_DIR_PREFIX, dir=str(self.spill_dir)))
            for pid in range(partitions):
                # diskcache.Deque appends are atomic across threads and processes
                self.spools.append(Deque(directory=str(self.run_dir / f"part-{pid}")))
            logger.debug(f"Spools spilled to {self.run_dir}")
        else:
            self.spools = [MemorySpool() for _ in range(partitions)]

    def append(self, partition: int, item: Any) -> None:
        self.spools[partition].append(item)

    def read(self, partition: int) -> Iterator[Any]:
        return iter(self.spools[partition])

    def size(self, partition: int) -> int:
        return len(self.spools[partition])

    def clear(self) -> bool:
        """
        Drop all spooled data and close the on-disk caches.

        Returns:
            True if successful, False otherwise
        """
        try:
            for spool in self.spools:
                spool.clear()
                if isinstance(spool, Deque):
                    spool.cache.close()
            if self.run_dir is not None:
                shutil.rmtree(self.run_dir, ignore_errors=True)
            logger.debug("Spools cleared")
            return True
        except Exception as e:
            logger.warning(f"Spool clear error: {e}")
            return False
