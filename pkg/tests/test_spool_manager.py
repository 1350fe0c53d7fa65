"""
Tests for spool manager.
"""

import threading

from diskcache import Deque

from src.spool_manager import RUN_DIR_PREFIX, MemorySpool, SpoolManager


class TestMemorySpool:
    """Tests for the in-memory spool."""

    def test_append_and_iterate(self):
        spool = MemorySpool()
        spool.append("a")
        spool.append("b")
        assert list(spool) == ["a", "b"]
        assert len(spool) == 2

    def test_concurrent_appends(self):
        """No append is lost across threads."""
        spool = MemorySpool()

        def fill(base):
            for i in range(500):
                spool.append(base + i)

        threads = [threading.Thread(target=fill, args=(n * 1000,)) for n in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(spool) == 2000
        assert len(set(spool)) == 2000


class TestSpoolManager:
    """Tests for SpoolManager class."""

    def test_memory_spools(self):
        """Test in-memory initialization."""
        spools = SpoolManager(3)
        assert spools.spill_dir is None
        assert len(spools.spools) == 3
        assert all(isinstance(s, MemorySpool) for s in spools.spools)

    def test_append_read_size(self):
        spools = SpoolManager(2)
        spools.append(0, "x")
        spools.append(1, "y")
        spools.append(1, "z")
        assert list(spools.read(1)) == ["y", "z"]
        assert spools.size(0) == 1

    def test_spilled_spools(self, tmp_path):
        """Disk-backed spools live under a per-run directory and hold picklable items."""
        spools = SpoolManager(2, str(tmp_path / "spill"))
        spools.append(0, ("ACGT", 3))
        spools.append(1, ("TTTT", 1))
        assert spools.run_dir.parent == tmp_path / "spill"
        assert spools.run_dir.name.startswith(RUN_DIR_PREFIX)
        assert (spools.run_dir / "part-0").is_dir()
        assert list(spools.read(0)) == [("ACGT", 3)]
        assert spools.size(1) == 1

    def test_clear_removes_spill(self, tmp_path):
        """Test clearing all spools."""
        spools = SpoolManager(2, str(tmp_path / "spill"))
        spools.append(0, "x")

        run_dir = spools.run_dir
        assert spools.clear() is True
        assert not run_dir.exists()
        assert (tmp_path / "spill").is_dir()

    def test_clear_memory(self):
        spools = SpoolManager(1)
        spools.append(0, "x")
        assert spools.clear() is True
        assert spools.size(0) == 0

    def test_runs_do_not_share_spools(self, tmp_path):
        """Two managers on one spill directory keep separate data."""
        spill = str(tmp_path / "spill")
        first = SpoolManager(1, spill)
        second = SpoolManager(1, spill)
        first.append(0, "a")
        second.append(0, "b")
        assert list(first.read(0)) == ["a"]
        assert list(second.read(0)) == ["b"]
        assert first.run_dir != second.run_dir

        assert first.clear() is True
        assert list(second.read(0)) == ["b"]
        second.clear()

    def test_leftover_deque_ignored(self, tmp_path):
        """Data left under the spill directory by an earlier run is not read."""
        spill = tmp_path / "spill"
        stale = Deque(directory=str(spill / "part-0"))
        stale.append("stale")
        stale.cache.close()

        spools = SpoolManager(1, str(spill))
        spools.append(0, "fresh")
        assert list(spools.read(0)) == ["fresh"]
        spools.clear()

    def test_clear_closes_caches(self, tmp_path, mocker):
        """Every on-disk cache is closed before its directory goes."""
        spools = SpoolManager(2, str(tmp_path / "spill"))
        spools.append(1, "x")
        spies = [mocker.spy(spool.cache, "close") for spool in spools.spools]
        assert spools.clear() is True
        assert all(spy.call_count == 1 for spy in spies)
