import pytest
from hypothesis import given, strategies as st

from raf import parallel


def _square_range(lo, hi, k):
    return [k * i * i for i in range(lo, hi)]


@given(st.integers(0, 500), st.integers(1, 40))
def test_chunks_partition(n, chunks):
    r = parallel.chunk_ranges(n, chunks)
    flat = [i for lo, hi in r for i in range(lo, hi)]
    assert flat == list(range(n))
    assert all(lo < hi for lo, hi in r)


@pytest.mark.parametrize("workers", [1, 2, 3])
def test_map_ranges_order(workers):
    out = parallel.map_ranges(_square_range, 50, workers, (2,))
    assert [x for part in out for x in part] == [2 * i * i for i in range(50)]


def test_env_workers(monkeypatch):
    monkeypatch.setenv("RAF_WORKERS", "3")
    assert parallel.default_workers() == 3
    monkeypatch.delenv("RAF_WORKERS")
    assert parallel.default_workers() >= 1
