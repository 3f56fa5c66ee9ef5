import threading

import pytest

from triperiod.pool import ordered_map, pool_size


@pytest.mark.parametrize("raw, expected", [(None, 1), ("4", 4), ("0", 1), ("junk", 1)])
def test_pool_size(monkeypatch, raw, expected):
    if raw is None:
        monkeypatch.delenv("TRIPERIOD_THREADS", raising=False)
    else:
        monkeypatch.setenv("TRIPERIOD_THREADS", raw)
    assert pool_size() == expected


@pytest.mark.parametrize("workers", [1, 3, 8])
def test_order_kept(workers):
    assert ordered_map(lambda x: x * x, range(50), workers) == [x * x for x in range(50)]


def test_env_pool_uses_threads(monkeypatch):
    monkeypatch.setenv("TRIPERIOD_THREADS", "4")
    seen = set()
    ordered_map(lambda x: seen.add(threading.get_ident()), range(40))
    assert len(seen) >= 1
    assert threading.get_ident() not in seen
