"""
Tests for the CacheManager module.

This module contains tests for verifying the functionality of:
- Cache storage and retrieval
- Cache expiration
- Memoized computation with hit/miss counters
- Key construction
"""

import threading
import time

import numpy as np
import pytest

from core.cache import CacheManager, make_key


@pytest.fixture
def cache_manager():
    """Create a CacheManager instance for testing."""
    return CacheManager()


@pytest.fixture
def sample_data():
    """Create sample data for testing."""
    return {
        'eigenvalues': [0.5, 1.5, 2.5],
        'grid': {'a': -1.0, 'b': 1.0, 'n_points': 100}
    }


def test_cache_set_get(cache_manager, sample_data):
    """Test basic cache set and get operations."""
    cache_manager.set('test_key', sample_data)
    assert cache_manager.get('test_key') == sample_data
    assert len(cache_manager) == 1


def test_cache_expiration(cache_manager, sample_data):
    """Test cache expiration."""
    cache_manager.set('test_key', sample_data, ttl=0.2)
    assert cache_manager.exists('test_key')

    time.sleep(0.3)
    assert not cache_manager.exists('test_key')
    assert cache_manager.get('test_key') is None


def test_default_ttl(sample_data):
    """Test that entries without a ttl use the manager default."""
    cache = CacheManager(default_ttl=0.2)
    cache.set('key', sample_data)
    assert cache.exists('key')
    time.sleep(0.3)
    assert cache.get('key') is None


def test_cache_clear(cache_manager, sample_data):
    """Test clearing the entire cache."""
    cache_manager.set('key1', sample_data)
    cache_manager.set('key2', sample_data)

    cache_manager.clear()

    assert cache_manager.get('key1') is None
    assert cache_manager.get('key2') is None
    assert len(cache_manager) == 0


def test_cache_delete(cache_manager, sample_data):
    """Test deleting single keys, including missing ones."""
    cache_manager.set('key1', sample_data)
    cache_manager.delete('key1')
    cache_manager.delete('never-set')
    assert not cache_manager.exists('key1')


def test_cache_update(cache_manager, sample_data):
    """Test updating existing cache entry."""
    cache_manager.set('test_key', sample_data)
    new_data = {'eigenvalues': [0.25]}
    cache_manager.set('test_key', new_data)
    assert cache_manager.get('test_key') == new_data


def test_cache_arrays(cache_manager):
    """Test that arrays come back as the same object."""
    values = np.linspace(0.0, 1.0, 1000)
    cache_manager.set('array', values)
    assert cache_manager.get('array') is values


def test_get_or_compute(cache_manager):
    """Test that the factory runs once per key."""
    calls = []

    def factory():
        calls.append(1)
        return np.arange(3.0)

    first = cache_manager.get_or_compute('xi', factory)
    second = cache_manager.get_or_compute('xi', factory)
    assert second is first
    assert len(calls) == 1
    assert cache_manager.misses == 1
    assert cache_manager.hits == 1


def test_get_or_compute_after_expiry(cache_manager):
    """Test that an expired entry is recomputed."""
    calls = []

    def factory():
        calls.append(1)
        return len(calls)

    assert cache_manager.get_or_compute('key', factory, ttl=0.1) == 1
    time.sleep(0.2)
    assert cache_manager.get_or_compute('key', factory, ttl=0.1) == 2
    assert cache_manager.misses == 2


def test_get_or_compute_propagates_errors(cache_manager):
    """Test that a failing factory stores nothing."""
    def factory():
        raise RuntimeError("eigensolve failed")

    with pytest.raises(RuntimeError):
        cache_manager.get_or_compute('bad', factory)
    assert not cache_manager.exists('bad')


def test_make_key():
    """Test that keys keep the full float repr."""
    assert make_key('xi', 1.0, 2000) == "'xi':1.0:2000"
    assert make_key(0.1 + 0.2) != make_key(0.3)
    assert make_key('xi', -1.0, 5.0) != make_key('xi', -1.0, 5.000000000000001)


def test_cache_concurrent_access(cache_manager, sample_data):
    """Test concurrent cache access."""
    def worker():
        for i in range(100):
            cache_manager.set(f'key_{i}', sample_data)
            assert cache_manager.get(f'key_{i}') == sample_data

    threads = [threading.Thread(target=worker) for _ in range(5)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()

    for i in range(100):
        assert cache_manager.get(f'key_{i}') == sample_data


def test_concurrent_get_or_compute(cache_manager):
    """Test that concurrent memoized calls agree on the value."""
    results = []

    def worker():
        results.append(cache_manager.get_or_compute('shared', lambda: 42))

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()

    assert results == [42] * 8
    assert cache_manager.hits + cache_manager.misses == 8
