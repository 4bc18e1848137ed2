"""
Caching Layer Module

In-process memoisation of expensive, deterministic results such as prepared
composite states. Entries are evicted least-recently-used once the
configured capacity is reached.
"""

import logging
import threading
from collections import OrderedDict
from functools import wraps
from typing import Any, Callable, Optional, TypeVar

from .config import get_settings

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


class CacheBackend:
    """Interface shared by the memo backends."""

    def get(self, key: str) -> Optional[Any]:
        raise NotImplementedError

    def set(self, key: str, value: Any) -> bool:
        raise NotImplementedError

    def delete(self, key: str) -> bool:
        raise NotImplementedError

    def clear(self) -> bool:
        raise NotImplementedError

    def __len__(self) -> int:
        raise NotImplementedError


class MemoryCacheBackend(CacheBackend):
    """Bounded in-memory LRU backend."""

    def __init__(self, max_entries: int = 256):
        self._cache: "OrderedDict[str, Any]" = OrderedDict()
        self._max_entries = max_entries
        self._lock = threading.Lock()

    def get(self, key: str) -> Optional[Any]:
        with self._lock:
            if key not in self._cache:
                return None
            self._cache.move_to_end(key)
            return self._cache[key]

    def set(self, key: str, value: Any) -> bool:
        """Set value in cache, evicting the oldest entry when full."""
        with self._lock:
            self._cache[key] = value
            self._cache.move_to_end(key)
            while len(self._cache) > self._max_entries:
                self._cache.popitem(last=False)
        return True

    def delete(self, key: str) -> bool:
        """Delete value from cache."""
        with self._lock:
            self._cache.pop(key, None)
        return True

    def clear(self) -> bool:
        """Clear all cached values."""
        with self._lock:
            self._cache.clear()
        return True

    def __len__(self) -> int:
        return len(self._cache)


class NullCacheBackend(CacheBackend):
    """Backend used when caching is disabled."""

    def get(self, key: str) -> Optional[Any]:
        return None

    def set(self, key: str, value: Any) -> bool:
        return False

    def delete(self, key: str) -> bool:
        return True

    def clear(self) -> bool:
        return True

    def __len__(self) -> int:
        return 0


class CacheManager:
    """
    Process-wide cache manager.

    Worker processes each hold their own instance; nothing is shared
    across process boundaries.
    """

    _instance: Optional["CacheManager"] = None
    _backend: CacheBackend

    def __new__(cls) -> "CacheManager":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._initialize()
        return cls._instance

    def _initialize(self) -> None:
        """Pick the backend from Settings.cache_enabled."""
        settings = get_settings()
        if settings.cache_enabled:
            self._backend = MemoryCacheBackend(settings.cache_max_entries)
            logger.debug("Using in-memory cache backend")
        else:
            self._backend = NullCacheBackend()
            logger.debug("Caching disabled")

    def get(self, key: str) -> Optional[Any]:
        return self._backend.get(key)

    def set(self, key: str, value: Any) -> bool:
        return self._backend.set(key, value)

    def delete(self, key: str) -> bool:
        return self._backend.delete(key)

    def clear(self) -> bool:
        return self._backend.clear()

    def __len__(self) -> int:
        return len(self._backend)

    @property
    def backend_type(self) -> str:
        """'memory' or 'null'."""
        if isinstance(self._backend, MemoryCacheBackend):
            return "memory"
        return "null"


_cache_manager: Optional[CacheManager] = None


def get_cache() -> CacheManager:
    """Process-wide CacheManager."""
    global _cache_manager
    if _cache_manager is None:
        _cache_manager = CacheManager()
    return _cache_manager


def reset_cache() -> None:
    """Drop the cache manager so the next call re-reads settings."""
    global _cache_manager
    CacheManager._instance = None
    _cache_manager = None


def cached(key_prefix: str = "") -> Callable[[F], F]:
    """
    Decorator for memoising deterministic function results.

    Arguments are keyed by ``repr``; callers must pass values whose repr
    identifies them (ints, floats, pydantic models, tuples). Returned
    objects are shared between hits and must not be mutated.

    Usage:
        @cached(key_prefix="composite")
        def prepare(params, grouping, cutoff):
            ...
    """
    def decorator(func: F) -> F:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            cache_key_parts = [key_prefix] if key_prefix else []
            cache_key_parts.append(func.__name__)
            cache_key_parts.extend(repr(arg) for arg in args)
            cache_key_parts.extend(f"{k}={v!r}" for k, v in sorted(kwargs.items()))
            cache_key = ":".join(cache_key_parts)

            cache = get_cache()
            cached_value = cache.get(cache_key)
            if cached_value is not None:
                return cached_value

            result = func(*args, **kwargs)
            cache.set(cache_key, result)
            return result

        return wrapper  # type: ignore[return-value]

    return decorator
