import functools
import numbers


def _normalize(value):
    # numpy scalars and python numbers must share cache entries
    if isinstance(value, bool):
        return value
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, numbers.Real):
        return float(value)
    return value


def param_cache(maxsize=128):
    """Least-recently-used cache decorator for constructions keyed on numeric parameters.

    Args:
        maxsize: Maximum cache size (see `functools.lru_cache`).
    """
    def _decorator(fn):
        @functools.lru_cache(maxsize=maxsize)
        def _new(*args, **kwargs):
            return fn(*args, **kwargs)

        @functools.wraps(fn)
        def _wrapped(*args, **kwargs):
            args = tuple(_normalize(a) for a in args)
            kwargs = {k: _normalize(v) for k, v in kwargs.items()}
            return _new(*args, **kwargs)

        _wrapped.cache_clear = _new.cache_clear
        _wrapped.cache_info = _new.cache_info
        return _wrapped

    return _decorator
