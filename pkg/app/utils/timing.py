import functools
import time
from typing import Callable

from app.core.errors import LBMError
from app.utils.logger import logger


def timed(area: str) -> Callable:
    """
    Decorator that logs the wall time of a call under an area prefix.

    Failures raised by the toolkit are logged with the elapsed time and
    re-raised unchanged.
    """
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except LBMError as e:
                logger.error(
                    f"{area} | {func.__name__} failed after {time.perf_counter() - start:.3f}s | "
                    f"{type(e).__name__}: {e}"
                )
                raise
            logger.debug(f"{area} | {func.__name__} | Wall time: {time.perf_counter() - start:.3f}s")
            return result

        return wrapper
    return decorator


class Stopwatch:
    """Context manager measuring elapsed wall time in seconds."""

    def __enter__(self) -> "Stopwatch":
        self.start = time.perf_counter()
        self.elapsed = 0.0
        return self

    def __exit__(self, *exc) -> None:
        self.elapsed = time.perf_counter() - self.start
