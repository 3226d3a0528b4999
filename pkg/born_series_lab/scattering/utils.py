import functools
import time
from typing import Callable, ParamSpec, TypeVar

P = ParamSpec("P")
R = TypeVar("R")


def timer(logger=None) -> Callable[[Callable[P, R]], Callable[P, R]]:
    """Decorator factory to measure and log the execution time of long running computations."""

    def decorator(func: Callable[P, R]) -> Callable[P, R]:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                elapsed_time = time.perf_counter() - start_time
                if logger:
                    logger.debug(f"{func.__module__}.{func.__name__} took {elapsed_time:.2f} seconds")

        return wrapper

    return decorator
