"""
Fixtures shared by the test modules.

The local oracles below never touch qflab: square classes come from Euler's criterion
and residues mod 8, and represented values from enumerating vectors in a p-adic box.
"""

import contextlib
import logging
import random
from collections.abc import Generator
from functools import lru_cache
from itertools import product

from _pytest.logging import LogCaptureHandler, _LiveLoggingNullHandler

from qflab import logging_manager

SMALL_PRIMES = (2, 3, 5, 7)
GRID_VALUES = (1, -1, 2, -2, 3, -3, 5, -5, 6, -6, 7, -7, 10, -10, 15, -15)


@contextlib.contextmanager
def cleanup_logging_impl() -> Generator[None, None, None]:
    # Reset logging settings (`logging` module)
    # - delete non-standart loggers created by logging.getLogger in tests
    # - remove all handlers except pytest's ones
    # so tests could configure logging without affecting each other
    std_root_logger: logging.Logger = logging.getLogger()
    name_of_loggers_exist_on_start = set(std_root_logger.manager.loggerDict)
    for std_handler in list(std_root_logger.handlers):
        # Do not interfere with pytest handler config
        if not isinstance(std_handler, (_LiveLoggingNullHandler, LogCaptureHandler)):
            std_root_logger.removeHandler(std_handler)

    yield

    name_of_loggers_exist_on_end = set(std_root_logger.manager.loggerDict)
    for name in name_of_loggers_exist_on_end - name_of_loggers_exist_on_start:
        std_root_logger.manager.loggerDict.pop(name)

    # library loggers are module globals, unbind them instead of dropping them
    for lazy in logging_manager._lazy_loggers.values():
        lazy.factory = None
        lazy._real_logger = None
    logging_manager._logger_factory = None


def _valuation(n: int, p: int) -> int:
    count = 0
    while n % p == 0:
        n //= p
        count += 1
    return count


def local_class(n: int, p: int) -> tuple[int, int]:
    """Square class of a nonzero integer in Q_p: (valuation mod 2, unit part label)."""
    v = _valuation(n, p)
    unit = n // p**v
    if p == 2:
        return v % 2, unit % 8
    return v % 2, 1 if pow(unit % p, (p - 1) // 2, p) == 1 else -1


def _squarefree(n: int) -> int:
    sign = -1 if n < 0 else 1
    n = abs(n)
    kernel = 1
    divisor = 2
    while divisor * divisor <= n:
        while n % (divisor * divisor) == 0:
            n //= divisor * divisor
        if n % divisor == 0:
            kernel *= divisor
            n //= divisor
        divisor += 1
    return sign * kernel * n


def _value(entries: tuple[int, ...], vector: tuple[int, ...]) -> int:
    return sum(entry * x * x for entry, x in zip(entries, vector, strict=True))


@lru_cache(maxsize=None)
def _value_classes(entries: tuple[int, ...], p: int) -> frozenset[tuple[int, int]]:
    # the class of a value of valuation <= bound only depends on the vector modulo p^width
    bound, width = (3, 5) if p == 2 else (1, 2)
    found = set()
    for vector in product(range(p**width), repeat=len(entries)):
        value = _value(entries, vector)
        if value != 0 and _valuation(value, p) <= bound:
            found.add(local_class(value, p))
    return frozenset(found)


def class_representative(n: int, p: int) -> int:
    parity, label = local_class(n, p)
    if p == 2:
        unit = label
    else:
        unit = 1 if label == 1 else next(c for c in range(2, p) if pow(c, (p - 1) // 2, p) != 1)
    return p**parity * unit


def value_classes(entries: tuple[int, ...], p: int) -> frozenset[tuple[int, int]]:
    """Square classes represented over Q_p by the anisotropic form with these entries."""
    return _value_classes(tuple(sorted(class_representative(entry, p) for entry in entries)), p)


def oracle_isotropic(entries: tuple[int, ...], p: int) -> bool:
    """Isotropy over Q_p, splitting the form in halves of rank at most 3."""
    entries = tuple(_squarefree(entry) for entry in entries)
    rank = len(entries)
    if rank == 1:
        return False
    if rank == 2:
        return local_class(-entries[0], p) == local_class(entries[1], p)
    if rank >= 6:
        return True
    cut = 1 if rank == 3 else 2
    first, second = entries[:cut], entries[cut:]
    if oracle_isotropic(first, p) or oracle_isotropic(second, p):
        return True
    negated = tuple(-entry for entry in second)
    return bool(value_classes(first, p) & value_classes(negated, p))


def oracle_hilbert(a: int, b: int, p: int | None) -> int:
    """(a, b) at p by brute force: +1 iff b is a value of <1, -a>."""
    if p is None:
        return -1 if a < 0 and b < 0 else 1
    a, b = _squarefree(a), _squarefree(b)
    if local_class(a, p) == (0, 1):
        return 1
    return 1 if local_class(b, p) in value_classes((1, -a), p) else -1

def naive_integer_zero(entries: tuple[int, ...], box: int = 50) -> tuple[int, ...] | None:
    """Nonzero vector with coordinates in [0, box] on which the form vanishes, meet in the middle."""
    cut = len(entries) // 2
    left, right = entries[:cut], entries[cut:]
    left_values: dict[int, tuple[int, ...]] = {}
    for vector in product(range(box + 1), repeat=len(left)):
        if any(vector):
            left_values.setdefault(_value(left, vector), vector)
    for vector in product(range(box + 1), repeat=len(right)):
        value = _value(right, vector)
        if value == 0 and any(vector):
            return (0,) * len(left) + vector
        match = left_values.get(-value)
        if match is not None:
            return (*match, *vector)
    return None


def random_entries(rng: random.Random, rank: int, bound: int = 20) -> tuple[int, ...]:
    return tuple(rng.choice([-1, 1]) * rng.randint(1, bound) for _ in range(rank))


def random_forms(seed: int, count: int, ranks: tuple[int, ...] = (2, 3, 4, 5)) -> list[tuple[int, ...]]:
    rng = random.Random(seed)
    return [random_entries(rng, rng.choice(ranks)) for _ in range(count)]
