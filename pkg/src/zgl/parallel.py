"""Deterministic chunked evaluation and compensated summation.

Work is cut into chunks whose boundaries depend only on the problem size,
never on the worker count; workers only decide scheduling. Each chunk is
summed with ``math.fsum`` (correctly rounded) and the chunk partials are
combined in order with ``math.fsum`` again, so results are bit-identical
for any number of threads.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

import numpy as np

R = TypeVar("R")

CHUNK = 8192
EPS = float(np.finfo(float).eps)


def chunk_bounds(n: int, chunk: int = CHUNK) -> list[tuple[int, int]]:
    return [(i, min(i + chunk, n)) for i in range(0, n, chunk)]


def chunked_map(
    fn: Callable[[int, int], R], n: int, *, workers: int = 1, chunk: int = CHUNK
) -> list[R]:
    """Apply ``fn(lo, hi)`` to fixed chunks of ``range(n)``; results in chunk order."""
    bounds = chunk_bounds(n, chunk)
    if workers <= 1 or len(bounds) <= 1:
        return [fn(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: fn(*b), bounds))


def _fsum_complex(values) -> tuple[complex, float]:
    v = np.asarray(values, dtype=complex)
    return complex(math.fsum(v.real), math.fsum(v.imag)), float(np.sum(np.abs(v)))


def compensated_sum(
    terms: Callable[[int, int], np.ndarray], n: int, *, workers: int = 1, chunk: int = CHUNK
) -> tuple[complex, float]:
    """Sum ``terms(lo, hi)`` over fixed chunks of ``range(n)``.

    Returns ``(value, error_bound)`` where the bound covers the rounding of
    the chunk partials and of the final combination, ``2 eps sum|term|``.
    """
    parts = chunked_map(lambda lo, hi: _fsum_complex(terms(lo, hi)), n, workers=workers, chunk=chunk)
    if not parts:
        return 0j, 0.0
    value = complex(math.fsum(p[0].real for p in parts), math.fsum(p[0].imag for p in parts))
    abs_total = math.fsum(p[1] for p in parts)
    return value, 2.0 * EPS * abs_total


def naive_sum(values: Sequence[complex]) -> complex:
    """Plain left-to-right accumulation; the reference for order-sensitivity checks."""
    acc = 0j
    for v in values:
        acc += complex(v)
    return acc
