# src/dinterval_lab/generators/threshold.py

import logging
from typing import Iterator, List, Optional, Tuple

from ..config import settings
from ..core.errors import GeneratorSizeError, PreconditionError
from ..core.models import Component, DInterval, DIntervalFamily

logger = logging.getLogger(__name__)


def _size_counts(d: int, g: int) -> List[int]:
    """counts[s] = number of separated d-intervals on d lines of g points with total size s."""
    per_line = [1] + [g - s + 1 for s in range(1, g + 1)]
    counts = [1]
    for _ in range(d):
        product = [0] * (len(counts) + g)
        for a, x in enumerate(counts):
            if x:
                for b, y in enumerate(per_line):
                    product[a + b] += x * y
        counts = product
    return counts


def threshold_edge_count(d: int, n: int, g: int, minimal: bool = True) -> int:
    """Number of edges `gen_length_threshold` would emit, computed without enumerating them."""
    threshold = g // n
    counts = _size_counts(d, g)
    if minimal:
        return counts[threshold + 1] if threshold + 1 < len(counts) else 0
    return sum(counts[threshold + 1:])


def _choices(d: int, g: int, line: int, low: int, high: int) -> Iterator[Tuple[Optional[Component], ...]]:
    """Component choices for lines line..d-1 with total size in [low, high]."""
    if line == d:
        if low <= 0:
            yield ()
        return
    remaining_capacity = (d - line - 1) * g
    if low <= remaining_capacity:
        for rest in _choices(d, g, line + 1, low, high):
            yield (None,) + rest
    for lo in range(1, g + 1):
        for hi in range(lo, g + 1):
            size = hi - lo + 1
            if size > high:
                break
            if size + remaining_capacity < low:
                continue
            for rest in _choices(d, g, line + 1, low - size, high - size):
                yield (Component(line=line, lo=lo, hi=hi),) + rest


def gen_length_threshold(d: int, n: int, g: int, minimal: bool = True) -> DIntervalFamily:
    """
    Discrete length-threshold family on d lines of g points: every separated d-interval
    with more than g/n points in total. With `minimal` only the inclusion-minimal ones
    (exactly g/n + 1 points) are kept; supersets change neither tau nor nu.

    Raises:
        PreconditionError: If g is not a positive multiple of n.
        GeneratorSizeError: If the family would exceed settings.MAX_GENERATED_EDGES.
    """
    if d < 1 or n < 1 or g < 1 or g % n != 0:
        raise PreconditionError(f"granularity {g} must be a positive multiple of n = {n}")
    count = threshold_edge_count(d, n, g, minimal)
    if count > settings.MAX_GENERATED_EDGES:
        raise GeneratorSizeError(
            f"threshold family (d={d}, n={n}, g={g}) has {count} edges,"
            f" above MAX_GENERATED_EDGES = {settings.MAX_GENERATED_EDGES}"
        )
    threshold = g // n
    high = threshold + 1 if minimal else d * g
    edges = [
        DInterval(tuple(c for c in choice if c is not None))
        for choice in _choices(d, g, 0, threshold + 1, high)
    ]
    logger.debug("threshold family d=%d n=%d g=%d: %d edges", d, n, g, len(edges))
    return DIntervalFamily(d=d, separated=True, line_lengths=(g,) * d, edges=tuple(edges))
