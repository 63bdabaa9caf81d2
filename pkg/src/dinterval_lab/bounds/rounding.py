# src/dinterval_lab/bounds/rounding.py

import logging
from collections import Counter
from fractions import Fraction
from math import gcd
from typing import List, Optional

from ..core.errors import BoundViolationError, PreconditionError
from ..core.geometry import covers_count
from ..core.models import DIntervalFamily, FractionalCover, IntegralCover, Point, WeightSystem
from ..core.rational import lcm_of_denominators

logger = logging.getLogger(__name__)


def check_fractional_cover(
    family: DIntervalFamily,
    weights: WeightSystem,
    cover: FractionalCover,
) -> None:
    """Raises PreconditionError unless `cover` is a non-negative fractional w-cover of the family."""
    negative = [p.label() for p, y in cover.values.items() if y < 0]
    if negative:
        raise PreconditionError(f"fractional cover is negative at {negative[:5]}")
    for index, edge in enumerate(family.edges):
        covered = sum((y for p, y in cover.values.items() if edge.contains(p)), Fraction(0))
        if covered < weights[index]:
            raise PreconditionError(f"fractional cover gives edge {index} only {covered} < w = {weights[index]}")


def round_cover(
    family: DIntervalFamily,
    weights: Optional[WeightSystem],
    cover: FractionalCover,
) -> IntegralCover:
    """
    Rounds a fractional w-cover to an integral one of size at most d times its value.

    With q the common denominator (scaled so that d divides q), every point v is repeated
    q * cover(v) times in (line, position) order; taking every (q/d)-th copy hits each edge
    at least w(e) times, since one of its at most d components carries q * w(e) / d copies.

    Raises:
        PreconditionError: If `cover` is not a feasible fractional w-cover.
        BoundViolationError: If the rounded cover is infeasible or too large.
    """
    weights = weights or family.unit_weights()
    check_fractional_cover(family, weights, cover)
    if not cover.values:
        return IntegralCover()

    d = family.d
    q = lcm_of_denominators(cover.values.values())
    q *= d // gcd(q, d)
    step = q // d

    copies: List[Point] = []
    for point in sorted(cover.values):
        copies.extend([point] * int(cover.values[point] * q))
    chosen = Counter(copies[step - 1::step])
    rounded = IntegralCover(values=dict(chosen))

    for index, edge in enumerate(family.edges):
        if covers_count(edge, rounded.values) < weights[index]:
            raise BoundViolationError(f"rounded cover misses edge {index}")
    if rounded.size > d * cover.total:
        raise BoundViolationError(f"rounded cover has size {rounded.size} > d * {cover.total}")
    logger.debug("round_cover: q = %d, step = %d, size %d", q, step, rounded.size)
    return rounded
