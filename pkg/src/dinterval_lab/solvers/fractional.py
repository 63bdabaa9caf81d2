# src/dinterval_lab/solvers/fractional.py

import logging
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import networkx as nx

from ..config import settings
from ..core.errors import BoundViolationError, SearchBudgetExceededError
from ..core.geometry import elementary_segments, intersection_graph, intersects, point_classes
from ..core.models import (
    BalanceCertificate,
    DIntervalFamily,
    FractionalCover,
    FractionalEdgeColoring,
    FractionalMatching,
    WeightSystem,
)
from ..core.rational import format_rational
from .simplex import LPStatus, solve_lp

logger = logging.getLogger(__name__)


# ==============================================================================
# CERTIFICATE CHECKS
# ==============================================================================

def fractional_matching_violations(family: DIntervalFamily, matching: FractionalMatching) -> List[str]:
    """Everything that keeps `matching` from being a fractional matching of the family."""
    problems: List[str] = []
    for e, f in sorted(matching.values.items()):
        if e >= family.n_edges:
            problems.append(f"edge {e} does not exist")
        elif f < 0:
            problems.append(f"edge {e} has the negative value {format_rational(f)}")
    for cls in point_classes(family):
        load = sum((matching.values.get(e, Fraction(0)) for e in cls.edges), Fraction(0))
        if load > 1:
            problems.append(f"point {cls.point.label()} is saturated {format_rational(load)} > 1")
    return problems


def fractional_cover_violations(
    family: DIntervalFamily,
    weights: WeightSystem,
    cover: FractionalCover,
) -> List[str]:
    """Everything that keeps `cover` from being a fractional w-cover of the family."""
    problems = [
        f"point {p.label()} has the negative value {format_rational(y)}"
        for p, y in sorted(cover.values.items()) if y < 0
    ]
    for e, edge in enumerate(family.edges):
        covered = sum((y for p, y in cover.values.items() if edge.contains(p)), Fraction(0))
        if covered < weights[e]:
            problems.append(f"edge {e} is covered {format_rational(covered)} < {weights[e]}")
    return problems


def fractional_coloring_violations(family: DIntervalFamily, coloring: FractionalEdgeColoring) -> List[str]:
    """
    Checks that the supported matchings are matchings of the family, that every edge gets
    total weight at least 1 and that the weights add up to the stated value.
    """
    problems: List[str] = []
    support: Dict[int, Fraction] = {}
    for i, f in sorted(coloring.coloring.items()):
        if i >= len(coloring.matchings):
            problems.append(f"matching {i} does not exist")
            continue
        matching = coloring.matchings[i]
        if f < 0:
            problems.append(f"matching {i} has the negative weight {format_rational(f)}")
        elif any(e >= family.n_edges for e in matching):
            problems.append(f"matching {i} names an edge that does not exist")
        elif any(intersects(family.edges[a], family.edges[b]) for a, b in combinations(matching, 2)):
            problems.append(f"matching {i} contains intersecting edges")
        else:
            support[i] = f
    for e in range(family.n_edges):
        weight = sum((f for i, f in support.items() if e in coloring.matchings[i]), Fraction(0))
        if weight < 1:
            problems.append(f"edge {e} is colored {format_rational(weight)} < 1")
    total = sum(coloring.coloring.values(), Fraction(0))
    if total != coloring.value:
        problems.append(f"weights add up to {format_rational(total)}, not {format_rational(coloring.value)}")
    return problems


# ==============================================================================
# FRACTIONAL INVARIANTS
# ==============================================================================

def tau_star_w(
    family: DIntervalFamily,
    weights: Optional[WeightSystem] = None,
    budget: Optional[int] = None,
) -> Tuple[Fraction, FractionalCover, FractionalMatching]:
    """
    Fractional weighted covering number, which equals the fractional weighted matching number.

    Solves max sum w(e) f(e) s.t. sum_{e ∋ v} f(e) <= 1 on the compressed ground set; the
    optimal duals are the fractional w-cover. Both certificates are checked for feasibility
    and their objective values must agree exactly.

    Returns:
        (value, cover, matching)
    """
    weights = weights or family.unit_weights()
    if family.n_edges == 0:
        return Fraction(0), FractionalCover(), FractionalMatching()

    classes = point_classes(family)
    matrix = [[1 if e in cls.edges else 0 for e in range(family.n_edges)] for cls in classes]
    result = solve_lp(
        matrix, ["<="] * len(classes), [1] * len(classes), list(weights.weights),
        maximize=True, budget=budget,
    )
    if result.status != LPStatus.OPTIMAL:
        raise BoundViolationError(f"fractional matching LP ended {result.status.value}")

    matching = FractionalMatching(values={e: f for e, f in enumerate(result.x) if f != 0})
    cover = FractionalCover(values={cls.point: y for cls, y in zip(classes, result.duals) if y != 0})

    problems = [f"fractional matching: {p}" for p in fractional_matching_violations(family, matching)]
    problems += [f"fractional cover: {p}" for p in fractional_cover_violations(family, weights, cover)]
    if problems:
        raise BoundViolationError("; ".join(problems))
    if cover.total != matching.total(weights) or cover.total != result.value:
        raise BoundViolationError(
            f"duality gap: cover {cover.total} vs matching {matching.total(weights)}"
        )
    logger.debug("tau_star_w = %s after %d pivots", result.value, result.pivots)
    return result.value, cover, matching


def is_balanced(
    family: DIntervalFamily,
    covered_only: bool = False,
    budget: Optional[int] = None,
) -> BalanceCertificate:
    """
    Decides whether the family has a perfect fractional matching.

    The ground set is every declared point of every line, or only the points lying in at
    least one edge when `covered_only` is set. A negative answer comes with a Farkas
    witness y: y[e] >= 0 for every edge while y[V] < 0.
    """
    segments = elementary_segments(family)
    if covered_only:
        ground_size = sum(s.size for s in segments if s.edges)
    else:
        ground_size = family.ground_size
        uncovered = next((s for s in segments if not s.edges), None)
        if uncovered is not None:
            return BalanceCertificate(
                balanced=False,
                ground_size=ground_size,
                farkas=FractionalCover(values={uncovered.representative: Fraction(-1)}),
            )

    classes = point_classes(family)
    if not classes:
        return BalanceCertificate(balanced=True, ground_size=ground_size, matching=FractionalMatching())

    matrix = [[1 if e in cls.edges else 0 for e in range(family.n_edges)] for cls in classes]
    result = solve_lp(
        matrix, ["="] * len(classes), [1] * len(classes), [0] * family.n_edges,
        maximize=True, budget=budget,
    )
    if result.status == LPStatus.INFEASIBLE:
        farkas = FractionalCover(values={cls.point: y for cls, y in zip(classes, result.farkas) if y != 0})
        for e, edge in enumerate(family.edges):
            if sum((y for p, y in farkas.values.items() if edge.contains(p)), Fraction(0)) < 0:
                raise BoundViolationError(f"Farkas witness is negative on edge {e}")
        if farkas.total >= 0:
            raise BoundViolationError("Farkas witness has a non-negative total")
        return BalanceCertificate(balanced=False, ground_size=ground_size, farkas=farkas)

    matching = FractionalMatching(values={e: f for e, f in enumerate(result.x) if f != 0})
    for cls in classes:
        if sum((matching.values.get(e, Fraction(0)) for e in cls.edges), Fraction(0)) != 1:
            raise BoundViolationError(f"point {cls.point.label()} is not saturated exactly once")
    return BalanceCertificate(balanced=True, ground_size=ground_size, matching=matching)


def maximal_matchings(family: DIntervalFamily, cap: Optional[int] = None) -> List[Tuple[int, ...]]:
    """All maximal matchings (maximal independent sets of the intersection graph), sorted."""
    cap = cap if cap is not None else settings.MAX_MAXIMAL_MATCHINGS
    complement = nx.complement(intersection_graph(family))
    found: List[Tuple[int, ...]] = []
    for clique in nx.find_cliques(complement):
        found.append(tuple(sorted(clique)))
        if len(found) > cap:
            raise SearchBudgetExceededError("maximal matching enumeration", cap)
    return sorted(found)


def chi_star_e(
    family: DIntervalFamily,
    cap: Optional[int] = None,
    budget: Optional[int] = None,
) -> Tuple[Fraction, FractionalEdgeColoring]:
    """
    Fractional edge chromatic number: min sum f(M) over maximal matchings M such that every
    edge is covered with total weight at least 1.
    """
    if family.n_edges == 0:
        return Fraction(0), FractionalEdgeColoring(value=Fraction(0))
    matchings = maximal_matchings(family, cap)
    matrix = [
        [1 if e in matching else 0 for matching in matchings]
        for e in range(family.n_edges)
    ]
    result = solve_lp(
        matrix, [">="] * family.n_edges, [1] * family.n_edges, [1] * len(matchings),
        maximize=False, budget=budget,
    )
    if result.status != LPStatus.OPTIMAL:
        raise BoundViolationError(f"fractional edge coloring LP ended {result.status.value}")
    coloring = FractionalEdgeColoring(
        value=result.value,
        matchings=tuple(matchings),
        coloring={i: f for i, f in enumerate(result.x) if f != 0},
    )
    problems = fractional_coloring_violations(family, coloring)
    if problems:
        raise BoundViolationError(f"fractional edge coloring: {'; '.join(problems)}")
    logger.debug("chi_star_e = %s over %d maximal matchings", result.value, len(matchings))
    return result.value, coloring
