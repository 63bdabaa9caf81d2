# src/dinterval_lab/bounds/report.py

import hashlib
import logging
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt

from ..core.errors import BoundViolationError, DIntervalError, PreconditionError, SearchBudgetExceededError
from ..core.geometry import intersection_graph, max_degree
from ..core.models import (
    BoundKind,
    BoundReport,
    BoundRow,
    DIntervalFamily,
    Instance,
    Matching,
    SearchTarget,
    WeightSystem,
)
from ..core.rational import Rational
from ..solvers.exact import chi_e, nu_w, tau_w
from ..solvers.fractional import chi_star_e, is_balanced, tau_star_w
from .coloring import greedy_edge_coloring
from .piercing import heaviest_endpoint, piercing_turan_check
from .rounding import round_cover
from .turan import weighted_turan_bound

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]


def instance_id(family: DIntervalFamily, weights: Optional[WeightSystem] = None) -> str:
    """Short content hash of the canonical instance serialization. Unit weights hash as no weights."""
    if weights is not None and weights.is_unit():
        weights = None
    canonical = Instance.of(family, weights).canonical_json()
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


# ==============================================================================
# TOTAL-SIZE MATCHING
# ==============================================================================

class TotalSizeMatching(BaseModel):
    """Maximum total size of a matching, with the k/(2d) guarantee when the family is balanced."""
    model_config = ConfigDict(frozen=True)

    value: NonNegativeInt
    matching: Matching
    balanced: bool
    ground_size: NonNegativeInt
    guarantee: Optional[Rational] = Field(default=None, description="k/(2d), only for balanced families.")


def total_size_matching(
    family: DIntervalFamily,
    budget: Optional[int] = None,
    covered_only: bool = False,
) -> TotalSizeMatching:
    """
    nu_l with l(h) = |h|. For a balanced family on k ground points it is at least k/(2d).

    Raises:
        BoundViolationError: If a balanced family misses the k/(2d) guarantee.
    """
    value, matching = nu_w(family, family.length_weights(), budget=budget)
    balance = is_balanced(family, covered_only=covered_only)
    guarantee = None
    if balance.balanced:
        guarantee = Fraction(balance.ground_size, 2 * family.d)
        if value < guarantee:
            raise BoundViolationError(
                f"balanced family on {balance.ground_size} points has nu_l = {value} < {guarantee}"
            )
    return TotalSizeMatching(
        value=value,
        matching=matching,
        balanced=balance.balanced,
        ground_size=balance.ground_size,
        guarantee=guarantee,
    )


# ==============================================================================
# BOUND REPORT
# ==============================================================================

class InvariantCache:
    """
    Computes each invariant once. A solver failure is cached too, so a budget error is
    reported by every row that depends on it without re-running the search.
    """

    def __init__(self, family: DIntervalFamily, weights: WeightSystem, budget: Optional[int] = None):
        self.family = family
        self.weights = weights
        self.budget = budget
        self._values: Dict[str, object] = {}
        self._errors: Dict[str, DIntervalError] = {}
        unit = family.unit_weights()
        unit_only = weights.is_unit()
        self._compute: Dict[str, Callable[[], object]] = {
            "nu": lambda: nu_w(family, unit, budget)[0],
            "tau": lambda: tau_w(family, unit, budget)[0],
            "tau_star": lambda: tau_star_w(family, unit)[0],
            "nu_w": (lambda: self.get("nu")) if unit_only else (lambda: nu_w(family, weights, budget)[0]),
            "tau_w": (lambda: self.get("tau")) if unit_only else (lambda: tau_w(family, weights, budget)[0]),
            "tau_star_w_solution": lambda: tau_star_w(family, weights),
            "tau_star_w": lambda: self.get("tau_star_w_solution")[0],
            "chi_e": lambda: chi_e(family, budget)[0],
            "chi_star_e_solution": lambda: chi_star_e(family),
            "chi_star_e": lambda: self.get("chi_star_e_solution")[0],
            "delta": lambda: max_degree(family),
            "greedy": lambda: greedy_edge_coloring(family),
            "balance": lambda: is_balanced(family),
            "nu_l": lambda: nu_w(family, family.length_weights(), budget)[0],
            "turan": lambda: weighted_turan_bound(intersection_graph(family, weights), budget=budget),
            "piercing_turan": lambda: piercing_turan_check(family, weights, budget),
            "heavy": lambda: heaviest_endpoint(family, weights, budget),
            "edges": lambda: family.n_edges,
            "total_weight": lambda: weights.total,
            "greedy_colors": lambda: self.get("greedy").colors_used,
        }

    def get(self, name: str):
        if name in self._errors:
            raise self._errors[name]
        if name not in self._values:
            try:
                self._values[name] = self._compute[name]()
            except DIntervalError as e:
                self._errors[name] = e
                raise
        return self._values[name]

    def exact_values(self) -> Dict[str, Fraction]:
        """Every successfully computed numeric invariant."""
        return {
            name: Fraction(value)
            for name, value in self._values.items()
            if isinstance(value, (int, Fraction)) and not isinstance(value, bool)
        }


Sides = Callable[[InvariantCache], Tuple[Number, Number]]


def _rows(family: DIntervalFamily) -> List[Tuple[str, BoundKind, str, bool, Sides]]:
    """(name, kind, statement, applicable, sides) for every bound of the report."""
    d = Fraction(family.d)
    has_edges = family.n_edges > 0
    theorem, conjecture, guarantee = BoundKind.THEOREM, BoundKind.CONJECTURE, BoundKind.GUARANTEE

    def rounded_size(c: InvariantCache) -> Tuple[Number, Number]:
        value, cover, _ = c.get("tau_star_w_solution")
        return round_cover(c.family, c.weights, cover).size, d * value

    def heavy_sides(c: InvariantCache) -> Tuple[Number, Number]:
        heavy = c.get("heavy")
        return heavy.bound, heavy.pierced_edge_count

    def balanced_sides(c: InvariantCache) -> Tuple[Number, Number]:
        balance = c.get("balance")
        if not balance.balanced:
            raise _NotApplicable()
        return Fraction(balance.ground_size, 2 * family.d), c.get("nu_l")

    def delta_sides(lhs: str, factor: Callable[[int], Number]) -> Sides:
        def sides(c: InvariantCache) -> Tuple[Number, Number]:
            delta = c.get("delta")
            if delta < 2:
                raise _NotApplicable()
            return c.get(lhs), factor(delta)
        return sides

    return [
        ("weighted_matching_vs_fractional_cover", theorem, "nu_w <= tau*_w", has_edges,
         lambda c: (c.get("nu_w"), c.get("tau_star_w"))),
        ("weighted_fractional_cover_vs_cover", theorem, "tau*_w <= tau_w", has_edges,
         lambda c: (c.get("tau_star_w"), c.get("tau_w"))),
        ("cover_vs_matching", theorem, "tau <= (d^2 - d + 1) nu", has_edges,
         lambda c: (c.get("tau"), (d * d - d + 1) * c.get("nu"))),
        ("cover_vs_matching_separated", theorem, "tau <= (d^2 - d) nu (separated)",
         has_edges and family.separated and family.d >= 2,
         lambda c: (c.get("tau"), (d * d - d) * c.get("nu"))),
        ("interval_cover_equals_matching", theorem, "tau <= nu (d = 1)", has_edges and family.d == 1,
         lambda c: (c.get("tau"), c.get("nu"))),
        ("fractional_cover_vs_matching", theorem, "tau* <= 2d nu", has_edges,
         lambda c: (c.get("tau_star"), 2 * d * c.get("nu"))),
        ("fractional_cover_topological", theorem, "tau* <= (4d - 6 + 3/d) nu", has_edges,
         lambda c: (c.get("tau_star"), (4 * d - 6 + 3 / d) * c.get("nu"))),
        ("cover_vs_fractional_cover", theorem, "tau <= d tau*", has_edges,
         lambda c: (c.get("tau"), d * c.get("tau_star"))),
        ("weighted_fractional_cover_vs_matching", theorem, "tau*_w <= 2d nu_w", has_edges,
         lambda c: (c.get("tau_star_w"), 2 * d * c.get("nu_w"))),
        ("weighted_cover_vs_fractional_cover", theorem, "tau_w <= d tau*_w", has_edges,
         lambda c: (c.get("tau_w"), d * c.get("tau_star_w"))),
        ("rounded_cover_vs_fractional_cover", theorem, "|round(g*)| <= d tau*_w", has_edges, rounded_size),
        ("weighted_cover_vs_matching", theorem, "tau_w <= 2d^2 nu_w", has_edges,
         lambda c: (c.get("tau_w"), 2 * d * d * c.get("nu_w"))),
        ("weighted_turan_intersection_graph", theorem, "W^2/K - W <= sum_{uv} w(u) + w(v) on L(H)", has_edges,
         lambda c: (c.get("turan").rhs, c.get("turan").lhs)),
        ("piercing_turan", theorem, "W^2/K - W <= sum_e w(e) outdeg(e) on the piercing digraph", has_edges,
         lambda c: (c.get("piercing_turan").rhs, c.get("piercing_turan").lhs)),
        ("heavy_point", theorem, "W/(2dK) <= edges through the heaviest endpoint", has_edges, heavy_sides),
        ("edge_coloring_degree", theorem, "chi_e <= 2d(Delta - 1)", has_edges,
         delta_sides("chi_e", lambda delta: 2 * family.d * (delta - 1))),
        ("fractional_coloring_vs_coloring", theorem, "chi*_e <= chi_e", has_edges,
         lambda c: (c.get("chi_star_e"), c.get("chi_e"))),
        ("fractional_coloring_degree", theorem, "Delta <= chi*_e", has_edges,
         lambda c: (c.get("delta"), c.get("chi_star_e"))),
        ("fractional_coloring_matching", theorem, "|E| / nu <= chi*_e", has_edges,
         lambda c: (Fraction(family.n_edges, c.get("nu")), c.get("chi_star_e"))),
        ("fractional_coloring_vs_degree", theorem, "chi*_e <= 2d Delta", has_edges,
         lambda c: (c.get("chi_star_e"), 2 * d * c.get("delta"))),
        ("balanced_total_size_matching", theorem, "k/(2d) <= nu_l (balanced)", has_edges, balanced_sides),
        ("greedy_edge_coloring_degree", guarantee, "greedy colors <= 2d(Delta - 1)", has_edges,
         delta_sides("greedy_colors", lambda delta: 2 * family.d * (delta - 1))),
        ("separated_fractional_cover_d_matching", conjecture, "tau* <= d nu (separated)",
         has_edges and family.separated,
         lambda c: (c.get("tau_star"), d * c.get("nu"))),
        ("separated_weighted_fractional_cover_d_matching", conjecture, "tau*_w <= d nu_w (separated)",
         has_edges and family.separated,
         lambda c: (c.get("tau_star_w"), d * c.get("nu_w"))),
        ("weighted_cover_d_squared_matching", conjecture, "tau_w <= d^2 nu_w", has_edges,
         lambda c: (c.get("tau_w"), d * d * c.get("nu_w"))),
        ("edge_coloring_d_degree", conjecture, "chi_e <= d Delta", has_edges,
         lambda c: (c.get("chi_e"), d * c.get("delta"))),
        ("separated_fractional_coloring_d_degree", conjecture, "chi*_e <= d Delta (separated)",
         has_edges and family.separated,
         lambda c: (c.get("chi_star_e"), d * c.get("delta"))),
    ]


class _NotApplicable(Exception):
    """Raised by a row whose applicability depends on a computed invariant."""
    pass


def _evaluate(name: str, kind: BoundKind, statement: str, sides: Sides, cache: InvariantCache) -> Optional[BoundRow]:
    try:
        lhs, rhs = sides(cache)
    except _NotApplicable:
        return None
    except SearchBudgetExceededError as e:
        logger.info("row %s skipped: %s", name, e)
        return BoundRow(name=name, kind=kind, statement=statement, error=str(e))
    except BoundViolationError as e:
        logger.error("row %s failed its constructive check: %s", name, e)
        return BoundRow(name=name, kind=kind, statement=statement, holds=False, error=str(e))
    lhs, rhs = Fraction(lhs), Fraction(rhs)
    return BoundRow(
        name=name,
        kind=kind,
        statement=statement,
        lhs=lhs,
        rhs=rhs,
        holds=lhs <= rhs,
        slack=rhs - lhs,
    )


def verify_bounds(
    family: DIntervalFamily,
    weights: Optional[WeightSystem] = None,
    budget: Optional[int] = None,
) -> BoundReport:
    """
    Evaluates every applicable theorem, guarantee and conjecture row exactly.
    Budget errors are recorded on the affected rows and never raised.
    """
    weights = weights or family.unit_weights()
    cache = InvariantCache(family, weights, budget)
    rows: List[BoundRow] = []
    for name, kind, statement, applicable, sides in _rows(family):
        if not applicable:
            continue
        row = _evaluate(name, kind, statement, sides, cache)
        if row is not None:
            rows.append(row)

    for name in ("edges", "total_weight", "delta", "greedy_colors"):
        try:
            cache.get(name)
        except DIntervalError:
            pass

    report = BoundReport(
        instance_id=instance_id(family, weights),
        d=family.d,
        separated=family.separated,
        invariants=cache.exact_values(),
        rows=rows,
    )
    for row in report.theorem_failures():
        logger.error("theorem row %s fails: %s vs %s", row.name, row.lhs, row.rhs)
    return report


# ==============================================================================
# CONJECTURE RATIOS
# ==============================================================================

_RATIO_TERMS: Dict[SearchTarget, Tuple[str, str]] = {
    SearchTarget.TAU_STAR_OVER_NU: ("tau_star", "nu"),
    SearchTarget.TAU_W_OVER_NU_W: ("tau_w", "nu_w"),
    SearchTarget.TAU_STAR_W_OVER_NU_W: ("tau_star_w", "nu_w"),
    SearchTarget.CHI_E_OVER_D_DELTA: ("chi_e", "delta"),
}


def ratio_invariants(target: SearchTarget) -> Tuple[str, str]:
    """Names of the invariants a target ratio is built from."""
    return _RATIO_TERMS[target]


def target_ratio(target: SearchTarget, cache: InvariantCache) -> Fraction:
    """
    Exact value of a conjecture ratio; the edge-coloring ratio divides by d * Delta.

    Raises:
        PreconditionError: If the denominator vanishes (empty family).
    """
    numerator, denominator = ratio_invariants(target)
    den = Fraction(cache.get(denominator))
    if target == SearchTarget.CHI_E_OVER_D_DELTA:
        den *= cache.family.d
    if den == 0:
        raise PreconditionError(f"{target.value} is undefined on a family without edges")
    return Fraction(cache.get(numerator)) / den

