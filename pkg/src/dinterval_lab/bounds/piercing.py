# src/dinterval_lab/bounds/piercing.py

import logging
from fractions import Fraction
from math import ceil
from typing import Dict, List, Optional, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt

from ..core.errors import BoundViolationError, PreconditionError
from ..core.geometry import point_degree
from ..core.models import Component, DIntervalFamily, Point, WeightSystem
from ..core.rational import Rational
from ..solvers.exact import nu_w
from .turan import TuranCheck, directed_turan_bound

logger = logging.getLogger(__name__)


class PiercingArc(BaseModel):
    """An arc piercer -> pierced: `endpoint` is an endpoint of a piercer component lying in a pierced component."""
    model_config = ConfigDict(frozen=True)

    piercer: NonNegativeInt
    pierced: NonNegativeInt
    endpoint: Point
    piercer_component: NonNegativeInt
    pierced_component: NonNegativeInt


class PiercingDigraph(BaseModel):
    """Multidigraph on the edge indices of a family, two tagged arcs per intersecting pair."""
    model_config = ConfigDict(frozen=True)

    n_vertices: NonNegativeInt
    arcs: Tuple[PiercingArc, ...] = ()

    def to_networkx(self, weights: Optional[WeightSystem] = None) -> nx.MultiDiGraph:
        digraph = nx.MultiDiGraph()
        for v in range(self.n_vertices):
            digraph.add_node(v, weight=weights[v] if weights is not None else 1)
        for arc in self.arcs:
            digraph.add_edge(
                arc.piercer, arc.pierced,
                endpoint=arc.endpoint,
                piercer_component=arc.piercer_component,
                pierced_component=arc.pierced_component,
            )
        return digraph

    def out_degrees(self) -> List[int]:
        degrees = [0] * self.n_vertices
        for arc in self.arcs:
            degrees[arc.piercer] += 1
        return degrees


class HeavyPoint(BaseModel):
    """A component endpoint lying in many edges, with the guaranteed count W/(2dK)."""
    model_config = ConfigDict(frozen=True)

    point: Point
    pierced_edge_count: NonNegativeInt = Field(..., description="Edges containing the point, its own edge included.")
    bound: Rational = Field(..., description="W/(2dK).")


def _pair_arcs(i: int, ci: int, a: Component, j: int, cj: int, b: Component) -> Tuple[PiercingArc, PiercingArc]:
    """
    The two arcs of one meeting component pair: the left end of the overlap is the lo of the
    component starting later, the right end is the hi of the component ending earlier. Ties
    give the left end to the lower edge index and the right end to the higher one.
    """
    if a.lo >= b.lo:
        left = PiercingArc(piercer=i, pierced=j, endpoint=Point(line=a.line, pos=a.lo),
                           piercer_component=ci, pierced_component=cj)
    else:
        left = PiercingArc(piercer=j, pierced=i, endpoint=Point(line=b.line, pos=b.lo),
                           piercer_component=cj, pierced_component=ci)
    if a.hi < b.hi:
        right = PiercingArc(piercer=i, pierced=j, endpoint=Point(line=a.line, pos=a.hi),
                            piercer_component=ci, pierced_component=cj)
    else:
        right = PiercingArc(piercer=j, pierced=i, endpoint=Point(line=b.line, pos=b.hi),
                            piercer_component=cj, pierced_component=ci)
    return left, right


def build_piercing_digraph(family: DIntervalFamily) -> PiercingDigraph:
    """
    For every intersecting pair of edges, takes the lexicographically least pair of meeting
    components and emits one arc per end of their overlap, directed from the edge whose
    component endpoint it is to the other one.
    """
    arcs: List[PiercingArc] = []
    edges = family.edges
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            meeting = next(
                (
                    (ci, a, cj, b)
                    for ci, a in enumerate(edges[i].components)
                    for cj, b in enumerate(edges[j].components)
                    if a.meets(b)
                ),
                None,
            )
            if meeting is None:
                continue
            ci, a, cj, b = meeting
            arcs.extend(_pair_arcs(i, ci, a, j, cj, b))
    return PiercingDigraph(n_vertices=family.n_edges, arcs=tuple(arcs))


def piercing_turan_check(
    family: DIntervalFamily,
    weights: Optional[WeightSystem] = None,
    budget: Optional[int] = None,
) -> TuranCheck:
    """Directed Turán inequality on the piercing digraph: sum_e w(e) outdeg(e) >= W(W - K)/K with K = nu_w."""
    weights = weights or family.unit_weights()
    digraph = build_piercing_digraph(family).to_networkx(weights)
    return directed_turan_bound(digraph, {v: weights[v] for v in range(family.n_edges)}, budget=budget)


def heaviest_endpoint(
    family: DIntervalFamily,
    weights: Optional[WeightSystem] = None,
    budget: Optional[int] = None,
) -> HeavyPoint:
    """The component endpoint contained in the most edges (least point on ties), unchecked."""
    if family.n_edges == 0:
        raise PreconditionError("a heavy point needs at least one edge")
    weights = weights or family.unit_weights()
    independence, _ = nu_w(family, weights, budget=budget)
    bound = Fraction(weights.total, 2 * family.d * independence)

    counts: Dict[Point, int] = {}
    for edge in family.edges:
        for _, _, point in edge.endpoint_slots():
            if point not in counts:
                counts[point] = point_degree(family, point)
    point, count = min(counts.items(), key=lambda item: (-item[1], item[0].key()))
    return HeavyPoint(point=point, pierced_edge_count=count, bound=bound)


def find_heavy_point(
    family: DIntervalFamily,
    weights: Optional[WeightSystem] = None,
    budget: Optional[int] = None,
) -> HeavyPoint:
    """
    Finds an endpoint meeting at least ceil(W/(2dK)) edges, K = nu_w.

    Raises:
        PreconditionError: If the family has no edges.
        BoundViolationError: If even the heaviest endpoint falls below the bound.
    """
    heavy = heaviest_endpoint(family, weights, budget)
    if heavy.pierced_edge_count < ceil(heavy.bound):
        raise BoundViolationError(
            f"heaviest endpoint {heavy.point.label()} meets {heavy.pierced_edge_count} edges,"
            f" below W/(2dK) = {heavy.bound}"
        )
    logger.debug("heavy point %s meets %d edges (bound %s)",
                 heavy.point.label(), heavy.pierced_edge_count, heavy.bound)
    return heavy
