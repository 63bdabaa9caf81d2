# src/dinterval_lab/core/geometry.py

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence

import networkx as nx
from pydantic import BaseModel

from .errors import InvalidFamilyError
from .models import DInterval, DIntervalFamily, Point, WeightSystem


# ==============================================================================
# INTERSECTION & COVERING PREDICATES
# ==============================================================================

def intersects(a: DInterval, b: DInterval) -> bool:
    """True iff some component of `a` shares a point with some component of `b`."""
    return any(ca.meets(cb) for ca in a.components for cb in b.components)


def covers_count(h: DInterval, g: Mapping[Point, int]) -> int:
    """Returns the sum of g(v) over the points v of h (multiplicities counted)."""
    return sum(value for point, value in g.items() if h.contains(point))


# ==============================================================================
# VALIDATION
# ==============================================================================

class Violation(BaseModel):
    """One broken invariant, with the offending edge index when there is one."""
    edge: Optional[int] = None
    reason: str

    def __str__(self) -> str:
        return self.reason if self.edge is None else f"edge {self.edge}: {self.reason}"


def validate(family: DIntervalFamily, weights: Optional[WeightSystem] = None) -> List[Violation]:
    """
    Checks every structural invariant of a family (and optionally of its weight system).
    Returns the list of violations; an empty list means the family is valid.
    """
    violations: List[Violation] = []
    expected_lines = family.d if family.separated else 1
    if len(family.line_lengths) != expected_lines:
        violations.append(Violation(
            reason=f"line_lengths has {len(family.line_lengths)} entries, expected {expected_lines}"
        ))

    for index, edge in enumerate(family.edges):
        components = edge.components
        if not components:
            violations.append(Violation(edge=index, reason="edge has no components"))
            continue
        if len(components) > family.d:
            violations.append(Violation(
                edge=index, reason=f"{len(components)} components exceed d = {family.d}"
            ))
        for c in components:
            if c.lo > c.hi:
                violations.append(Violation(edge=index, reason=f"component {c.label()} has lo > hi"))
            if not family.separated and c.line != 0:
                violations.append(Violation(
                    edge=index, reason=f"component {c.label()} is off line 0 in a non-separated family"
                ))
            elif c.line >= len(family.line_lengths):
                violations.append(Violation(edge=index, reason=f"component {c.label()} is on an undeclared line"))
            elif c.hi > family.line_lengths[c.line]:
                violations.append(Violation(
                    edge=index,
                    reason=f"component {c.label()} exceeds line length {family.line_lengths[c.line]}"
                ))

        if family.separated:
            per_line: Dict[int, int] = defaultdict(int)
            for c in components:
                per_line[c.line] += 1
            for line, count in sorted(per_line.items()):
                if count > 1:
                    violations.append(Violation(
                        edge=index, reason=f"separated-form: {count} components on line {line}"
                    ))
        else:
            overlapping = any(
                components[i].meets(components[j])
                for i in range(len(components))
                for j in range(i + 1, len(components))
            )
            if overlapping:
                violations.append(Violation(edge=index, reason="components not disjoint"))
            elif any(components[i].hi >= components[i + 1].lo for i in range(len(components) - 1)):
                violations.append(Violation(edge=index, reason="components not sorted left-to-right"))

    if weights is not None:
        if len(weights) != len(family.edges):
            violations.append(Violation(
                reason=f"weights has {len(weights)} entries for {len(family.edges)} edges"
            ))
        for index, w in enumerate(weights.weights):
            if w < 1:
                violations.append(Violation(edge=index, reason=f"weight {w} is not positive"))
    return violations


def ensure_valid(family: DIntervalFamily, weights: Optional[WeightSystem] = None) -> None:
    """Raises InvalidFamilyError if `validate` reports anything."""
    violations = validate(family, weights)
    if violations:
        raise InvalidFamilyError(violations)


# ==============================================================================
# GROUND SET COMPRESSION
# ==============================================================================

@dataclass(frozen=True)
class Segment:
    """A maximal run [lo, hi] of one line on which the set of containing edges is constant."""
    line: int
    lo: int
    hi: int
    edges: FrozenSet[int]

    @property
    def representative(self) -> Point:
        return Point(line=self.line, pos=self.lo)

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class PointClass:
    """All ground points sharing one edge signature, represented by the leftmost of them."""
    point: Point
    edges: FrozenSet[int]
    count: int


def elementary_segments(family: DIntervalFamily) -> List[Segment]:
    """
    Cuts every line at all component endpoints. Within a segment every point lies in
    exactly the same edges, so one representative per segment is combinatorially enough.
    Uncovered segments are included with an empty signature.
    """
    segments: List[Segment] = []
    for line, length in enumerate(family.line_lengths):
        cuts = {1, length + 1}
        on_line = []
        for index, edge in enumerate(family.edges):
            for c in edge.components:
                if c.line == line:
                    cuts.add(c.lo)
                    cuts.add(c.hi + 1)
                    on_line.append((index, c.lo, c.hi))
        ordered = sorted(x for x in cuts if 1 <= x <= length + 1)
        for lo, nxt in zip(ordered, ordered[1:]):
            hi = nxt - 1
            members = frozenset(index for index, c_lo, c_hi in on_line if c_lo <= lo and hi <= c_hi)
            segments.append(Segment(line=line, lo=lo, hi=hi, edges=members))
    return segments


def point_classes(family: DIntervalFamily, include_uncovered: bool = False) -> List[PointClass]:
    """
    Groups the ground set by edge signature, in (line, position) order of the
    representative point.
    """
    representatives: Dict[FrozenSet[int], Point] = {}
    counts: Dict[FrozenSet[int], int] = defaultdict(int)
    for segment in elementary_segments(family):
        if not segment.edges and not include_uncovered:
            continue
        representatives.setdefault(segment.edges, segment.representative)
        counts[segment.edges] += segment.size
    classes = [PointClass(point=p, edges=s, count=counts[s]) for s, p in representatives.items()]
    return sorted(classes, key=lambda cls: cls.point.key())


def cover_candidates(family: DIntervalFamily) -> List[PointClass]:
    """
    Point classes with an inclusion-maximal, non-empty signature. Moving cover mass from a
    point to one whose signature contains its own never breaks a cover, so these suffice.
    """
    classes = point_classes(family)
    return [
        cls for cls in classes
        if not any(cls.edges < other.edges for other in classes)
    ]


def max_degree(family: DIntervalFamily) -> int:
    """Delta: the maximum number of edges containing a single point."""
    return max((len(s.edges) for s in elementary_segments(family)), default=0)


def point_degree(family: DIntervalFamily, point: Point) -> int:
    """Number of edges containing `point`."""
    return sum(1 for edge in family.edges if edge.contains(point))


# ==============================================================================
# GRAPHS
# ==============================================================================

def intersection_graph(family: DIntervalFamily, weights: Optional[WeightSystem] = None) -> nx.Graph:
    """
    The line graph L(H): one node per edge (with a 'weight' attribute), adjacent iff the
    d-intervals intersect.
    """
    graph = nx.Graph()
    for index in range(family.n_edges):
        graph.add_node(index, weight=weights[index] if weights is not None else 1)
    edges: Sequence[DInterval] = family.edges
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            if intersects(edges[i], edges[j]):
                graph.add_edge(i, j)
    return graph
