# src/dinterval_lab/core/models.py

from datetime import datetime
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Tuple

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    RootModel,
    computed_field,
    field_serializer,
    field_validator,
    model_validator,
)

from .rational import Rational, format_rational

WITNESS_SCHEMA_VERSION = 1


# ==============================================================================
# GROUND SET MODELS
# ==============================================================================

class Point(BaseModel):
    """A point of the discrete ground set: a position on one of the family's lines."""
    model_config = ConfigDict(frozen=True)

    line: NonNegativeInt = Field(
        default=0,
        description="Line index. Always 0 for non-separated families, 0..d-1 for separated ones."
    )
    pos: PositiveInt = Field(..., description="Coordinate on the line, 1-based.")

    def key(self) -> Tuple[int, int]:
        return (self.line, self.pos)

    def __lt__(self, other: "Point") -> bool:
        return self.key() < other.key()

    def label(self) -> str:
        return f"{self.line}:{self.pos}"


class Component(BaseModel):
    """One closed discrete interval [lo, hi] of a d-interval, living on a single line."""
    model_config = ConfigDict(frozen=True)

    line: NonNegativeInt = Field(default=0, description="Line the component lives on.")
    lo: PositiveInt = Field(..., description="Left endpoint (inclusive).")
    hi: PositiveInt = Field(..., description="Right endpoint (inclusive).")

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    def contains(self, point: Point) -> bool:
        return point.line == self.line and self.lo <= point.pos <= self.hi

    def meets(self, other: "Component") -> bool:
        return self.line == other.line and self.lo <= other.hi and other.lo <= self.hi

    def endpoints(self) -> Tuple[Point, Point]:
        return (Point(line=self.line, pos=self.lo), Point(line=self.line, pos=self.hi))

    def label(self) -> str:
        return f"[{self.lo},{self.hi}]" if self.line == 0 else f"L{self.line}[{self.lo},{self.hi}]"


class DInterval(RootModel[Tuple[Component, ...]]):
    """
    A d-interval: a union of at most d pairwise disjoint closed components.
    Serializes as a bare list of components, matching the instance JSON schema.
    """
    model_config = ConfigDict(frozen=True)

    @classmethod
    def from_spans(cls, *spans: Tuple[int, ...]) -> "DInterval":
        """Builds a d-interval from (lo, hi) or (line, lo, hi) tuples."""
        components = []
        for span in spans:
            if len(span) == 2:
                components.append(Component(lo=span[0], hi=span[1]))
            else:
                components.append(Component(line=span[0], lo=span[1], hi=span[2]))
        return cls(tuple(components))

    @property
    def components(self) -> Tuple[Component, ...]:
        return self.root

    @property
    def size(self) -> int:
        """Total number of points |h| (the natural length weight)."""
        return sum(c.size for c in self.root)

    def contains(self, point: Point) -> bool:
        return any(c.contains(point) for c in self.root)

    def points(self) -> Iterator[Point]:
        for c in self.root:
            for pos in range(c.lo, c.hi + 1):
                yield Point(line=c.line, pos=pos)

    def endpoint_slots(self) -> List[Tuple[int, str, Point]]:
        """Every (component index, 'lo'|'hi', point) endpoint slot; a one-point component has two slots."""
        slots = []
        for index, c in enumerate(self.root):
            lo, hi = c.endpoints()
            slots.append((index, "lo", lo))
            slots.append((index, "hi", hi))
        return slots

    def label(self) -> str:
        return "∪".join(c.label() for c in self.root)


class DIntervalFamily(BaseModel):
    """
    A finite hypergraph whose edges are d-intervals over a discrete ground set:
    one line for non-separated families, d labelled lines for separated ones.
    Structural invariants are checked by `core.geometry.validate`, not on construction.
    """
    model_config = ConfigDict(frozen=True)

    d: PositiveInt = Field(..., description="Maximal number of components per edge.")
    separated: bool = Field(
        default=False,
        description="If True, every edge has at most one component on each of d parallel lines."
    )
    line_lengths: Tuple[PositiveInt, ...] = Field(
        ...,
        description="Number of points on each line (length 1 for non-separated, d for separated)."
    )
    edges: Tuple[DInterval, ...] = Field(default=(), description="The edges, in a fixed order.")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def ground_size(self) -> int:
        return sum(self.line_lengths)

    def ground_points(self) -> Iterator[Point]:
        for line, length in enumerate(self.line_lengths):
            for pos in range(1, length + 1):
                yield Point(line=line, pos=pos)

    def unit_weights(self) -> "WeightSystem":
        return WeightSystem(weights=(1,) * len(self.edges))

    def length_weights(self) -> "WeightSystem":
        return WeightSystem(weights=tuple(e.size for e in self.edges))


class WeightSystem(BaseModel):
    """A positive-integer weight per edge, aligned index-for-index with the family's edges."""
    model_config = ConfigDict(frozen=True)

    weights: Tuple[PositiveInt, ...] = Field(..., description="w(e) >= 1 for every edge.")

    @classmethod
    def unit(cls, n_edges: int) -> "WeightSystem":
        return cls(weights=(1,) * n_edges)

    @property
    def total(self) -> int:
        return sum(self.weights)

    def __getitem__(self, index: int) -> int:
        return self.weights[index]

    def __len__(self) -> int:
        return len(self.weights)

    def is_unit(self) -> bool:
        return all(w == 1 for w in self.weights)


class Instance(DIntervalFamily):
    """
    The on-disk instance format: a family plus an optional weight system.
    This is the contract for every CLI command and for persisted witnesses.
    """
    weights: Optional[Tuple[PositiveInt, ...]] = Field(
        default=None,
        description="Optional w(e) per edge; unit weights when omitted."
    )

    @classmethod
    def of(cls, family: DIntervalFamily, weights: Optional[WeightSystem] = None) -> "Instance":
        return cls(
            d=family.d,
            separated=family.separated,
            line_lengths=family.line_lengths,
            edges=family.edges,
            weights=weights.weights if weights is not None else None,
        )

    @property
    def family(self) -> DIntervalFamily:
        return DIntervalFamily(
            d=self.d,
            separated=self.separated,
            line_lengths=self.line_lengths,
            edges=self.edges,
        )

    def weight_system(self) -> WeightSystem:
        if self.weights is None:
            return self.unit_weights()
        return WeightSystem(weights=self.weights)

    def canonical_json(self) -> str:
        """Compact serialization in field order, used for content addressing and tie-breaking."""
        return self.model_dump_json(exclude_none=True)


# ==============================================================================
# SOLUTION MODELS
# ==============================================================================

def _point_map_from_entries(value: Any) -> Any:
    """Accepts either a {Point: value} mapping or the JSON list of {line, pos, value} entries."""
    if isinstance(value, dict):
        return value
    return {Point(line=entry["line"], pos=entry["pos"]): entry["value"] for entry in value}


class Matching(BaseModel):
    """A set of pairwise disjoint edges, as sorted indices into the family's edge sequence."""
    model_config = ConfigDict(frozen=True)

    edge_indices: Tuple[NonNegativeInt, ...] = Field(default=(), description="Sorted edge indices.")

    def weight(self, weights: WeightSystem) -> int:
        return sum(weights[i] for i in self.edge_indices)


class IntegralCover(BaseModel):
    """A w-cover: point multiplicities g with sum over each edge of g >= w(e)."""
    model_config = ConfigDict(frozen=True)

    values: Dict[Point, PositiveInt] = Field(default_factory=dict)

    @field_validator("values", mode="before")
    @classmethod
    def _parse_entries(cls, value: Any) -> Any:
        return _point_map_from_entries(value)

    @field_serializer("values")
    def _dump_entries(self, values: Dict[Point, int]) -> List[Dict[str, int]]:
        return [{"line": p.line, "pos": p.pos, "value": v} for p, v in sorted(values.items())]

    @computed_field
    @property
    def size(self) -> int:
        return sum(self.values.values())


class FractionalMatching(BaseModel):
    """Non-negative rational values on edges with every point saturated at most once."""
    model_config = ConfigDict(frozen=True)

    values: Dict[NonNegativeInt, Rational] = Field(default_factory=dict)

    def total(self, weights: Optional[WeightSystem] = None) -> Fraction:
        if weights is None:
            return sum(self.values.values(), Fraction(0))
        return sum((weights[i] * f for i, f in self.values.items()), Fraction(0))


class FractionalCover(BaseModel):
    """Non-negative rational values on points with every edge e covered at least w(e)."""
    model_config = ConfigDict(frozen=True)

    values: Dict[Point, Rational] = Field(default_factory=dict)

    @field_validator("values", mode="before")
    @classmethod
    def _parse_entries(cls, value: Any) -> Any:
        return _point_map_from_entries(value)

    @field_serializer("values")
    def _dump_entries(self, values: Dict[Point, Fraction]) -> List[Dict[str, Any]]:
        return [
            {"line": p.line, "pos": p.pos, "value": format_rational(v)}
            for p, v in sorted(values.items())
        ]

    @property
    def total(self) -> Fraction:
        return sum(self.values.values(), Fraction(0))


class EdgeColoring(BaseModel):
    """A partition of the edges into matchings; colors[i] is the color of edge i."""
    model_config = ConfigDict(frozen=True)

    value: NonNegativeInt
    colors: Tuple[NonNegativeInt, ...] = ()

    def classes(self) -> List[List[int]]:
        groups: List[List[int]] = [[] for _ in range(self.value)]
        for edge, color in enumerate(self.colors):
            groups[color].append(edge)
        return groups


class FractionalEdgeColoring(BaseModel):
    """An optimal fractional edge coloring supported on maximal matchings."""
    model_config = ConfigDict(frozen=True)

    value: Rational
    matchings: Tuple[Tuple[NonNegativeInt, ...], ...] = Field(
        default=(),
        description="The maximal matchings, indexed by matching id."
    )
    coloring: Dict[NonNegativeInt, Rational] = Field(
        default_factory=dict,
        description="Matching id -> f(M); ids with f(M) = 0 are omitted."
    )


class BalanceCertificate(BaseModel):
    """Outcome of the balancedness test with its certificate."""
    model_config = ConfigDict(frozen=True)

    balanced: bool
    ground_size: NonNegativeInt = Field(..., description="k, the number of ground points considered.")
    matching: Optional[FractionalMatching] = Field(
        default=None,
        description="A perfect fractional matching when balanced."
    )
    farkas: Optional[FractionalCover] = Field(
        default=None,
        description="Point values y (possibly negative) with y[e] >= 0 for every edge and y[V] < 0, when not balanced."
    )


# ==============================================================================
# GENERATOR MODELS
# ==============================================================================

class RandomFamilySpec(BaseModel):
    """Parameters of the seeded random family generator. The seed fully determines the output."""
    model_config = ConfigDict(frozen=True)

    d: PositiveInt = 2
    separated: bool = False
    line_length: PositiveInt = Field(default=12, description="Points per line (n).")
    edge_count: PositiveInt = Field(default=6, description="Number of edges (m).")
    component_length_min: PositiveInt = 1
    component_length_max: PositiveInt = 4
    weight_min: PositiveInt = 1
    weight_max: PositiveInt = 1
    seed: int = Field(default=0, ge=0, lt=2**64, description="64-bit seed.")

    @model_validator(mode='after')
    def check_ranges(self) -> 'RandomFamilySpec':
        if self.component_length_min > self.component_length_max:
            raise ValueError("component_length_min must not exceed component_length_max.")
        if self.weight_min > self.weight_max:
            raise ValueError("weight_min must not exceed weight_max.")
        if self.component_length_min > self.line_length:
            raise ValueError("component_length_min must fit on a line.")
        return self


# ==============================================================================
# REPORT MODELS
# ==============================================================================

class BoundKind(str, Enum):
    """
    Whether a report row is a proven inequality, an open conjecture, or the claimed
    guarantee of a heuristic (flagged when it fails, never fatal).
    """
    THEOREM = "theorem"
    CONJECTURE = "conjecture"
    GUARANTEE = "guarantee"


class BoundRow(BaseModel):
    """One inequality lhs <= rhs evaluated exactly on an instance."""
    name: str
    kind: BoundKind
    statement: str = Field(..., description="Human-readable form of the inequality.")
    lhs: Optional[Rational] = None
    rhs: Optional[Rational] = None
    holds: Optional[bool] = Field(default=None, description="Exactly lhs <= rhs; None when not evaluated.")
    slack: Optional[Rational] = Field(default=None, description="rhs - lhs.")
    error: Optional[str] = Field(
        default=None,
        description="Budget error that prevented evaluation (holds is None), or why a constructive check failed."
    )


class BoundReport(BaseModel):
    """Every invariant computed for an instance and every applicable bound row."""
    instance_id: str
    d: PositiveInt
    separated: bool
    invariants: Dict[str, Rational] = Field(default_factory=dict)
    rows: List[BoundRow] = Field(default_factory=list)

    def theorem_failures(self) -> List[BoundRow]:
        return [r for r in self.rows if r.kind == BoundKind.THEOREM and r.holds is False]

    def budget_errors(self) -> List[BoundRow]:
        return [r for r in self.rows if r.error is not None and r.holds is None]

    def conjecture_hits(self) -> List[BoundRow]:
        """Conjecture rows that are tight or violated (slack <= 0)."""
        return [
            r for r in self.rows
            if r.kind == BoundKind.CONJECTURE and r.slack is not None and r.slack <= 0
        ]

    def flagged_guarantees(self) -> List[BoundRow]:
        return [r for r in self.rows if r.kind == BoundKind.GUARANTEE and r.holds is False]

    def row(self, name: str) -> Optional[BoundRow]:
        return next((r for r in self.rows if r.name == name), None)


# ==============================================================================
# SEARCH & WITNESS MODELS
# ==============================================================================

class SearchTarget(str, Enum):
    """Ratios the conjecture search maximizes."""
    TAU_STAR_OVER_NU = "tau_star/nu"
    TAU_W_OVER_NU_W = "tau_w/nu_w"
    TAU_STAR_W_OVER_NU_W = "tau_star_w/nu_w"
    CHI_E_OVER_D_DELTA = "chi_e/(d*delta)"


class SearchConfig(BaseModel):
    """Configuration of a generate-and-test conjecture search, loaded from a JSON file."""
    target: SearchTarget
    d_min: PositiveInt = 1
    d_max: PositiveInt = 2
    separated: Optional[bool] = Field(
        default=None,
        description="Restrict to separated (True) or non-separated (False) families; None draws both."
    )
    line_length_min: PositiveInt = 4
    line_length_max: PositiveInt = 10
    edges_min: PositiveInt = 2
    edges_max: PositiveInt = 7
    component_length_min: PositiveInt = 1
    component_length_max: PositiveInt = 3
    weight_min: PositiveInt = 1
    weight_max: PositiveInt = 1
    iterations: PositiveInt = Field(default=100, description="Number of random instances to evaluate.")
    time_budget_seconds: Optional[PositiveFloat] = Field(
        default=None,
        description="Wall-clock cap; results are only reproducible when it is not hit."
    )
    top_k: PositiveInt = 10
    seed: int = Field(default=0, ge=0, lt=2**64)
    include_walecki: bool = Field(
        default=False,
        description="Seed the pool with the Hamiltonian-path family for every d in range (d >= 2)."
    )
    check_theorems: bool = Field(
        default=True,
        description="Run the full bound report on every instance and count theorem-row failures."
    )
    workers: PositiveInt = Field(default=1, description="Worker processes evaluating instances.")

    @model_validator(mode='after')
    def check_ranges(self) -> 'SearchConfig':
        for low, high in (
            ("d_min", "d_max"),
            ("line_length_min", "line_length_max"),
            ("edges_min", "edges_max"),
            ("component_length_min", "component_length_max"),
            ("weight_min", "weight_max"),
        ):
            if getattr(self, low) > getattr(self, high):
                raise ValueError(f"'{low}' must not exceed '{high}'.")
        return self


class Provenance(BaseModel):
    """Where a witness came from."""
    source: str = Field(..., description="'random', 'walecki', 'verify' or 'file'.")
    seed: Optional[int] = None
    iteration: Optional[int] = None


class WitnessCertificates(BaseModel):
    """Exact LP certificates of a witness; replay re-checks their feasibility and totals."""
    fractional_cover: Optional[FractionalCover] = Field(default=None, description="Optimal fractional w-cover.")
    fractional_matching: Optional[FractionalMatching] = Field(
        default=None,
        description="Optimal fractional w-matching, of the same total as the cover."
    )
    fractional_coloring: Optional[FractionalEdgeColoring] = None


class Witness(BaseModel):
    """A solved instance bundle persisted by the search harness."""
    schema_version: int = WITNESS_SCHEMA_VERSION
    target: Optional[SearchTarget] = None
    instance: Instance
    invariants: Dict[str, Rational] = Field(default_factory=dict)
    ratios: Dict[str, Rational] = Field(default_factory=dict)
    certificates: WitnessCertificates = Field(default_factory=WitnessCertificates)
    timestamp: datetime
    provenance: Provenance
