# src/dinterval_lab/generators/random_family.py

import random
from typing import List, Optional, Tuple

from ..config import settings
from ..core.errors import GeneratorRejectionError
from ..core.geometry import ensure_valid
from ..core.models import Component, DInterval, DIntervalFamily, RandomFamilySpec, WeightSystem


def _draw_component(rng: random.Random, spec: RandomFamilySpec, line: int) -> Component:
    length = rng.randint(spec.component_length_min, min(spec.component_length_max, spec.line_length))
    lo = rng.randint(1, spec.line_length - length + 1)
    return Component(line=line, lo=lo, hi=lo + length - 1)


def _draw_edge(rng: random.Random, spec: RandomFamilySpec) -> Optional[DInterval]:
    """One draw; None when the components collide (the caller retries)."""
    k = rng.randint(1, spec.d)
    if spec.separated:
        lines = sorted(rng.sample(range(spec.d), k))
        return DInterval(tuple(_draw_component(rng, spec, line) for line in lines))
    components = sorted((_draw_component(rng, spec, 0) for _ in range(k)), key=lambda c: c.lo)
    if any(a.hi >= b.lo for a, b in zip(components, components[1:])):
        return None
    return DInterval(tuple(components))


def gen_random(spec: RandomFamilySpec, max_retries: Optional[int] = None) -> Tuple[DIntervalFamily, WeightSystem]:
    """
    Deterministic pseudo-random family: the seed fixes every draw. Colliding draws are
    rejected and redrawn, never repaired.

    Raises:
        GeneratorRejectionError: If an edge cannot be drawn within `max_retries` attempts.
    """
    retries = max_retries if max_retries is not None else settings.RANDOM_MAX_RETRIES
    rng = random.Random(spec.seed)
    edges: List[DInterval] = []
    weights: List[int] = []
    for index in range(spec.edge_count):
        for _ in range(retries):
            edge = _draw_edge(rng, spec)
            if edge is not None:
                break
        else:
            raise GeneratorRejectionError(
                f"edge {index}: no valid draw in {retries} attempts (d={spec.d}, n={spec.line_length},"
                f" component lengths {spec.component_length_min}..{spec.component_length_max})"
            )
        edges.append(edge)
        weights.append(rng.randint(spec.weight_min, spec.weight_max))

    family = DIntervalFamily(
        d=spec.d,
        separated=spec.separated,
        line_lengths=(spec.line_length,) * (spec.d if spec.separated else 1),
        edges=tuple(edges),
    )
    weight_system = WeightSystem(weights=tuple(weights))
    ensure_valid(family, weight_system)
    return family, weight_system
