# src/dinterval_lab/bounds/coloring.py

import logging
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt

from ..core.geometry import max_degree
from ..core.models import DIntervalFamily, EdgeColoring
from .piercing import build_piercing_digraph
from .turan import underlying_graph

logger = logging.getLogger(__name__)


class GreedyColoring(BaseModel):
    """A greedy proper edge coloring together with the 2d(Delta - 1) guarantee check."""
    model_config = ConfigDict(frozen=True)

    colors_used: NonNegativeInt
    coloring: EdgeColoring
    max_degree: NonNegativeInt
    bound: Optional[NonNegativeInt] = Field(default=None, description="2d(Delta - 1); None when Delta < 2.")

    @property
    def within_bound(self) -> Optional[bool]:
        return None if self.bound is None else self.colors_used <= self.bound


def greedy_edge_coloring(family: DIntervalFamily) -> GreedyColoring:
    """
    Colors the edges through the piercing digraph: repeatedly removes a minimum-degree vertex
    of its underlying graph (least index on ties), then colors in reverse removal order with
    the least color unused by already colored neighbours.
    """
    graph = underlying_graph(build_piercing_digraph(family).to_networkx())
    remaining = graph.copy()
    removal: List[int] = []
    while remaining.number_of_nodes():
        v = min(remaining.nodes, key=lambda u: (remaining.degree(u), u))
        removal.append(v)
        remaining.remove_node(v)

    colors = [-1] * family.n_edges
    for v in reversed(removal):
        taken = {colors[u] for u in graph.neighbors(v) if colors[u] >= 0}
        colors[v] = next(c for c in range(len(taken) + 1) if c not in taken)

    used = max(colors, default=-1) + 1
    delta = max_degree(family)
    bound = 2 * family.d * (delta - 1) if delta >= 2 else None
    result = GreedyColoring(
        colors_used=used,
        coloring=EdgeColoring(value=used, colors=tuple(colors)),
        max_degree=delta,
        bound=bound,
    )
    if result.within_bound is False:
        logger.warning("greedy coloring used %d colors, above 2d(Delta - 1) = %d", used, bound)
    return result
