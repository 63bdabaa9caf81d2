# src/dinterval_lab/bounds/turan.py

from fractions import Fraction
from typing import Hashable, Mapping, Optional

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import PreconditionError
from ..core.rational import Rational
from ..solvers.exact import alpha_w


class TuranCheck(BaseModel):
    """Both sides of a weighted Turán inequality lhs >= W^2/K - W, evaluated exactly."""
    model_config = ConfigDict(frozen=True)

    lhs: int = Field(..., description="Weighted edge (or arc) count.")
    rhs: Rational = Field(..., description="W^2/K - W.")
    total_weight: int = Field(..., description="W = w[V].")
    independence: int = Field(..., description="K = alpha_w of the (underlying) graph.")

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs


def _vertex_weights(graph: nx.Graph, weights: Optional[Mapping[Hashable, int]]) -> dict:
    if weights is None:
        weights = {v: graph.nodes[v].get("weight", 1) for v in graph.nodes}
    bad = [v for v in graph.nodes if weights.get(v, 0) < 1]
    if bad:
        raise PreconditionError(f"vertex weights must be positive integers, got none/zero for {bad[:5]}")
    return dict(weights)


def _turan_rhs(total: int, independence: int) -> Fraction:
    if total == 0:
        return Fraction(0)
    # K >= max w > 0 whenever there is a vertex
    assert independence > 0, "positive weights force a positive independence number"
    return Fraction(total * total, independence) - total


def weighted_turan_bound(
    graph: nx.Graph,
    weights: Optional[Mapping[Hashable, int]] = None,
    budget: Optional[int] = None,
) -> TuranCheck:
    """
    Weighted Turán inequality: sum over edges uv of w(u) + w(v) is at least W^2/K - W,
    with K the maximum weight of an independent set. Unit weights give Turán's theorem.
    """
    if any(u == v for u, v in graph.edges()):
        raise PreconditionError("graph must be simple (no loops)")
    weights = _vertex_weights(graph, weights)
    independence, _ = alpha_w(graph, weights, budget=budget, what="turan alpha_w")
    total = sum(weights.values())
    lhs = sum(weights[u] + weights[v] for u, v in graph.edges())
    return TuranCheck(
        lhs=lhs,
        rhs=_turan_rhs(total, independence),
        total_weight=total,
        independence=independence,
    )


def underlying_graph(digraph: nx.MultiDiGraph) -> nx.Graph:
    """Simple undirected graph on the same vertices, adjacent iff some arc joins them."""
    graph = nx.Graph()
    graph.add_nodes_from(digraph.nodes(data=True))
    graph.add_edges_from((u, v) for u, v in digraph.edges() if u != v)
    return graph


def doubled_digraph(graph: nx.Graph) -> nx.MultiDiGraph:
    """Replaces every edge by two opposite arcs."""
    digraph = nx.MultiDiGraph()
    digraph.add_nodes_from(graph.nodes(data=True))
    for u, v in graph.edges():
        digraph.add_edge(u, v)
        digraph.add_edge(v, u)
    return digraph


def directed_turan_bound(
    digraph: nx.MultiDiGraph,
    weights: Optional[Mapping[Hashable, int]] = None,
    budget: Optional[int] = None,
) -> TuranCheck:
    """
    Directed weighted Turán inequality: if every adjacent pair is joined by at least two
    arcs (in any directions), the sum of tail weights over all arcs is at least W^2/K - W.

    Raises:
        PreconditionError: If a loop exists or some adjacent pair carries a single arc.
    """
    arcs: dict = {}
    for u, v in digraph.edges():
        if u == v:
            raise PreconditionError(f"loop at vertex {u!r}")
        pair = frozenset((u, v))
        arcs[pair] = arcs.get(pair, 0) + 1
    thin = [tuple(sorted(pair, key=repr)) for pair, count in arcs.items() if count < 2]
    if thin:
        raise PreconditionError(f"adjacent pairs joined by a single arc: {thin[:5]}")

    graph = underlying_graph(digraph)
    weights = _vertex_weights(graph, weights)
    independence, _ = alpha_w(graph, weights, budget=budget, what="turan alpha_w")
    total = sum(weights.values())
    lhs = sum(weights[u] for u, _ in digraph.edges())
    return TuranCheck(
        lhs=lhs,
        rhs=_turan_rhs(total, independence),
        total_weight=total,
        independence=independence,
    )
