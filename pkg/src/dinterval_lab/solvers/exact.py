# src/dinterval_lab/solvers/exact.py

import logging
from math import ceil
from typing import Generator, Hashable, List, Mapping, Optional, Tuple

import networkx as nx

from ..config import settings
from ..core.errors import SearchBudgetExceededError
from ..core.geometry import cover_candidates, intersection_graph
from ..core.models import DIntervalFamily, EdgeColoring, IntegralCover, Matching, WeightSystem

logger = logging.getLogger(__name__)


class NodeCounter:
    """Counts explored search nodes and raises once the budget is exceeded."""

    def __init__(self, what: str, budget: Optional[int] = None):
        self.what = what
        self.budget = budget if budget is not None else settings.SEARCH_NODE_BUDGET
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise SearchBudgetExceededError(self.what, self.budget)


class _Optimal(Exception):
    """Internal: a solution meeting a proven lower bound was found."""
    pass


Frame = Generator["Frame", object, object]


def run_frames(root: Frame) -> object:
    """
    Drives a depth-first search written as generator frames, without Python recursion.

    A frame yields the frame of each child call and is sent back that child's return
    value, so the search keeps its recursive shape while its depth is bounded only by
    memory. Returns the root frame's return value.
    """
    stack: List[Frame] = [root]
    result: object = None
    while stack:
        try:
            child = stack[-1].send(result)
        except StopIteration as done:
            stack.pop()
            result = done.value
            continue
        stack.append(child)
        result = None
    return result


# ==============================================================================
# MAXIMUM WEIGHT INDEPENDENT SET
# ==============================================================================

def alpha_w(
    graph: nx.Graph,
    weights: Optional[Mapping[Hashable, int]] = None,
    budget: Optional[int] = None,
    what: str = "alpha_w",
) -> Tuple[int, Tuple[Hashable, ...]]:
    """
    Maximum-weight independent set by branch-and-bound.

    Vertices are branched in sorted order, "include" before "exclude", and only strict
    improvements replace the incumbent, so the returned set is the lexicographically least
    optimal one. The bound is a greedy clique cover of the remaining candidates: an
    independent set takes at most one vertex per clique.

    Args:
        graph: A simple undirected graph with sortable node labels.
        weights: Positive integer vertex weights; defaults to the 'weight' node attribute (or 1).
        budget: Explored-node cap; defaults to settings.SEARCH_NODE_BUDGET.
        what: Name reported in a budget error.

    Returns:
        (value, witness) with the witness as a sorted tuple of nodes.

    Raises:
        SearchBudgetExceededError: If the search explores more nodes than allowed.
    """
    nodes = sorted(graph.nodes)
    position = {v: i for i, v in enumerate(nodes)}
    if weights is None:
        weights = {v: graph.nodes[v].get("weight", 1) for v in nodes}
    w = [weights[v] for v in nodes]
    adj = [0] * len(nodes)
    for u, v in graph.edges():
        if u == v:
            continue
        adj[position[u]] |= 1 << position[v]
        adj[position[v]] |= 1 << position[u]

    counter = NodeCounter(what, budget)
    best = {"weight": 0, "mask": 0}
    value, mask = 0, 0

    def clique_cover_bound(candidates: int) -> int:
        cliques: List[List[int]] = []  # [mask, max weight]
        rest = candidates
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            for clique in cliques:
                if clique[0] & ~adj[v] == 0:
                    clique[0] |= low
                    clique[1] = max(clique[1], w[v])
                    break
            else:
                cliques.append([low, w[v]])
        return sum(c[1] for c in cliques)

    def search(candidates: int, chosen: int, weight: int) -> Frame:
        counter.tick()
        if candidates == 0:
            if weight > best["weight"]:
                best["weight"], best["mask"] = weight, chosen
            return
        if weight + clique_cover_bound(candidates) <= best["weight"]:
            return
        low = candidates & -candidates
        v = low.bit_length() - 1
        yield search(candidates & ~low & ~adj[v], chosen | low, weight + w[v])
        yield search(candidates & ~low, chosen, weight)

    # components are independent, so their lexicographically least optima combine into one
    for component in nx.connected_components(graph):
        best["weight"], best["mask"] = 0, 0
        run_frames(search(sum(1 << position[v] for v in component), 0, 0))
        value += best["weight"]
        mask |= best["mask"]
    witness = tuple(nodes[i] for i in range(len(nodes)) if mask >> i & 1)
    logger.debug("%s: value %d after %d nodes", what, value, counter.nodes)
    return value, witness


def nu_w(
    family: DIntervalFamily,
    weights: Optional[WeightSystem] = None,
    budget: Optional[int] = None,
) -> Tuple[int, Matching]:
    """
    Maximum weight of a matching, as a max-weight independent set of the intersection graph.
    Unit weights give the matching number nu.
    """
    weights = weights or family.unit_weights()
    graph = intersection_graph(family, weights)
    value, witness = alpha_w(graph, budget=budget, what="nu_w")
    return value, Matching(edge_indices=tuple(witness))


# ==============================================================================
# MINIMUM WEIGHTED COVER
# ==============================================================================

def tau_w(
    family: DIntervalFamily,
    weights: Optional[WeightSystem] = None,
    budget: Optional[int] = None,
    use_lp_bound: bool = True,
) -> Tuple[int, IntegralCover]:
    """
    Minimum size of a w-cover by branch-and-bound over the cover candidates
    (one point per inclusion-maximal edge signature).

    Candidates are decided in (line, position) order, trying the largest useful value
    first, so the first optimum found is the lexicographically least one. Nodes are pruned
    with the residual bounds max(residual) and ceil(total residual / max open degree); the
    ceiling of the fractional optimum, when enabled, stops the search as soon as it is met.
    """
    weights = weights or family.unit_weights()
    if family.n_edges == 0:
        return 0, IntegralCover()

    candidates = cover_candidates(family)
    members = [sorted(cls.edges) for cls in candidates]
    n = len(candidates)
    residual = list(weights.weights)
    last_candidate = [-1] * family.n_edges
    for i, edges in enumerate(members):
        for e in edges:
            last_candidate[e] = i
    closing = [[] for _ in range(n)]
    for e, i in enumerate(last_candidate):
        closing[i].append(e)

    lower_bound = 0
    if use_lp_bound:
        from .fractional import tau_star_w
        value, _, _ = tau_star_w(family, weights)
        lower_bound = ceil(value)

    counter = NodeCounter("tau_w", budget)
    values = [0] * n
    best = {"size": sum(weights.weights) + 1, "values": None}

    def residual_bound(start: int) -> int:
        total = sum(residual)
        if total == 0:
            return 0
        degree = max(
            (sum(1 for e in members[j] if residual[e] > 0) for j in range(start, n)),
            default=0,
        )
        if degree == 0:
            return total + best["size"]  # infeasible from here
        return max(max(residual), ceil(total / degree))

    def search(i: int, used: int) -> Frame:
        counter.tick()
        if used + residual_bound(i) >= best["size"]:
            return
        if not any(residual):
            best["size"], best["values"] = used, list(values)
            if used <= lower_bound:
                raise _Optimal()
            return
        if i == n:
            return
        cap = max((residual[e] for e in members[i]), default=0)
        for value in range(cap, -1, -1):
            saved = [(e, residual[e]) for e in members[i]]
            for e in members[i]:
                residual[e] = max(0, residual[e] - value)
            if all(residual[e] == 0 for e in closing[i]):
                values[i] = value
                yield search(i + 1, used + value)
                values[i] = 0
            for e, r in saved:
                residual[e] = r

    try:
        run_frames(search(0, 0))
    except _Optimal:
        pass
    chosen = best["values"] or [0] * n
    cover = IntegralCover(values={candidates[i].point: v for i, v in enumerate(chosen) if v > 0})
    logger.debug("tau_w: value %d after %d nodes", best["size"], counter.nodes)
    return best["size"], cover


# ==============================================================================
# EDGE CHROMATIC NUMBER
# ==============================================================================

def chi_e(family: DIntervalFamily, budget: Optional[int] = None) -> Tuple[int, EdgeColoring]:
    """
    Exact edge chromatic number: the chromatic number of the intersection graph.
    Tries k = (greedy clique size), k + 1, ... and returns the lexicographically least
    proper k-coloring (colors listed by edge index) for the first feasible k.
    """
    graph = intersection_graph(family)
    n = family.n_edges
    if n == 0:
        return 0, EdgeColoring(value=0)
    neighbours = [sorted(graph.neighbors(v)) for v in range(n)]
    counter = NodeCounter("chi_e", budget)

    clique: List[int] = []
    for v in sorted(range(n), key=lambda v: (-len(neighbours[v]), v)):
        if all(v in graph[u] for u in clique):
            clique.append(v)

    def color_with(k: int) -> Optional[List[int]]:
        colors = [-1] * n

        def place(v: int, used: int) -> Frame:
            counter.tick()
            if v == n:
                return True
            taken = {colors[u] for u in neighbours[v] if u < v}
            for c in range(min(k, used + 1)):
                if c not in taken:
                    colors[v] = c
                    if (yield place(v + 1, max(used, c + 1))):
                        return True
            colors[v] = -1
            return False

        return colors if run_frames(place(0, 0)) else None

    for k in range(max(1, len(clique)), n + 1):
        colors = color_with(k)
        if colors is not None:
            logger.debug("chi_e: value %d after %d nodes", k, counter.nodes)
            return k, EdgeColoring(value=k, colors=tuple(colors))
    raise AssertionError("n colors always suffice")
