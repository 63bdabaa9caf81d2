# src/dinterval_lab/generators/walecki.py

from typing import List

from ..core.errors import PreconditionError
from ..core.models import Component, DInterval, DIntervalFamily


def hamiltonian_paths(d: int) -> List[List[int]]:
    """
    Decomposes K_{2d} (vertices 1..2d) into d Hamiltonian paths by rotating the zig-zag
    path j, j+1, j-1, j+2, j-2, ..., j+d (mod 2d) for j = 0..d-1.
    """
    n = 2 * d
    paths = []
    for j in range(d):
        path = [j]
        for step in range(1, d + 1):
            path.append((j + step) % n)
            if step < d:
                path.append((j - step) % n)
        paths.append([v + 1 for v in path])
    return paths


def gen_walecki(d: int) -> DIntervalFamily:
    """
    The intersecting separated family with tau = tau* = d and nu = 1: edge i has on line j
    the component [p, p + 1], where p is the position of vertex i on the j-th path.
    """
    if d < 2:
        raise PreconditionError(f"the Hamiltonian-path family needs d >= 2, got {d}")
    paths = hamiltonian_paths(d)
    positions = [{v: p for p, v in enumerate(path, start=1)} for path in paths]
    edges = []
    for i in range(1, 2 * d + 1):
        edges.append(DInterval(tuple(
            Component(line=j, lo=positions[j][i], hi=positions[j][i] + 1)
            for j in range(d)
        )))
    return DIntervalFamily(
        d=d,
        separated=True,
        line_lengths=(2 * d + 1,) * d,
        edges=tuple(edges),
    )
