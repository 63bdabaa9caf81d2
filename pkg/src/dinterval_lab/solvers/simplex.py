# src/dinterval_lab/solvers/simplex.py

import logging
from enum import Enum
from fractions import Fraction
from typing import List, Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict

from ..config import settings
from ..core.errors import SearchBudgetExceededError

logger = logging.getLogger(__name__)

Sense = Literal["<=", ">=", "="]
Number = int | Fraction


class LPStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LPResult(BaseModel):
    """
    Outcome of an exact LP solve.

    `duals` are the optimal dual values y = c_B B^-1 in the problem's own sense (so for a
    minimization with >= rows they are non-negative). When the problem is infeasible,
    `farkas` holds y with y·A_j >= 0 for every column and y·b < 0.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    status: LPStatus
    value: Optional[Fraction] = None
    x: List[Fraction] = []
    duals: List[Fraction] = []
    farkas: List[Fraction] = []
    pivots: int = 0


class SimplexTableau:
    """
    Dense simplex tableau over exact rationals for max cost·x s.t. rows·x = rhs, x >= 0.
    The initial basis must be made of unit columns with rhs >= 0. Pivoting follows
    Bland's smallest-index rule, so the method never cycles.
    """

    def __init__(
        self,
        rows: Sequence[Sequence[Number]],
        rhs: Sequence[Number],
        cost: Sequence[Number],
        basis: Sequence[int],
        budget: Optional[int] = None,
    ):
        self.m = len(rows)
        self.n = len(cost)
        self.rows = [[Fraction(v) for v in row] for row in rows]
        self.rhs = [Fraction(v) for v in rhs]
        self.basis = list(basis)
        self.unit_columns = list(basis)
        self.blocked: set[int] = set()
        self.budget = budget if budget is not None else settings.LP_PIVOT_BUDGET
        self.pivots = 0
        self.set_cost(cost)

    def set_cost(self, cost: Sequence[Number]) -> None:
        """Installs a new objective and prices it out against the current basis."""
        self.cost = [Fraction(v) for v in cost]
        reduced = list(self.cost)
        for i, b in enumerate(self.basis):
            cb = self.cost[b]
            if cb:
                row = self.rows[i]
                reduced = [r - cb * a for r, a in zip(reduced, row)]
        self.reduced = reduced

    @property
    def value(self) -> Fraction:
        return sum((self.cost[b] * self.rhs[i] for i, b in enumerate(self.basis)), Fraction(0))

    def pivot(self, i: int, j: int) -> None:
        self.pivots += 1
        if self.pivots > self.budget:
            raise SearchBudgetExceededError("simplex pivots", self.budget)
        piv = self.rows[i][j]
        pivot_row = [v / piv for v in self.rows[i]]
        self.rows[i] = pivot_row
        self.rhs[i] /= piv
        for k in range(self.m):
            if k == i:
                continue
            f = self.rows[k][j]
            if f:
                self.rows[k] = [a - f * b for a, b in zip(self.rows[k], pivot_row)]
                self.rhs[k] -= f * self.rhs[i]
        f = self.reduced[j]
        if f:
            self.reduced = [a - f * b for a, b in zip(self.reduced, pivot_row)]
        self.basis[i] = j

    def solve(self) -> LPStatus:
        while True:
            entering = next(
                (j for j in range(self.n) if self.reduced[j] > 0 and j not in self.blocked),
                None,
            )
            if entering is None:
                return LPStatus.OPTIMAL
            candidates = [
                (self.rhs[i] / self.rows[i][entering], self.basis[i], i)
                for i in range(self.m)
                if self.rows[i][entering] > 0
            ]
            if not candidates:
                return LPStatus.UNBOUNDED
            _, _, leaving = min(candidates)
            self.pivot(leaving, entering)

    def primal(self) -> List[Fraction]:
        x = [Fraction(0)] * self.n
        for i, b in enumerate(self.basis):
            x[b] = self.rhs[i]
        return x

    def duals(self) -> List[Fraction]:
        """y_i = c_B B^-1 e_i, read off the column that was the unit vector of row i."""
        return [
            sum((self.cost[b] * self.rows[k][col] for k, b in enumerate(self.basis)), Fraction(0))
            for col in self.unit_columns
        ]

    def drive_out(self, columns: set[int]) -> None:
        """Pivots basic variables of `columns` (at level zero) out of the basis where possible."""
        for i in range(self.m):
            if self.basis[i] in columns:
                j = next(
                    (j for j in range(self.n) if j not in columns and self.rows[i][j] != 0),
                    None,
                )
                if j is not None:
                    self.pivot(i, j)


def solve_lp(
    matrix: Sequence[Sequence[Number]],
    senses: Sequence[Sense],
    rhs: Sequence[Number],
    cost: Sequence[Number],
    maximize: bool = True,
    budget: Optional[int] = None,
) -> LPResult:
    """
    Solves an LP exactly with the two-phase simplex method.

    Args:
        matrix: Constraint rows over the structural variables (all variables are >= 0).
        senses: One of '<=', '>=', '=' per row.
        rhs: Right-hand sides.
        cost: Objective coefficients.
        maximize: Optimization direction.
        budget: Pivot cap; defaults to settings.LP_PIVOT_BUDGET.

    Returns:
        An LPResult with the optimal primal, the duals, or a Farkas certificate.

    Raises:
        SearchBudgetExceededError: If the pivot budget is exceeded.
    """
    m, n = len(matrix), len(cost)
    rows: List[List[Fraction]] = []
    b: List[Fraction] = []
    flipped: List[bool] = []
    kinds: List[Sense] = []
    for row, sense, value in zip(matrix, senses, rhs):
        row = [Fraction(v) for v in row]
        value = Fraction(value)
        flip = value < 0
        if flip:
            row = [-v for v in row]
            value = -value
            sense = {"<=": ">=", ">=": "<=", "=": "="}[sense]
        rows.append(row)
        b.append(value)
        flipped.append(flip)
        kinds.append(sense)

    n_slack = sum(1 for s in kinds if s != "=")
    n_artificial = sum(1 for s in kinds if s != "<=")
    width = n + n_slack + n_artificial
    tableau_rows = [[Fraction(0)] * width for _ in range(m)]
    basis: List[int] = []
    artificial: set[int] = set()
    slack_col, art_col = n, n + n_slack
    for i, (row, sense) in enumerate(zip(rows, kinds)):
        tableau_rows[i][:n] = row
        if sense == "<=":
            tableau_rows[i][slack_col] = Fraction(1)
            basis.append(slack_col)
            slack_col += 1
        else:
            if sense == ">=":
                tableau_rows[i][slack_col] = Fraction(-1)
                slack_col += 1
            tableau_rows[i][art_col] = Fraction(1)
            basis.append(art_col)
            artificial.add(art_col)
            art_col += 1

    sign = 1 if maximize else -1
    tableau = SimplexTableau(tableau_rows, b, [0] * width, basis, budget=budget)

    def unflip(values: List[Fraction]) -> List[Fraction]:
        return [-y if f else y for y, f in zip(values, flipped)]

    if artificial:
        tableau.set_cost([-1 if j in artificial else 0 for j in range(width)])
        tableau.solve()
        if tableau.value < 0:
            logger.debug("phase 1 ended at %s: infeasible", tableau.value)
            return LPResult(
                status=LPStatus.INFEASIBLE,
                farkas=unflip(tableau.duals()),
                pivots=tableau.pivots,
            )
        tableau.drive_out(artificial)
        tableau.blocked = set(artificial)

    tableau.set_cost([sign * Fraction(c) for c in cost] + [0] * (width - n))
    status = tableau.solve()
    if status == LPStatus.UNBOUNDED:
        return LPResult(status=status, pivots=tableau.pivots)
    duals = [sign * y for y in tableau.duals()]
    return LPResult(
        status=LPStatus.OPTIMAL,
        value=sign * tableau.value,
        x=tableau.primal()[:n],
        duals=unflip(duals),
        pivots=tableau.pivots,
    )
