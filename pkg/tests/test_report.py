# tests/test_report.py

from fractions import Fraction

import pytest
from hypothesis import given

from src.dinterval_lab.bounds.report import (
    InvariantCache,
    instance_id,
    ratio_invariants,
    target_ratio,
    total_size_matching,
    verify_bounds,
)
from src.dinterval_lab.core.errors import PreconditionError
from src.dinterval_lab.core.models import BoundKind, RandomFamilySpec, SearchTarget, WeightSystem
from src.dinterval_lab.generators.random_family import gen_random
from tests.families import BALANCED_TRIANGLE, DISJOINT, EMPTY, TRIANGLE, WALECKI2, weighted_families


class TestVerifyBounds:
    def test_walecki_rows(self):
        report = verify_bounds(WALECKI2)
        assert report.theorem_failures() == []
        assert report.budget_errors() == []
        assert report.invariants["nu"] == 1
        assert report.invariants["tau"] == 2
        assert report.invariants["tau_star"] == 2
        assert report.invariants["chi_e"] == 4
        assert report.invariants["chi_star_e"] == 4
        assert report.row("cover_vs_matching_separated").slack == 0
        assert report.row("edge_coloring_degree").slack == 0
        assert report.row("interval_cover_equals_matching") is None
        assert report.row("balanced_total_size_matching") is None

    def test_walecki_reaches_the_separated_conjectures(self):
        hits = {row.name for row in verify_bounds(WALECKI2).conjecture_hits()}
        assert hits == {
            "separated_fractional_cover_d_matching",
            "separated_weighted_fractional_cover_d_matching",
            "edge_coloring_d_degree",
            "separated_fractional_coloring_d_degree",
        }

    def test_intervals(self):
        report = verify_bounds(DISJOINT)
        assert all(row.holds for row in report.rows)
        gallai = report.row("interval_cover_equals_matching")
        assert (gallai.lhs, gallai.rhs) == (2, 2)
        # Delta = 1: the degree rows do not apply
        assert report.row("edge_coloring_degree") is None
        assert report.row("greedy_edge_coloring_degree") is None
        assert report.row("cover_vs_matching_separated") is None

    def test_balanced_row(self):
        row = verify_bounds(BALANCED_TRIANGLE).row("balanced_total_size_matching")
        assert row.lhs == Fraction(3, 4)
        assert row.rhs == 2
        assert row.holds

    def test_row_kinds(self):
        report = verify_bounds(TRIANGLE)
        assert report.row("greedy_edge_coloring_degree").kind == BoundKind.GUARANTEE
        assert report.row("weighted_cover_d_squared_matching").kind == BoundKind.CONJECTURE
        assert report.row("cover_vs_matching").kind == BoundKind.THEOREM
        assert report.row("fractional_cover_topological").rhs == Fraction(7, 2)

    def test_empty_family_has_no_rows(self):
        report = verify_bounds(EMPTY)
        assert report.rows == []
        assert report.invariants["edges"] == 0

    def test_budget_errors_are_recorded(self):
        report = verify_bounds(WALECKI2, budget=1)
        row = report.row("cover_vs_matching")
        assert row.holds is None
        assert "budget of 1" in row.error
        assert row in report.budget_errors()
        assert report.theorem_failures() == []
        # the LP rows do not depend on the search budget
        assert report.row("fractional_coloring_vs_degree").holds

    def test_weighted_instance_id(self):
        weights = WeightSystem(weights=(2, 3, 4))
        assert verify_bounds(TRIANGLE, weights).instance_id == instance_id(TRIANGLE, weights)
        assert verify_bounds(TRIANGLE).instance_id == instance_id(TRIANGLE)
        assert instance_id(TRIANGLE) != instance_id(TRIANGLE, weights)

    @given(weighted_families(max_edges=5, max_length=6))
    def test_no_theorem_fails(self, instance):
        family, weights = instance
        report = verify_bounds(family, weights)
        assert report.theorem_failures() == []
        assert report.budget_errors() == []


class TestInstanceId:
    def test_stable(self):
        assert instance_id(WALECKI2) == instance_id(WALECKI2)
        assert len(instance_id(WALECKI2)) == 16

    def test_distinguishes_families(self):
        assert instance_id(TRIANGLE) != instance_id(BALANCED_TRIANGLE)

    def test_explicit_unit_weights(self):
        assert instance_id(TRIANGLE, TRIANGLE.unit_weights()) == instance_id(TRIANGLE)
        assert instance_id(TRIANGLE, WeightSystem(weights=(1, 1, 1))) == instance_id(TRIANGLE)


class TestTotalSizeMatching:
    def test_balanced_triangle(self):
        result = total_size_matching(BALANCED_TRIANGLE)
        assert result.value == 2
        assert result.balanced
        assert result.guarantee == Fraction(3, 4)

    def test_walecki_is_unbalanced(self):
        result = total_size_matching(WALECKI2)
        assert result.value == 4
        assert not result.balanced
        assert result.ground_size == 10
        assert result.guarantee is None

    def test_covered_only(self):
        result = total_size_matching(DISJOINT, covered_only=True)
        assert result.balanced
        assert result.ground_size == 4
        assert result.value == 4
        assert result.guarantee == 2


class TestTargetRatio:
    def test_walecki(self):
        cache = InvariantCache(WALECKI2, WALECKI2.unit_weights())
        assert target_ratio(SearchTarget.TAU_STAR_OVER_NU, cache) == 2
        assert target_ratio(SearchTarget.TAU_W_OVER_NU_W, cache) == 2
        assert target_ratio(SearchTarget.CHI_E_OVER_D_DELTA, cache) == 1

    def test_triangle(self):
        cache = InvariantCache(TRIANGLE, TRIANGLE.unit_weights())
        assert target_ratio(SearchTarget.TAU_STAR_W_OVER_NU_W, cache) == Fraction(3, 2)

    def test_empty_family(self):
        cache = InvariantCache(EMPTY, EMPTY.unit_weights())
        with pytest.raises(PreconditionError):
            target_ratio(SearchTarget.TAU_STAR_OVER_NU, cache)

    def test_ratio_invariants(self):
        assert ratio_invariants(SearchTarget.CHI_E_OVER_D_DELTA) == ("chi_e", "delta")


@pytest.mark.slow
def test_seeded_corpus():
    for seed in range(100):
        spec = RandomFamilySpec(d=1 + seed % 3, separated=seed % 2 == 1, line_length=10,
                                edge_count=2 + seed % 7, weight_max=3, seed=seed)
        family, weights = gen_random(spec)
        report = verify_bounds(family, weights)
        assert report.theorem_failures() == [], f"seed {seed}"
        assert report.flagged_guarantees() == [], f"seed {seed}"
        assert report.budget_errors() == [], f"seed {seed}"
