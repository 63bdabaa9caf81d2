# tests/test_fractional.py

from fractions import Fraction

import pytest
from hypothesis import given

from src.dinterval_lab.core.errors import SearchBudgetExceededError
from src.dinterval_lab.core.geometry import max_degree
from src.dinterval_lab.core.models import (
    FractionalCover,
    FractionalEdgeColoring,
    FractionalMatching,
    Point,
    RandomFamilySpec,
    WeightSystem,
)
from src.dinterval_lab.generators.random_family import gen_random
from src.dinterval_lab.solvers.exact import nu_w, tau_w
from src.dinterval_lab.solvers.fractional import (
    chi_star_e,
    fractional_coloring_violations,
    fractional_cover_violations,
    fractional_matching_violations,
    is_balanced,
    maximal_matchings,
    tau_star_w,
)
from tests.families import (
    BALANCED_TRIANGLE,
    DISJOINT,
    EMPTY,
    TRIANGLE,
    WALECKI2,
    families,
    make_family,
    weighted_families,
)

F = Fraction
HALF = F(1, 2)
# The 5-cycle as a family: edge i holds the points i and i + 1 (mod 5).
PENTAGON = make_family(
    2, [(1, 1), (2, 2)], [(2, 2), (3, 3)], [(3, 3), (4, 4)], [(4, 4), (5, 5)], [(1, 1), (5, 5)]
)


def edge_mass(family, cover, e):
    return sum((y for p, y in cover.values.items() if family.edges[e].contains(p)), F(0))


def point_mass(family, matching, point):
    return sum((f for e, f in matching.values.items() if family.edges[e].contains(point)), F(0))


class TestTauStarW:
    def test_triangle(self):
        value, cover, matching = tau_star_w(TRIANGLE)
        assert value == F(3, 2)
        assert cover.values == {Point(pos=1): HALF, Point(pos=2): HALF, Point(pos=3): HALF}
        assert matching.values == {0: HALF, 1: HALF, 2: HALF}

    def test_walecki(self):
        assert tau_star_w(WALECKI2)[0] == 2

    def test_pentagon(self):
        assert tau_star_w(PENTAGON)[0] == F(5, 2)

    def test_single_weighted_edge(self):
        value, cover, matching = tau_star_w(make_family(1, [(1, 4)]), WeightSystem(weights=(7,)))
        assert value == 7
        assert cover.values == {Point(pos=1): 7}
        assert matching.values == {0: 1}

    def test_empty(self):
        assert tau_star_w(EMPTY)[0] == 0

    def test_budget(self):
        with pytest.raises(SearchBudgetExceededError):
            tau_star_w(WALECKI2, budget=1)

    @given(weighted_families())
    def test_certificates(self, instance):
        family, weights = instance
        value, cover, matching = tau_star_w(family, weights)
        assert cover.total == value == matching.total(weights)
        for e in range(family.n_edges):
            assert edge_mass(family, cover, e) >= weights[e]
        for point in family.ground_points():
            assert point_mass(family, matching, point) <= 1

    @given(weighted_families())
    def test_sandwich(self, instance):
        family, weights = instance
        value = tau_star_w(family, weights)[0]
        assert nu_w(family, weights)[0] <= value <= tau_w(family, weights)[0]

    @pytest.mark.slow
    def test_seeded_duality_corpus(self):
        for seed in range(200):
            spec = RandomFamilySpec(d=1 + seed % 3, separated=seed % 2 == 0, line_length=10,
                                    edge_count=1 + seed % 10, weight_max=4, seed=seed)
            family, weights = gen_random(spec)
            value, cover, matching = tau_star_w(family, weights)
            assert cover.total == matching.total(weights) == value, f"seed {seed}"
            assert nu_w(family, weights)[0] <= value <= tau_w(family, weights)[0], f"seed {seed}"


class TestIsBalanced:
    def test_balanced_triangle(self):
        certificate = is_balanced(BALANCED_TRIANGLE)
        assert certificate.balanced
        assert certificate.ground_size == 3
        assert certificate.matching.values == {0: HALF, 1: HALF, 2: HALF}

    def test_uncovered_point(self):
        family = make_family(1, [(1, 2)], line_lengths=(3,))
        certificate = is_balanced(family)
        assert not certificate.balanced
        assert certificate.farkas.values == {Point(pos=3): -1}

    def test_uncovered_point_ignored_when_covered_only(self):
        family = make_family(1, [(1, 2)], line_lengths=(3,))
        certificate = is_balanced(family, covered_only=True)
        assert certificate.balanced
        assert certificate.ground_size == 2
        assert certificate.matching.values == {0: 1}

    def test_walecki_ends_block_a_perfect_matching(self):
        # Points 1 and 5 of each line lie in a single edge.
        certificate = is_balanced(WALECKI2)
        assert not certificate.balanced
        assert certificate.ground_size == 10
        farkas = certificate.farkas
        assert farkas.total < 0
        for e in range(WALECKI2.n_edges):
            assert edge_mass(WALECKI2, farkas, e) >= 0

    def test_empty_family_on_points(self):
        assert not is_balanced(EMPTY).balanced
        assert is_balanced(EMPTY, covered_only=True).balanced

    @given(families())
    def test_certificate_is_checkable(self, family):
        certificate = is_balanced(family)
        if certificate.balanced:
            for point in family.ground_points():
                assert point_mass(family, certificate.matching, point) == 1
        else:
            assert certificate.farkas.total < 0
            for e in range(family.n_edges):
                assert edge_mass(family, certificate.farkas, e) >= 0


class TestMaximalMatchings:
    def test_disjoint(self):
        assert maximal_matchings(DISJOINT) == [(0, 1)]

    def test_triangle(self):
        assert maximal_matchings(TRIANGLE) == [(0,), (1,), (2,)]

    def test_cap(self):
        with pytest.raises(SearchBudgetExceededError) as info:
            maximal_matchings(TRIANGLE, cap=2)
        assert info.value.what == "maximal matching enumeration"


class TestChiStarE:
    def test_walecki(self):
        value, coloring = chi_star_e(WALECKI2)
        assert value == 4
        assert coloring.matchings == ((0,), (1,), (2,), (3,))

    def test_disjoint(self):
        assert chi_star_e(DISJOINT)[0] == 1

    def test_triangle(self):
        assert chi_star_e(TRIANGLE)[0] == 3

    def test_pentagon(self):
        assert chi_star_e(PENTAGON)[0] == F(5, 2)

    def test_empty(self):
        assert chi_star_e(EMPTY)[0] == 0

    @given(families())
    def test_coloring_covers_every_edge(self, family):
        value, coloring = chi_star_e(family)
        assert sum(coloring.coloring.values(), F(0)) == value
        for e in range(family.n_edges):
            covered = sum((f for i, f in coloring.coloring.items() if e in coloring.matchings[i]), F(0))
            assert covered >= 1

    @given(families())
    def test_lower_bounds(self, family):
        value = chi_star_e(family)[0]
        assert value >= max_degree(family)
        assert value >= F(family.n_edges, nu_w(family)[0])

    @given(families())
    def test_at_most_2d_delta(self, family):
        assert chi_star_e(family)[0] <= 2 * family.d * max_degree(family)


class TestCertificateChecks:
    def test_optimal_certificates_pass(self):
        weights = WeightSystem(weights=(2, 3, 4))
        _, cover, matching = tau_star_w(TRIANGLE, weights)
        assert fractional_cover_violations(TRIANGLE, weights, cover) == []
        assert fractional_matching_violations(TRIANGLE, matching) == []
        assert fractional_coloring_violations(TRIANGLE, chi_star_e(TRIANGLE)[1]) == []

    def test_uncovered_edge(self):
        cover = FractionalCover(values={Point(pos=1): F(1)})
        assert fractional_cover_violations(TRIANGLE, TRIANGLE.unit_weights(), cover) == [
            "edge 1 is covered 0/1 < 1",
        ]

    def test_negative_cover_value(self):
        cover = FractionalCover(values={Point(pos=1): F(2), Point(pos=2): F(-1), Point(pos=3): F(2)})
        assert fractional_cover_violations(TRIANGLE, TRIANGLE.unit_weights(), cover) == [
            "point 0:2 has the negative value -1/1",
        ]

    def test_oversaturated_point(self):
        matching = FractionalMatching(values={0: F(1), 1: F(1)})
        assert fractional_matching_violations(TRIANGLE, matching) == ["point 0:2 is saturated 2/1 > 1"]

    def test_missing_edge(self):
        matching = FractionalMatching(values={5: F(1, 2)})
        assert fractional_matching_violations(TRIANGLE, matching) == ["edge 5 does not exist"]

    def test_coloring_with_intersecting_edges(self):
        coloring = FractionalEdgeColoring(value=F(3), matchings=((0, 1),), coloring={0: F(3)})
        assert fractional_coloring_violations(TRIANGLE, coloring) == [
            "matching 0 contains intersecting edges",
            "edge 0 is colored 0/1 < 1",
            "edge 1 is colored 0/1 < 1",
            "edge 2 is colored 0/1 < 1",
        ]
