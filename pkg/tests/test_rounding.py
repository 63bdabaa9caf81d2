# tests/test_rounding.py

from fractions import Fraction

import pytest
from hypothesis import given

from src.dinterval_lab.bounds.rounding import check_fractional_cover, round_cover
from src.dinterval_lab.core.errors import PreconditionError
from src.dinterval_lab.core.geometry import covers_count
from src.dinterval_lab.core.models import FractionalCover, Point, RandomFamilySpec, WeightSystem
from src.dinterval_lab.generators.random_family import gen_random
from src.dinterval_lab.solvers.exact import tau_w
from src.dinterval_lab.solvers.fractional import tau_star_w
from tests.families import EMPTY, TRIANGLE, make_family, weighted_families

F = Fraction


def fractional(values):
    return FractionalCover(values={Point(pos=p): F(v) for p, v in values.items()})


def assert_rounds_within_d(family, weights):
    value, cover, _ = tau_star_w(family, weights)
    rounded = round_cover(family, weights, cover)
    for index, edge in enumerate(family.edges):
        assert covers_count(edge, rounded.values) >= weights[index]
    assert rounded.size <= family.d * value
    assert tau_w(family, weights)[0] <= rounded.size


class TestRoundCover:
    def test_triangle(self):
        rounded = round_cover(TRIANGLE, None, fractional({1: F(1, 2), 2: F(1, 2), 3: F(1, 2)}))
        assert rounded.values == {Point(pos=1): 1, Point(pos=2): 1, Point(pos=3): 1}
        assert rounded.size == 3

    def test_integral_cover_is_reproduced_for_d_1(self):
        family = make_family(1, [(1, 3)], [(5, 6)])
        cover = fractional({2: 1, 5: 1})
        assert round_cover(family, None, cover).values == {Point(pos=2): 1, Point(pos=5): 1}

    def test_denominator_scaled_to_a_multiple_of_d(self):
        # q = 3 becomes 6, every point is repeated twice and every third copy is kept
        family = make_family(2, [(1, 6)])
        cover = fractional({p: F(1, 3) for p in range(1, 7)})
        rounded = round_cover(family, WeightSystem(weights=(2,)), cover)
        assert sorted(p.pos for p in rounded.values) == [2, 3, 5, 6]
        assert rounded.size == 4

    def test_weighted_multiplicities(self):
        family = make_family(1, [(1, 2)])
        rounded = round_cover(family, WeightSystem(weights=(3,)), fractional({1: 3}))
        assert rounded.values == {Point(pos=1): 3}

    def test_empty_cover_of_empty_family(self):
        assert round_cover(EMPTY, None, FractionalCover()).size == 0

    def test_infeasible_cover_rejected(self):
        with pytest.raises(PreconditionError, match="edge 1"):
            round_cover(TRIANGLE, None, fractional({1: F(1, 2), 2: F(1, 2)}))

    def test_negative_cover_rejected(self):
        with pytest.raises(PreconditionError, match="negative"):
            check_fractional_cover(TRIANGLE, TRIANGLE.unit_weights(), fractional({1: -1, 2: 2, 3: 2}))

    @given(weighted_families())
    def test_optimal_cover_rounds_within_d(self, instance):
        family, weights = instance
        assert_rounds_within_d(family, weights)

    @pytest.mark.slow
    def test_seeded_corpus(self):
        for seed in range(100):
            spec = RandomFamilySpec(d=1 + seed % 3, separated=seed % 2 == 1, line_length=12,
                                    edge_count=2 + seed % 8, weight_max=3, seed=seed)
            family, weights = gen_random(spec)
            assert_rounds_within_d(family, weights)
