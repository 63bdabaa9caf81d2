# tests/test_generators.py

import itertools

import pytest
from hypothesis import given, strategies as st

from src.dinterval_lab.config import settings
from src.dinterval_lab.core.errors import GeneratorRejectionError, GeneratorSizeError, PreconditionError
from src.dinterval_lab.core.geometry import covers_count, max_degree, validate
from src.dinterval_lab.core.models import Point, RandomFamilySpec
from src.dinterval_lab.generators.random_family import gen_random
from src.dinterval_lab.generators.threshold import gen_length_threshold, threshold_edge_count
from src.dinterval_lab.generators.walecki import gen_walecki, hamiltonian_paths
from src.dinterval_lab.solvers.exact import chi_e, nu_w, tau_w
from src.dinterval_lab.solvers.fractional import tau_star_w


class TestWalecki:
    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
    def test_paths_decompose_the_complete_graph(self, d):
        paths = hamiltonian_paths(d)
        assert len(paths) == d
        pairs = []
        for path in paths:
            assert sorted(path) == list(range(1, 2 * d + 1))
            pairs.extend(frozenset(p) for p in zip(path, path[1:]))
        assert len(pairs) == len(set(pairs)) == d * (2 * d - 1)

    def test_d_2_paths(self):
        assert hamiltonian_paths(2) == [[1, 2, 4, 3], [2, 3, 1, 4]]

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_invariants(self, d):
        family = gen_walecki(d)
        assert validate(family) == []
        assert family.n_edges == 2 * d
        assert family.line_lengths == (2 * d + 1,) * d
        assert nu_w(family)[0] == 1
        assert tau_w(family)[0] == d
        assert tau_star_w(family)[0] == d
        assert chi_e(family)[0] == 2 * d
        assert max_degree(family) == 2

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_even_positions_cover(self, d):
        family = gen_walecki(d)
        cover = {Point(line=0, pos=p): 1 for p in range(2, 2 * d + 1, 2)}
        assert all(covers_count(edge, cover) >= 1 for edge in family.edges)

    def test_d_1_rejected(self):
        with pytest.raises(PreconditionError):
            gen_walecki(1)


class TestLengthThreshold:
    def test_no_edge_above_the_whole_line(self):
        family = gen_length_threshold(1, 1, 4)
        assert family.n_edges == 0

    def test_intervals(self):
        family = gen_length_threshold(1, 2, 4)
        assert [(e.components[0].lo, e.components[0].hi) for e in family.edges] == [(1, 3), (2, 4)]

    def test_edge_count(self):
        assert threshold_edge_count(2, 2, 8) == 172
        family = gen_length_threshold(2, 2, 8)
        assert family.n_edges == 172
        assert all(edge.size == 5 for edge in family.edges)
        assert len(set(family.edges)) == 172
        assert validate(family) == []

    def test_all_edges_count(self):
        assert threshold_edge_count(2, 2, 4, minimal=False) == 90
        assert gen_length_threshold(2, 2, 4, minimal=False).n_edges == 90

    def test_two_lines_of_two_points(self):
        minimal = gen_length_threshold(2, 1, 2)
        every = gen_length_threshold(2, 1, 2, minimal=False)
        assert (minimal.n_edges, every.n_edges) == (4, 5)
        for family in (minimal, every):
            assert nu_w(family)[0] == 1
            assert tau_w(family)[0] == 2

    def test_minimal_edges_form_an_antichain(self):
        family = gen_length_threshold(2, 2, 4)
        for a, b in itertools.permutations(family.edges, 2):
            assert not set(a.points()) <= set(b.points())

    @pytest.mark.parametrize("d, n, g", [(1, 1, 3), (1, 2, 4), (1, 3, 6), (2, 1, 2), (2, 2, 2)])
    def test_minimality_keeps_cover_and_matching(self, d, n, g):
        minimal = gen_length_threshold(d, n, g)
        every = gen_length_threshold(d, n, g, minimal=False)
        assert nu_w(minimal)[0] == nu_w(every)[0]
        assert tau_w(minimal)[0] == tau_w(every)[0]

    @pytest.mark.slow
    def test_minimality_keeps_cover_and_matching_on_two_lines_of_four(self):
        minimal = gen_length_threshold(2, 2, 4)
        every = gen_length_threshold(2, 2, 4, minimal=False)
        assert nu_w(minimal)[0] == nu_w(every)[0]
        assert tau_w(minimal)[0] == tau_w(every)[0]

    @pytest.mark.parametrize("d, n, g", [(2, 3, 8), (2, 0, 4), (0, 1, 4)])
    def test_bad_parameters(self, d, n, g):
        with pytest.raises(PreconditionError):
            gen_length_threshold(d, n, g)

    @pytest.mark.slow
    def test_threshold_cover_against_fractional_matching(self):
        family = gen_length_threshold(2, 2, 8)
        fractional = tau_star_w(family)[0]
        assert fractional <= 4
        assert tau_w(family)[0] / fractional >= 1

    def test_size_guard(self, monkeypatch):
        monkeypatch.setattr(settings, "MAX_GENERATED_EDGES", 100)
        with pytest.raises(GeneratorSizeError, match="172 edges"):
            gen_length_threshold(2, 2, 8)


class TestRandomFamily:
    def test_deterministic(self):
        spec = RandomFamilySpec(d=3, separated=True, edge_count=8, weight_max=5, seed=42)
        assert gen_random(spec) == gen_random(spec)

    def test_seed_changes_the_family(self):
        first = gen_random(RandomFamilySpec(seed=1))
        second = gen_random(RandomFamilySpec(seed=2))
        assert first != second

    @given(
        st.integers(1, 4),
        st.booleans(),
        st.integers(4, 15),
        st.integers(1, 10),
        st.integers(0, 2**64 - 1),
    )
    def test_valid(self, d, separated, line_length, edge_count, seed):
        spec = RandomFamilySpec(d=d, separated=separated, line_length=line_length,
                                edge_count=edge_count, component_length_max=3, weight_max=4, seed=seed)
        family, weights = gen_random(spec)
        assert validate(family, weights) == []
        assert family.n_edges == edge_count
        assert all(1 <= w <= 4 for w in weights.weights)

    def test_rejection(self):
        with pytest.raises(GeneratorRejectionError, match="edge 0"):
            gen_random(RandomFamilySpec(), max_retries=0)

    def test_rejection_uses_settings(self, monkeypatch):
        monkeypatch.setattr(settings, "RANDOM_MAX_RETRIES", 0)
        with pytest.raises(GeneratorRejectionError):
            gen_random(RandomFamilySpec())

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            RandomFamilySpec(line_length=2, component_length_min=3, component_length_max=3)
