import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oaenum.core import (Design, cell_of_row, corresponding_design, design,
                         dump_oad, expand_indicator, from_signed,
                         lex_sort_rows, parse_oad, run_profile, to_signed,
                         verify_strength)

from .helpers import full_factorial, half_fraction


def small_designs(max_runs=10, max_factors=4, levels=(2, 3)):
    def build(draw):
        s = draw(st.sampled_from(levels))
        k = draw(st.integers(1, max_factors))
        n = draw(st.integers(1, max_runs))
        rows = draw(st.lists(
            st.tuples(*[st.integers(0, s - 1)] * k),
            min_size=n, max_size=n))
        return design(rows, s)
    return st.composite(build)()


class TestValidation:
    def test_entry_out_of_range(self):
        with pytest.raises(ValueError):
            design([(0, 2)], 2)

    def test_negative_entry(self):
        with pytest.raises(ValueError):
            design([(0, -1)], 2)

    def test_ragged_rows(self):
        with pytest.raises(ValueError):
            Design(runs=2, factors=2, levels=2, rows=((0, 0), (0,)))

    def test_no_runs(self):
        with pytest.raises(ValueError):
            design([], 2)

    def test_single_level(self):
        with pytest.raises(ValueError):
            design([(0,)], 1)


class TestSignedEncoding:
    def test_zero_maps_to_plus_one(self):
        sd = to_signed(design([(0, 1)], 2))
        assert sd.rows == ((1, -1),)

    def test_three_levels_rejected(self):
        with pytest.raises(ValueError):
            to_signed(design([(2,)], 3))

    @settings(max_examples=60, deadline=None)
    @given(small_designs(levels=(2,)))
    def test_roundtrip(self, d):
        assert from_signed(to_signed(d)) == d


class TestIndicator:
    def test_expand_shape(self):
        im = expand_indicator(design([(0, 1, 2)], 3))
        assert im.rows == ((1, 0, 0, 1, 0, 0),)

    def test_two_level_block_width_one(self):
        im = expand_indicator(design([(0,), (1,)], 2))
        assert im.rows == ((1,), (0,))

    def test_reject_double_bit(self):
        im = expand_indicator(design([(0, 1, 2)], 3))
        bad = type(im)(runs=1, factors=3, levels=3,
                       rows=((1, 1, 0, 0, 0, 0),))
        with pytest.raises(ValueError):
            corresponding_design(bad)

    @settings(max_examples=60, deadline=None)
    @given(small_designs())
    def test_roundtrip(self, d):
        assert corresponding_design(expand_indicator(d)) == d


class TestStrength:
    def test_full_factorial_has_maximal_strength(self):
        d = full_factorial(3, 2)
        assert verify_strength(d, 3)

    def test_half_fraction_strength_two_not_three(self):
        d = half_fraction()
        assert verify_strength(d, 2)
        assert not verify_strength(d, 3)

    def test_replicated_factorial(self):
        d = full_factorial(2, 2, replicates=3)
        assert verify_strength(d, 2)

    def test_unbalanced_column(self):
        assert not verify_strength(design([(0,), (0,)], 2), 1)

    def test_indivisible_run_count(self):
        # 6 runs cannot be strength 2 at s = 2
        d = design([(0, 0), (0, 1), (1, 0), (1, 1), (0, 0), (1, 1)], 2)
        assert not verify_strength(d, 2)

    def test_strength_zero_vacuous(self):
        assert verify_strength(design([(0,), (0,)], 2), 0)

    def test_t_beyond_k_rejected(self):
        with pytest.raises(ValueError):
            verify_strength(design([(0,)], 2), 2)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 3), st.sampled_from([2, 3]), st.integers(1, 3))
    def test_replicated_factorial_all_strengths(self, k, s, r):
        d = full_factorial(k, s, replicates=r)
        for t in range(k + 1):
            assert verify_strength(d, t)


class TestRunProfile:
    def test_cell_of_row_examples(self):
        assert cell_of_row((0, 0), 2) == 1
        assert cell_of_row((1, 1), 2) == 4
        assert cell_of_row((1, 2), 3) == 6

    def test_profile_of_replicated_factorial(self):
        p = run_profile(full_factorial(2, 2, replicates=2))
        assert p.h == 4
        assert p.multiplicities == (2, 2, 2, 2)
        assert p.first_rows == (1, 3, 5, 7)
        assert p.cells == (1, 2, 3, 4)

    def test_profile_counts_sum_to_runs(self):
        d = design([(0, 1), (0, 1), (1, 0)], 2)
        p = run_profile(d)
        assert sum(p.multiplicities) == d.runs
        assert p.h == 2

    def test_lex_sort_is_idempotent(self):
        d = design([(1, 0), (0, 1), (0, 0)], 2)
        once = lex_sort_rows(d)
        assert once.rows == ((0, 0), (0, 1), (1, 0))
        assert lex_sort_rows(once) == once


class TestOadText:
    def test_round_trip(self):
        d = full_factorial(2, 3)
        assert parse_oad(dump_oad(d)) == d

    def test_header_shape(self):
        text = dump_oad(half_fraction())
        assert text.splitlines()[0] == "4 3 2"

    def test_round_trip_property(self):
        @given(small_designs())
        @settings(max_examples=80, deadline=None)
        def check(d):
            assert parse_oad(dump_oad(d)) == d
        check()

    def test_rejects_bad_header(self):
        with pytest.raises(ValueError):
            parse_oad("4 3\n0 0 0\n")
        with pytest.raises(ValueError):
            parse_oad("")

    def test_rejects_run_count_mismatch(self):
        with pytest.raises(ValueError):
            parse_oad("2 2 2\n0 0\n")

    def test_rejects_width_mismatch(self):
        with pytest.raises(ValueError):
            parse_oad("1 3 2\n0 0\n")

    def test_rejects_out_of_range_level(self):
        with pytest.raises(ValueError):
            parse_oad("1 2 2\n0 2\n")
        with pytest.raises(ValueError):
            parse_oad("1 2 2\n0 -1\n")
