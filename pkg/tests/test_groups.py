import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oaenum.core import design
from oaenum.groups import (CapExceeded, PermGroup, Permutation, _chain_order,
                           _close_generators, cell_index, frequency_vector,
                           full_group_Gsk, lex_min_in_orbit,
                           stabilizer_of_design)

from .helpers import full_factorial, half_fraction


class TestPermutation:
    def test_compose_order(self):
        # (self * other)(i) = self(other(i))
        a = Permutation(3, (1, 2, 0))
        b = Permutation(3, (0, 2, 1))
        assert a.compose(b).image == (1, 0, 2)

    def test_inverse(self):
        a = Permutation(4, (2, 0, 3, 1))
        assert a.compose(a.inverse()).image == (0, 1, 2, 3)

    def test_line_roundtrip(self):
        a = Permutation(4, (2, 0, 3, 1))
        assert Permutation.from_line(a.to_line()) == a

    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            Permutation(3, (0, 0, 2))


class TestChainOrder:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 7), st.data())
    def test_matches_closure(self, degree, data):
        gens = []
        for _ in range(data.draw(st.integers(1, 3))):
            p = data.draw(st.permutations(list(range(degree))))
            gens.append(tuple(p))
        assert (_chain_order(degree, gens)
                == len(_close_generators(degree, gens, 10 ** 7)))

    def test_symmetric_group(self):
        gens = [(1, 0, 2, 3, 4), (1, 2, 3, 4, 0)]
        assert _chain_order(5, gens) == 120


class TestFullGroup:
    def test_order_two_level(self):
        assert full_group_Gsk(2, 3).order() == 48
        assert full_group_Gsk(2, 4).order() == 384
        assert full_group_Gsk(2, 5).order() == 3840

    def test_order_three_level(self):
        assert full_group_Gsk(3, 2).order() == 72

    def test_elements_are_distinct(self):
        table = full_group_Gsk(2, 3).element_table()
        assert len({tuple(int(v) for v in row) for row in table}) == 48

    def test_table_closed_under_composition(self):
        g = full_group_Gsk(2, 2)
        table = [tuple(int(v) for v in row) for row in g.element_table()]
        elems = set(table)
        for a in table:
            for b in table:
                assert tuple(a[v] for v in b) in elems

    def test_generators_generate_table(self):
        g = full_group_Gsk(2, 3)
        gens = [p.image for p in g.generators]
        assert len(_close_generators(g.degree, gens, 10 ** 6)) == 48

    def test_degree_cap(self):
        with pytest.raises(CapExceeded):
            full_group_Gsk(2, 11)


class TestCellIndex:
    def test_examples(self):
        assert cell_index((0, 0), 2) == 1
        assert cell_index((1, 2), 3) == 6
        assert cell_index((1, 1, 1), 2) == 8

    def test_rejects_bad_level(self):
        with pytest.raises(ValueError):
            cell_index((0, 3), 3)


class TestFrequencyVector:
    def test_full_factorial_is_all_ones(self):
        f = frequency_vector(full_factorial(2, 2))
        assert f.tolist() == [1, 1, 1, 1]

    def test_replicates_scale(self):
        f = frequency_vector(full_factorial(2, 2, replicates=3))
        assert f.tolist() == [3, 3, 3, 3]

    def test_half_fraction(self):
        f = frequency_vector(half_fraction())
        # even-parity cells of the 2^3 factorial: 000, 011, 101, 110
        assert f.tolist() == [1, 0, 0, 1, 0, 1, 1, 0]


class TestStabilizer:
    def test_full_factorial_is_fixed_by_everything(self):
        g = full_group_Gsk(2, 2)
        assert stabilizer_of_design(g, full_factorial(2, 2)).order() == 8

    def test_half_fraction_stabilizer(self):
        # column permutations and even sign-flip patterns: 6 * 4
        g = full_group_Gsk(2, 3)
        assert stabilizer_of_design(g, half_fraction()).order() == 24

    def test_stabilizer_fixes_frequencies(self):
        g = full_group_Gsk(2, 3)
        d = half_fraction()
        f = frequency_vector(d)
        stab = stabilizer_of_design(g, d)
        for row in stab.element_table():
            assert np.array_equal(f[row], f)


class TestLexMinInOrbit:
    def test_minimum_accepted(self):
        g = full_group_Gsk(2, 1)
        assert lex_min_in_orbit((0, 1), g)
        assert not lex_min_in_orbit((1, 0), g)

    def test_constant_vector(self):
        g = full_group_Gsk(2, 2)
        assert lex_min_in_orbit((2, 2, 2, 2), g)

    @settings(max_examples=30, deadline=None)
    @given(st.data())
    def test_exactly_one_minimum_per_orbit(self, data):
        g = full_group_Gsk(2, 2)
        vec = tuple(data.draw(st.integers(0, 2)) for _ in range(4))
        table = g.element_table()
        orbit = {tuple(int(v) for v in np.asarray(vec)[row])
                 for row in table}
        mins = [v for v in orbit if lex_min_in_orbit(v, g)]
        assert mins == [min(orbit)]

    def test_chunking_agrees(self):
        rng = random.Random(5)
        g = full_group_Gsk(2, 3)
        for _ in range(10):
            vec = tuple(rng.randrange(3) for _ in range(8))
            assert (lex_min_in_orbit(vec, g, chunk=7)
                    == lex_min_in_orbit(vec, g))


class TestOrbitOfPoint:
    def test_transitive_on_cells(self):
        g = full_group_Gsk(2, 2)
        assert g.orbit(0) == (0, 1, 2, 3)

    def test_trivial_group(self):
        g = PermGroup(4)
        assert g.orbit(2) == (2,)
