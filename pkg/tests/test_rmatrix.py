"""Tests for rmatrix.py."""

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from crystal import CrystalElement, TensorWord, elements, tensor_e, tensor_f
from errors import ArgumentError, SizeGuardError
from rmatrix import (
    apply_r,
    combinatorial_r,
    crystal_graph_r_oracle,
    energy,
    energy_axiom_failures,
    yang_baxter_check,
)


def word(text, rank):
    return CrystalElement.from_word(text, rank)


@st.composite
def tensor_pairs(draw, max_rank=3, max_capacity=4):
    rank = draw(st.integers(1, max_rank))
    pair = []
    for _ in range(2):
        capacity = draw(st.integers(1, max_capacity))
        letters = draw(st.lists(st.integers(1, rank + 1), min_size=capacity, max_size=capacity))
        pair.append(CrystalElement.from_letters(letters, rank))
    return pair[0], pair[1]


class TestCombinatorialR:
    """Tests for combinatorial_r()."""

    def test_unwinding_example(self):
        """13⊗2 -> 1⊗23 with one unwinding line."""
        result = combinatorial_r(word("13", 2), word("2", 2))
        assert result.pair() == (word("1", 2), word("23", 2))
        assert result.unwinding == 1
        assert result.winding == 0
        assert result.energy == -1

    def test_winding_example(self):
        """23⊗2 -> 3⊗22 with one winding line."""
        result = combinatorial_r(word("23", 2), word("2", 2))
        assert result.pair() == (word("3", 2), word("22", 2))
        assert result.unwinding == 0
        assert result.winding == 1
        assert result.energy == 0

    def test_larger_example(self):
        """1223⊗13 -> 23⊗1123 in rank 3."""
        assert apply_r(word("1223", 3), word("13", 3)) == (word("23", 3), word("1123", 3))

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    @pytest.mark.parametrize("l", [1, 2, 3, 4, 5])
    def test_vacua_swap_with_zero_energy(self, k, l):
        """u_k ⊗ u_l -> u_l ⊗ u_k and H = 0."""
        u_k, u_l = CrystalElement.vacuum(k, 2), CrystalElement.vacuum(l, 2)
        assert apply_r(u_k, u_l) == (u_l, u_k)
        assert energy(u_k, u_l) == 0

    def test_rank_one_table(self):
        """R on B_2 ⊗ B_1 of rank 1."""
        expected = {
            ("11", "1"): ("1", "11"),
            ("11", "2"): ("1", "12"),
            ("12", "1"): ("2", "11"),
            ("12", "2"): ("1", "22"),
            ("22", "1"): ("2", "12"),
            ("22", "2"): ("2", "22"),
        }
        for (a, b), (c, d) in expected.items():
            assert apply_r(word(a, 1), word(b, 1)) == (word(c, 1), word(d, 1))

    def test_rank_mismatch(self):
        """Factors of different rank raise ArgumentError."""
        with pytest.raises(ArgumentError):
            combinatorial_r(word("1", 1), word("1", 2))

    @given(tensor_pairs())
    def test_applying_twice_is_identity(self, pair):
        """R on B_l ⊗ B_k undoes R on B_k ⊗ B_l."""
        b1, b2 = pair
        assert apply_r(*apply_r(b1, b2)) == (b1, b2)

    @given(tensor_pairs(), st.integers(0, 2**32))
    def test_seeker_order_does_not_matter(self, pair, seed):
        """Shuffling the seeker dots leaves the image and line counts unchanged."""
        b1, b2 = pair
        assert combinatorial_r(b1, b2, random.Random(seed)) == combinatorial_r(b1, b2)

    @given(tensor_pairs())
    def test_capacities_and_contents_are_preserved(self, pair):
        """Outputs swap capacities and keep the total letter content."""
        b1, b2 = pair
        c1, c2 = apply_r(b1, b2)
        assert (c1.capacity, c2.capacity) == (b2.capacity, b1.capacity)
        assert tuple(x + y for x, y in zip(c1.mult, c2.mult)) == tuple(
            x + y for x, y in zip(b1.mult, b2.mult)
        )

    @given(tensor_pairs(), st.data())
    def test_commutes_with_kashiwara_operators(self, pair, data):
        """R(f_i w) = f_i R(w) and R(e_i w) = e_i R(w)."""
        b1, b2 = pair
        i = data.draw(st.integers(0, b1.rank))
        image = TensorWord.of(*apply_r(b1, b2))
        w = TensorWord.of(b1, b2)
        for op in (tensor_f, tensor_e):
            moved = op(i, w)
            moved_image = op(i, image)
            assert (moved is None) == (moved_image is None)
            if moved is not None:
                assert apply_r(moved[0], moved[1]) == (moved_image[0], moved_image[1])


class TestEnergy:
    """Tests for energy()."""

    def test_examples(self):
        """Unwinding example has H = -1, winding example H = 0."""
        assert energy(word("13", 2), word("2", 2)) == -1
        assert energy(word("23", 2), word("2", 2)) == 0

    @pytest.mark.parametrize("rank", [1, 2])
    @pytest.mark.parametrize("k", [1, 2, 3])
    @pytest.mark.parametrize("l", [1, 2, 3])
    def test_energy_axiom(self, rank, k, l):
        """H changes under e_i by the three-case rule and not at all for i != 0."""
        assert energy_axiom_failures(k, l, rank) == []

    @pytest.mark.parametrize("rank", [1, 2, 3])
    @pytest.mark.parametrize("k", [1, 2, 3])
    @pytest.mark.parametrize("l", [1, 2, 3])
    def test_energy_of_image_is_unchanged(self, rank, k, l):
        """H(b1 ⊗ b2) equals H of the swapped R image."""
        for b1 in elements(k, rank):
            for b2 in elements(l, rank):
                assert energy(*apply_r(b1, b2)) == energy(b1, b2)


class TestCrystalGraphOracle:
    """Tests for crystal_graph_r_oracle()."""

    def test_small_table(self):
        """oracle(2, 1, 2) covers all 18 elements and agrees with the winding rule."""
        table = crystal_graph_r_oracle(2, 1, 2)
        assert len(table) == 18
        for (b1, b2), image in table.items():
            assert apply_r(b1, b2) == image

    def test_reproduces_examples(self):
        """The oracle gives the two worked R examples."""
        assert crystal_graph_r_oracle(2, 1, 2)[(word("13", 2), word("2", 2))] == (word("1", 2), word("23", 2))
        assert crystal_graph_r_oracle(2, 1, 2)[(word("23", 2), word("2", 2))] == (word("3", 2), word("22", 2))

    @pytest.mark.parametrize("rank", [1, 2, 3])
    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    @pytest.mark.parametrize("l", [1, 2, 3, 4])
    def test_matches_winding_rule_exhaustively(self, rank, k, l):
        """Winding rule and oracle agree on every element."""
        table = crystal_graph_r_oracle(k, l, rank)
        for b1 in elements(k, rank):
            for b2 in elements(l, rank):
                assert table[(b1, b2)] == apply_r(b1, b2)

    def test_equal_capacities_square_to_identity(self):
        """R on B_k ⊗ B_k composed with itself is the identity."""
        table = crystal_graph_r_oracle(2, 2, 2)
        for key, image in table.items():
            assert table[image] == key

    def test_size_guard(self):
        """Enumerations beyond the guard raise SizeGuardError."""
        with pytest.raises(SizeGuardError):
            crystal_graph_r_oracle(4, 4, 3, max_size=100)

    def test_rejects_zero_capacity(self):
        """Capacities must be positive."""
        with pytest.raises(ArgumentError):
            crystal_graph_r_oracle(0, 1, 2)


class TestYangBaxter:
    """Tests for yang_baxter_check()."""

    def test_single_letter_crystals(self):
        """(1, 1, 1) with M = 1 holds."""
        assert yang_baxter_check(1, 1, 1, 1)

    @pytest.mark.parametrize("rank", [1, 2])
    def test_exhaustive_small(self, rank):
        """Holds for every (k, l, m) in {1, 2, 3}^3."""
        for k in (1, 2, 3):
            for l in (1, 2, 3):
                for m in (1, 2, 3):
                    assert yang_baxter_check(k, l, m, rank)

    def test_corrupted_r_fails(self):
        """Changing one output of R breaks the equation."""
        vacuum = CrystalElement.vacuum(1, 1)
        lowered = CrystalElement.from_word("2", 1)

        def corrupted(b1, b2):
            if (b1, b2) == (vacuum, vacuum):
                return lowered, vacuum
            return apply_r(b1, b2)

        assert not yang_baxter_check(1, 1, 1, 1, r=corrupted)
