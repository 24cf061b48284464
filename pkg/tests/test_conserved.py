"""Tests for conserved.py."""

import math

import pytest

import worked_examples as ex
from conserved import SSYTableau, content_energy, energy_kappa, rsk_tableau
from crystal import elements
from errors import ArgumentError, ConsistencyError
from evolution import AutomatonState, evolve
from solitons import SolitonLabel, SolitonPlacement, amplitude_histogram, extract_solitons, inject
from state_io import parse_ascii
from verify import KAPPA_CHOICES, random_state


class TestEnergyKappa:
    """Tests for energy_kappa()."""

    @pytest.mark.parametrize("kappa", [1, 2, 3, 4, 5, 6])
    def test_two_soliton_rows(self, two_soliton_states, kappa):
        """E_kappa is (2, 3, 3, ...) on every row of the two-soliton run."""
        for state in two_soliton_states:
            assert energy_kappa(state, kappa) == ex.energy_at(ex.TWO_SOLITON_ENERGIES, kappa)

    @pytest.mark.parametrize("kappa", [1, 2, 3, 4, 5, 6])
    def test_double_scattering_rows(self, double_scattering_states, kappa):
        """E_kappa is (2, 4, 5, 6, ...) before, between and after both collisions."""
        for state in double_scattering_states:
            assert energy_kappa(state, kappa) == ex.energy_at(ex.DOUBLE_SCATTERING_ENERGIES, kappa)

    def test_infinity_counts_balls(self, double_scattering_states):
        """E_infinity is the number of balls."""
        assert energy_kappa(double_scattering_states[0], math.inf) == 6

    def test_vacuum(self):
        """The vacuum has zero energy."""
        assert energy_kappa(AutomatonState.vacuum(2, [1, 3, 2]), 2) == 0

    def test_conserved_on_random_states(self, rng):
        """E_kappa does not change under any T_kappa'."""
        for _ in range(40):
            state = random_state(rng, rng.randint(1, 3), rng.randint(1, 8))
            stepped = evolve(state, rng.choice(KAPPA_CHOICES))[0]
            for kappa in (1, 2, 3, math.inf):
                assert energy_kappa(stepped, kappa) == energy_kappa(state, kappa)


class TestContentEnergy:
    """Tests for content_energy()."""

    def test_two_solitons(self):
        """Amplitudes 1 and 2 give (2, 3, 3)."""
        assert [content_energy({1: 1, 2: 1}, k) for k in (1, 2, 3)] == [2, 3, 3]

    def test_infinite_kappa(self):
        """min(l, inf) is l."""
        assert content_energy({2: 1, 4: 1}, math.inf) == 6

    def test_empty(self):
        """No solitons, no energy."""
        assert content_energy({}, 3) == 0

    @pytest.mark.parametrize("histogram", [{0: 1}, {2: -1}])
    def test_rejects_bad_entries(self, histogram):
        """Amplitudes are positive and counts non-negative."""
        with pytest.raises(ArgumentError):
            content_energy(histogram, 2)

    def test_matches_sweep_on_separated_states(self, double_scattering_states):
        """For asymptotic states E_kappa is sum_l min(l, kappa) N_l."""
        for t in ex.DOUBLE_SCATTERING_LABELS:
            state = double_scattering_states[t]
            histogram = amplitude_histogram(extract_solitons(state, separation_threshold=1))
            for kappa in KAPPA_CHOICES:
                assert energy_kappa(state, kappa) == content_energy(histogram, kappa)


class TestSSYTableau:
    """Tests for SSYTableau."""

    def test_row_insertion(self):
        """Inserting 2, 1, 1 bumps the 2 into the second row."""
        tableau = SSYTableau().insert_word([2, 1, 1])
        assert tableau.to_lists() == [[1, 1], [2]]
        assert tableau.shape == (2, 1)
        assert tableau.content() == [1, 1, 2]

    def test_equal_letters_do_not_bump(self):
        """Only strictly larger entries are bumped."""
        assert SSYTableau().insert_word([1, 1, 1]).to_lists() == [[1, 1, 1]]

    @pytest.mark.parametrize(
        "rows",
        [
            ((1, 2), (1,)),
            ((1,), (2, 3)),
            ((2, 1),),
            ((1,), ()),
        ],
    )
    def test_rejects_invalid_shapes(self, rows):
        """Rows weakly increase, columns strictly increase and the shape is a partition."""
        with pytest.raises(ConsistencyError):
            SSYTableau(rows)


class TestRskTableau:
    """Tests for rsk_tableau()."""

    @pytest.mark.parametrize(
        "rows,expected",
        [
            (ex.TWO_SOLITON_ROWS, ex.TWO_SOLITON_TABLEAU),
            (ex.OVERTAKING_ROWS, ex.OVERTAKING_TABLEAU),
            (ex.DOUBLE_SCATTERING_ROWS, ex.DOUBLE_SCATTERING_TABLEAU),
        ],
    )
    def test_worked_runs(self, rows, expected):
        """Every row of a run has the same tableau."""
        for row in rows:
            assert rsk_tableau(parse_ascii(row, ex.RANK)).to_lists() == expected

    def test_vacuum_is_empty(self):
        """The vacuum gives the empty tableau."""
        assert rsk_tableau(AutomatonState.vacuum(2, [2, 2])).rows == ()

    def test_invariant_on_random_states(self, rng):
        """The tableau is conserved by T_kappa."""
        for _ in range(40):
            state = random_state(rng, rng.randint(1, 3), rng.randint(1, 8))
            stepped = evolve(state, rng.choice(KAPPA_CHOICES))[0]
            assert rsk_tableau(stepped) == rsk_tableau(state)

    @pytest.mark.parametrize("theta", [1, 2])
    @pytest.mark.parametrize("rank", [1, 2, 3])
    def test_one_soliton_is_its_label(self, theta, rank):
        """A lone soliton reads back as the single row of its label."""
        for k in range(1, 5):
            labels = [SolitonLabel.from_element(b) for b in elements(k, rank - 1)] if rank > 1 else [
                SolitonLabel.trivial(k)
            ]
            gaps = (2, 2 + (k % 2 if theta == 2 else 0))
            capacities = (theta,) * ((sum(gaps) + k) // theta)
            for lab in labels:
                state = inject(SolitonPlacement((lab,), gaps, capacities, rank, 0, theta))
                assert rsk_tableau(state).to_lists() == [lab.letters()]
