"""Tests for tau.py."""

import math

import numpy as np
import pytest

import tau
from errors import ArgumentError, SolutionValidityError
from evolution import evolve
from solitons import SolitonLabel, amplitude_histogram, extract_solitons
from state_io import render_ascii
from tau import (
    Profile,
    SignedRangeSum,
    TauSolitonParams,
    YGrid,
    field_grid,
    fields_from_Y,
    phase_a,
    phase_k,
    pl_residual,
    state_from_fields,
    tau_trajectory,
    tau_y,
    y_grid,
)
from verify import prop_tau, prop_tau_pairs


def one_soliton(amplitude, phase, theta=1, kappa=math.inf):
    return TauSolitonParams(
        rank=1,
        amplitudes=(amplitude,),
        contents=((amplitude,),),
        phases=(phase,),
        theta=Profile.constant(theta),
        kappa=Profile.constant(kappa),
    )


@pytest.fixture
def collision_params():
    """Amplitude 2 behind amplitude 1, M = 1, capacity-1 boxes, T_infinity."""
    return TauSolitonParams.from_labels(
        [SolitonLabel.trivial(2), SolitonLabel.trivial(1)],
        [-5, -15],
        theta=Profile.constant(1),
    )


class TestSignedRangeSum:
    """Tests for SignedRangeSum."""

    def test_telescoping(self):
        """sum^n - sum^(n-1) is the n-th term for every n in [-50, 50]."""
        total = SignedRangeSum(lambda m: (m * m) % 7 - 2)
        for n in range(-50, 51):
            assert total(n) - total(n - 1) == (n * n) % 7 - 2

    def test_zero_and_negative_ranges(self):
        """sum^0 = 0 and sum^-2 = -(x_-1 + x_0)."""
        total = SignedRangeSum(lambda m: m + 10)
        assert total(0) == 0
        assert total(-2) == -(9 + 10)
        assert total(3) == 11 + 12 + 13

    def test_table(self):
        """table() agrees with pointwise evaluation."""
        total = SignedRangeSum(lambda m: 2 * m - 1)
        assert list(total.table(-6, 6)) == [total(n) for n in range(-6, 7)]


class TestProfile:
    """Tests for Profile."""

    def test_values_then_default(self):
        """Listed values start at start; everything else is the default."""
        profile = Profile.from_mapping({"values": [1, 2], "start": 3, "default": "inf"})
        assert [profile.at(n) for n in (2, 3, 4, 5)] == [math.inf, 1, 2, math.inf]

    def test_scalar_is_constant(self):
        """A bare number is a constant profile."""
        assert Profile.from_mapping(2).at(-100) == 2

    def test_mapping_round_trip(self):
        """to_mapping() feeds back into from_mapping()."""
        profile = Profile((2, 3), 0, math.inf)
        assert Profile.from_mapping(profile.to_mapping()) == profile

    @pytest.mark.parametrize("bad", [0, -1])
    def test_rejects_non_positive(self, bad):
        """Capacities are at least 1."""
        with pytest.raises(ArgumentError):
            Profile((bad,))


class TestTauSolitonParams:
    """Tests for TauSolitonParams."""

    def test_from_labels(self):
        """Contents are the label multiplicities, reversed."""
        params = TauSolitonParams.from_labels([SolitonLabel.from_word("1123", 3)], [0])
        assert params.contents == ((1, 1, 2),)
        assert params.amplitudes == (4,)
        assert params.label(0).word() == "1123"

    def test_infinite_kappa_saturates(self):
        """kappa = inf is ball count + 1."""
        assert one_soliton(3, 0).kappa_at(7) == 4

    def test_content_sum_is_periodic(self):
        """X(j) continues l with period M."""
        params = TauSolitonParams(2, (3,), ((1, 2),), (0,))
        assert [params.content_sum(0, j) for j in range(5)] == [0, 1, 3, 4, 6]

    def test_rejects_increasing_amplitudes(self):
        """Amplitudes must not increase."""
        with pytest.raises(ArgumentError):
            TauSolitonParams(1, (1, 2), ((1,), (2,)), (0, 0))

    def test_rejects_crossed_contents(self):
        """l^(1)_j >= l^(2)_j for every j."""
        with pytest.raises(ArgumentError):
            TauSolitonParams(2, (2, 2), ((0, 2), (1, 1)), (0, 0))

    def test_non_strict_allows_crossed_contents(self):
        """strict=False skips the ordering checks."""
        params = TauSolitonParams(2, (2, 2), ((0, 2), (1, 1)), (0, 0), strict=False)
        assert params.count == 2

    def test_rejects_wrong_sum(self):
        """Contents sum to the amplitude."""
        with pytest.raises(ArgumentError):
            TauSolitonParams(2, (3,), ((1, 1),), (0,))

    def test_rejects_infinite_theta(self):
        """Boxes have finite capacity."""
        with pytest.raises(ArgumentError):
            one_soliton(1, 0, theta=math.inf)

    def test_mapping_round_trip(self, collision_params):
        """to_mapping() feeds back into from_mapping()."""
        assert TauSolitonParams.from_mapping(collision_params.to_mapping()) == collision_params

    def test_missing_rank(self):
        """M is required."""
        with pytest.raises(ArgumentError):
            TauSolitonParams.from_mapping({"amplitudes": [1]})


class TestTauY:
    """Tests for tau_y(), phase_k() and phase_a()."""

    def test_no_solitons_is_zero(self):
        """With N = 0 only the empty choice contributes."""
        params = TauSolitonParams(2, (), (), ())
        assert all(tau_y(params, t, n, j) == 0 for t in range(-2, 3) for n in range(-2, 3) for j in (1, 2, 3))

    def test_one_soliton_closed_form(self):
        """N = 1 is max[0, K(t-1, n-1, j-1)]."""
        params = TauSolitonParams(
            2, (3,), ((2, 1),), (4,), theta=Profile((1, 3, 2), -1, 2), kappa=Profile.constant(2)
        )
        for t in range(-3, 4):
            for n in range(-4, 6):
                for j in (1, 2, 3):
                    assert tau_y(params, t, n, j) == max(0, phase_k(params, 0, t - 1, n - 1, j - 1))

    def test_two_soliton_phase(self):
        """A((1,1); j) = L^(2) + l^(2)_(j+1)."""
        params = TauSolitonParams(3, (3, 1), ((1, 1, 1), (0, 1, 0)), (0, 0))
        assert [phase_a(params, (1, 1), j) for j in range(4)] == [1, 2, 1, 1]
        assert phase_a(params, (1, 0), 2) == 0

    def test_monotone_in_phases(self, collision_params):
        """Raising a phase never lowers Y."""
        raised = TauSolitonParams.from_labels(
            [SolitonLabel.trivial(2), SolitonLabel.trivial(1)],
            [-4, -15],
            theta=Profile.constant(1),
        )
        for t in range(0, 5):
            for n in range(0, 20):
                assert tau_y(raised, t, n, 1) >= tau_y(collision_params, t, n, 1)

    def test_grid_matches_pointwise(self, collision_params):
        """The numpy grid agrees with tau_y everywhere."""
        grid = y_grid(collision_params, -2, 4, 0, 25)
        for t in range(-2, 5):
            for n in range(0, 26):
                for j in (1, 2):
                    assert grid.at(t, n, j) == tau_y(collision_params, t, n, j)

    def test_empty_window(self, collision_params):
        """t1 < t0 is rejected."""
        with pytest.raises(ArgumentError):
            y_grid(collision_params, 3, 2, 0, 5)


class TestFields:
    """Tests for fields_from_Y(), field_grid() and state_from_fields()."""

    def test_single_ball(self):
        """One ball at n = t - K_0 with the carrier holding it one box later."""
        params = one_soliton(1, -5)
        assert fields_from_Y(params, 0, 5) == ((1, 0), (0, 2))
        assert fields_from_Y(params, 0, 6) == ((0, 1), (1, 1))
        assert render_ascii(state_from_fields(params, 0, 1, 10)) == "1111211111"

    def test_block_moves_by_amplitude(self):
        """A block of two balls moves two boxes per step."""
        params = one_soliton(2, -5)
        assert render_ascii(state_from_fields(params, 0, 1, 10)) == "1112211111"
        assert render_ascii(state_from_fields(params, 1, 1, 10)) == "1111122111"

    def test_vacuum_params(self):
        """N = 0 gives the vacuum on any profile."""
        params = TauSolitonParams(2, (), (), (), theta=Profile((2, 3, 1), 1, 2))
        state = state_from_fields(params, 0, 1, 5)
        assert state.is_vacuum
        assert state.capacities == (2, 3, 1, 2, 2)

    def test_grid_matches_pointwise(self, collision_params):
        """field_grid agrees with fields_from_Y."""
        grid = field_grid(collision_params, 0, 3, 1, 25)
        for t in range(0, 4):
            for n in range(1, 26):
                assert (grid.box(t, n), grid.carrier(t, n)) == fields_from_Y(collision_params, t, n)

    def test_negative_occupation_is_reported(self, monkeypatch):
        """A negative field raises with its site instead of being clipped."""
        values = np.zeros((2, 2, 2), dtype=np.int64)
        values[0, 0, 0] = 1
        monkeypatch.setattr(tau, "y_grid", lambda *args: YGrid(values, 0, 1))
        with pytest.raises(SolutionValidityError) as excinfo:
            field_grid(TauSolitonParams(1, (), (), ()), 0, 0, 1, 1)
        assert excinfo.value.site == (0, 1, 1)


class TestAgreementWithEvolution:
    """Tests for tau_trajectory() and pl_residual()."""

    def test_one_soliton_trajectory(self):
        """A block of three balls evolves like the automaton."""
        params = one_soliton(3, -5)
        states = tau_trajectory(params, 0, 8, 1, 40)
        for t in range(8):
            assert evolve(states[t], math.inf)[0].same_configuration(states[t + 1])

    def test_collision_trajectory(self, collision_params):
        """The two-soliton solution is a run of T_infinity through the collision."""
        states = tau_trajectory(collision_params, 0, 25, 1, 70)
        for t in range(25):
            assert evolve(states[t], math.inf)[0].same_configuration(states[t + 1])

    def test_amplitudes_survive_collision(self, collision_params):
        """With M = 1 both amplitudes come out of the collision unchanged."""
        states = tau_trajectory(collision_params, 0, 25, 1, 70)
        before = extract_solitons(states[0])
        after = extract_solitons(states[-1])
        assert before.asymptotic and after.asymptotic
        assert amplitude_histogram(before) == amplitude_histogram(after) == {2: 1, 1: 1}

    def test_residual_is_zero(self, collision_params):
        """The fields satisfy the max-plus update on the whole window."""
        assert pl_residual(collision_params, 0, 20, 1, 50) == 0
        assert pl_residual(one_soliton(2, 3, theta=2, kappa=1), -5, 5, -5, 20) == 0

    def test_residual_sees_tampered_fields(self, collision_params, monkeypatch):
        """Shifting one time row by a box makes the update fail there."""
        real = tau.field_grid

        def shifted(params, t0, t1, n0, n1):
            grid = real(params, t0, t1, n0, n1)
            u = grid.u.copy()
            u[1] = np.roll(u[1], 1, axis=0)
            return tau.FieldGrid(u, grid.v, grid.t0, grid.n0)

        monkeypatch.setattr(tau, "field_grid", shifted)
        assert pl_residual(collision_params, 0, 20, 1, 50) > 0

    def test_random_one_soliton_params(self, rng):
        """Random inhomogeneous one-soliton solutions match the automaton."""
        prop_tau(rng, 5)

    def test_random_two_soliton_params(self, rng):
        """Random two-soliton solutions with mixed theta and kappa match the automaton."""
        prop_tau_pairs(rng, 3)
