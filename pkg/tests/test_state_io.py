"""Tests for state_io.py."""

import json
import math

import pytest

import worked_examples as ex
from errors import ArgumentError
from evolution import AutomatonState, run_evolution
from state_io import (
    dumps_state,
    format_kappa,
    loads_state,
    parse_ascii,
    parse_kappa,
    parse_kappas,
    parse_profile,
    read_state,
    render_ascii,
    render_record,
    state_from_dict,
    state_to_dict,
    write_state,
)


class TestJsonLayout:
    """Tests for the JSON state layout."""

    def test_layout(self):
        """Boxes are multiplicity vectors and theta lists the capacities."""
        state = parse_ascii("1·23·111", 2, window_start=4)
        assert state_to_dict(state) == {
            "M": 2,
            "window_start": 4,
            "theta": [1, 2, 3],
            "default_capacity": 3,
            "boxes": [[1, 0, 0], [0, 1, 1], [3, 0, 0]],
        }

    def test_file_round_trip(self, tmp_path, double_scattering_states):
        """write_state then read_state gives the same state."""
        path = tmp_path / "state.json"
        write_state(double_scattering_states[0], path)
        assert read_state(path) == double_scattering_states[0]

    def test_optional_fields(self):
        """window_start defaults to 0 and default_capacity to the last box."""
        state = state_from_dict({"M": 1, "boxes": [[1, 0], [0, 2]]})
        assert state.window_start == 0
        assert state.default_capacity == 2

    def test_missing_keys(self):
        """M and boxes are required."""
        with pytest.raises(ArgumentError, match="boxes"):
            state_from_dict({"M": 1})

    def test_theta_mismatch(self):
        """theta must agree with the boxes."""
        with pytest.raises(ArgumentError, match="theta"):
            state_from_dict({"M": 1, "theta": [2], "boxes": [[1, 0]]})

    @pytest.mark.parametrize("theta", [["a"], 3, [None]])
    def test_malformed_theta(self, theta):
        """A theta that is not a list of integers is an ArgumentError."""
        with pytest.raises(ArgumentError, match="malformed state"):
            state_from_dict({"M": 1, "theta": theta, "boxes": [[1, 0]]})

    def test_wrong_box_length(self):
        """Each box has M+1 entries."""
        with pytest.raises(ArgumentError):
            state_from_dict({"M": 2, "boxes": [[1, 0]]})

    @pytest.mark.parametrize("text", ["not json", "[1, 2]", '{"M": "x", "boxes": []}'])
    def test_malformed_text(self, text):
        """Bad JSON surfaces as ArgumentError."""
        with pytest.raises(ArgumentError):
            loads_state(text)

    def test_dumps_is_sorted(self):
        """dumps_state writes sorted keys."""
        text = dumps_state(AutomatonState.vacuum(1, [1]))
        assert list(json.loads(text)) == sorted(json.loads(text))


class TestAscii:
    """Tests for render_ascii() and parse_ascii()."""

    def test_digit_dialect(self, two_soliton_states):
        """Capacity-1 states print as bare digits."""
        assert render_ascii(two_soliton_states[0]) == ex.TWO_SOLITON_ROWS[0]

    def test_word_dialect(self, overtaking_states):
        """Other states join tableau words with a middle dot."""
        assert render_ascii(overtaking_states[0]) == ex.OVERTAKING_ROWS[0]

    def test_forced_word_dialect(self):
        """dialect='words' separates even capacity-1 boxes."""
        assert render_ascii(parse_ascii("121", 1), "words") == "1·2·1"

    def test_digit_dialect_needs_capacity_one(self, overtaking_states):
        """dialect='digits' refuses larger boxes."""
        with pytest.raises(ArgumentError):
            render_ascii(overtaking_states[0], "digits")

    def test_unknown_dialect(self):
        """Only the listed dialects exist."""
        with pytest.raises(ArgumentError):
            render_ascii(parse_ascii("1", 1), "latex")

    def test_plain_dot_separator(self):
        """A full stop is accepted in place of the middle dot."""
        assert parse_ascii("11.23", 2) == parse_ascii("11·23", 2)

    def test_default_capacity(self):
        """The vacuum outside the window copies the last box unless given."""
        assert parse_ascii("1·111", 1).default_capacity == 3
        assert parse_ascii("1·111", 1, default_capacity=2).default_capacity == 2


class TestRenderRecord:
    """Tests for render_record()."""

    def test_carrier_rows_between_states(self):
        """States and carrier rows alternate."""
        record = run_evolution(parse_ascii("121", 1), [1])
        lines = render_record(record)
        assert lines[0] == render_ascii(record.states[0])
        assert lines[1].startswith("  ")
        assert lines[2] == render_ascii(record.states[1])
        assert len(lines) == 3


class TestCapacityParsing:
    """Tests for parse_kappa(), parse_kappas(), parse_profile() and format_kappa()."""

    @pytest.mark.parametrize("token,expected", [("3", 3), ("inf", math.inf), (" Infinity ", math.inf), ("∞", math.inf)])
    def test_parse_kappa(self, token, expected):
        """Positive integers and spellings of infinity."""
        assert parse_kappa(token) == expected

    @pytest.mark.parametrize("token", ["0", "-1", "two", "1.5"])
    def test_parse_kappa_rejects(self, token):
        """Anything else is an ArgumentError."""
        with pytest.raises(ArgumentError):
            parse_kappa(token)

    def test_schedule_with_repeats(self):
        """5*4,2*5 expands to nine entries."""
        assert tuple(parse_kappas("5*4,2*5")) == ex.DOUBLE_SCATTERING_KAPPAS

    def test_profile(self):
        """Profiles accept repeats and lists."""
        assert parse_profile("1*3,2") == [1, 1, 1, 2]

    def test_profile_rejects_infinity(self):
        """Box capacities are finite."""
        with pytest.raises(ArgumentError):
            parse_profile("1,inf")

    @pytest.mark.parametrize("text", ["1,,2", "2*x", "2*0"])
    def test_malformed_lists(self, text):
        """Empty entries and bad repeat counts raise."""
        with pytest.raises(ArgumentError):
            parse_kappas(text)

    def test_format(self):
        """inf prints as inf and integers plainly."""
        assert [format_kappa(k) for k in (2, math.inf)] == ["2", "inf"]
