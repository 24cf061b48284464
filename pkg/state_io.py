"""Reading and writing automaton states.

JSON layout:

    {"M": 3, "window_start": 0, "theta": [1, 1, ...], "default_capacity": 1,
     "boxes": [[x_1, ..., x_{M+1}], ...]}

Coordinates are reported with n = 1 at window_start.

ASCII has two dialects: a bare digit string when every box (and the
vacuum outside) has capacity 1, otherwise tableau words joined by "·".
"""

import json
import math
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from crystal import CrystalElement
from errors import ArgumentError
from evolution import AutomatonState, EvolutionRecord, Kappa

SEPARATOR = "·"
DIALECTS = ("auto", "digits", "words")


def state_to_dict(state: AutomatonState) -> dict[str, Any]:
    return {
        "M": state.rank,
        "window_start": state.window_start,
        "theta": list(state.capacities),
        "default_capacity": state.default_capacity,
        "boxes": [list(box.mult) for box in state.boxes],
    }


def state_from_dict(data: dict[str, Any]) -> AutomatonState:
    """Validate and build a state from its JSON layout."""
    if not isinstance(data, dict):
        raise ArgumentError("state must be a JSON object")
    missing = [key for key in ("M", "boxes") if key not in data]
    if missing:
        raise ArgumentError(f"state is missing {', '.join(missing)}")
    try:
        rank = int(data["M"])
        boxes = tuple(CrystalElement(tuple(int(x) for x in box)) for box in data["boxes"])
        window_start = int(data.get("window_start", 0))
        default = data.get("default_capacity")
        default = int(default) if default is not None else (boxes[-1].capacity if boxes else 1)
        theta = data.get("theta")
        theta = None if theta is None else [int(x) for x in theta]
    except ArgumentError:
        raise
    except (TypeError, ValueError) as exc:
        raise ArgumentError(f"malformed state: {exc}") from exc

    if theta is not None and theta != [box.capacity for box in boxes]:
        raise ArgumentError("theta does not match the box capacities")
    return AutomatonState(rank, boxes, window_start, default)


def dumps_state(state: AutomatonState) -> str:
    return json.dumps(state_to_dict(state), sort_keys=True)


def loads_state(text: str) -> AutomatonState:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"state is not valid JSON: {exc}") from exc
    return state_from_dict(data)


def read_state(path: Path) -> AutomatonState:
    return loads_state(path.read_text())


def write_state(state: AutomatonState, path: Path) -> None:
    path.write_text(dumps_state(state) + "\n")


def _digits_allowed(state: AutomatonState) -> bool:
    return state.default_capacity == 1 and state.rank < 9 and all(c == 1 for c in state.capacities)


def render_ascii(state: AutomatonState, dialect: str = "auto") -> str:
    """Render boxes left to right in the chosen dialect."""
    if dialect not in DIALECTS:
        raise ArgumentError(f"unknown dialect {dialect!r}; choose from {', '.join(DIALECTS)}")
    if dialect == "digits" and not _digits_allowed(state):
        raise ArgumentError("the digit dialect needs capacity 1 everywhere and M < 9")
    if dialect == "digits" or (dialect == "auto" and _digits_allowed(state)):
        return "".join(box.word() for box in state.boxes)
    return SEPARATOR.join(box.word() for box in state.boxes)


def render_carriers(carriers: Sequence[CrystalElement]) -> str:
    return ",".join(v.word() for v in carriers)


def parse_ascii(
    text: str,
    rank: int,
    window_start: int = 0,
    default_capacity: int | None = None,
) -> AutomatonState:
    """Parse either dialect; a string without separators is one letter per box."""
    text = text.strip()
    if SEPARATOR in text or "." in text:
        words = [w.strip() for w in text.replace(".", SEPARATOR).split(SEPARATOR)]
    else:
        words = list(text)
    return AutomatonState.from_words(words, rank, window_start, default_capacity)


def render_record(record: EvolutionRecord, dialect: str = "auto") -> list[str]:
    """One line per time step, with the carrier row between consecutive states."""
    lines = []
    for t, state in enumerate(record.states):
        lines.append(render_ascii(state, dialect))
        if t < record.steps:
            lines.append("  " + render_carriers(record.carriers[t]))
    return lines


def _expand(text: str) -> list[str]:
    tokens: list[str] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            raise ArgumentError(f"empty entry in {text!r}")
        value, star, count = token.partition("*")
        if star:
            try:
                repeat = int(count)
            except ValueError as exc:
                raise ArgumentError(f"bad repeat count in {token!r}") from exc
            if repeat < 1:
                raise ArgumentError(f"repeat count must be positive in {token!r}")
            tokens.extend([value.strip()] * repeat)
        else:
            tokens.append(value)
    return tokens


def parse_kappa(token: str) -> Kappa:
    """One carrier capacity: a positive integer or inf."""
    token = token.strip().lower()
    if token in {"inf", "infinity", "∞"}:
        return math.inf
    try:
        value = int(token)
    except ValueError as exc:
        raise ArgumentError(f"invalid capacity {token!r}") from exc
    if value < 1:
        raise ArgumentError(f"capacities must be positive, got {value}")
    return value


def parse_profile(text: str) -> list[int]:
    """Capacities such as "1*40" or "1,2,1,2,3,2"."""
    values = [parse_kappa(token) for token in _expand(text)]
    if any(v == math.inf for v in values):
        raise ArgumentError("box capacities must be finite")
    return [int(v) for v in values]


def parse_kappas(text: str) -> list[Kappa]:
    """A carrier schedule such as "5*4,2*5" or "inf"."""
    return [parse_kappa(token) for token in _expand(text)]


def format_kappa(kappa: Kappa) -> str:
    return "inf" if kappa == math.inf else str(int(kappa))
