"""Time evolution of the inhomogeneous box-ball automaton.

A state is a finite window of boxes b_n in B_{theta_n}; everything outside
the window is the vacuum of capacity default_capacity. One step T_kappa
sends a carrier u_kappa from the left through every box, each vertex
applying the combinatorial R matrix

    v_n ⊗ b_n  ->  b'_n ⊗ v_{n+1},

and appends vacuum boxes on the right until the carrier is empty again.
"""

import math
import random
from collections.abc import Sequence
from dataclasses import dataclass

from crystal import CrystalElement
from errors import ArgumentError, IntegrityError, RunawayError
from logging_setup import get_logger
from rmatrix import combinatorial_r

DEFAULT_EXTENSION_CAP = 1_000_000
KAPPA_INF = math.inf

Kappa = int | float


@dataclass(frozen=True, slots=True)
class AutomatonState:
    """Boxes b_{n0}, b_{n0+1}, ... with vacuum of default_capacity outside."""

    rank: int
    boxes: tuple[CrystalElement, ...]
    window_start: int = 0
    default_capacity: int = 1

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ArgumentError(f"rank must be at least 1, got {self.rank}")
        if self.default_capacity < 1:
            raise ArgumentError(f"default capacity must be positive, got {self.default_capacity}")
        for offset, box in enumerate(self.boxes):
            if box.rank != self.rank:
                raise ArgumentError(
                    f"box {self.window_start + offset} has rank {box.rank}, state rank {self.rank}"
                )

    @classmethod
    def vacuum(
        cls,
        rank: int,
        capacities: Sequence[int],
        window_start: int = 0,
        default_capacity: int | None = None,
    ) -> "AutomatonState":
        boxes = tuple(CrystalElement.vacuum(theta, rank) for theta in capacities)
        if default_capacity is None:
            default_capacity = capacities[-1] if capacities else 1
        return cls(rank, boxes, window_start, default_capacity)

    @classmethod
    def from_words(
        cls,
        words: Sequence[str],
        rank: int,
        window_start: int = 0,
        default_capacity: int | None = None,
    ) -> "AutomatonState":
        """Build a state from tableau words; capacities are the word lengths."""
        boxes = tuple(CrystalElement.from_word(word, rank) for word in words)
        if default_capacity is None:
            default_capacity = boxes[-1].capacity if boxes else 1
        return cls(rank, boxes, window_start, default_capacity)

    @property
    def capacities(self) -> tuple[int, ...]:
        return tuple(box.capacity for box in self.boxes)

    @property
    def window_end(self) -> int:
        """First position after the window."""
        return self.window_start + len(self.boxes)

    @property
    def ball_count(self) -> int:
        return sum(box.balls for box in self.boxes)

    @property
    def is_vacuum(self) -> bool:
        return all(box.is_vacuum for box in self.boxes)

    def letter_counts(self) -> tuple[int, ...]:
        """Number of each letter 2..M+1 in the whole state."""
        return tuple(sum(box.mult[a] for box in self.boxes) for a in range(1, self.rank + 1))

    def capacity_at(self, n: int) -> int:
        if self.window_start <= n < self.window_end:
            return self.boxes[n - self.window_start].capacity
        return self.default_capacity

    def box_at(self, n: int) -> CrystalElement:
        if self.window_start <= n < self.window_end:
            return self.boxes[n - self.window_start]
        return CrystalElement.vacuum(self.default_capacity, self.rank)

    def padded(self, start: int, end: int) -> "AutomatonState":
        """Widen the window to [start, end) with default vacuum boxes."""
        if start > self.window_start or end < self.window_end:
            raise ArgumentError(
                f"window [{start}, {end}) does not contain [{self.window_start}, {self.window_end})"
            )
        boxes = tuple(self.box_at(n) for n in range(start, end))
        return AutomatonState(self.rank, boxes, start, self.default_capacity)

    def trimmed(self) -> "AutomatonState":
        """Drop leading and trailing vacuum boxes of default capacity."""

        def removable(box: CrystalElement) -> bool:
            return box.is_vacuum and box.capacity == self.default_capacity

        lo, hi = 0, len(self.boxes)
        while lo < hi and removable(self.boxes[lo]):
            lo += 1
        while hi > lo and removable(self.boxes[hi - 1]):
            hi -= 1
        start = self.window_start + lo if lo < hi else self.window_start
        return AutomatonState(self.rank, self.boxes[lo:hi], start, self.default_capacity)

    def same_configuration(self, other: "AutomatonState") -> bool:
        """Equality as configurations on the whole line, ignoring window bookkeeping."""
        if self.rank != other.rank or self.default_capacity != other.default_capacity:
            return False
        start = min(self.window_start, other.window_start)
        end = max(self.window_end, other.window_end)
        return self.padded(start, end).boxes == other.padded(start, end).boxes


def resolve_kappa(state: AutomatonState, kappa: Kappa) -> int:
    """Integer carrier capacity; infinity saturates at ball count + 1."""
    if isinstance(kappa, float) and not math.isfinite(kappa):
        if kappa > 0:
            return state.ball_count + 1
        raise ArgumentError(f"carrier capacity must be a positive integer or inf, got {kappa}")
    if int(kappa) != kappa or kappa < 1:
        raise ArgumentError(f"carrier capacity must be a positive integer or inf, got {kappa}")
    return int(kappa)


@dataclass(frozen=True, slots=True)
class Sweep:
    """Everything one carrier pass produces."""

    state: AutomatonState
    carriers: tuple[CrystalElement, ...]
    unwinding: tuple[int, ...]
    kappa: int

    @property
    def energy(self) -> int:
        return sum(self.unwinding)


def sweep(
    state: AutomatonState,
    kappa: Kappa,
    extension_cap: int = DEFAULT_EXTENSION_CAP,
) -> Sweep:
    """Run one left-to-right carrier pass and keep the full trace."""
    capacity = resolve_kappa(state, kappa)
    empty = CrystalElement.vacuum(capacity, state.rank)
    carrier = empty
    boxes: list[CrystalElement] = []
    carriers = [carrier]
    unwinding: list[int] = []

    def step(box: CrystalElement) -> None:
        nonlocal carrier
        result = combinatorial_r(carrier, box)
        boxes.append(result.left_out)
        carrier = result.right_out
        carriers.append(carrier)
        unwinding.append(result.unwinding)

    for box in state.boxes:
        step(box)

    extended = 0
    while carrier != empty:
        if extended >= extension_cap:
            raise RunawayError(f"carrier still loaded after {extension_cap} appended boxes")
        step(CrystalElement.vacuum(state.default_capacity, state.rank))
        extended += 1
    if extended:
        get_logger().debug("Window extended by %d boxes on the right", extended)

    new_state = AutomatonState(state.rank, tuple(boxes), state.window_start, state.default_capacity)
    return Sweep(new_state, tuple(carriers), tuple(unwinding), capacity)


def evolve(
    state: AutomatonState,
    kappa: Kappa,
    extension_cap: int = DEFAULT_EXTENSION_CAP,
) -> tuple[AutomatonState, tuple[CrystalElement, ...]]:
    """Apply T_kappa; returns the new state and the carrier trace v_{n0}, ..., v_{n1+1}."""
    result = sweep(state, kappa, extension_cap)
    return result.state, result.carriers


def evolve_inverse(
    state: AutomatonState,
    kappa: Kappa,
    extension_cap: int = DEFAULT_EXTENSION_CAP,
) -> AutomatonState:
    """Apply T_kappa^{-1} by a right-to-left pass of the inverse R."""
    capacity = resolve_kappa(state, kappa)
    empty = CrystalElement.vacuum(capacity, state.rank)
    carrier = empty
    boxes: list[CrystalElement] = []

    def step(box: CrystalElement) -> None:
        nonlocal carrier
        result = combinatorial_r(box, carrier)
        carrier = result.left_out
        boxes.append(result.right_out)

    for box in reversed(state.boxes):
        step(box)

    extended = 0
    while carrier != empty:
        if extended >= extension_cap:
            raise RunawayError(f"carrier still loaded after {extension_cap} prepended boxes")
        step(CrystalElement.vacuum(state.default_capacity, state.rank))
        extended += 1
    if extended:
        get_logger().debug("Window extended by %d boxes on the left", extended)

    boxes.reverse()
    return AutomatonState(
        state.rank, tuple(boxes), state.window_start - extended, state.default_capacity
    )


def evolve_infinity(state: AutomatonState, extension_cap: int = DEFAULT_EXTENSION_CAP) -> AutomatonState:
    """T_infinity through a carrier that can never fill up."""
    return evolve(state, KAPPA_INF, extension_cap)[0]


@dataclass(frozen=True, slots=True)
class BallMove:
    """One ball displaced by the ball-moving rule."""

    signature: int
    letter: int
    source: int
    target: int


def _move_balls(
    state: AutomatonState, rng: random.Random | None = None
) -> tuple[list[list[int]], int, list[BallMove]]:
    counts = [list(box.mult) for box in state.boxes]
    rank = state.rank
    moves: list[BallMove] = []

    # Ball index j is letter M+2-j; index 1 moves first.
    for index in range(1, rank + 1):
        slot = rank + 1 - index
        pending = [box[slot] for box in counts]
        n = 0
        while True:
            while n < len(pending) and pending[n] == 0:
                n += 1
            if n == len(pending):
                break
            pending[n] -= 1
            counts[n][slot] -= 1
            counts[n][0] += 1
            target = n + 1
            while True:
                if target == len(counts):
                    counts.append([state.default_capacity] + [0] * rank)
                    pending.append(0)
                if counts[target][0] > 0:
                    break
                target += 1
            counts[target][0] -= 1
            counts[target][slot] += 1
            moves.append(
                BallMove(
                    signature=len(moves) + 1,
                    letter=slot + 1,
                    source=state.window_start + n,
                    target=state.window_start + target,
                )
            )
    if rng is not None:
        moves = _shuffle_equal_balls(moves, rng)
    return counts, state.window_start, moves


def _shuffle_equal_balls(moves: list[BallMove], rng: random.Random) -> list[BallMove]:
    # Equal balls leaving one box move back to back; any of them may go first.
    shuffled: list[BallMove] = []
    start = 0
    while start < len(moves):
        end = start + 1
        key = (moves[start].source, moves[start].letter)
        while end < len(moves) and (moves[end].source, moves[end].letter) == key:
            end += 1
        targets = [move.target for move in moves[start:end]]
        rng.shuffle(targets)
        shuffled.extend(
            BallMove(move.signature, move.letter, move.source, target)
            for move, target in zip(moves[start:end], targets)
        )
        start = end
    return shuffled


def evolve_box_ball(state: AutomatonState) -> AutomatonState:
    """T_infinity as T~_M ... T~_1: each ball moves once to the nearest free box on its right."""
    counts, start, _ = _move_balls(state)
    boxes = tuple(CrystalElement(tuple(c)) for c in counts)
    return AutomatonState(state.rank, boxes, start, state.default_capacity)


def canonical_move_order(state: AutomatonState, rng: random.Random | None = None) -> list[BallMove]:
    """The ball moves of one T_infinity step in the order they happen.

    Balls with the same index in one box are interchangeable; with rng the
    one that moves first is picked at random instead of first in, first out.
    """
    return _move_balls(state, rng)[2]


def canonicalize(state: AutomatonState, rng: random.Random | None = None) -> AutomatonState:
    """Relabel each ball by its move order, giving a state of rank = ball count.

    The ball with signature s becomes letter J+2-s, so signature 1 is the
    first ball to move.
    """
    moves = canonical_move_order(state, rng)
    total = len(moves)
    if total == 0:
        return state
    counts = [[box.capacity] + [0] * total for box in state.boxes]
    for move in moves:
        box = counts[move.source - state.window_start]
        box[0] -= 1
        box[total + 1 - move.signature] += 1
    boxes = tuple(CrystalElement(tuple(c)) for c in counts)
    return AutomatonState(total, boxes, state.window_start, state.default_capacity)


@dataclass(frozen=True)
class EvolutionRecord:
    """A space-time patch of boxes and carriers on a common window.

    states[t] holds b^t_n for the window; carriers[t] holds v^t_n for the
    window positions plus one past the right edge; carrier t has capacity
    kappas[t].
    """

    states: tuple[AutomatonState, ...]
    carriers: tuple[tuple[CrystalElement, ...], ...]
    kappas: tuple[int, ...]
    time_start: int = 0

    @property
    def steps(self) -> int:
        return len(self.carriers)

    @property
    def window_start(self) -> int:
        return self.states[0].window_start

    @property
    def width(self) -> int:
        return len(self.states[0].boxes)


def run_evolution(
    state: AutomatonState,
    kappas: Sequence[Kappa],
    extension_cap: int = DEFAULT_EXTENSION_CAP,
) -> EvolutionRecord:
    """Evolve through the kappa schedule, one kappa per step, and record everything."""
    states = [state]
    sweeps: list[Sweep] = []
    current = state
    for kappa in kappas:
        result = sweep(current, kappa, extension_cap)
        sweeps.append(result)
        current = result.state
        states.append(current)

    start = min(s.window_start for s in states)
    end = max(s.window_end for s in states)
    aligned = tuple(s.padded(start, end) for s in states)

    carrier_rows = []
    for before, result in zip(states, sweeps):
        empty = CrystalElement.vacuum(result.kappa, state.rank)
        left = [empty] * (before.window_start - start)
        right = [empty] * (end - start + 1 - len(left) - len(result.carriers))
        carrier_rows.append(tuple(left) + result.carriers + tuple(right))

    return EvolutionRecord(aligned, tuple(carrier_rows), tuple(s.kappa for s in sweeps))


def verify_record(record: EvolutionRecord) -> None:
    """Re-check v ⊗ b -> b' ⊗ v' at every vertex; raise at the first failure."""
    width = record.width
    if len(record.states) != record.steps + 1 or len(record.kappas) != record.steps:
        raise IntegrityError("record has inconsistent numbers of rows")
    for s in record.states:
        if len(s.boxes) != width or s.window_start != record.window_start:
            raise IntegrityError("record states are not on a common window")

    for t in range(record.steps):
        row = record.carriers[t]
        if len(row) != width + 1:
            raise IntegrityError(f"carrier row {t} has {len(row)} entries, expected {width + 1}")
        for i in range(width):
            n = record.window_start + i
            t_abs = record.time_start + t
            if row[i].capacity != record.kappas[t]:
                raise IntegrityError(f"carrier capacity mismatch at t={t_abs}, n={n}", (t_abs, n))
            image = combinatorial_r(row[i], record.states[t].boxes[i]).pair()
            if image != (record.states[t + 1].boxes[i], row[i + 1]):
                raise IntegrityError(f"vertex relation fails at t={t_abs}, n={n}", (t_abs, n))


def dual_record(record: EvolutionRecord) -> EvolutionRecord:
    """Swap the roles of space and time.

    Carrier columns become the dual states, read with time decreasing to the
    right, and box rows become the dual carriers, which travel leftward in n
    with capacity theta_n. The result satisfies the same vertex relation.
    """
    verify_record(record)
    steps, width = record.steps, record.width
    if steps == 0:
        raise IntegrityError("cannot dualize a record without steps")
    rank = record.states[0].rank
    default = record.states[0].default_capacity
    thetas = record.states[0].capacities

    dual_start = -(record.time_start + steps - 1)
    dual_states = []
    for tau in range(width + 1):
        column = width - tau
        boxes = tuple(record.carriers[steps - 1 - s][column] for s in range(steps))
        dual_states.append(AutomatonState(rank, boxes, dual_start, default))

    dual_carriers = []
    for tau in range(width):
        column = width - 1 - tau
        dual_carriers.append(
            tuple(record.states[steps - s].boxes[column] for s in range(steps + 1))
        )

    dual_kappas = tuple(thetas[width - 1 - tau] for tau in range(width))
    return EvolutionRecord(
        tuple(dual_states),
        tuple(dual_carriers),
        dual_kappas,
        time_start=1 - (record.window_start + width),
    )
