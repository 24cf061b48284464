"""Solitons of the automaton: construction, parsing, velocity and scattering.

A soliton of amplitude k carries a label in B'_k, the rank M-1 crystal over
letters 1..M. It is written on the tape as the label reversed with every
letter raised by one, so its letters decrease along the line; the tape is
then cut into boxes of capacities theta_n and each box is sorted.

Positions use the window origin: box n = 1 is the first box of the window.
"""

import math
from collections import Counter
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from crystal import CrystalElement, TensorWord
from errors import ArgumentError, ScatterTimeout
from evolution import AutomatonState, Kappa, evolve, resolve_kappa
from logging_setup import get_logger
from rmatrix import combinatorial_r

DEFAULT_SEPARATION_MARGIN = 2
DEFAULT_SCATTER_MAX_STEPS = 2000


@dataclass(frozen=True, slots=True)
class SolitonLabel:
    """An element of B'_k: multiplicities of letters 1..M."""

    mult: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.mult or any(x < 0 for x in self.mult) or sum(self.mult) < 1:
            raise ArgumentError(f"invalid soliton label {self.mult}")

    @classmethod
    def from_word(cls, word: str, rank: int) -> "SolitonLabel":
        """Parse a label word over letters 1..rank."""
        if not word or not word.isdigit():
            raise ArgumentError(f"not a label word: {word!r}")
        mult = [0] * rank
        for ch in word:
            letter = int(ch)
            if not 1 <= letter <= rank:
                raise ArgumentError(f"label letter {letter} outside 1..{rank}")
            mult[letter - 1] += 1
        return cls(tuple(mult))

    @classmethod
    def from_element(cls, b: CrystalElement) -> "SolitonLabel":
        return cls(b.mult)

    @classmethod
    def trivial(cls, amplitude: int) -> "SolitonLabel":
        """The only label of amplitude k when M = 1."""
        return cls((amplitude,))

    @property
    def rank(self) -> int:
        """Rank M of the automaton the label lives in."""
        return len(self.mult)

    @property
    def amplitude(self) -> int:
        return sum(self.mult)

    def letters(self) -> list[int]:
        return [letter for letter, count in enumerate(self.mult, start=1) for _ in range(count)]

    def word(self) -> str:
        return "".join(str(letter) for letter in self.letters())

    def to_element(self) -> CrystalElement:
        """The label as an element of the rank M-1 crystal; needs M >= 2."""
        if self.rank < 2:
            raise ArgumentError("labels of a rank 1 automaton have no crystal structure")
        return CrystalElement(self.mult)

    def __str__(self) -> str:
        return self.word()


def imath(label: SolitonLabel) -> list[int]:
    """Tape letters of a soliton: the label reversed, each letter plus one."""
    return [letter + 1 for letter in reversed(label.letters())]


def embed(label: SolitonLabel) -> TensorWord:
    """The tape letters of a label as a word in B_1 ⊗ ... ⊗ B_1 of rank M."""
    return TensorWord(tuple(CrystalElement.from_letters([letter], label.rank) for letter in imath(label)))


def label_r(b: SolitonLabel, c: SolitonLabel) -> tuple[SolitonLabel, SolitonLabel]:
    """R' on labels: B'_l ⊗ B'_k -> B'_k ⊗ B'_l; a plain swap when M = 1."""
    if b.rank != c.rank:
        raise ArgumentError(f"label rank mismatch: {b.rank} vs {c.rank}")
    if b.rank == 1:
        return c, b
    left, right = combinatorial_r(b.to_element(), c.to_element()).pair()
    return SolitonLabel.from_element(left), SolitonLabel.from_element(right)


@dataclass(frozen=True)
class SolitonPlacement:
    """Labels separated by vacuum runs L_0, ..., L_N on a tape cut by capacities."""

    labels: tuple[SolitonLabel, ...]
    gaps: tuple[int, ...]
    capacities: tuple[int, ...]
    rank: int
    window_start: int = 0
    default_capacity: int | None = None

    def __post_init__(self) -> None:
        if len(self.gaps) != len(self.labels) + 1:
            raise ArgumentError(f"{len(self.labels)} labels need {len(self.labels) + 1} gaps")
        if any(g < 0 for g in self.gaps) or any(c < 1 for c in self.capacities):
            raise ArgumentError("gaps must be non-negative and capacities positive")
        if any(label.rank != self.rank for label in self.labels):
            raise ArgumentError(f"labels must be over letters 1..{self.rank}")
        tape = sum(self.gaps) + sum(label.amplitude for label in self.labels)
        if tape != sum(self.capacities):
            raise ArgumentError(
                f"tape length {tape} does not match window capacity {sum(self.capacities)}"
            )


def inject(placement: SolitonPlacement) -> AutomatonState:
    """Write the placement on the tape and cut it into sorted boxes."""
    tape: list[int] = [1] * placement.gaps[0]
    for label, gap in zip(placement.labels, placement.gaps[1:]):
        tape.extend(imath(label))
        tape.extend([1] * gap)

    boxes = []
    cursor = 0
    for theta in placement.capacities:
        boxes.append(CrystalElement.from_letters(tape[cursor : cursor + theta], placement.rank))
        cursor += theta
    default = placement.default_capacity
    if default is None:
        default = placement.capacities[-1] if placement.capacities else 1
    return AutomatonState(placement.rank, tuple(boxes), placement.window_start, default)


@dataclass(frozen=True, slots=True)
class SolitonReading:
    """Shape data of a one-soliton state; n is 1-based from the window start."""

    n: int
    k: int
    s: int
    t: int
    x: int
    y: int
    amplitude: int


@dataclass(frozen=True, slots=True)
class _Segment:
    first: int
    end: int
    last_occupied: int
    t: int
    s: int
    letters: tuple[int, ...]


def _segments(state: AutomatonState) -> list[_Segment] | None:
    """Cut the state into soliton-shaped segments; None if some segment is malformed."""
    boxes = state.boxes
    width = len(boxes)
    found: list[_Segment] = []
    i = 0
    while i < width:
        if boxes[i].is_vacuum:
            i += 1
            continue
        first = i
        j = i + 1
        while j < width and boxes[j].mult[0] == 0:
            j += 1
        s = boxes[j].balls if j < width else 0

        per_box = [sorted((b for b in boxes[m].letters() if b > 1), reverse=True)
                   for m in range(first, min(j + 1, width))]
        occupied = [letters for letters in per_box if letters]
        for left, right in zip(occupied, occupied[1:]):
            if left[-1] < right[0]:
                return None

        found.append(
            _Segment(
                first=first,
                end=j,
                last_occupied=j if s else j - 1,
                t=boxes[first].balls,
                s=s,
                letters=tuple(letter for letters in per_box for letter in letters),
            )
        )
        i = j + 1
    return found


def _reading(state: AutomatonState, segment: _Segment) -> SolitonReading:
    capacities = state.capacities
    inner = sum(state.capacity_at(state.window_start + m) for m in range(segment.first + 1, segment.end))
    x = sum(capacities[: segment.first + 1]) - segment.t
    y = segment.t + inner
    return SolitonReading(
        n=segment.first + 1,
        k=segment.end - segment.first,
        s=segment.s,
        t=segment.t,
        x=x,
        y=y,
        amplitude=y + segment.s,
    )


def read_one_soliton(state: AutomatonState) -> SolitonReading | None:
    """Return (n, k, s, t, x, y) when the state is exactly one soliton, else None."""
    segments = _segments(state)
    if not segments or len(segments) != 1:
        return None
    return _reading(state, segments[0])


@dataclass(frozen=True, slots=True)
class ExtractedSoliton:
    label: SolitonLabel
    position: int
    start: int
    end: int


@dataclass(frozen=True)
class Extraction:
    """Result of parsing a state into separated solitons."""

    solitons: tuple[ExtractedSoliton, ...] = ()
    asymptotic: bool = True
    reason: str = ""

    @property
    def labels(self) -> tuple[SolitonLabel, ...]:
        return tuple(soliton.label for soliton in self.solitons)

    @property
    def amplitudes(self) -> tuple[int, ...]:
        return tuple(soliton.label.amplitude for soliton in self.solitons)


def extract_solitons(
    state: AutomatonState,
    separation_threshold: int | None = None,
    separation_margin: int = DEFAULT_SEPARATION_MARGIN,
) -> Extraction:
    """Parse a state into labelled solitons, left to right.

    Args:
        state: Any automaton state.
        separation_threshold: Minimum number of pure vacuum boxes between
            neighbouring solitons. Defaults to 2 * max amplitude + margin.
        separation_margin: Margin used for the default threshold.

    Returns:
        Extraction; asymptotic is False when a segment is not soliton-shaped
        or two solitons sit closer than the threshold.
    """
    segments = _segments(state)
    if segments is None:
        return Extraction(asymptotic=False, reason="segment letters are not ordered")

    solitons = []
    for segment in segments:
        label = SolitonLabel.from_element(
            CrystalElement.from_letters([b - 1 for b in segment.letters], state.rank - 1)
        ) if state.rank > 1 else SolitonLabel.trivial(len(segment.letters))
        reading = _reading(state, segment)
        solitons.append(
            ExtractedSoliton(
                label=label,
                position=reading.x,
                start=state.window_start + segment.first,
                end=state.window_start + segment.end,
            )
        )

    if len(segments) > 1:
        threshold = separation_threshold
        if threshold is None:
            threshold = 2 * max(s.label.amplitude for s in solitons) + separation_margin
        for left, right in zip(segments, segments[1:]):
            gap = right.first - left.last_occupied - 1
            if gap < threshold:
                return Extraction(
                    asymptotic=False,
                    reason=f"gap of {gap} boxes at n={state.window_start + right.first} "
                    f"is below {threshold}",
                )
    return Extraction(tuple(solitons))


def amplitude_histogram(extraction: Extraction) -> dict[int, int]:
    """Number of solitons of each amplitude."""
    return dict(Counter(extraction.amplitudes))


def velocity_check(state: AutomatonState, kappa: Kappa) -> int:
    """Predicted displacement of x under T_kappa for a one-soliton state."""
    reading = read_one_soliton(state)
    if reading is None:
        raise ArgumentError("velocity is defined for one-soliton states only")
    capacity = resolve_kappa(state, kappa)
    if capacity < reading.y:
        return capacity
    theta_next = state.capacity_at(state.window_start + reading.n + reading.k - 1)
    l = reading.amplitude
    return min(capacity, l) + max(theta_next - l, 0)


def measured_displacement(state: AutomatonState, kappa: Kappa) -> int:
    """x(T_kappa p) - x(p) for a one-soliton state."""
    before = read_one_soliton(state)
    after = read_one_soliton(evolve(state, kappa)[0])
    if before is None or after is None:
        raise ArgumentError("displacement is defined for one-soliton states only")
    return after.x - before.x


def classify(l: int, k: int, theta: int, kappa: Kappa) -> str:
    """Scattering class of amplitudes l > k under homogeneous theta and kappa."""
    if l <= k:
        raise ArgumentError(f"classification needs l > k, got l={l}, k={k}")
    if min(l, kappa) > max(k, theta):
        return "I"
    if min(l, theta) > max(k, kappa):
        return "II"
    return "III"


@dataclass(frozen=True)
class ScatterResult:
    incoming: tuple[SolitonLabel, SolitonLabel]
    outgoing: tuple[SolitonLabel, SolitonLabel]
    overtook: bool
    steps: int
    trace: tuple[AutomatonState, ...] = field(default=(), repr=False)


def two_soliton_placement(
    b: SolitonLabel,
    c: SolitonLabel,
    capacities: Sequence[int],
    default_capacity: int,
    separation_margin: int = DEFAULT_SEPARATION_MARGIN,
) -> SolitonPlacement:
    """Place b then c with a vacuum run wide enough to count as separated."""
    widest = max(list(capacities) + [default_capacity])
    threshold = 2 * max(b.amplitude, c.amplitude) + separation_margin
    gap = widest * (threshold + 2)
    needed = b.amplitude + gap + c.amplitude + widest
    window: list[int] = []
    while sum(window) < needed:
        window.append(capacities[len(window)] if len(window) < len(capacities) else default_capacity)
    tail = sum(window) - (b.amplitude + gap + c.amplitude)
    return SolitonPlacement((b, c), (0, gap, tail), tuple(window), b.rank, 0, default_capacity)


def _kappa_at(kappa: Kappa | Sequence[Kappa], step: int) -> Kappa:
    if isinstance(kappa, Sequence):
        return kappa[step % len(kappa)]
    return kappa


def scatter(
    b: SolitonLabel,
    c: SolitonLabel,
    theta: int | Sequence[int],
    kappa: Kappa | Sequence[Kappa],
    max_steps: int = DEFAULT_SCATTER_MAX_STEPS,
    separation_margin: int = DEFAULT_SEPARATION_MARGIN,
    on_step: Callable[[int, AutomatonState], None] | None = None,
    keep_trace: bool = False,
) -> ScatterResult:
    """Collide soliton b (left) with soliton c (right) and read off the outcome.

    Args:
        b: Label of the left soliton.
        c: Label of the right soliton.
        theta: Homogeneous capacity, or capacities of boxes 1, 2, ... (the last
            one continues to the right).
        kappa: Carrier capacity, or a schedule repeated cyclically.
        max_steps: Iteration cap.
        separation_margin: Margin of the separation threshold.
        on_step: Optional callback(step, state) for traces.
        keep_trace: Keep every state in the result.

    Returns:
        ScatterResult with the two outgoing labels in left-to-right order.
    """
    logger = get_logger()
    if isinstance(theta, int):
        capacities, default = [theta], theta
    else:
        capacities, default = list(theta), list(theta)[-1]
    state = inject(two_soliton_placement(b, c, capacities, default, separation_margin))
    incoming = (b, c)

    start = extract_solitons(state, separation_margin=separation_margin)
    if not start.asymptotic or start.labels != incoming:
        raise ArgumentError(f"initial state is not a separated pair: {start.reason}")
    if on_step:
        on_step(0, state)
    trace = [state] if keep_trace else []

    period = len(kappa) if isinstance(kappa, Sequence) else 1
    gaps: list[int] = []
    interacted = False
    previous: tuple[SolitonLabel, ...] | None = None
    for step in range(1, max_steps + 1):
        state = evolve(state, _kappa_at(kappa, step - 1))[0].trimmed()
        if on_step:
            on_step(step, state)
        if keep_trace:
            trace.append(state)
        found = extract_solitons(state, separation_margin=separation_margin)
        separated = found.asymptotic and len(found.solitons) == 2

        if not interacted:
            interacted = not separated or found.labels != incoming
            if interacted:
                logger.debug("Solitons %s⊗%s start interacting at step %d", b, c, step)
                continue
            # Gaps only count once both solitons are past the capacity profile.
            if found.solitons[0].start < len(capacities):
                gaps.clear()
                continue
            gaps.append(found.solitons[1].position - found.solitons[0].position)
            if len(gaps) > 2 * period and gaps[-1] >= gaps[-1 - period] >= gaps[-1 - 2 * period]:
                logger.debug("Solitons %s⊗%s never approach; no interaction after %d steps", b, c, step)
                return ScatterResult(incoming, incoming, False, step, tuple(trace))
            continue

        if not separated:
            previous = None
            continue
        if previous == found.labels:
            outgoing = (found.labels[0], found.labels[1])
            overtook = (outgoing[0].amplitude, outgoing[1].amplitude) != (
                b.amplitude,
                c.amplitude,
            )
            logger.debug("Scattering %s⊗%s -> %s⊗%s after %d steps", b, c, outgoing[0], outgoing[1], step)
            return ScatterResult(incoming, outgoing, overtook, step, tuple(trace))
        previous = found.labels

    raise ScatterTimeout(f"{b}⊗{c} did not separate within {max_steps} steps")

