"""Conserved quantities: the energies E_kappa and the row-insertion tableau."""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from errors import ArgumentError, ConsistencyError
from evolution import DEFAULT_EXTENSION_CAP, AutomatonState, Kappa, sweep


def energy_kappa(
    state: AutomatonState,
    kappa: Kappa,
    extension_cap: int = DEFAULT_EXTENSION_CAP,
) -> int:
    """E_kappa = -sum_n H(v_n ⊗ b_n) over one carrier pass."""
    return sweep(state, kappa, extension_cap).energy


def content_energy(histogram: Mapping[int, int], kappa: Kappa) -> int:
    """sum_l min(l, kappa) N_l for an amplitude histogram {l: N_l}."""
    total = 0
    for amplitude, count in histogram.items():
        if amplitude < 1 or count < 0:
            raise ArgumentError(f"invalid histogram entry {amplitude}: {count}")
        total += min(amplitude, kappa) * count
    return int(total)


@dataclass(frozen=True, slots=True)
class SSYTableau:
    """A semistandard Young tableau stored row by row, top row first."""

    rows: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self) -> None:
        for upper, lower in zip(self.rows, self.rows[1:]):
            if len(lower) > len(upper):
                raise ConsistencyError(f"shape is not a partition: {self.shape}")
            if any(below <= above for above, below in zip(upper, lower)):
                raise ConsistencyError(f"columns are not strictly increasing in {self.rows}")
        for row in self.rows:
            if not row or any(a > b for a, b in zip(row, row[1:])):
                raise ConsistencyError(f"row {row} is not weakly increasing")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(row) for row in self.rows)

    def content(self) -> list[int]:
        return sorted(x for row in self.rows for x in row)

    def insert(self, letter: int) -> "SSYTableau":
        """Row-insert one letter, bumping the leftmost strictly larger entry down."""
        rows = [list(row) for row in self.rows]
        bumped = letter
        for row in rows:
            for position, entry in enumerate(row):
                if entry > bumped:
                    row[position], bumped = bumped, entry
                    break
            else:
                row.append(bumped)
                break
        else:
            rows.append([bumped])
        return SSYTableau(tuple(tuple(row) for row in rows))

    def insert_word(self, letters: Iterable[int]) -> "SSYTableau":
        tableau = self
        for letter in letters:
            tableau = tableau.insert(letter)
        return tableau

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.rows]


def rsk_tableau(state: AutomatonState) -> SSYTableau:
    """P-symbol of the non-vacuum boxes, read from the right.

    Each box 1..1 m_1..m_k contributes the word (m_1-1)..(m_k-1); the
    rightmost box is inserted first.
    """
    tableau = SSYTableau()
    for box in reversed(state.boxes):
        if box.is_vacuum:
            continue
        tableau = tableau.insert_word(letter - 1 for letter in box.letters() if letter > 1)
    return tableau
