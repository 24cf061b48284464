"""Symmetric-tensor crystals B_k of rank M.

An element of B_k is a single-row semistandard tableau of length k over the
letters 1..M+1, stored as its multiplicity vector (x_1, ..., x_{M+1}).
Kashiwara operators and the tensor product rule act on these vectors
directly; tableau words are only a serialization view.
"""

from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb

from errors import ArgumentError


@dataclass(frozen=True, slots=True)
class CrystalElement:
    """An element of B_k as a multiplicity vector over M+1 letters."""

    mult: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.mult) < 2:
            raise ArgumentError(f"rank must be at least 1, got mult={self.mult}")
        if any(x < 0 for x in self.mult):
            raise ArgumentError(f"negative multiplicity in {self.mult}")
        if sum(self.mult) < 1:
            raise ArgumentError("capacity must be at least 1")

    @property
    def rank(self) -> int:
        return len(self.mult) - 1

    @property
    def capacity(self) -> int:
        return sum(self.mult)

    @property
    def balls(self) -> int:
        """Number of letters other than 1."""
        return self.capacity - self.mult[0]

    @property
    def is_vacuum(self) -> bool:
        return self.mult[0] == self.capacity

    @classmethod
    def vacuum(cls, capacity: int, rank: int) -> "CrystalElement":
        """The highest element u_k = (k, 0, ..., 0)."""
        if rank < 1:
            raise ArgumentError(f"rank must be at least 1, got {rank}")
        return cls((capacity,) + (0,) * rank)

    @classmethod
    def from_letters(cls, letters: Sequence[int], rank: int) -> "CrystalElement":
        """Build an element from any arrangement of its letters."""
        mult = [0] * (rank + 1)
        for letter in letters:
            if not 1 <= letter <= rank + 1:
                raise ArgumentError(f"letter {letter} outside 1..{rank + 1}")
            mult[letter - 1] += 1
        return cls(tuple(mult))

    @classmethod
    def from_word(cls, word: str, rank: int) -> "CrystalElement":
        """Parse a tableau word such as "1123"; letter order is not checked."""
        if not word or not word.isdigit():
            raise ArgumentError(f"not a tableau word: {word!r}")
        return cls.from_letters([int(ch) for ch in word], rank)

    def letters(self) -> list[int]:
        """The weakly increasing letter sequence of the tableau."""
        out: list[int] = []
        for letter, count in enumerate(self.mult, start=1):
            out.extend([letter] * count)
        return out

    def word(self) -> str:
        if self.rank >= 9:
            return "[" + ",".join(str(x) for x in self.mult) + "]"
        return "".join(str(letter) for letter in self.letters())

    def __str__(self) -> str:
        return self.word()


def elements(capacity: int, rank: int) -> Iterator[CrystalElement]:
    """Enumerate B_k in lexicographic order of tableau words."""
    for letters in combinations_with_replacement(range(1, rank + 2), capacity):
        yield CrystalElement.from_letters(letters, rank)


def crystal_size(capacity: int, rank: int) -> int:
    """|B_k| = binomial(k + M, M)."""
    return comb(capacity + rank, rank)


def _check_index(i: int, b: CrystalElement) -> None:
    if not 0 <= i <= b.rank:
        raise ArgumentError(f"Kashiwara index {i} outside 0..{b.rank}")


def _shift(b: CrystalElement, plus: int, minus: int) -> CrystalElement | None:
    if b.mult[minus] == 0:
        return None
    mult = list(b.mult)
    mult[plus] += 1
    mult[minus] -= 1
    return CrystalElement(tuple(mult))


def kashiwara_e(i: int, b: CrystalElement) -> CrystalElement | None:
    """Raising operator e_i; returns None for the zero element."""
    _check_index(i, b)
    if i == 0:
        return _shift(b, plus=b.rank, minus=0)
    return _shift(b, plus=i - 1, minus=i)


def kashiwara_f(i: int, b: CrystalElement) -> CrystalElement | None:
    """Lowering operator f_i; returns None for the zero element."""
    _check_index(i, b)
    if i == 0:
        return _shift(b, plus=0, minus=b.rank)
    return _shift(b, plus=i, minus=i - 1)


def eps(i: int, b: CrystalElement) -> int:
    _check_index(i, b)
    return b.mult[0] if i == 0 else b.mult[i]


def phi(i: int, b: CrystalElement) -> int:
    _check_index(i, b)
    return b.mult[b.rank] if i == 0 else b.mult[i - 1]


@dataclass(frozen=True, slots=True)
class TensorWord:
    """An ordered tensor product b_1 ⊗ b_2 ⊗ ... of elements of one rank."""

    factors: tuple[CrystalElement, ...]

    def __post_init__(self) -> None:
        if not self.factors:
            raise ArgumentError("a tensor word needs at least one factor")
        ranks = {b.rank for b in self.factors}
        if len(ranks) != 1:
            raise ArgumentError(f"factors of mixed rank {sorted(ranks)}")

    @classmethod
    def of(cls, *factors: CrystalElement) -> "TensorWord":
        return cls(tuple(factors))

    @property
    def rank(self) -> int:
        return self.factors[0].rank

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self) -> Iterator[CrystalElement]:
        return iter(self.factors)

    def __getitem__(self, index: int) -> CrystalElement:
        return self.factors[index]

    def replace(self, index: int, b: CrystalElement) -> "TensorWord":
        factors = list(self.factors)
        factors[index] = b
        return TensorWord(tuple(factors))

    def __str__(self) -> str:
        return "⊗".join(b.word() for b in self.factors)


def _fold(i: int, w: TensorWord) -> tuple[int, int]:
    # eps and phi of a word, folding the two-factor formula from the left
    total_eps = eps(i, w[0])
    total_phi = phi(i, w[0])
    for b in w.factors[1:]:
        e, p = eps(i, b), phi(i, b)
        total_eps += max(0, e - total_phi)
        total_phi = p + max(0, total_phi - e)
    return total_eps, total_phi


def tensor_eps(i: int, w: TensorWord) -> int:
    return _fold(i, w)[0]


def tensor_phi(i: int, w: TensorWord) -> int:
    return _fold(i, w)[1]


def _acting_factor(i: int, w: TensorWord, raising: bool) -> int:
    # (prefix) ⊗ b: the operator goes left when phi(prefix) >= eps(b) for e,
    # and when phi(prefix) > eps(b) for f.
    index = len(w) - 1
    while index > 0:
        prefix = TensorWord(w.factors[:index])
        p = tensor_phi(i, prefix)
        e = eps(i, w[index])
        goes_left = p >= e if raising else p > e
        if not goes_left:
            return index
        index -= 1
    return 0


def tensor_e(i: int, w: TensorWord) -> TensorWord | None:
    """e_i on a tensor word; None when the acting factor returns zero."""
    _check_index(i, w[0])
    index = _acting_factor(i, w, raising=True)
    b = kashiwara_e(i, w[index])
    return None if b is None else w.replace(index, b)


def tensor_f(i: int, w: TensorWord) -> TensorWord | None:
    """f_i on a tensor word; None when the acting factor returns zero."""
    _check_index(i, w[0])
    index = _acting_factor(i, w, raising=False)
    b = kashiwara_f(i, w[index])
    return None if b is None else w.replace(index, b)


def tensor_words(capacities: Sequence[int], rank: int) -> Iterator[TensorWord]:
    """Enumerate B_{k1} ⊗ B_{k2} ⊗ ... in lexicographic order."""
    if not capacities:
        return
    pools = [list(elements(k, rank)) for k in capacities]

    def walk(depth: int, prefix: tuple[CrystalElement, ...]) -> Iterator[TensorWord]:
        if depth == len(pools):
            yield TensorWord(prefix)
            return
        for b in pools[depth]:
            yield from walk(depth + 1, prefix + (b,))

    yield from walk(0, ())
