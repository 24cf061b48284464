"""Combinatorial R matrix B_k ⊗ B_l -> B_l ⊗ B_k and its energy function.

The production path is the two-column dot diagram: each dot of the shorter
column is tied to a partner in the longer column, cyclically nearest in the
prescribed direction, and the untied dots slide across. Ties that wrap past
the top or bottom row are winding lines; the others are unwinding lines and
the energy is minus their number.

A brute-force crystal-graph oracle and a Yang-Baxter checker are provided
for cross-validation.
"""

import random
from collections import deque
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping

from crystal import (
    CrystalElement,
    TensorWord,
    crystal_size,
    elements,
    eps,
    phi,
    tensor_e,
    tensor_f,
)
from errors import ArgumentError, ConsistencyError, SizeGuardError
from logging_setup import get_logger

DEFAULT_ORACLE_MAX_SIZE = 50_000

RMap = Callable[[CrystalElement, CrystalElement], tuple[CrystalElement, CrystalElement]]
OracleTable = Mapping[tuple[CrystalElement, CrystalElement], tuple[CrystalElement, CrystalElement]]


@dataclass(frozen=True, slots=True)
class RResult:
    """Image left_out ⊗ right_out of b1 ⊗ b2 with its line counts."""

    left_out: CrystalElement
    right_out: CrystalElement
    unwinding: int
    winding: int

    @property
    def energy(self) -> int:
        return -self.unwinding

    def pair(self) -> tuple[CrystalElement, CrystalElement]:
        return self.left_out, self.right_out


def _search_rows(row: int, size: int, upward: bool) -> Iterator[int]:
    # Cyclic scan starting next to `row`; the row itself comes last.
    for step in range(1, size + 1):
        yield (row - step) % size if upward else (row + step) % size


def _tie(seekers: list[int], pool: list[int], upward: bool) -> tuple[list[int], int]:
    """Tie every seeker dot to a pool dot; returns partner counts and unwinding count."""
    size = len(pool)
    available = list(pool)
    partners = [0] * size
    unwinding = 0
    for row in seekers:
        for candidate in _search_rows(row, size, upward):
            if available[candidate]:
                available[candidate] -= 1
                partners[candidate] += 1
                if (candidate < row) if upward else (candidate > row):
                    unwinding += 1
                break
        else:
            raise ConsistencyError("seeker column longer than pool column")
    return partners, unwinding


def combinatorial_r(
    b1: CrystalElement,
    b2: CrystalElement,
    rng: random.Random | None = None,
) -> RResult:
    """Apply R to b1 ⊗ b2 with b1 in B_k and b2 in B_l.

    Args:
        b1: Left factor.
        b2: Right factor.
        rng: When given, the seeker dots are processed in a shuffled order
            instead of by increasing row. The result does not depend on it.

    Returns:
        RResult with left_out in B_l and right_out in B_k.
    """
    if b1.rank != b2.rank:
        raise ArgumentError(f"rank mismatch: {b1.rank} vs {b2.rank}")
    k, l = b1.capacity, b2.capacity

    # k >= l: right dots look for the lowest strictly higher left dot.
    # k < l: left dots look for the highest strictly lower right dot.
    if k >= l:
        seeker_mult, pool, upward = b2.mult, list(b1.mult), True
    else:
        seeker_mult, pool, upward = b1.mult, list(b2.mult), False

    seekers = [row for row, count in enumerate(seeker_mult) for _ in range(count)]
    if rng is not None:
        rng.shuffle(seekers)

    partners, unwinding = _tie(seekers, pool, upward)
    slid = tuple(p - q for p, q in zip(pool, partners))
    winding = len(seekers) - unwinding

    if k >= l:
        left_out = CrystalElement(tuple(partners))
        right_out = CrystalElement(tuple(x + y for x, y in zip(b2.mult, slid)))
    else:
        left_out = CrystalElement(tuple(x + y for x, y in zip(b1.mult, slid)))
        right_out = CrystalElement(tuple(partners))
    return RResult(left_out, right_out, unwinding, winding)


def apply_r(b1: CrystalElement, b2: CrystalElement) -> tuple[CrystalElement, CrystalElement]:
    """R as a plain map on pairs."""
    return combinatorial_r(b1, b2).pair()


def energy(b1: CrystalElement, b2: CrystalElement) -> int:
    """Energy H(b1 ⊗ b2) = -(number of unwinding lines); H(u ⊗ u) = 0."""
    return combinatorial_r(b1, b2).energy


def _guard(size: int, max_size: int) -> None:
    if size > max_size:
        raise SizeGuardError(f"enumeration of {size} elements exceeds guard {max_size}")


@lru_cache(maxsize=64)
def _oracle_table(k: int, l: int, rank: int) -> OracleTable:
    logger = get_logger()
    source = TensorWord.of(CrystalElement.vacuum(k, rank), CrystalElement.vacuum(l, rank))
    target = TensorWord.of(CrystalElement.vacuum(l, rank), CrystalElement.vacuum(k, rank))
    table: dict[tuple[CrystalElement, CrystalElement], tuple[CrystalElement, CrystalElement]] = {
        (source[0], source[1]): (target[0], target[1])
    }
    queue: deque[tuple[TensorWord, TensorWord]] = deque([(source, target)])

    while queue:
        w, image = queue.popleft()
        for i in range(rank + 1):
            for op in (tensor_f, tensor_e):
                moved = op(i, w)
                moved_image = op(i, image)
                if (moved is None) != (moved_image is None):
                    raise ConsistencyError(
                        f"{op.__name__}_{i} defined on only one side at {w} -> {image}"
                    )
                if moved is None:
                    continue
                key = (moved[0], moved[1])
                value = (moved_image[0], moved_image[1])
                known = table.get(key)
                if known is None:
                    table[key] = value
                    queue.append((moved, moved_image))
                elif known != value:
                    raise ConsistencyError(f"oracle reached {moved} with two images")

    expected = crystal_size(k, rank) * crystal_size(l, rank)
    if len(table) != expected:
        raise ConsistencyError(f"oracle table has {len(table)} of {expected} elements")
    logger.debug("Built R oracle for B_%d⊗B_%d, rank %d: %d elements", k, l, rank, len(table))
    return MappingProxyType(table)


def crystal_graph_r_oracle(
    k: int,
    l: int,
    rank: int,
    max_size: int = DEFAULT_ORACLE_MAX_SIZE,
) -> OracleTable:
    """Map every element of B_k ⊗ B_l to its R-image by walking both crystal graphs.

    Starting from u_k ⊗ u_l -> u_l ⊗ u_k, every Kashiwara operator applied to
    a source element is applied to its image as well.
    """
    if min(k, l, rank) < 1:
        raise ArgumentError(f"capacities and rank must be positive: {(k, l, rank)}")
    _guard(crystal_size(k, rank) * crystal_size(l, rank), max_size)
    return _oracle_table(k, l, rank)


def yang_baxter_check(
    k: int,
    l: int,
    m: int,
    rank: int,
    r: RMap | None = None,
    max_size: int = DEFAULT_ORACLE_MAX_SIZE,
) -> bool:
    """Check (R⊗1)(1⊗R)(R⊗1) = (1⊗R)(R⊗1)(1⊗R) on all of B_k ⊗ B_l ⊗ B_m."""
    r = r or apply_r
    _guard(crystal_size(k, rank) * crystal_size(l, rank) * crystal_size(m, rank), max_size)

    def r12(a: CrystalElement, b: CrystalElement, c: CrystalElement):
        a, b = r(a, b)
        return a, b, c

    def r23(a: CrystalElement, b: CrystalElement, c: CrystalElement):
        b, c = r(b, c)
        return a, b, c

    for a in elements(k, rank):
        for b in elements(l, rank):
            for c in elements(m, rank):
                lhs = r12(*r23(*r12(a, b, c)))
                rhs = r23(*r12(*r23(a, b, c)))
                if lhs != rhs:
                    get_logger().debug("Yang-Baxter fails at %s⊗%s⊗%s: %s != %s", a, b, c, lhs, rhs)
                    return False
    return True


def energy_axiom_failures(k: int, l: int, rank: int) -> list[tuple[int, TensorWord]]:
    """Return every (i, w) where H changes differently from the e_i three-case rule."""
    failures = []
    for b in elements(k, rank):
        for b_prime in elements(l, rank):
            w = TensorWord.of(b, b_prime)
            result = combinatorial_r(b, b_prime)
            for i in range(rank + 1):
                raised = tensor_e(i, w)
                if raised is None:
                    continue
                change = energy(raised[0], raised[1]) - result.energy
                expected = 0
                if i == 0:
                    left_here = phi(0, b) >= eps(0, b_prime)
                    left_there = phi(0, result.left_out) >= eps(0, result.right_out)
                    if left_here and left_there:
                        expected = 1
                    elif not left_here and not left_there:
                        expected = -1
                if change != expected:
                    failures.append((i, w))
    return failures
