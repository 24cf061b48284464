"""Max-plus form of the carrier update.

Boxes and carriers are recoded as occupation numbers u_j, v_j where index
j counts letter M+2-j, so u_1 is the largest letter and u_{M+1} is the
number of empty slots. The update below is pure integer arithmetic and
must agree with the combinatorial R matrix on every input.
"""

from collections.abc import Sequence
from dataclasses import dataclass

from crystal import CrystalElement
from errors import ArgumentError, ConsistencyError


@dataclass(frozen=True, slots=True)
class PLBoxVars:
    """Occupation numbers (u_1, ..., u_{M+1}) of one box of capacity theta."""

    u: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.u) < 2 or any(x < 0 for x in self.u):
            raise ArgumentError(f"invalid occupation numbers {self.u}")

    @property
    def theta(self) -> int:
        return sum(self.u)

    @property
    def rank(self) -> int:
        return len(self.u) - 1


@dataclass(frozen=True, slots=True)
class PLCarrierVars:
    """Occupation numbers (v_1, ..., v_{M+1}) of a carrier of capacity kappa."""

    v: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.v) < 2 or any(x < 0 for x in self.v):
            raise ArgumentError(f"invalid occupation numbers {self.v}")

    @property
    def kappa(self) -> int:
        return sum(self.v)

    @property
    def rank(self) -> int:
        return len(self.v) - 1


def to_occupation(b: CrystalElement) -> tuple[int, ...]:
    """Recode a multiplicity vector: entry j-1 is the count of letter M+2-j."""
    return tuple(reversed(b.mult))


def from_occupation(u: Sequence[int]) -> CrystalElement:
    """Inverse of to_occupation."""
    return CrystalElement(tuple(reversed(tuple(u))))


def box_vars(b: CrystalElement) -> PLBoxVars:
    return PLBoxVars(to_occupation(b))


def carrier_vars(v: CrystalElement) -> PLCarrierVars:
    return PLCarrierVars(to_occupation(v))


def _check_ranks(u: PLBoxVars, v: PLCarrierVars) -> int:
    if u.rank != v.rank:
        raise ArgumentError(f"rank mismatch: box {u.rank}, carrier {v.rank}")
    return u.rank


def pl_carrier_step(u: PLBoxVars, v: PLCarrierVars) -> tuple[PLBoxVars, PLCarrierVars]:
    """One vertex of the automaton in max-plus form.

    Returns the box after the carrier has passed and the carrier handed to
    the next box.
    """
    rank = _check_ranks(u, v)
    theta, kappa = u.theta, v.kappa
    # X[l-1] = sum_{i=l}^{M} u_i + sum_{i=1}^{l} v_i for l = 1..M
    X = [sum(u.u[l - 1 : rank]) + sum(v.v[:l]) for l in range(1, rank + 1)]

    def bracket(boundary: int) -> int:
        # max[X_1 - theta, ..., X_boundary - theta, X_{boundary+1} - kappa, ..., X_M - kappa, 0]
        terms = [x - theta for x in X[:boundary]] + [x - kappa for x in X[boundary:]]
        return max(terms + [0])

    u_next = [v.v[j - 1] + bracket(j - 1) - bracket(j) for j in range(1, rank + 1)]
    u_next.append(theta - sum(u_next))
    v_next = [a + b - c for a, b, c in zip(u.u, v.v, u_next)]
    if any(x < 0 for x in u_next) or any(x < 0 for x in v_next):
        raise ConsistencyError(f"negative occupation from u={u.u}, v={v.v}")
    return PLBoxVars(tuple(u_next)), PLCarrierVars(tuple(v_next))


@dataclass(frozen=True, slots=True)
class PairingCounts:
    """Outcome of tying box dots to carrier dots by increasing distance.

    stages[l] holds (u^(l), v^(l)) before round l; the last entry is the
    residual after all M+1 rounds.
    """

    stages: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    unwinding: tuple[int, ...]
    winding: tuple[int, ...]

    @property
    def u_residual(self) -> tuple[int, ...]:
        return self.stages[-1][0]

    @property
    def v_residual(self) -> tuple[int, ...]:
        return self.stages[-1][1]

    @property
    def paired(self) -> int:
        return sum(self.unwinding) + sum(self.winding)


def pairing_counts(u: PLBoxVars, v: PLCarrierVars) -> PairingCounts:
    """Pair u_j with v_{j+l+1} (indices mod M+1) in rounds l = 0..M.

    unwinding[j-1] and winding[j-1] count the ties made by box letter M+2-j;
    a tie wraps when j+l+1 exceeds M+1.
    """
    rank = _check_ranks(u, v)
    size = rank + 1
    uu, vv = list(u.u), list(v.v)
    stages = [(tuple(uu), tuple(vv))]
    unwinding = [0] * size
    winding = [0] * size
    for l in range(size):
        deltas = [min(uu[j], vv[(j + l + 1) % size]) for j in range(size)]
        for j, delta in enumerate(deltas):
            uu[j] -= delta
            vv[(j + l + 1) % size] -= delta
            if j + l + 1 < size:
                unwinding[j] += delta
            else:
                winding[j] += delta
        stages.append((tuple(uu), tuple(vv)))
    return PairingCounts(tuple(stages), tuple(unwinding), tuple(winding))


def box_from_pairing(v: PLCarrierVars, pairing: PairingCounts, stage: int | None = None) -> PLBoxVars:
    """u'_j = v_j + u^(stage)_j - v^(stage)_j; the default stage is the final residual."""
    u_stage, v_stage = pairing.stages[-1 if stage is None else stage]
    return PLBoxVars(tuple(a + b - c for a, b, c in zip(v.v, u_stage, v_stage)))
