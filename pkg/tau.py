"""Ultradiscrete tau functions and the N-soliton solution of the automaton.

Y is an integer max-plus function on the (t, n, j) lattice. Its second
differences give the box occupations u^t_{n,j} and carrier occupations
v^t_{n,j} of a solution of the max-plus carrier update. Two moduli are in
play: the contents l_j are extended with period M in j, while the field
index j runs over 1..M+1 with the last entry fixed by theta or kappa.
"""

import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from itertools import product
from typing import Any

import numpy as np

from errors import ArgumentError, SolutionValidityError
from evolution import AutomatonState, Kappa
from logging_setup import get_logger
from piecewise_linear import PLBoxVars, PLCarrierVars, from_occupation, pl_carrier_step
from solitons import SolitonLabel


class SignedRangeSum:
    """sum^n of a sequence: sum over 1..n, 0 at n = 0, minus the sum over n+1..0 below.

    The difference sum^n - sum^(n-1) is term(n) for every integer n.
    """

    def __init__(self, term: Callable[[int], int]) -> None:
        self.term = term

    def __call__(self, n: int) -> int:
        if n >= 1:
            return sum(self.term(m) for m in range(1, n + 1))
        if n == 0:
            return 0
        return -sum(self.term(m) for m in range(n + 1, 1))

    def table(self, lo: int, hi: int) -> np.ndarray:
        """Values for n = lo..hi, built by telescoping from sum^lo."""
        values = np.empty(hi - lo + 1, dtype=np.int64)
        values[0] = self(lo)
        for offset in range(1, hi - lo + 1):
            values[offset] = values[offset - 1] + self.term(lo + offset)
        return values


@dataclass(frozen=True)
class Profile:
    """Capacities indexed by integers; values cover start, start+1, ..., default elsewhere."""

    values: tuple[Kappa, ...] = ()
    start: int = 1
    default: Kappa = 1

    def __post_init__(self) -> None:
        for value in self.values + (self.default,):
            if not (value == math.inf or (int(value) == value and value >= 1)):
                raise ArgumentError(f"capacities must be positive integers or inf, got {value}")

    def at(self, index: int) -> Kappa:
        offset = index - self.start
        if 0 <= offset < len(self.values):
            return self.values[offset]
        return self.default

    @classmethod
    def constant(cls, value: Kappa) -> "Profile":
        return cls((), 1, value)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any] | int | float | str) -> "Profile":
        if not isinstance(data, Mapping):
            return cls.constant(_capacity(data))
        return cls(
            tuple(_capacity(v) for v in data.get("values", ())),
            int(data.get("start", 1)),
            _capacity(data.get("default", 1)),
        )

    def to_mapping(self) -> dict[str, Any]:
        return {
            "values": [_dump_capacity(v) for v in self.values],
            "start": self.start,
            "default": _dump_capacity(self.default),
        }


def _capacity(value: Any) -> Kappa:
    if isinstance(value, str) and value.strip().lower() in {"inf", "infinity"}:
        return math.inf
    if isinstance(value, float) and math.isinf(value):
        return value
    return int(value)


def _dump_capacity(value: Kappa) -> int | str:
    return "inf" if value == math.inf else int(value)


@dataclass(frozen=True)
class TauSolitonParams:
    """Data (N, L^(i), l^(i)_j, K_0^(i), theta_n, kappa_t) of an N-soliton solution.

    contents[i][j-1] is l^(i)_j. Solitons are ordered by non-increasing
    amplitude and contents; strict=False skips the ordering checks so that
    invalid regimes can be explored.
    """

    rank: int
    amplitudes: tuple[int, ...]
    contents: tuple[tuple[int, ...], ...]
    phases: tuple[int, ...]
    theta: Profile = field(default_factory=Profile)
    kappa: Profile = field(default_factory=lambda: Profile.constant(math.inf))
    strict: bool = True

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ArgumentError(f"rank must be at least 1, got {self.rank}")
        if not len(self.amplitudes) == len(self.contents) == len(self.phases):
            raise ArgumentError("amplitudes, contents and phases must have one entry per soliton")
        for i, (amplitude, content) in enumerate(zip(self.amplitudes, self.contents), start=1):
            if len(content) != self.rank:
                raise ArgumentError(f"soliton {i} needs {self.rank} contents, got {len(content)}")
            if amplitude < 0 or any(x < 0 for x in content) or sum(content) != amplitude:
                raise ArgumentError(f"soliton {i}: contents {content} do not sum to {amplitude}")
        if self.strict:
            for i in range(1, self.count):
                if self.amplitudes[i - 1] < self.amplitudes[i]:
                    raise ArgumentError(f"amplitudes must be non-increasing: {self.amplitudes}")
                upper, lower = self.contents[i - 1], self.contents[i]
                if any(a < b for a, b in zip(upper, lower)):
                    raise ArgumentError(
                        f"contents of solitons {i} and {i + 1} violate l^(i)_j >= l^(i+1)_j"
                    )
        if self.theta.default == math.inf or any(v == math.inf for v in self.theta.values):
            raise ArgumentError("box capacities must be finite")

    @property
    def count(self) -> int:
        return len(self.amplitudes)

    @property
    def ball_count(self) -> int:
        return sum(self.amplitudes)

    def theta_at(self, n: int) -> int:
        return int(self.theta.at(n))

    def kappa_at(self, t: int) -> int:
        """kappa_t, with infinity saturated at ball count + 1."""
        value = self.kappa.at(t)
        return self.ball_count + 1 if value == math.inf else int(value)

    def content_sum(self, i: int, j: int) -> int:
        """X^(i)(j) = l^(i)_1 + ... + l^(i)_j with l extended M-periodically."""
        periods, rest = divmod(j, self.rank)
        return periods * self.amplitudes[i] + sum(self.contents[i][:rest])

    def label(self, i: int) -> SolitonLabel:
        """Tape label of soliton i: l_j counts label letter M+1-j."""
        return SolitonLabel(tuple(reversed(self.contents[i])))

    @classmethod
    def from_labels(
        cls,
        labels: Sequence[SolitonLabel],
        phases: Sequence[int],
        theta: Profile | None = None,
        kappa: Profile | None = None,
        strict: bool = True,
    ) -> "TauSolitonParams":
        if not labels:
            raise ArgumentError("from_labels needs at least one label; build N = 0 directly")
        return cls(
            rank=labels[0].rank,
            amplitudes=tuple(label.amplitude for label in labels),
            contents=tuple(tuple(reversed(label.mult)) for label in labels),
            phases=tuple(phases),
            theta=theta or Profile(),
            kappa=kappa or Profile.constant(math.inf),
            strict=strict,
        )

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "TauSolitonParams":
        """Build parameters from the params.json layout."""
        try:
            return cls(
                rank=int(data["M"]),
                amplitudes=tuple(int(x) for x in data.get("amplitudes", ())),
                contents=tuple(tuple(int(x) for x in row) for row in data.get("contents", ())),
                phases=tuple(int(x) for x in data.get("phases", ())),
                theta=Profile.from_mapping(data.get("theta", 1)),
                kappa=Profile.from_mapping(data.get("kappa", "inf")),
                strict=bool(data.get("strict", True)),
            )
        except ArgumentError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ArgumentError(f"invalid tau parameters: {exc}") from exc

    def to_mapping(self) -> dict[str, Any]:
        return {
            "M": self.rank,
            "amplitudes": list(self.amplitudes),
            "contents": [list(row) for row in self.contents],
            "phases": list(self.phases),
            "theta": self.theta.to_mapping(),
            "kappa": self.kappa.to_mapping(),
            "strict": self.strict,
        }


def _kappa_sum(params: TauSolitonParams, i: int) -> SignedRangeSum:
    amplitude = params.amplitudes[i]
    return SignedRangeSum(lambda t: min(params.kappa_at(t), amplitude))


def _theta_sum(params: TauSolitonParams, i: int) -> SignedRangeSum:
    amplitude = params.amplitudes[i]
    return SignedRangeSum(lambda n: min(params.theta_at(n), amplitude))


def phase_k(params: TauSolitonParams, i: int, t: int, n: int, j: int) -> int:
    """K^(i)(t, n, j) = K_0 - X(j) - sum^t min[kappa, L] + sum^n min[theta, L]."""
    return (
        params.phases[i]
        - params.content_sum(i, j)
        - _kappa_sum(params, i)(t)
        + _theta_sum(params, i)(n)
    )


def phase_a(params: TauSolitonParams, mu: Sequence[int], j: int) -> int:
    """A(mu; j) over the increasing indices i_1 < ... < i_p with mu = 1."""
    chosen = [i for i, bit in enumerate(mu) if bit]
    total = 0
    for k, i in enumerate(chosen, start=1):
        total += (k - 1) * params.amplitudes[i]
        total += params.content_sum(i, j + k - 1) - params.content_sum(i, j)
    return total


def phase_max(params: TauSolitonParams, t: int, n: int, j: int) -> int:
    """max over mu in {0,1}^N of sum_i mu_i K^(i)(t,n,j) - A(mu; j); this is Y^{t+1}_{n+1,j+1}."""
    phases = [phase_k(params, i, t, n, j) for i in range(params.count)]
    best = 0
    for mu in product((0, 1), repeat=params.count):
        value = sum(k for k, bit in zip(phases, mu) if bit) - phase_a(params, mu, j)
        best = max(best, value)
    return best


def to_tau_lattice(t: int, n: int, j: int) -> tuple[int, int, int]:
    """Arguments of phase_max that give Y^t_{n,j}."""
    return t - 1, n - 1, j - 1


def tau_y(params: TauSolitonParams, t: int, n: int, j: int) -> int:
    """Y^t_{n,j}."""
    return phase_max(params, *to_tau_lattice(t, n, j))


@dataclass(frozen=True)
class YGrid:
    """Y^t_{n,j} for t0 <= t <= t1, n0 <= n <= n1, 1 <= j <= M+1."""

    values: np.ndarray
    t0: int
    n0: int

    def at(self, t: int, n: int, j: int) -> int:
        return int(self.values[t - self.t0, n - self.n0, j - 1])


def y_grid(params: TauSolitonParams, t0: int, t1: int, n0: int, n1: int) -> YGrid:
    """Evaluate Y on a block of the lattice with numpy."""
    if t1 < t0 or n1 < n0:
        raise ArgumentError(f"empty window t={t0}:{t1}, n={n0}:{n1}")
    rank = params.rank
    # phase_max arguments on the shifted lattice; j = 1..M+1 maps to 0..M
    ts, ns, _ = to_tau_lattice(t0, n0, 1)
    js = np.arange(rank + 1)

    shape = (t1 - t0 + 1, n1 - n0 + 1, rank + 1)
    k_values = []
    for i in range(params.count):
        kappa_part = _kappa_sum(params, i).table(ts, ts + shape[0] - 1)
        theta_part = _theta_sum(params, i).table(ns, ns + shape[1] - 1)
        content = np.array([params.content_sum(i, int(j)) for j in js], dtype=np.int64)
        k_values.append(
            params.phases[i]
            - content[None, None, :]
            - kappa_part[:, None, None]
            + theta_part[None, :, None]
        )

    best = np.zeros(shape, dtype=np.int64)
    for mu in product((0, 1), repeat=params.count):
        if not any(mu):
            continue
        a = np.array([phase_a(params, mu, int(j)) for j in js], dtype=np.int64)
        total = sum(k for k, bit in zip(k_values, mu) if bit) - a[None, None, :]
        np.maximum(best, total, out=best)
    return YGrid(best, t0, n0)


@dataclass(frozen=True)
class FieldGrid:
    """u^t_{n,j} and v^t_{n,j} for t0 <= t <= t1, n0 <= n <= n1, j = 1..M+1."""

    u: np.ndarray
    v: np.ndarray
    t0: int
    n0: int

    def box(self, t: int, n: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.u[t - self.t0, n - self.n0])

    def carrier(self, t: int, n: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.v[t - self.t0, n - self.n0])


def _first_negative(array: np.ndarray, t0: int, n0: int) -> tuple[int, int, int] | None:
    hits = np.argwhere(array < 0)
    if hits.size == 0:
        return None
    t, n, j = (int(x) for x in hits[0])
    return t + t0, n + n0, j + 1


def field_grid(params: TauSolitonParams, t0: int, t1: int, n0: int, n1: int) -> FieldGrid:
    """Second differences of Y on a block, with the (M+1)-th entries from theta and kappa.

    Raises:
        SolutionValidityError: at the first site with a negative occupation.
    """
    grid = y_grid(params, t0, t1 + 1, n0, n1 + 1).values
    rank = params.rank
    T, W = t1 - t0 + 1, n1 - n0 + 1

    y = grid[:T, :W, :rank]
    y_n = grid[:T, 1 : W + 1, :rank]
    y_j = grid[:T, :W, 1 : rank + 1]
    y_nj = grid[:T, 1 : W + 1, 1 : rank + 1]
    y_t = grid[1 : T + 1, :W, :rank]
    y_tj = grid[1 : T + 1, :W, 1 : rank + 1]

    u_head = y_n + y_j - y - y_nj
    v_head = y_tj + y - y_j - y_t

    thetas = np.array([params.theta_at(n) for n in range(n0, n1 + 1)], dtype=np.int64)
    kappas = np.array([params.kappa_at(t) for t in range(t0, t1 + 1)], dtype=np.int64)
    u_last = thetas[None, :] - u_head.sum(axis=2)
    v_last = kappas[:, None] - v_head.sum(axis=2)
    u = np.concatenate([u_head, u_last[:, :, None]], axis=2)
    v = np.concatenate([v_head, v_last[:, :, None]], axis=2)

    for name, array in (("u", u), ("v", v)):
        site = _first_negative(array, t0, n0)
        if site is not None:
            raise SolutionValidityError(
                f"negative {name} at t={site[0]}, n={site[1]}, j={site[2]}", site
            )
    return FieldGrid(u, v, t0, n0)


def fields_from_Y(params: TauSolitonParams, t: int, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(u^t_{n,1..M+1}, v^t_{n,1..M+1}) from the tau function."""
    rank = params.rank

    def Y(tt: int, nn: int, j: int) -> int:
        return tau_y(params, tt, nn, j)

    u = [Y(t, n + 1, j) + Y(t, n, j + 1) - Y(t, n, j) - Y(t, n + 1, j + 1) for j in range(1, rank + 1)]
    v = [Y(t + 1, n, j + 1) + Y(t, n, j) - Y(t, n, j + 1) - Y(t + 1, n, j) for j in range(1, rank + 1)]
    u.append(params.theta_at(n) - sum(u))
    v.append(params.kappa_at(t) - sum(v))
    for name, values in (("u", u), ("v", v)):
        for j, value in enumerate(values, start=1):
            if value < 0:
                raise SolutionValidityError(f"negative {name} at t={t}, n={n}, j={j}", (t, n, j))
    return tuple(u), tuple(v)


def state_from_fields(params: TauSolitonParams, t: int, n0: int, n1: int) -> AutomatonState:
    """Boxes n0..n1 at time t as an automaton state."""
    fields = field_grid(params, t, t, n0, n1)
    boxes = tuple(from_occupation(fields.box(t, n)) for n in range(n0, n1 + 1))
    return AutomatonState(params.rank, boxes, n0, int(params.theta.default))


def tau_trajectory(
    params: TauSolitonParams, t0: int, t1: int, n0: int, n1: int
) -> list[AutomatonState]:
    """States for t = t0..t1 on the window n0..n1."""
    fields = field_grid(params, t0, t1, n0, n1)
    default = int(params.theta.default)
    return [
        AutomatonState(
            params.rank,
            tuple(from_occupation(fields.box(t, n)) for n in range(n0, n1 + 1)),
            n0,
            default,
        )
        for t in range(t0, t1 + 1)
    ]


def pl_residual(params: TauSolitonParams, t0: int, t1: int, n0: int, n1: int) -> int:
    """Largest violation of the max-plus update by the tau fields on the window.

    For every (t, n) the pair (u^t_n, v^t_n) is pushed through the update and
    compared with (u^{t+1}_n, v^t_{n+1}).
    """
    fields = field_grid(params, t0, t1 + 1, n0, n1 + 1)
    worst = 0
    for t in range(t0, t1 + 1):
        for n in range(n0, n1 + 1):
            box, carrier = pl_carrier_step(
                PLBoxVars(fields.box(t, n)), PLCarrierVars(fields.carrier(t, n))
            )
            expected_box = fields.box(t + 1, n)
            expected_carrier = fields.carrier(t, n + 1)
            violation = max(
                max(abs(a - b) for a, b in zip(box.u, expected_box)),
                max(abs(a - b) for a, b in zip(carrier.v, expected_carrier)),
            )
            if violation:
                get_logger().debug("Max-plus update violated by %d at t=%d, n=%d", violation, t, n)
            worst = max(worst, violation)
    return worst
