"""Acceptance suites: the worked examples and seeded randomized property checks."""

import math
import random
from collections.abc import Callable
from dataclasses import dataclass, field

import worked_examples as ex
from conserved import energy_kappa, rsk_tableau
from crystal import CrystalElement
from errors import ArgumentError, AutomatonError, VerificationError
from evolution import (
    AutomatonState,
    Kappa,
    canonicalize,
    dual_record,
    evolve,
    evolve_box_ball,
    evolve_infinity,
    evolve_inverse,
    run_evolution,
    verify_record,
)
from logging_setup import get_logger
from piecewise_linear import box_vars, carrier_vars, from_occupation, pl_carrier_step
from rmatrix import apply_r, combinatorial_r, crystal_graph_r_oracle
from solitons import (
    SolitonLabel,
    SolitonPlacement,
    classify,
    extract_solitons,
    inject,
    label_r,
    measured_displacement,
    read_one_soliton,
    scatter,
    two_soliton_placement,
    velocity_check,
)
from state_io import render_ascii
from tau import Profile, TauSolitonParams, pl_residual, tau_trajectory

# Older name of the worked-examples suite, still accepted.
SUITE_ALIASES = {"paper-examples": "worked-examples"}
SUITES = ("worked-examples", "properties", "all", *SUITE_ALIASES)
KAPPA_CHOICES: tuple[Kappa, ...] = (1, 2, 3, 4, 5, 6, math.inf)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]


def expect(condition: bool, message: str) -> None:
    if not condition:
        raise VerificationError(message)


def random_element(rng: random.Random, capacity: int, rank: int) -> CrystalElement:
    return CrystalElement.from_letters([rng.randint(1, rank + 1) for _ in range(capacity)], rank)


def random_state(
    rng: random.Random,
    rank: int,
    width: int,
    max_capacity: int = 3,
    density: float = 0.4,
) -> AutomatonState:
    """Random boxes of random capacity; each slot holds a ball with the given probability."""
    boxes = []
    for _ in range(width):
        theta = rng.randint(1, max_capacity)
        letters = [rng.randint(2, rank + 1) if rng.random() < density else 1 for _ in range(theta)]
        boxes.append(CrystalElement.from_letters(letters, rank))
    return AutomatonState(rank, tuple(boxes), rng.randint(-3, 3), rng.randint(1, max_capacity))


def random_label(rng: random.Random, amplitude: int, rank: int) -> SolitonLabel:
    return SolitonLabel.from_element(
        CrystalElement.from_letters([rng.randint(1, rank) for _ in range(amplitude)], rank - 1)
    ) if rank > 1 else SolitonLabel.trivial(amplitude)


def random_one_soliton(rng: random.Random, rank: int, max_amplitude: int = 4) -> AutomatonState:
    """A single soliton with a random label on a random capacity profile."""
    label = random_label(rng, rng.randint(1, max_amplitude), rank)
    lead = rng.randint(0, 6)
    capacities: list[int] = []
    while sum(capacities) < lead + label.amplitude + 1:
        capacities.append(rng.randint(1, 3))
    tail = sum(capacities) - lead - label.amplitude
    placement = SolitonPlacement((label,), (lead, tail), tuple(capacities), rank, 0, rng.randint(1, 3))
    return inject(placement)


def class_parameters(rng: random.Random, wanted: str) -> tuple[int, int, int, Kappa]:
    """Draw homogeneous (l, k, theta, kappa) with l > k in the requested class."""
    while True:
        k = rng.randint(1, 2)
        l = rng.randint(k + 1, 4)
        theta = rng.randint(1, 4)
        kappa = rng.choice(KAPPA_CHOICES)
        if classify(l, k, theta, kappa) == wanted:
            return l, k, theta, kappa


def _words(labels: tuple[SolitonLabel, ...]) -> tuple[str, ...]:
    return tuple(label.word() for label in labels)


# worked examples


def check_two_soliton_rows() -> None:
    states = ex.two_soliton_states()
    current = states[0]
    for t, expected in enumerate(ex.TWO_SOLITON_ROWS[1:], start=1):
        boxed = evolve_box_ball(current)
        current = evolve_infinity(current)
        expect(render_ascii(current) == expected, f"row {t}: {render_ascii(current)} != {expected}")
        expect(boxed.same_configuration(current), f"box-ball rule differs at row {t}")
    back = evolve_inverse(states[1], math.inf)
    expect(back.same_configuration(states[0]), "inverse step does not return to row 0")


def check_overtaking_record() -> None:
    states = ex.overtaking_states()
    record = run_evolution(states[0], [1] * (len(states) - 1))
    verify_record(record)
    carriers = ex.overtaking_carrier_words()
    for t, expected in enumerate(ex.OVERTAKING_ROWS):
        got = render_ascii(record.states[t])
        expect(got == expected, f"row {t}: {got} != {expected}")
    for t, expected in enumerate(carriers):
        got = [v.word() for v in record.carriers[t]]
        expect(got == expected, f"carriers {t}: {got} != {expected}")
    back = evolve_inverse(states[7], 1)
    expect(back.same_configuration(states[6]), "inverse step does not return row 7 to row 6")

    dual = dual_record(record)
    verify_record(dual)
    again = dual_record(dual)
    expect(again.states == record.states and again.carriers == record.carriers, "dual is not an involution")


def check_double_scattering() -> None:
    record = ex.double_scattering()
    verify_record(record)
    for t, expected in enumerate(ex.DOUBLE_SCATTERING_ROWS):
        got = render_ascii(record.states[t])
        expect(got == expected, f"row {t}: {got} != {expected}")


def check_labels() -> None:
    runs = (
        (ex.two_soliton_states(), ex.TWO_SOLITON_LABELS),
        (ex.overtaking_states(), ex.OVERTAKING_LABELS),
        (ex.double_scattering_states(), ex.DOUBLE_SCATTERING_LABELS),
    )
    for states, labels in runs:
        for t, expected in labels.items():
            found = extract_solitons(states[t], separation_threshold=1)
            expect(found.asymptotic, f"row {t} is not separated: {found.reason}")
            expect(_words(found.labels) == expected, f"row {t}: {_words(found.labels)} != {expected}")

    rows = [ex.DOUBLE_SCATTERING_LABELS[t] for t in (0, 4, 9)]
    for before, after in zip(rows, rows[1:]):
        b, c = (SolitonLabel.from_word(w, ex.RANK) for w in before)
        expect(_words(label_r(b, c)) == after, f"R' of {before} is not {after}")


def check_conserved() -> None:
    runs = (
        (ex.two_soliton_states(), ex.TWO_SOLITON_ENERGIES, ex.TWO_SOLITON_TABLEAU),
        (ex.overtaking_states(), ex.TWO_SOLITON_ENERGIES, ex.OVERTAKING_TABLEAU),
        (ex.double_scattering_states(), ex.DOUBLE_SCATTERING_ENERGIES, ex.DOUBLE_SCATTERING_TABLEAU),
    )
    for states, energies, tableau in runs:
        for t, state in enumerate(states):
            for kappa in range(1, 7):
                got = energy_kappa(state, kappa)
                want = ex.energy_at(energies, kappa)
                expect(got == want, f"E_{kappa} of row {t} is {got}, expected {want}")
            rows = rsk_tableau(state).to_lists()
            expect(rows == tableau, f"tableau of row {t} is {rows}, expected {tableau}")


def check_one_soliton() -> None:
    label = SolitonLabel.from_word("11223", ex.RANK)
    states = ex.one_soliton_states()
    for lead, (row, reading) in enumerate(zip(ex.ONE_SOLITON_ROWS, ex.ONE_SOLITON_READINGS)):
        placement = SolitonPlacement((label,), (lead, 6 - lead), ex.ONE_SOLITON_CAPACITIES, ex.RANK)
        state = inject(placement)
        expect(render_ascii(state) == row, f"L_0={lead}: {render_ascii(state)} != {row}")
        got = read_one_soliton(state)
        expect(got is not None, f"L_0={lead} not read as one soliton")
        got_reading = (got.n, got.n + got.k, got.x, got.y)
        expect(got_reading == reading, f"L_0={lead}: reading {got_reading} != {reading}")
    for kappa in KAPPA_CHOICES:
        moved = evolve(states[0], kappa)[0]
        target = states[int(min(kappa, 5))]
        expect(moved.same_configuration(target), f"T_{kappa} of the first row is {render_ascii(moved)}")
        expect(
            velocity_check(states[0], kappa) == measured_displacement(states[0], kappa),
            f"velocity law fails for kappa={kappa}",
        )


def check_scattering() -> None:
    cases = (("13", "2", 1, math.inf, ("1", "23")), ("3", "22", 2, 1, ("23", "2")))
    for left, right, theta, kappa, expected in cases:
        b = SolitonLabel.from_word(left, ex.RANK)
        c = SolitonLabel.from_word(right, ex.RANK)
        result = scatter(b, c, theta, kappa)
        expect(_words(result.outgoing) == expected, f"{left}⊗{right} -> {_words(result.outgoing)}")
        expect(result.overtook, f"{left}⊗{right} did not overtake")


def check_r_examples() -> None:
    cases = (("13", "2", "1", "23", -1), ("23", "2", "3", "22", 0))
    for w1, w2, o1, o2, energy in cases:
        b1, b2 = CrystalElement.from_word(w1, 2), CrystalElement.from_word(w2, 2)
        result = combinatorial_r(b1, b2)
        expect((result.left_out.word(), result.right_out.word()) == (o1, o2), f"R({w1}⊗{w2})")
        expect(result.energy == energy, f"H({w1}⊗{w2}) = {result.energy}")
        table = crystal_graph_r_oracle(b1.capacity, b2.capacity, 2)
        expect(table[(b1, b2)] == result.pair(), f"oracle disagrees on {w1}⊗{w2}")

    box, carrier = CrystalElement.from_word("23", 2), CrystalElement.from_word("2", 2)
    new_box, new_carrier = pl_carrier_step(box_vars(box), carrier_vars(carrier))
    expect(from_occupation(new_box.u).word() == "22", "max-plus box update")
    expect(from_occupation(new_carrier.v).word() == "3", "max-plus carrier update")


WORKED_EXAMPLES: dict[str, Callable[[], None]] = {
    "two-soliton rows": check_two_soliton_rows,
    "overtaking record and dual": check_overtaking_record,
    "double scattering rows": check_double_scattering,
    "soliton labels": check_labels,
    "conserved quantities": check_conserved,
    "one-soliton placements and velocity": check_one_soliton,
    "scattering": check_scattering,
    "R matrix and max-plus examples": check_r_examples,
}


# seeded properties


def prop_r_oracle(rng: random.Random, cases: int) -> None:
    for _ in range(cases):
        rank, k, l = rng.randint(1, 3), rng.randint(1, 4), rng.randint(1, 4)
        b1, b2 = random_element(rng, k, rank), random_element(rng, l, rank)
        expect(crystal_graph_r_oracle(k, l, rank)[(b1, b2)] == apply_r(b1, b2), f"R({b1}⊗{b2})")


def prop_pl_matches_r(rng: random.Random, cases: int) -> None:
    for _ in range(cases):
        rank, theta, kappa = rng.randint(1, 3), rng.randint(1, 12), rng.randint(1, 12)
        b, v = random_element(rng, theta, rank), random_element(rng, kappa, rank)
        new_box, new_carrier = pl_carrier_step(box_vars(b), carrier_vars(v))
        expected = apply_r(v, b)
        got = (from_occupation(new_box.u), from_occupation(new_carrier.v))
        expect(got == expected, f"max-plus step on {v}⊗{b}")


def prop_evolution(rng: random.Random, cases: int) -> None:
    for _ in range(cases):
        state = random_state(rng, rng.randint(1, 3), rng.randint(1, 10))
        kappa, other = rng.choice(KAPPA_CHOICES), rng.choice(KAPPA_CHOICES)
        after = evolve(state, kappa)[0]
        expect(evolve_inverse(after, kappa).same_configuration(state), "inverse round trip")
        expect(
            evolve(after, other)[0].same_configuration(evolve(evolve(state, other)[0], kappa)[0]),
            "T_kappa and T_kappa' do not commute",
        )
        expect(evolve_box_ball(state).same_configuration(evolve_infinity(state)), "box-ball rule")
        if state.ball_count:
            lhs = canonicalize(evolve_infinity(state))
            rhs = evolve_infinity(canonicalize(state))
            expect(lhs.same_configuration(rhs), "canonical relabelling does not commute")


def prop_conserved(rng: random.Random, cases: int) -> None:
    for _ in range(cases):
        state = random_state(rng, rng.randint(1, 3), rng.randint(1, 8))
        kappas = [rng.choice(KAPPA_CHOICES) for _ in range(3)]
        record = run_evolution(state, kappas)
        verify_record(record)
        verify_record(dual_record(record))
        tableau = rsk_tableau(state)
        energies = [energy_kappa(state, kappa) for kappa in range(1, state.ball_count + 2)]
        for later in record.states[1:]:
            expect(rsk_tableau(later) == tableau, "tableau changed")
            got = [energy_kappa(later, kappa) for kappa in range(1, state.ball_count + 2)]
            expect(got == energies, "energies changed")


def prop_velocity(rng: random.Random, cases: int) -> None:
    for _ in range(cases):
        state = random_one_soliton(rng, rng.randint(1, 3))
        kappa = rng.choice(KAPPA_CHOICES)
        expect(
            velocity_check(state, kappa) == measured_displacement(state, kappa),
            f"velocity law fails on {render_ascii(state)} with kappa={kappa}",
        )


def prop_scattering(rng: random.Random, cases: int) -> None:
    for _ in range(cases):
        rank = rng.randint(2, 3)
        wanted = rng.choice(("I", "II"))
        l, k, theta, kappa = class_parameters(rng, wanted)
        large, small = random_label(rng, l, rank), random_label(rng, k, rank)
        left, right = (large, small) if wanted == "I" else (small, large)
        result = scatter(left, right, theta, kappa)
        expect(result.outgoing == label_r(left, right), f"class {wanted} scattering of {left}⊗{right}")


def prop_class_three(rng: random.Random, cases: int) -> None:
    for _ in range(cases):
        rank = rng.randint(1, 3)
        l, k, theta, kappa = class_parameters(rng, "III")
        large, small = random_label(rng, l, rank), random_label(rng, k, rank)
        left, right = rng.choice(((large, small), (small, large)))
        state = inject(two_soliton_placement(left, right, [theta], theta))
        for _ in range(50):
            state = evolve(state, kappa)[0].trimmed()
        expect(
            extract_solitons(state).labels == (left, right),
            f"class III pair {left}⊗{right} changed after 50 steps (theta={theta}, kappa={kappa})",
        )
        result = scatter(left, right, theta, kappa)
        expect(not result.overtook and result.outgoing == (left, right), f"class III scattering of {left}⊗{right}")


def prop_tau(rng: random.Random, cases: int) -> None:
    for _ in range(cases):
        rank = rng.randint(1, 3)
        label = random_label(rng, rng.randint(1, 3), rank)
        params = TauSolitonParams.from_labels(
            [label],
            [-5],
            theta=Profile(tuple(rng.randint(1, 3) for _ in range(40)), 1, rng.randint(1, 3)),
            kappa=Profile.constant(rng.choice(KAPPA_CHOICES)),
        )
        states = tau_trajectory(params, 0, 10, 1, 60)
        for t in range(10):
            stepped = evolve(states[t], params.kappa.at(t))[0]
            expect(stepped.same_configuration(states[t + 1]), f"tau trajectory differs at t={t + 1}")
        expect(pl_residual(params, 0, 5, 1, 40) == 0, "tau fields violate the max-plus update")


def random_tau_pair(rng: random.Random) -> TauSolitonParams:
    """Two solitons, the larger one behind, with ordered contents and random theta and kappa."""
    rank = rng.randint(1, 3)
    lower = [0] * rank
    for _ in range(rng.randint(1, 2)):
        lower[rng.randrange(rank)] += 1
    upper = list(lower)
    for _ in range(rng.randint(0, 2)):
        upper[rng.randrange(rank)] += 1
    rear = -(2 * sum(upper) + rng.randint(6, 10))
    front = rear - rng.randint(10, 20)
    return TauSolitonParams(
        rank=rank,
        amplitudes=(sum(upper), sum(lower)),
        contents=(tuple(upper), tuple(lower)),
        phases=(rear, front),
        theta=Profile(tuple(rng.randint(1, 3) for _ in range(40)), 1, rng.randint(1, 3)),
        kappa=Profile(tuple(rng.choice(KAPPA_CHOICES) for _ in range(31)), 0, rng.choice(KAPPA_CHOICES)),
    )


def prop_tau_pairs(rng: random.Random, cases: int) -> None:
    for _ in range(cases):
        params = random_tau_pair(rng)
        states = tau_trajectory(params, 0, 30, 1, 250)
        for t in range(30):
            stepped = evolve(states[t], params.kappa.at(t))[0]
            expect(
                stepped.same_configuration(states[t + 1]),
                f"two-soliton tau trajectory differs at t={t + 1} for {params.to_mapping()}",
            )
        expect(pl_residual(params, 0, 30, 1, 250) == 0, "two-soliton tau fields violate the max-plus update")


PROPERTIES: dict[str, Callable[[random.Random, int], None]] = {
    "R matches the crystal-graph oracle": prop_r_oracle,
    "max-plus step matches R": prop_pl_matches_r,
    "evolution laws": prop_evolution,
    "conserved quantities": prop_conserved,
    "one-soliton velocity": prop_velocity,
    "two-soliton scattering": prop_scattering,
    "class III pairs keep their order": prop_class_three,
    "tau function solutions": prop_tau,
    "two-soliton tau function solutions": prop_tau_pairs,
}


def _run(name: str, check: Callable[[], None]) -> CheckResult:
    try:
        check()
    except (VerificationError, AutomatonError) as exc:
        return CheckResult(name, False, str(exc))
    return CheckResult(name, True)


def run_suite(
    suite: str,
    seed: int = 0,
    cases: int = 100,
    on_check: Callable[[CheckResult], None] | None = None,
) -> SuiteReport:
    """Run a named suite; every check runs even after a failure.

    Args:
        suite: One of SUITES.
        seed: Seed of the randomized checks; each check gets its own generator.
        cases: Random cases per property.
        on_check: Called with each result as it completes.

    Returns:
        SuiteReport with one CheckResult per check.
    """
    if suite not in SUITES:
        raise ArgumentError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    logger = get_logger()
    report = SuiteReport(suite)
    checks: list[tuple[str, Callable[[], None]]] = []
    kind = SUITE_ALIASES.get(suite, suite)
    if kind in ("worked-examples", "all"):
        checks.extend(WORKED_EXAMPLES.items())
    if kind in ("properties", "all"):
        for offset, (name, prop) in enumerate(PROPERTIES.items()):
            rng = random.Random(seed * 1_000_003 + offset)
            checks.append((name, lambda prop=prop, rng=rng: prop(rng, cases)))

    for name, check in checks:
        logger.debug("Running check: %s", name)
        result = _run(name, check)
        report.results.append(result)
        if on_check:
            on_check(result)
    return report
