"""Reference runs of the automaton with known outcomes.

Three runs, all with M = 3:

- two solitons "13" and "2" under T_infinity on capacity-1 boxes;
- the same two amplitudes on capacity-2 boxes under T_1, where the smaller
  soliton overtakes the larger one, with every carrier recorded;
- a two-collision run on an inhomogeneous strip, four steps of T_5 followed
  by five of T_2.

The figures fix time running downward: row 0 is the initial state.
"""

from evolution import AutomatonState, EvolutionRecord, run_evolution
from state_io import parse_ascii

RANK = 3

TWO_SOLITON_ROWS = (
    "111142113111111111111",
    "111111421311111111111",
    "111111114231111111111",
    "111111111124311111111",
    "111111111112143111111",
    "111111111111211431111",
)

OVERTAKING_ROWS = (
    "14·11·11·33·11·11·11·11·11·11·11",
    "11·14·11·13·13·11·11·11·11·11·11",
    "11·11·14·11·33·11·11·11·11·11·11",
    "11·11·11·14·13·13·11·11·11·11·11",
    "11·11·11·11·34·11·13·11·11·11·11",
    "11·11·11·11·14·13·11·13·11·11·11",
    "11·11·11·11·11·34·11·11·13·11·11",
    "11·11·11·11·11·14·13·11·11·13·11",
    "11·11·11·11·11·11·34·11·11·11·13",
)

# carrier letters v_1 .. v_12 between consecutive rows above
OVERTAKING_CARRIERS = (
    "1,4,1,1,3,1,1,1,1,1,1,1",
    "1,1,4,1,3,1,1,1,1,1,1,1",
    "1,1,1,4,1,3,1,1,1,1,1,1",
    "1,1,1,1,4,1,3,1,1,1,1,1",
    "1,1,1,1,1,3,1,3,1,1,1,1",
    "1,1,1,1,1,4,1,1,3,1,1,1",
    "1,1,1,1,1,1,3,1,1,3,1,1",
    "1,1,1,1,1,1,4,1,1,1,3,1",
)

DOUBLE_SCATTERING_ROWS = (
    "14·3·123·111·24·1·1·111·11·1·1111·1111·11111·11111·111·1111",
    "11·1·114·233·11·4·2·111·11·1·1111·1111·11111·11111·111·1111",
    "11·1·111·111·34·3·1·224·11·1·1111·1111·11111·11111·111·1111",
    "11·1·111·111·11·1·4·113·34·2·1112·1111·11111·11111·111·1111",
    "11·1·111·111·11·1·1·114·13·1·1234·1112·11111·11111·111·1111",
    "11·1·111·111·11·1·1·111·14·3·1114·1223·11111·11111·111·1111",
    "11·1·111·111·11·1·1·111·11·1·1134·1234·11112·11111·111·1111",
    "11·1·111·111·11·1·1·111·11·1·1111·2334·11114·11112·111·1111",
    "11·1·111·111·11·1·1·111·11·1·1111·1134·11123·11114·112·1111",
    "11·1·111·111·11·1·1·111·11·1·1111·1111·12334·11111·114·1112",
)

DOUBLE_SCATTERING_KAPPAS = (5, 5, 5, 5, 2, 2, 2, 2, 2)

# soliton labels read off the figures, left to right
TWO_SOLITON_LABELS = {0: ("13", "2"), 5: ("1", "23")}
OVERTAKING_LABELS = {0: ("3", "22"), 8: ("23", "2")}
DOUBLE_SCATTERING_LABELS = {0: ("1223", "13"), 4: ("23", "1123"), 9: ("1223", "13")}

TWO_SOLITON_TABLEAU = [[1, 3], [2]]
OVERTAKING_TABLEAU = [[2, 2, 3]]
DOUBLE_SCATTERING_TABLEAU = [[1, 1, 2, 2, 3], [3]]

# E_kappa for kappa = 1, 2, 3, ...; the last entry repeats for larger kappa
TWO_SOLITON_ENERGIES = (2, 3, 3)
DOUBLE_SCATTERING_ENERGIES = (2, 4, 5, 6)

# single soliton "11223" on capacities (1, 2, 1, 2, 3, 2), vacuum run L_0 = 0..5
ONE_SOLITON_CAPACITIES = (1, 2, 1, 2, 3, 2)
ONE_SOLITON_ROWS = (
    "4·33·2·12·111·11",
    "1·34·3·22·111·11",
    "1·14·3·23·112·11",
    "1·11·4·33·122·11",
    "1·11·1·34·223·11",
    "1·11·1·14·233·12",
)
# (n, n+k, x, y) of the rows above
ONE_SOLITON_READINGS = (
    (1, 4, 0, 4),
    (2, 5, 1, 5),
    (2, 5, 2, 4),
    (3, 5, 3, 3),
    (4, 6, 4, 5),
    (4, 6, 5, 4),
)


def energy_at(energies: tuple[int, ...], kappa: int) -> int:
    return energies[min(kappa, len(energies)) - 1]


def two_soliton_states() -> list[AutomatonState]:
    return [parse_ascii(row, RANK) for row in TWO_SOLITON_ROWS]


def overtaking_states() -> list[AutomatonState]:
    return [parse_ascii(row, RANK) for row in OVERTAKING_ROWS]


def overtaking_carrier_words() -> list[list[str]]:
    return [row.split(",") for row in OVERTAKING_CARRIERS]


def double_scattering_states() -> list[AutomatonState]:
    return [parse_ascii(row, RANK) for row in DOUBLE_SCATTERING_ROWS]


def one_soliton_states() -> list[AutomatonState]:
    return [parse_ascii(row, RANK) for row in ONE_SOLITON_ROWS]


def double_scattering() -> EvolutionRecord:
    """Run the two-collision experiment from its initial row."""
    return run_evolution(double_scattering_states()[0], DOUBLE_SCATTERING_KAPPAS)
