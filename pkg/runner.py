"""Experiment runner: one entry point for every command, a batch pool, and Parquet export."""

import json
import threading
from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import pyarrow as pa
import pyarrow.parquet as pq
from pyarrow import ArrowInvalid

from config import Config
from conserved import energy_kappa, rsk_tableau
from crystal import CrystalElement
from errors import ArgumentError, AutomatonError, IntegrityError
from evolution import AutomatonState, EvolutionRecord, Kappa, run_evolution, verify_record
from logging_setup import get_logger
from piecewise_linear import box_vars, carrier_vars, from_occupation, pl_carrier_step
from rmatrix import combinatorial_r, crystal_graph_r_oracle, yang_baxter_check
from solitons import SolitonLabel, classify, label_r, scatter
from state_io import (
    format_kappa,
    parse_ascii,
    parse_kappas,
    parse_profile,
    render_ascii,
    render_carriers,
    state_from_dict,
    state_to_dict,
)
from tau import TauSolitonParams, field_grid, pl_residual, tau_trajectory
from verify import run_suite

KINDS = ("evolve", "scatter", "rmatrix", "plstep", "conserved", "tau", "verify")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

RECORD_COLUMNS = ("t", "n", "theta", "kappa", "box", "carrier")


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: a kind, its parameters, and the seed of any randomized part."""

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ArgumentError(f"unknown experiment kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if not isinstance(self.params, Mapping):
            raise ArgumentError("experiment params must be an object")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ExperimentSpec":
        if not isinstance(data, Mapping) or "kind" not in data:
            raise ArgumentError("experiment spec needs a kind")
        seed = data.get("seed")
        return cls(str(data["kind"]), dict(data.get("params", {})), None if seed is None else int(seed))

    def to_mapping(self) -> dict[str, Any]:
        data: dict[str, Any] = {"kind": self.kind, "params": dict(self.params)}
        if self.seed is not None:
            data["seed"] = self.seed
        return data


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    status: int
    report: dict[str, Any]
    lines: list[str] = field(default_factory=list)


def _require(params: Mapping[str, Any], *keys: str) -> None:
    missing = [key for key in keys if key not in params]
    if missing:
        raise ArgumentError(f"missing parameter(s): {', '.join(missing)}")


def _kappa_list(value: Any) -> list[Kappa]:
    if isinstance(value, str):
        return parse_kappas(value)
    if isinstance(value, Sequence):
        return [parse_kappas(str(v))[0] for v in value]
    return parse_kappas(str(value))


def _state(params: Mapping[str, Any]) -> AutomatonState:
    if "state" in params:
        return state_from_dict(params["state"])
    _require(params, "ascii", "M")
    return parse_ascii(str(params["ascii"]), int(params["M"]), int(params.get("window_start", 0)))


def _run_evolve(params: Mapping[str, Any], config: Config) -> ExperimentResult:
    state = _state(params)
    kappas = _kappa_list(params.get("kappa", "inf"))
    steps = int(params.get("steps", len(kappas)))
    schedule = [kappas[t % len(kappas)] for t in range(steps)]
    record = run_evolution(state, schedule, config.extension_cap)
    dialect = str(params.get("dialect", "auto"))

    lines = [render_ascii(s, dialect) for s in record.states]
    report = {
        "kappas": [format_kappa(k) for k in schedule],
        "rows": lines,
        "carriers": [render_carriers(row) for row in record.carriers],
        "final": state_to_dict(record.states[-1]),
    }
    if params.get("record"):
        path = Path(str(params["record"]))
        write_record_parquet(record, path)
        check_record_file(path)
        report["record"] = str(path)
    if params.get("show_carriers"):
        lines = [
            line
            for t, row in enumerate(lines)
            for line in ([row, "  " + report["carriers"][t]] if t < record.steps else [row])
        ]
    return ExperimentResult(ExperimentSpec("evolve", params), EXIT_OK, report, lines)


def _theta_arg(value: Any) -> int | list[int]:
    if isinstance(value, int):
        return value
    profile = parse_profile(str(value))
    return profile[0] if len(set(profile)) == 1 else profile


def _run_scatter(params: Mapping[str, Any], config: Config) -> ExperimentResult:
    _require(params, "M", "left", "right")
    rank = int(params["M"])
    left = SolitonLabel.from_word(str(params["left"]), rank)
    right = SolitonLabel.from_word(str(params["right"]), rank)
    theta = _theta_arg(params.get("theta", 1))
    kappas = _kappa_list(params.get("kappa", "inf"))
    kappa: Kappa | list[Kappa] = kappas[0] if len(kappas) == 1 else kappas

    trace: list[str] = []

    def on_step(step: int, state: AutomatonState) -> None:
        trace.append(f"{step:>4} {render_ascii(state)}")

    result = scatter(
        left,
        right,
        theta,
        kappa,
        max_steps=config.scatter_max_steps,
        separation_margin=config.separation_margin,
        on_step=on_step if params.get("trace") else None,
    )
    predicted = label_r(left, right)
    regime = None
    if isinstance(theta, int) and not isinstance(kappa, list) and left.amplitude != right.amplitude:
        large, small = sorted((left.amplitude, right.amplitude), reverse=True)
        regime = classify(large, small, theta, kappa)

    matches = result.outgoing == predicted
    status = EXIT_FAILED if regime in ("I", "II") and not matches else EXIT_OK
    report = {
        "incoming": [left.word(), right.word()],
        "outgoing": [label.word() for label in result.outgoing],
        "predicted": [label.word() for label in predicted],
        "matches_prediction": matches,
        "overtook": result.overtook,
        "steps": result.steps,
        "class": regime,
    }
    verdict = "matches" if matches else "differs from"
    lines = trace + [
        f"{left}⊗{right} -> {result.outgoing[0]}⊗{result.outgoing[1]} after {result.steps} steps",
        f"R' prediction {predicted[0]}⊗{predicted[1]}: outcome {verdict} prediction",
    ]
    return ExperimentResult(ExperimentSpec("scatter", params), status, report, lines)


def _run_rmatrix(params: Mapping[str, Any], config: Config) -> ExperimentResult:
    if "check_yb" in params:
        k, l, m, rank = (int(x) for x in params["check_yb"])
        holds = yang_baxter_check(k, l, m, rank, max_size=config.oracle_max_size)
        report = {"yang_baxter": holds, "k": k, "l": l, "m": m, "M": rank}
        line = f"Yang-Baxter on B_{k}⊗B_{l}⊗B_{m}, M={rank}: {'holds' if holds else 'FAILS'}"
        return ExperimentResult(
            ExperimentSpec("rmatrix", params), EXIT_OK if holds else EXIT_FAILED, report, [line]
        )

    _require(params, "M", "left", "right")
    rank = int(params["M"])
    b1 = CrystalElement.from_word(str(params["left"]), rank)
    b2 = CrystalElement.from_word(str(params["right"]), rank)
    result = combinatorial_r(b1, b2)
    left, right = result.pair()
    method = "winding"
    if params.get("oracle"):
        table = crystal_graph_r_oracle(b1.capacity, b2.capacity, rank, config.oracle_max_size)
        left, right = table[(b1, b2)]
        method = "oracle"
    report = {
        "method": method,
        "left": left.word(),
        "right": right.word(),
        "energy": result.energy,
        "unwinding": result.unwinding,
        "winding": result.winding,
    }
    lines = [f"{b1}⊗{b2} -> {left}⊗{right}", f"H = {result.energy}"]
    return ExperimentResult(ExperimentSpec("rmatrix", params), EXIT_OK, report, lines)


def _run_plstep(params: Mapping[str, Any], config: Config) -> ExperimentResult:
    _require(params, "M", "box", "carrier")
    rank = int(params["M"])
    box = CrystalElement.from_word(str(params["box"]), rank)
    carrier = CrystalElement.from_word(str(params["carrier"]), rank)
    for name, element, key in (("box", box, "theta"), ("carrier", carrier, "kappa")):
        if key in params and int(params[key]) != element.capacity:
            raise ArgumentError(f"{name} {element} does not have capacity {params[key]}")

    new_box, new_carrier = pl_carrier_step(box_vars(box), carrier_vars(carrier))
    pl = (from_occupation(new_box.u), from_occupation(new_carrier.v))
    r = combinatorial_r(carrier, box).pair()
    matches = pl == r
    report = {
        "u": list(box_vars(box).u),
        "v": list(carrier_vars(carrier).v),
        "u_next": list(new_box.u),
        "v_next": list(new_carrier.v),
        "pl": [pl[0].word(), pl[1].word()],
        "r_matrix": [r[0].word(), r[1].word()],
        "match": matches,
    }
    lines = [
        f"max-plus: box {box} -> {pl[0]}, carrier {carrier} -> {pl[1]}",
        f"R matrix: {carrier}⊗{box} -> {r[0]}⊗{r[1]}",
        "match" if matches else "MISMATCH",
    ]
    return ExperimentResult(
        ExperimentSpec("plstep", params), EXIT_OK if matches else EXIT_FAILED, report, lines
    )


def _run_conserved(params: Mapping[str, Any], config: Config) -> ExperimentResult:
    state = _state(params)
    kappas = _kappa_list(params.get("kappas", "1,2,3,inf"))
    energies = {format_kappa(k): energy_kappa(state, k, config.extension_cap) for k in kappas}
    tableau = rsk_tableau(state).to_lists()
    report = {"energies": energies, "tableau": tableau}
    lines = [f"E_{k} = {value}" for k, value in energies.items()]
    lines.append(f"tableau {json.dumps(tableau)}")
    return ExperimentResult(ExperimentSpec("conserved", params), EXIT_OK, report, lines)


def parse_window(text: str) -> tuple[int, int, int, int]:
    """"t0:t1,n0:n1" -> (t0, t1, n0, n1)."""
    try:
        times, sites = text.split(",")
        t0, t1 = (int(x) for x in times.split(":"))
        n0, n1 = (int(x) for x in sites.split(":"))
    except ValueError as exc:
        raise ArgumentError(f"window must look like t0:t1,n0:n1, got {text!r}") from exc
    if t1 < t0 or n1 < n0:
        raise ArgumentError(f"empty window {text!r}")
    return t0, t1, n0, n1


def _run_tau(params: Mapping[str, Any], config: Config) -> ExperimentResult:
    _require(params, "params", "window")
    tau_params = TauSolitonParams.from_mapping(params["params"])
    t0, t1, n0, n1 = parse_window(str(params["window"]))
    emit = str(params.get("emit", "ascii"))

    if emit == "residual":
        residual = pl_residual(tau_params, t0, t1, n0, n1)
        report = {"residual": residual}
        return ExperimentResult(
            ExperimentSpec("tau", params),
            EXIT_OK if residual == 0 else EXIT_FAILED,
            report,
            [f"max violation {residual}"],
        )
    if emit == "fields":
        grid = field_grid(tau_params, t0, t1, n0, n1)
        report = {"u": grid.u.tolist(), "v": grid.v.tolist(), "t0": t0, "n0": n0}
        lines = [
            f"t={t} n={n} u={list(grid.box(t, n))} v={list(grid.carrier(t, n))}"
            for t in range(t0, t1 + 1)
            for n in range(n0, n1 + 1)
        ]
        return ExperimentResult(ExperimentSpec("tau", params), EXIT_OK, report, lines)
    if emit == "ascii":
        states = tau_trajectory(tau_params, t0, t1, n0, n1)
        rows = [render_ascii(s) for s in states]
        return ExperimentResult(ExperimentSpec("tau", params), EXIT_OK, {"rows": rows}, rows)
    raise ArgumentError(f"unknown emit mode {emit!r}; choose from fields, ascii, residual")


def _run_verify(params: Mapping[str, Any], config: Config, seed: int | None) -> ExperimentResult:
    suite = str(params.get("suite", "all"))
    cases = int(params.get("cases", config.random_cases))
    seed = config.seed if seed is None else seed
    report = run_suite(suite, seed=seed, cases=cases)
    lines = [
        f"{'PASS' if r.passed else 'FAIL'} {r.name}" + (f": {r.detail}" if r.detail else "")
        for r in report.results
    ]
    lines.append(f"{len(report.results) - len(report.failures)}/{len(report.results)} checks passed")
    data = {
        "suite": suite,
        "seed": seed,
        "passed": report.passed,
        "results": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in report.results],
    }
    return ExperimentResult(
        ExperimentSpec("verify", params, seed), EXIT_OK if report.passed else EXIT_FAILED, data, lines
    )


def run(spec: ExperimentSpec, config: Config) -> ExperimentResult:
    """Run one experiment; errors become a status code and an error report."""
    handlers: dict[str, Callable[[Mapping[str, Any], Config], ExperimentResult]] = {
        "evolve": _run_evolve,
        "scatter": _run_scatter,
        "rmatrix": _run_rmatrix,
        "plstep": _run_plstep,
        "conserved": _run_conserved,
        "tau": _run_tau,
    }
    try:
        if spec.kind == "verify":
            result = _run_verify(spec.params, config, spec.seed)
        else:
            result = handlers[spec.kind](spec.params, config)
    except ArgumentError as exc:
        return ExperimentResult(spec, EXIT_USAGE, {"error": str(exc)}, [f"error: {exc}"])
    except (AutomatonError, TimeoutError) as exc:
        return ExperimentResult(spec, EXIT_FAILED, {"error": str(exc)}, [f"error: {exc}"])
    except (KeyError, TypeError, ValueError) as exc:
        message = f"invalid {spec.kind} parameters: {exc}"
        return ExperimentResult(spec, EXIT_USAGE, {"error": message}, [f"error: {message}"])
    result.spec = spec
    return result


def read_specs(path: Path) -> list[ExperimentSpec]:
    """One JSON object per line; blank lines are skipped."""
    specs = []
    for number, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            specs.append(ExperimentSpec.from_mapping(json.loads(line)))
        except json.JSONDecodeError as exc:
            raise ArgumentError(f"{path}:{number}: invalid JSON: {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise ArgumentError(f"{path}:{number}: invalid spec: {exc}") from exc
    return specs


def run_batch(
    specs: Sequence[ExperimentSpec],
    config: Config,
    on_progress: Callable[[int, int], None] | None = None,
) -> list[ExperimentResult]:
    """Run experiments on a thread pool; results come back in submission order."""
    logger = get_logger()
    results: list[ExperimentResult | None] = [None] * len(specs)
    completed = 0
    lock = threading.Lock()
    total = len(specs)

    with ThreadPoolExecutor(max_workers=config.concurrent_experiments) as executor:
        futures = {executor.submit(run, spec, config): index for index, spec in enumerate(specs)}
        for future in as_completed(futures):
            index = futures[future]
            results[index] = future.result()
            with lock:
                completed += 1
                current = completed
            logger.debug(
                "Experiment %d (%s) finished with status %d", index, specs[index].kind, results[index].status
            )
            if on_progress:
                on_progress(current, total)

    return [r for r in results if r is not None]


def write_results_jsonl(results: Sequence[ExperimentResult], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        for result in results:
            row = {"spec": result.spec.to_mapping(), "status": result.status, "report": result.report}
            f.write(json.dumps(row, sort_keys=True) + "\n")


def results_to_table(results: Sequence[ExperimentResult]) -> pa.Table:
    return pa.table(
        {
            "index": pa.array(range(len(results)), type=pa.int64()),
            "kind": pa.array([r.spec.kind for r in results], type=pa.string()),
            "status": pa.array([r.status for r in results], type=pa.int64()),
            "spec": pa.array([json.dumps(r.spec.to_mapping(), sort_keys=True) for r in results]),
            "report": pa.array([json.dumps(r.report, sort_keys=True) for r in results]),
        }
    )


def write_results_parquet(results: Sequence[ExperimentResult], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    pq.write_table(results_to_table(results), path)


def record_to_table(record: EvolutionRecord) -> pa.Table:
    """Long format: one row per (t, n), plus the carrier leaving the window at n = window end.

    Boxes and carriers are multiplicity vectors; rows at the last time have
    no carrier and the exit rows have no box.
    """
    first = record.states[0]
    ts, ns, thetas, kappas, boxes, carriers = [], [], [], [], [], []
    for t, state in enumerate(record.states):
        has_carrier = t < record.steps
        for i, box in enumerate(state.boxes):
            ts.append(t + record.time_start)
            ns.append(record.window_start + i)
            thetas.append(box.capacity)
            kappas.append(record.kappas[t] if has_carrier else None)
            boxes.append(list(box.mult))
            carriers.append(list(record.carriers[t][i].mult) if has_carrier else None)
        if has_carrier:
            ts.append(t + record.time_start)
            ns.append(record.window_start + record.width)
            thetas.append(None)
            kappas.append(record.kappas[t])
            boxes.append(None)
            carriers.append(list(record.carriers[t][-1].mult))

    metadata = {
        "M": str(first.rank),
        "window_start": str(record.window_start),
        "time_start": str(record.time_start),
        "default_capacity": str(first.default_capacity),
        "width": str(record.width),
        "steps": str(record.steps),
    }
    schema = pa.schema(
        [
            ("t", pa.int64()),
            ("n", pa.int64()),
            ("theta", pa.int64()),
            ("kappa", pa.int64()),
            ("box", pa.list_(pa.int64())),
            ("carrier", pa.list_(pa.int64())),
        ],
        metadata={key.encode(): value.encode() for key, value in metadata.items()},
    )
    return pa.table([ts, ns, thetas, kappas, boxes, carriers], schema=schema)


def write_record_parquet(record: EvolutionRecord, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    pq.write_table(record_to_table(record), path)


def read_record_parquet(path: Path) -> EvolutionRecord:
    """Rebuild a record written by write_record_parquet."""
    table = pq.read_table(path)
    meta = {k.decode(): v.decode() for k, v in (table.schema.metadata or {}).items()}
    try:
        rank = int(meta["M"])
        window_start = int(meta["window_start"])
        time_start = int(meta["time_start"])
        default = int(meta["default_capacity"])
        width = int(meta["width"])
        steps = int(meta["steps"])
    except (KeyError, ValueError) as exc:
        raise IntegrityError(f"{path}: missing record metadata: {exc}") from exc

    rows = table.to_pylist()
    if len(rows) != (steps + 1) * width + steps:
        raise IntegrityError(f"{path}: expected {(steps + 1) * width + steps} rows, found {len(rows)}")
    boxes: list[list[CrystalElement | None]] = [[None] * width for _ in range(steps + 1)]
    carriers: list[list[CrystalElement | None]] = [[None] * (width + 1) for _ in range(steps)]
    kappas: list[int | None] = [None] * steps
    for row in rows:
        t, i = row["t"] - time_start, row["n"] - window_start
        if not (0 <= t <= steps and 0 <= i <= width):
            raise IntegrityError(f"{path}: row outside the record at t={row['t']}, n={row['n']}")
        if row["box"] is not None and i < width:
            boxes[t][i] = CrystalElement(tuple(row["box"]))
        if row["carrier"] is not None and t < steps:
            carriers[t][i] = CrystalElement(tuple(row["carrier"]))
            kappas[t] = row["kappa"]

    if any(b is None for row in boxes for b in row) or any(v is None for row in carriers for v in row):
        raise IntegrityError(f"{path}: record has missing entries")
    states = tuple(AutomatonState(rank, tuple(row), window_start, default) for row in boxes)
    return EvolutionRecord(
        states, tuple(tuple(row) for row in carriers), tuple(int(k) for k in kappas), time_start
    )


def check_record_file(path: Path) -> EvolutionRecord:
    """Validate Parquet footer and schema, then re-verify every vertex of the record."""
    try:
        pq.read_metadata(path)
        schema = pq.read_schema(path)
    except (ArrowInvalid, OSError) as exc:
        raise IntegrityError(f"{path}: not a readable Parquet file: {exc}") from exc
    missing = [name for name in RECORD_COLUMNS if name not in schema.names]
    if missing:
        raise IntegrityError(f"{path}: missing columns {', '.join(missing)}")
    record = read_record_parquet(path)
    verify_record(record)
    return record
