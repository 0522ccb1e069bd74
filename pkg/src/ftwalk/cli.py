"""Command-line front end: graph → operator → decomposition → program → report.

Exit codes: 0 success, 2 rejected input, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import steane, synth
from .csd import cs_decompose, pad_to_power_of_two, read_decomposition, write_decomposition
from .errors import InternalError, ValidationError
from .matcore import distance, error_stats, read_matrix, write_matrix
from .synth import (
    TableSet,
    effective_matrix,
    read_program,
    read_table,
    read_tables,
    search,
    table_filename,
    table_summary,
    write_program,
    write_tables,
)
from .walkgen import (
    build_state_index,
    build_walk_operator,
    load_coin_file,
    parse_graph_file,
    parse_order_file,
    state_probabilities,
)

__all__ = ["main", "VerificationReport", "build_report"]

_POLICY_FLAG = {"best": "best_r_first", "shortest": "shortest_first"}


@dataclass(frozen=True)
class VerificationReport:
    """How closely a gate program reproduces its target operator."""

    distance: float
    max_abs_real: float
    max_rel_real: float
    max_imag: float
    gate_count: int
    policy: str | None
    table_depth: int | None


def build_report(prog, target) -> VerificationReport:
    effective = effective_matrix(prog, dim=target.shape[0])
    stats = error_stats(target, effective)
    return VerificationReport(
        distance=distance(target, effective),
        max_abs_real=stats.max_abs_real,
        max_rel_real=stats.max_rel_real,
        max_imag=stats.max_imag,
        gate_count=prog.total_gate_count,
        policy=prog.policy,
        table_depth=prog.table_depth,
    )


def _coin_family(flag: str):
    if flag == "grover":
        return "grover"
    if flag == "identity":
        return "identity"
    if flag.startswith("file:"):
        return load_coin_file(flag[5:])
    raise ValidationError(f"--coin must be grover, identity, or file:<path>, got {flag!r}")


def _state_order(flag: str):
    if flag == "default":
        return None
    if flag.startswith("file:"):
        return parse_order_file(flag[5:])
    raise ValidationError(f"--order must be default or file:<path>, got {flag!r}")


def cmd_walk_build(args) -> int:
    graph = parse_graph_file(args.graph)
    idx = build_state_index(graph, order=_state_order(args.order))
    op = build_walk_operator(graph, coin_family=_coin_family(args.coin), idx=idx)
    write_matrix(args.out, op.matrix)
    print(f"wrote {op.dim}x{op.dim} walk operator to {args.out}")
    return 0


def cmd_decompose(args) -> int:
    matrix = read_matrix(args.matrix)
    dec = cs_decompose(pad_to_power_of_two(matrix), source=str(args.matrix))
    write_decomposition(args.out, dec)
    print(f"wrote {len(dec.ops)} two-level ops to {args.out} (residue {dec.residue:.3e})")
    return 0


def cmd_table(args) -> int:
    budget = None if args.memory_budget is None else int(args.memory_budget)
    progress = None
    if args.verbose:
        progress = lambda length, new, total: print(  # noqa: E731
            f"length {length}: {new} new states ({total} total)", file=sys.stderr
        )
    tables = search(
        args.max_len,
        accept_r=args.accept_r,
        workers=args.workers,
        memory_budget=budget,
        progress=progress,
    )
    write_tables(tables, args.out)
    summary = table_summary(tables.positive_best_r)
    if tables.positive_best_r.warning:
        summary["warning"] = tables.positive_best_r.warning
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _load_table_set(tables_dir) -> TableSet:
    base = Path(tables_dir)
    return TableSet(
        positive_best_r=read_table(base / table_filename("positive", "best_r_first")),
        positive_shortest=read_table(base / table_filename("positive", "shortest_first")),
        negative_best_r=read_table(base / table_filename("negative", "best_r_first")),
        negative_shortest=read_table(base / table_filename("negative", "shortest_first")),
    )


def cmd_compile(args) -> int:
    dec = read_decomposition(args.decomposition)
    policy = _POLICY_FLAG[args.policy]
    prog = synth.compile(dec, _load_table_set(args.tables), policy=policy)
    write_program(args.out, prog)
    print(f"wrote {prog.total_gate_count} gates in {len(prog.records)} records to {args.out}")
    return 0


def cmd_verify(args) -> int:
    prog = read_program(args.program)
    target = read_matrix(args.matrix)
    report = build_report(prog, target)
    print(json.dumps(asdict(report), indent=2, sort_keys=True))
    return 0


def _initial_state(spec: str, dim: int) -> np.ndarray:
    if spec.startswith("e"):
        try:
            pos = int(spec[1:])
        except ValueError:
            raise ValidationError(f"bad state spec {spec!r}; use e<index> or file:<path>") from None
        if not 1 <= pos <= dim:
            raise ValidationError(f"basis index {pos} outside 1..{dim}")
        psi = np.zeros(dim, dtype=complex)
        psi[pos - 1] = 1.0
        return psi
    if spec.startswith("file:"):
        payload = read_matrix_vector(spec[5:])
        if payload.shape != (dim,):
            raise ValidationError(f"initial state has dimension {payload.shape[0]}, operator {dim}")
        return payload
    raise ValidationError(f"bad state spec {spec!r}; use e<index> or file:<path>")


def read_matrix_vector(path) -> np.ndarray:
    """A state vector stored as JSON {"dim", "re", "im"} (flat lists)."""
    try:
        payload = json.loads(Path(path).read_text())
        re = np.asarray(payload["re"], dtype=np.float64)
        im = np.asarray(payload["im"], dtype=np.float64)
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror or exc}") from exc
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{path}: malformed state vector ({exc})") from exc
    if re.ndim != 1 or re.shape != im.shape:
        raise ValidationError(f"{path}: state vector grids must be equal-length flat lists")
    vec = re + 1j * im
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > 1e-10:
        raise ValidationError(f"{path}: state norm {norm!r} is not 1")
    return vec


def cmd_simulate(args) -> int:
    if (args.matrix is None) == (args.program is None):
        raise ValidationError("pass exactly one of --matrix or --program")
    if args.matrix is not None:
        operator = read_matrix(args.matrix)
    else:
        prog = read_program(args.program)
        operator = effective_matrix(prog)
    dim = operator.shape[0]
    psi = _initial_state(args.start, dim)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["step"] + [f"p{i}" for i in range(1, dim + 1)])

    def emit(step, state):
        probs = state_probabilities(state)
        writer.writerow([step] + [f"{p:.12g}" for p in probs])

    emit(0, psi)
    for step in range(1, args.steps + 1):
        psi = operator @ psi
        emit(step, psi)
    text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.steps + 1} distribution rows to {args.out}")
    else:
        print(text, end="")
    return 0


def cmd_plot_data(args) -> int:
    tables = read_tables(args.tables, "best_r_first")
    positive = tables[0]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["angle_deg", "r"])
    for entry in positive.entries:
        writer.writerow([f"{entry.angle_deg:.3f}", repr(entry.r)])
    text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {len(positive.entries)} angle rows to {args.out}")
    else:
        print(text, end="")
    return 0


def _steane_check_all() -> int:
    failures = 0

    def check(name, ok):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failures += 1

    rng = np.random.default_rng(0)
    for gate in ("H", "X", "Z", "S", "s"):
        ok = True
        for _ in range(5):
            vec = rng.normal(size=2) + 1j * rng.normal(size=2)
            vec /= np.linalg.norm(vec)
            out = steane.transversal(gate, steane.encode_superposition(*vec))
            target = steane.PHYS_GATES[gate] @ vec
            ok &= steane.fidelity(out, steane.encode_superposition(*target)) > 1 - 1e-10
        check(f"transversal {gate} acts as logical {gate}", ok)

    t = steane.PHYS_GATES["T"]
    ok = True
    for trial in range(8):
        vec = rng.normal(size=2) + 1j * rng.normal(size=2)
        vec /= np.linalg.norm(vec)
        out = steane.ft_t_gate(
            steane.encode_superposition(*vec),
            prep_branch=trial % 2,
            meas_branch=(trial // 2) % 2,
        )
        ok &= steane.fidelity(out, steane.encode_superposition(*(t @ vec))) > 1 - 1e-9
    check("two-block T protocol over all branch pairs", ok)

    ok = True
    for pauli in ("X", "Y", "Z"):
        for position in range(1, 8):
            for bit in (0, 1):
                psi = steane.encode(bit)
                out = steane.inject_and_correct(psi, pauli, position)
                ok &= steane.fidelity(out, psi) > 1 - 1e-10
    check("all 21 single-qubit errors corrected on both basis states", ok)

    if failures:
        raise InternalError(f"{failures} encoded-gate checks failed")
    return 0


def _steane_demo_t(args) -> int:
    rng = np.random.default_rng(args.seed)
    vec = rng.normal(size=2) + 1j * rng.normal(size=2)
    vec /= np.linalg.norm(vec)
    log: list[dict] = []
    out = steane.ft_t_gate(
        steane.encode_superposition(*vec),
        prep_branch=args.branch,
        meas_branch=args.branch,
        log=log,
    )
    target = steane.PHYS_GATES["T"] @ vec
    log.append(
        {
            "step": "compare",
            "fidelity": steane.fidelity(out, steane.encode_superposition(*target)),
        }
    )
    for entry in log:
        print(json.dumps(entry, sort_keys=True))
    return 0


def cmd_steane(args) -> int:
    if args.check is None and args.demo is None:
        raise ValidationError("pass --check all or --demo t-gate")
    if args.check is not None:
        return _steane_check_all()
    return _steane_demo_t(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ftwalk",
        description=(
            "compile coined walk operators into fault-tolerant gate programs "
            "and check how closely they match"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("walk-build", help="build a walk operator from a graph file")
    p.add_argument("graph", help="graph file: 'vertices N' then one 'j k' edge per line")
    p.add_argument("--coin", default="grover", help="grover | identity | file:<coins.json>")
    p.add_argument("--order", default="default", help="default | file:<order.txt>")
    p.add_argument("--out", required=True, help="output matrix JSON")
    p.set_defaults(func=cmd_walk_build)

    p = sub.add_parser("decompose", help="two-level decomposition of a matrix file")
    p.add_argument("matrix", help="matrix JSON produced by walk-build")
    p.add_argument("--out", required=True, help="output decomposition CSV")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("table", help="search gate sequences and write angle tables")
    p.add_argument("--max-len", type=int, required=True, help="longest sequence to search")
    p.add_argument("--accept-r", type=float, default=0.1, help="imaginary-part acceptance bound")
    p.add_argument("--workers", type=int, default=1, help="expansion worker threads")
    p.add_argument("--memory-budget", type=float, default=None, help="approximate byte budget")
    p.add_argument("--out", required=True, help="output directory for the four CSVs")
    p.add_argument("--verbose", action="store_true", help="per-length progress on stderr")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("compile", help="map decomposition angles to gate sequences")
    p.add_argument("decomposition", help="decomposition CSV")
    p.add_argument("--tables", required=True, help="directory holding the table CSVs")
    p.add_argument("--policy", choices=("best", "shortest"), default="best")
    p.add_argument("--out", required=True, help="output program CSV")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("verify", help="score a gate program against a target matrix")
    p.add_argument("program", help="program CSV")
    p.add_argument("matrix", help="target matrix JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="iterate an operator and report probabilities")
    p.add_argument("--matrix", help="operator matrix JSON")
    p.add_argument("--program", help="gate program CSV (used via its effective matrix)")
    p.add_argument("--start", default="e1", help="e<index> (1-based) or file:<state.json>")
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--out", help="output CSV (stdout when omitted)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plot-data", help="emit (angle, smallest r) rows from saved tables")
    p.add_argument("--tables", required=True, help="directory holding the table CSVs")
    p.add_argument("--out", help="output CSV (stdout when omitted)")
    p.set_defaults(func=cmd_plot_data)

    p = sub.add_parser("steane", help="run encoded-gate protocol checks and demos")
    p.add_argument("--check", choices=("all",), help="run the full protocol check suite")
    p.add_argument("--demo", choices=("t-gate",), help="emit a protocol transcript")
    p.add_argument("--branch", type=int, choices=(0, 1), default=0)
    p.add_argument("--seed", type=int, default=0, help="seed for the demo input state")
    p.set_defaults(func=cmd_steane)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
