"""Command-line front end: ``tgf <command> [options]``.

Synthesis commands (``lookup``, ``stateprep``, ``purified``, ``isometry``,
``fanout``, ``swapnet``) write ``<prefix>.circ`` and ``<prefix>.report.json``
and, with ``--verify``, ``<prefix>.verify.json``; a one-line summary goes to
stdout.  ``bounds`` and ``table`` print formula rows, ``simulate`` runs a
circuit file on a state file and ``verify-dirty`` checks borrowed-qubit
restoration of a circuit file.

Exit status: 0 success, 1 unreadable or malformed input, 2 parameter out of
range, 3 verification failure, 4 simulator limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import io as tio
from .bounds import (
    MEASUREMENT_NOTE,
    BoundQuery,
    CostRow,
    cost_table,
    format_rows,
    lookup_lower_bound,
    measurement_assisted_lower_bound,
    stateprep_lower_bound,
)
from .circuit import Circuit, CircuitFormatError, CostModel, resource_report
from .fanout import FanoutStrategy, build_fanout
from .lookup import build_lookup_via_indicator, build_select, build_selectswap, build_selectswap_dirty
from .simulator import SimulatorLimitError, SparseState, qubit_limit, run
from .stateprep import METHODS, StateSpec, build_purified_prep, build_state_prep
from .swapnet import SwapStrategy, build_controlled_swap_n, build_swap_network
from .unitarysynth import build_isometry
from . import verify as V

EXIT_OK, EXIT_PARSE, EXIT_PARAM, EXIT_VERIFY, EXIT_LIMIT = 0, 1, 2, 3, 4


class ParameterError(ValueError):
    """Command-line value out of range."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # usage problems are parameter errors
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _unit_interval(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("must lie in (0, 1)")
    return v


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None


def _add_synthesis_flags(p: argparse.ArgumentParser, command: str) -> None:
    p.add_argument("--out-prefix", default=command, help="prefix for the .circ/.report.json/.verify.json outputs")
    p.add_argument("--verify", action="store_true", help="simulate and check the circuit")
    p.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    p.add_argument("--trials", type=int, default=8, help="random dirty initializations per check")
    p.add_argument("--toffoli", choices=CostModel.STRATEGIES, default="and_gadget_measured", help="Toffoli cost strategy")
    p.add_argument("--rz-error", type=_unit_interval, default=None, help="per-RZ synthesis error for the T budget")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tgf", description="Clifford+T synthesis with tunable dirty-qubit budgets.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("lookup", help="data-lookup oracle from a table file")
    p.add_argument("--in", dest="input", required=True, help="table (JSON or headed CSV)")
    p.add_argument("--lambda", dest="lam", type=_positive, default=1)
    p.add_argument("--variant", choices=["selectswap", "selectswap_dirty", "select", "indicator"], default="selectswap")
    p.add_argument("--swap-strategy", choices=[s.value for s in SwapStrategy], default=None)
    p.add_argument("--k", type=int, default=None, help="low index bits handled by the indicator (indicator variant)")
    p.add_argument("--dirty", action="store_true", help="borrow the matrix register (indicator variant)")
    _add_synthesis_flags(p, "lookup")

    p = sub.add_parser("stateprep", help="arbitrary state preparation")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--in", dest="input", help='JSON {"amplitudes": [[re, im], ...]}')
    src.add_argument("--random", type=_positive, metavar="N", help="random complex state of dimension N")
    p.add_argument("--lambda", dest="lam", type=_positive, default=1)
    p.add_argument("--b", type=_positive, default=10)
    p.add_argument("--eps", type=_unit_interval, default=1e-3)
    p.add_argument("--method", choices=METHODS, default="controlled_rotation")
    _add_synthesis_flags(p, "stateprep")

    p = sub.add_parser("purified", help="purified preparation of a weight distribution")
    p.add_argument("--in", dest="input", required=True, help="CSV of nonnegative weights")
    p.add_argument("--lambda", dest="lam", type=_positive, default=1)
    p.add_argument("--b", type=_positive, default=6)
    _add_synthesis_flags(p, "purified")

    p = sub.add_parser("isometry", help="isometry synthesis from orthonormal columns")
    p.add_argument("--in", dest="input", required=True, help='JSON {"n": int, "columns": [...]}')
    p.add_argument("--lambda", dest="lam", type=_positive, default=1)
    p.add_argument("--b", type=_positive, default=14)
    p.add_argument("--eps", type=_unit_interval, default=1e-3)
    p.add_argument("--method", choices=METHODS, default="controlled_rotation")
    _add_synthesis_flags(p, "isometry")

    p = sub.add_parser("fanout", help="CNOT fanout onto n targets")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--strategy", choices=[s.value for s in FanoutStrategy], default="tree_reuse")
    _add_synthesis_flags(p, "fanout")

    p = sub.add_parser("swapnet", help="index-controlled swap network or a single controlled register swap")
    p.add_argument("--N", type=_positive, help="number of registers (network)")
    p.add_argument("--b", type=_positive, default=1, help="register width")
    p.add_argument("--pair", action="store_true", help="build one controlled swap of two b-qubit registers")
    p.add_argument("--strategy", choices=[s.value for s in SwapStrategy], default="phase_incorrect")
    _add_synthesis_flags(p, "swapnet")

    p = sub.add_parser("bounds", help="circuit-counting lower bounds")
    p.add_argument("--N", type=_positive, required=True)
    p.add_argument("--b", type=_positive, default=1)
    p.add_argument("--q", type=_positive, default=1)
    p.add_argument("--K", type=_positive, default=1)
    p.add_argument("--eps", type=_unit_interval, default=1e-3)
    p.add_argument("--c", type=float, default=4.0, help="Clifford-count constant")
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("table", help="closed-form cost rows")
    p.add_argument("--N", type=_positive, required=True)
    p.add_argument("--b", type=_positive, default=1)
    p.add_argument("--K", type=_positive, default=1)
    p.add_argument("--eps", type=_unit_interval, default=1e-3)
    p.add_argument("--lambdas", type=_int_list, default=[1])
    p.add_argument("--q", type=_positive, default=None, help="also print lower bounds for q qubits")
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("simulate", help="run a circuit file on a state file")
    p.add_argument("--circuit", required=True)
    p.add_argument("--state", help="input state file (default |0...0>)")
    p.add_argument("--out", help="output state file (default stdout)")

    p = sub.add_parser("verify-dirty", help="check borrowed-qubit restoration of a circuit file")
    p.add_argument("--circuit", required=True)
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    return parser


# ---------------------------------------------------------------------------
# Command handlers: each returns (circuit, verification thunk) or an exit code
# ---------------------------------------------------------------------------

def _lookup(args):
    table = tio.read_table(args.input)
    if args.variant == "select":
        circ = build_select(table)
    elif args.variant == "indicator":
        k = args.k if args.k is not None else table.index_width // 2
        circ = build_lookup_via_indicator(table, k, args.lam, args.dirty)
    elif args.variant == "selectswap":
        circ = build_selectswap(table, args.lam, args.swap_strategy or "phase_incorrect")
    else:
        circ = build_selectswap_dirty(table, args.lam, args.swap_strategy or "linear")
    return circ, lambda: V.check_lookup(circ, table, args.trials, args.seed)


def _stateprep(args):
    if args.input:
        amps = tio.read_state_spec(args.input).amplitudes
    else:
        rng = np.random.default_rng(args.seed)
        amps = rng.normal(size=args.random) + 1j * rng.normal(size=args.random)
    circ = build_state_prep(StateSpec(amps), args.lam, args.b, args.eps, args.method)
    return circ, lambda: V.check_state_prep(circ, amps, args.seed)


def _purified(args):
    w = tio.read_weights(args.input)
    circ = build_purified_prep(w, args.lam, args.b)
    return circ, lambda: V.check_purified(circ, w, args.b)


def _isometry(args):
    spec = tio.read_isometry(args.input)
    circ = build_isometry(spec, args.lam, args.b, args.eps, args.method)
    return circ, lambda: V.check_isometry(circ, spec, args.seed)


def _fanout(args):
    circ = build_fanout(args.n, args.strategy)
    return circ, lambda: V.check_fanout(circ, args.trials, args.seed)


def _swapnet(args):
    if args.pair:
        circ = build_controlled_swap_n(args.b, args.strategy)
        circ.metadata.update(N=2, b=args.b)
        return circ, lambda: _check_pair(circ, args)
    if args.N is None:
        raise ParameterError("--N is required unless --pair is given")
    circ = build_swap_network(args.N, args.b, args.strategy)
    return circ, lambda: V.check_swap_network(circ, args.trials, args.seed)


def _check_pair(circ, args):
    # A single swap is a two-register network indexed by its control.
    renamed = Circuit(metadata=dict(circ.metadata))
    for r, name in zip(circ.registers, ("index", "reg0", "reg1")):
        renamed.add_register(name, r.width, r.role)
    renamed.extend(circ.gates)
    return V.check_swap_network(renamed, args.trials, args.seed)


SYNTHESIS = {"lookup": _lookup, "stateprep": _stateprep, "purified": _purified,
             "isometry": _isometry, "fanout": _fanout, "swapnet": _swapnet}


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def _run_synthesis(args) -> int:
    circ, check = SYNTHESIS[args.command](args)
    model = CostModel(toffoli_strategy=args.toffoli)
    rz = args.rz_error if args.rz_error is not None else circ.metadata.get("rz_error")
    if rz is not None:
        model = CostModel(toffoli_strategy=args.toffoli, rz_error=rz)
    report = resource_report(circ, model)
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    tio.write_circuit(circ, f"{prefix}.circ")
    params = {k: v for k, v in circ.metadata.items() if isinstance(v, (int, float, str, bool))}
    Path(f"{prefix}.report.json").write_text(_dump({"parameters": params, "report": report.as_dict()}))
    line = f"{args.command}: qubits={report.qubits_total} t_count={report.t_count} t_depth={report.t_depth}"
    if not args.verify:
        print(line)
        return EXIT_OK
    if circ.num_qubits > qubit_limit():
        print(line)
        print(f"verification skipped: {circ.num_qubits} qubits exceed the simulator limit {qubit_limit()}", file=sys.stderr)
        return EXIT_LIMIT
    verdict = check()
    Path(f"{prefix}.verify.json").write_text(_dump(verdict.as_dict()))
    print(f"{line} verify={verdict.label}")
    return EXIT_OK if verdict.passed else EXIT_VERIFY


def _bounds(args) -> int:
    q = BoundQuery(args.N, args.b, args.K, args.q, args.eps, args.c)
    rows = [
        CostRow("lookup_lower_bound", args.N, args.b, None, lookup_lower_bound(q), "lower", f"q={args.q} c={args.c:g}"),
        CostRow("stateprep_lower_bound", args.N, args.b, None, stateprep_lower_bound(q), "lower", f"q={args.q} c={args.c:g}"),
    ]
    if args.N & (args.N - 1) == 0:
        rows.append(CostRow("measurement_assisted_lower_bound", args.N, args.b, None,
                            measurement_assisted_lower_bound(args.N, args.eps), "lower", MEASUREMENT_NOTE))
    _print_rows(rows, args.format)
    return EXIT_OK


def _table(args) -> int:
    _print_rows(cost_table(args.N, args.b, args.K, args.eps, args.lambdas, args.q), args.format)
    return EXIT_OK


def _print_rows(rows, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(_dump([r.as_dict() for r in rows]))
    else:
        sys.stdout.write(format_rows(rows))


def _simulate(args) -> int:
    circ = tio.read_circuit(args.circuit)
    n = circ.num_qubits
    if n > qubit_limit():
        print(f"{n} qubits exceed the simulator limit {qubit_limit()}", file=sys.stderr)
        return EXIT_LIMIT
    init = tio.read_state(args.state, n) if args.state else SparseState.basis(n)
    if abs(init.norm - 1) > 1e-10:
        raise ParameterError(f"input state norm {init.norm:.12g} is not 1")
    branches = run(circ, init)
    chunks = []
    for i, br in enumerate(branches):
        if len(branches) > 1:
            cbits = " ".join(f"{k}={v}" for k, v in sorted(br.cbits.items()))
            chunks.append(f"# branch {i} probability {br.probability:.17g} {cbits}".rstrip() + "\n")
        chunks.append(tio.format_state(br.state.to_dict()))
    text = "".join(chunks)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _verify_dirty(args) -> int:
    circ = tio.read_circuit(args.circuit)
    if circ.num_qubits > qubit_limit():
        print(f"{circ.num_qubits} qubits exceed the simulator limit {qubit_limit()}", file=sys.stderr)
        return EXIT_LIMIT
    verdict = V.check_dirty(circ, args.trials, args.seed)
    sys.stdout.write(_dump(verdict.as_dict()))
    return EXIT_OK if verdict.passed else EXIT_VERIFY


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors (exit 2) and --help (exit 0)
        return int(exc.code or 0)
    try:
        if args.command in SYNTHESIS:
            return _run_synthesis(args)
        return {"bounds": _bounds, "table": _table, "simulate": _simulate, "verify-dirty": _verify_dirty}[args.command](args)
    except (tio.FileFormatError, CircuitFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SimulatorLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
