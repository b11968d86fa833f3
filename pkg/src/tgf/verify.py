"""Simulation-based checks shared by the command line and the test suite.

Each ``check_*`` function returns a :class:`Verdict`; none of them raise on
a wrong circuit, only on malformed arguments or simulator limits.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .circuit import Circuit
from .lookup import DataTable
from .simulator import SparseState, TOL_DEVIATION, run, simulate, verify_dirty_restoration
from .stateprep import alias_decompose, prepared_state_error
from .unitarysynth import IsometrySpec, column_errors


@dataclass
class Verdict:
    """Outcome of one verification run."""

    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def as_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.label
        return d


def _bits(key: int, qubits: Sequence[int]) -> int:
    return sum(((key >> q) & 1) << i for i, q in enumerate(qubits))


def _place(value: int, qubits: Sequence[int]) -> int:
    return sum(((value >> i) & 1) << q for i, q in enumerate(qubits))


def lookup_outputs(circ: Circuit, table: DataTable, dirty_value: int = 0, ignore: Sequence[str] = ()) -> tuple[bool, float]:
    """Run a lookup on the uniform index superposition and check every branch.

    Every basis term must carry ``out = a_x`` with dirty qubits equal to
    ``dirty_value`` and every other non-index qubit (except registers named
    in ``ignore``) at 0, and each ``x`` must keep probability ``1/N``.

    Returns:
        ``(passed, largest probability deviation)``.
    """
    index = circ.register("index").qubits
    out = circ.register("out").qubits
    dirty = circ.dirty_qubits
    skip = set(index) | set(out) | set(dirty)
    for name in ignore:
        skip |= set(circ.register(name).qubits)
    others = [q for q in range(circ.num_qubits) if q not in skip]
    N = table.N
    base = _place(dirty_value, dirty)
    amp = 1 / np.sqrt(N)
    init = SparseState.from_dict({base | _place(x, index): amp for x in range(N)}, circ.num_qubits)
    ok = True
    prob = np.zeros(N)
    for branch in run(circ, init):
        for key, a in branch.state.to_dict(tol=1e-12).items():
            x = _bits(key, index)
            p = abs(a) ** 2 * branch.probability
            if x >= N:
                ok = False
                continue
            prob[x] += p
            if _bits(key, out) != table[x] or _bits(key, dirty) != dirty_value or _bits(key, others):
                ok = False
    dev = float(np.max(np.abs(prob - 1 / N)))
    return ok and dev <= TOL_DEVIATION, dev


def check_lookup(circ: Circuit, table: DataTable, trials: int = 8, seed: int = 0) -> Verdict:
    """Correct outputs for every index, plus dirty restoration when borrowed qubits exist."""
    ignore = ("garbage",) if any(r.name == "garbage" for r in circ.registers) else ()
    ok, dev = lookup_outputs(circ, table, ignore=ignore)
    details = {"outputs_correct": ok, "probability_deviation": dev}
    if circ.dirty_qubits:
        rng = np.random.default_rng(seed)
        width = len(circ.dirty_qubits)
        value = int.from_bytes(rng.bytes((width + 7) // 8), "little") & ((1 << width) - 1)
        ok2, _ = lookup_outputs(circ, table, dirty_value=value, ignore=ignore)
        trials_out = verify_dirty_restoration(circ, trials=trials, seed=seed)
        worst = max(t.max_deviation for t in trials_out)
        details.update(outputs_correct_dirty=ok2, dirty_trials=len(trials_out), dirty_max_deviation=worst)
        ok = ok and ok2 and all(t.passed for t in trials_out)
    return Verdict("lookup", ok, details)


def check_state_prep(circ: Circuit, amplitudes, seed: int = 0) -> Verdict:
    """Distance to the ideal output against the circuit's recorded error bound."""
    rng = np.random.default_rng(seed)
    width = len(circ.dirty_qubits)
    value = int.from_bytes(rng.bytes((width + 7) // 8), "little") & ((1 << width) - 1) if width else 0
    err = prepared_state_error(circ, amplitudes, value)
    bound = circ.metadata["error_bound"]
    return Verdict("state_prep", err <= bound, {"error": err, "bound": bound, "dirty_value": value})


def reduced_distribution(circ: Circuit, register: str = "index") -> np.ndarray:
    """Diagonal of the reduced state of ``register`` after running from ``|0>``."""
    qubits = circ.register(register).qubits
    p = np.zeros(1 << len(qubits))
    for branch in run(circ):
        for key, a in branch.state.to_dict(tol=0.0).items():
            p[_bits(key, qubits)] += abs(a) ** 2 * branch.probability
    return p


def check_purified(circ: Circuit, weights, b: int) -> Verdict:
    """Reduced index distribution equals the rounded alias distribution."""
    target = alias_decompose(weights, b).distribution()
    got = reduced_distribution(circ)
    dev = float(np.max(np.abs(got - target)))
    w = np.asarray(weights, dtype=float)
    l1 = float(np.sum(np.abs(got - w / w.sum())))
    return Verdict("purified", dev <= 1e-10, {"max_deviation": dev, "l1_to_weights": l1})


def check_isometry(circ: Circuit, spec: IsometrySpec, seed: int = 0) -> Verdict:
    rng = np.random.default_rng(seed)
    width = len(circ.dirty_qubits)
    value = int.from_bytes(rng.bytes((width + 7) // 8), "little") & ((1 << width) - 1) if width else 0
    errs = column_errors(circ, spec, value)
    bound = circ.metadata["error_bound"]
    return Verdict("isometry", max(errs) <= bound, {"column_errors": errs, "bound": bound})


def check_fanout(circ: Circuit, trials: int = 8, seed: int = 0) -> Verdict:
    """Targets are XOR-ed with the control on random basis inputs."""
    z = circ.register("control")[0]
    targets = circ.register("targets").qubits
    rng = np.random.default_rng(seed)
    ok = True
    for t in range(trials):
        c = t & 1
        v = int.from_bytes(rng.bytes((len(targets) + 7) // 8), "little") & ((1 << len(targets)) - 1)
        out = simulate(circ, SparseState.basis(circ.num_qubits, (c << z) | _place(v, targets))).to_dict(1e-12)
        expect = (c << z) | _place(v ^ (((1 << len(targets)) - 1) if c else 0), targets)
        ok &= list(out) == [expect] and abs(abs(out[expect]) - 1) <= TOL_DEVIATION
    return Verdict("fanout", bool(ok), {"trials": trials})


def check_swap_network(circ: Circuit, trials: int = 8, seed: int = 0) -> Verdict:
    """Register ``index`` ends at position 0 (up to sign for phase-incorrect swaps)."""
    N, b = circ.metadata["N"], circ.metadata["b"]
    index = circ.register("index").qubits
    regs = [circ.register(f"reg{i}").qubits for i in range(N)]
    rng = np.random.default_rng(seed)
    exact_phase = circ.metadata.get("strategy") != "phase_incorrect"
    ok = True
    for _ in range(trials):
        x = int(rng.integers(N))
        vals = [int(v) for v in rng.integers(0, 1 << b, N)]
        key = _place(x, index) | sum(_place(v, r) for v, r in zip(vals, regs))
        out = simulate(circ, SparseState.basis(circ.num_qubits, key)).to_dict(1e-12)
        if len(out) != 1:
            ok = False
            continue
        (k, a), = out.items()
        ok &= _bits(k, index) == x and _bits(k, regs[0]) == vals[x]
        ok &= abs(a - 1) <= TOL_DEVIATION if exact_phase else abs(abs(a) - 1) <= TOL_DEVIATION
    return Verdict("swap_network", bool(ok), {"trials": trials, "phase_checked": exact_phase})


def check_dirty(circ: Circuit, trials: int = 8, seed: int = 0) -> Verdict:
    results = verify_dirty_restoration(circ, trials=trials, seed=seed)
    return Verdict("dirty_restoration", all(r.passed for r in results), {
        "trials": [{"dirty_init": r.dirty_init, "passed": r.passed, "max_deviation": r.max_deviation} for r in results],
    })
