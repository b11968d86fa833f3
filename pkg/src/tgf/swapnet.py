"""Controlled register swaps and the index-controlled swap network.

``Swap_n`` exchanges two ``n``-qubit registers when a control qubit is set.
Three layouts are offered:

* ``linear``: one ``CSWAP`` per qubit pair, all sharing the control (7 T each
  under the 7-T Toffoli).
* ``logarithmic``: the toggling construction.  A controlled-``V`` with ``V``
  self-inverse satisfies ``CV(d) . CNOT(z -> d) . CV(d) . CNOT(z -> d) = CV(z)``
  for any value of ``d``, so half of the pairs borrow qubits of the other half
  as dirty controls and the control qubit only drives two fanouts.  Between
  the two controlled swaps of a pair the Toffoli phase terms that do not
  involve ``d`` merge into a ``CZ``, leaving 8 T per pair.
* ``phase_incorrect``: relative-phase Toffolis around one central fanout,
  4 T per pair, correct up to a ``-1`` on pairs holding ``|00>`` (see the
  ``PCSWAP`` macro).

The swap network moves register ``x`` to position 0 by swapping registers
``i`` and ``i + 2^j`` (``i`` a multiple of ``2^(j+1)``) controlled on bit
``j`` of the index, for ``j = 0, 1, ...``.  Each level is one ``Swap_n`` over
all its pairs.
"""

from __future__ import annotations

from enum import Enum
from typing import Sequence

from .circuit import Circuit, Gate, Role
from .fanout import append_fanout


class SwapStrategy(str, Enum):
    LINEAR = "linear"
    LOGARITHMIC = "logarithmic"
    PHASE_INCORRECT = "phase_incorrect"


def _phase_block(circ: Circuit, d: int, a: int, b: int) -> None:
    # exp(i pi/4 (d - d^a - d^b + d^a^b)): the d-dependent part of a CCZ.
    circ.t(d).cx(a, d).tdg(d).cx(b, d).t(d).cx(a, d).tdg(d).cx(b, d)


def _toggled_swaps(circ: Circuit, control: int, pairs: Sequence[tuple[int, int]], helpers: Sequence[int], fanout: str) -> None:
    """Controlled swap of ``pairs`` using one dirty helper per pair."""
    for (a, b) in pairs:
        circ.cx(b, a).h(b)
    for (a, b), d in zip(pairs, helpers):
        _phase_block(circ, d, a, b)
    append_fanout(circ, control, helpers, fanout)
    for (a, b), d in zip(pairs, helpers):
        _phase_block(circ, d, a, b)
    for (a, b) in pairs:
        circ.cz(a, b).h(b).cx(b, a)
    append_fanout(circ, control, helpers, fanout)


def _split_halves(pairs: list[tuple[int, int]]):
    n = len(pairs)
    first = pairs[: (n + 1) // 2]
    second = pairs[(n + 1) // 2:]
    direct = first[:1] if n % 2 else []
    toggled_first = first[len(direct):]
    return direct, toggled_first, second


def append_controlled_swap(
    circ: Circuit,
    control: int,
    a: Sequence[int],
    b: Sequence[int],
    strategy: SwapStrategy | str = "linear",
    fanout: str = "tree_reuse",
) -> Circuit:
    """Append ``Swap_n`` between registers ``a`` and ``b`` controlled by ``control``."""
    strategy = SwapStrategy(strategy)
    if len(a) != len(b):
        raise ValueError("registers to swap must have equal width")
    if not a:
        return circ
    pairs = list(zip(a, b))
    if strategy is SwapStrategy.LINEAR:
        for x, y in pairs:
            circ.cswap(control, x, y)
    elif strategy is SwapStrategy.PHASE_INCORRECT:
        circ.append(Gate("PCSWAP", (control, *a, *b)))
    else:
        direct, first, second = _split_halves(pairs)
        for x, y in direct:
            circ.cswap(control, x, y)
        if first:
            _toggled_swaps(circ, control, first, [p[0] for p in second], fanout)
        if second:
            _toggled_swaps(circ, control, second, [p[0] for p in first + direct], fanout)
    return circ


def build_controlled_swap_n(n: int, strategy: SwapStrategy | str = "linear") -> Circuit:
    """Standalone ``Swap_n`` on registers ``control``, ``a`` and ``b``.

    Raises:
        ValueError: ``n < 1``.
    """
    if n < 1:
        raise ValueError("register width must be at least 1")
    strategy = SwapStrategy(strategy)
    circ = Circuit(metadata={"builder": "controlled_swap", "strategy": strategy.value, "n": n})
    if strategy is SwapStrategy.PHASE_INCORRECT:
        circ.metadata["phase"] = "exact up to -1 per pair in |00> when the control is set"
    z = circ.add_register("control", 1, Role.CONTROL)
    a = circ.add_register("a", n, Role.OUTPUT)
    b = circ.add_register("b", n, Role.OUTPUT)
    return append_controlled_swap(circ, z[0], a.qubits, b.qubits, strategy)


def build_multi_target_controlled(v_kind: str, n: int, fanout: str = "tree_reuse") -> Circuit:
    """``|0><0| (x) I + |1><1| (x) V^(x)n`` for a self-inverse ``V`` by toggling.

    ``v_kind`` is ``"swap"`` (registers ``a``, ``b`` of width ``n``; ``V`` swaps
    ``a_i`` and ``b_i``) or ``"x"`` (register ``t`` of width ``n``).  The first
    ``ceil(n/2)`` targets borrow qubits of the rest as dirty controls and then
    the roles are exchanged; with ``n`` odd the first target is driven by the
    control directly.  Every ``V`` is a plain singly-controlled gate.

    Raises:
        ValueError: unsupported ``v_kind`` or ``n < 1``.
    """
    if n < 1:
        raise ValueError("need at least one target")
    circ = Circuit(metadata={"builder": "multi_target_controlled", "v": v_kind, "n": n})
    z = circ.add_register("control", 1, Role.CONTROL)[0]
    if v_kind == "swap":
        a = circ.add_register("a", n, Role.OUTPUT)
        b = circ.add_register("b", n, Role.OUTPUT)
        targets = list(zip(a.qubits, b.qubits))
        helper_of = lambda t: t[0]  # noqa: E731

        def cv(c, t):
            circ.cswap(c, *t)
    elif v_kind == "x":
        targets = circ.add_register("t", n, Role.OUTPUT).qubits
        helper_of = lambda t: t  # noqa: E731

        def cv(c, t):
            circ.cx(c, t)
    else:
        raise ValueError(f"unsupported self-inverse gate {v_kind!r}")

    direct, first, second = _split_halves(targets)
    for t in direct:
        cv(z, t)
    for group, pool in ((first, second), (second, first + direct)):
        if not group:
            continue
        helpers = [helper_of(t) for t in pool[: len(group)]]
        for t, d in zip(group, helpers):
            cv(d, t)
        append_fanout(circ, z, helpers, fanout)
        for t, d in zip(group, helpers):
            cv(d, t)
        append_fanout(circ, z, helpers, fanout)
    return circ


def swap_network_levels(num_registers: int) -> list[list[tuple[int, int]]]:
    """Register pairs ``(i, i + 2^j)`` swapped at each level ``j``."""
    levels = []
    j = 0
    while (1 << j) < num_registers:
        step = 1 << j
        levels.append([(i, i + step) for i in range(0, num_registers - step, 2 * step)])
        j += 1
    return levels


def append_swap_network(
    circ: Circuit,
    index: Sequence[int],
    registers: Sequence[Sequence[int]],
    strategy: SwapStrategy | str = "phase_incorrect",
    fanout: str = "tree_reuse",
) -> Circuit:
    """Append the move-to-front network controlled by little-endian ``index``."""
    levels = swap_network_levels(len(registers))
    if len(levels) > len(index):
        raise ValueError("index register too narrow for the number of registers")
    for j, pairs in enumerate(levels):
        a = [q for lo, _ in pairs for q in registers[lo]]
        b = [q for _, hi in pairs for q in registers[hi]]
        append_controlled_swap(circ, index[j], a, b, strategy, fanout)
    return circ


def build_swap_network(N: int, b: int, strategy: SwapStrategy | str = "phase_incorrect") -> Circuit:
    """Index-controlled network moving register ``x`` of ``N`` to position 0.

    Registers: ``index`` (``ceil(log2 N)`` qubits, little-endian) then
    ``reg0 .. reg{N-1}`` of ``b`` qubits each.
    """
    if N < 1 or b < 1:
        raise ValueError("N and b must be positive")
    strategy = SwapStrategy(strategy)
    circ = Circuit(metadata={"builder": "swap_network", "N": N, "b": b, "strategy": strategy.value})
    idx = circ.add_register("index", (N - 1).bit_length(), Role.INDEX)
    regs = [circ.add_register(f"reg{i}", b, Role.OUTPUT).qubits for i in range(N)]
    return append_swap_network(circ, idx.qubits, regs, strategy)
