"""Reversible arithmetic used by the lookup and state-preparation builders.

* Ripple-carry adders: the one-ancilla majority/unmajority adder (optionally
  with a single control) and the AND-based adder whose carries are
  uncomputed by measurement (``4(n-1)`` T).
* A comparator writing ``[j >= a]`` from the carry of ``j + ~a + 1``.
* Non-restoring division by a constant ``lam``, mapping an index register
  in place to quotient and remainder.

All ``append_*`` helpers write into an existing circuit on caller-chosen
qubits; ``build_*`` wrappers produce standalone circuits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .circuit import Circuit, Role
from .fanout import append_fanout


# ---------------------------------------------------------------------------
# Adders
# ---------------------------------------------------------------------------

def append_cuccaro_adder(
    circ: Circuit,
    x: Sequence[int],
    y: Sequence[int],
    ancilla: int,
    control: int | None = None,
) -> Circuit:
    """``y <- y + x mod 2^b`` with one clean ancilla, optionally controlled."""
    n = len(x)
    if len(y) != n or n == 0:
        raise ValueError("adder registers must have equal positive width")
    carry = [ancilla] + list(x[:-1])
    for i in range(n - 1):  # majority chain: x[i] ends holding carry i+1
        c, b, a = carry[i], y[i], x[i]
        circ.cx(a, b).cx(a, c).ccx(c, b, a)
    top_c, top_b, top_a = carry[n - 1], y[n - 1], x[n - 1]
    if control is None:
        circ.cx(top_a, top_b).cx(top_c, top_b)
    else:
        circ.ccx(control, top_a, top_b).ccx(control, top_c, top_b)
    for i in reversed(range(n - 1)):  # unmajority chain
        c, b, a = carry[i], y[i], x[i]
        if control is None:
            circ.ccx(c, b, a).cx(a, c).cx(c, b)
        else:
            circ.ccx(c, b, a).ccx(control, c, b).cx(a, c).cx(a, b)
    return circ


def append_gidney_adder(circ: Circuit, x: Sequence[int], y: Sequence[int], carries: Sequence[int]) -> Circuit:
    """``y <- y + x mod 2^n`` using ``n - 1`` clean carry qubits and ``n - 1`` ANDs."""
    n = len(x)
    if len(y) != n or n == 0 or len(carries) < n - 1:
        raise ValueError("adder needs equal-width registers and n-1 carry qubits")
    c = [None] + list(carries[: n - 1])
    for i in range(n - 1):
        if c[i] is not None:
            circ.cx(c[i], x[i]).cx(c[i], y[i])
        circ.and_(x[i], y[i], c[i + 1])
        if c[i] is not None:
            circ.cx(c[i], c[i + 1])
    if c[n - 1] is not None:
        circ.cx(c[n - 1], y[n - 1])
    circ.cx(x[n - 1], y[n - 1])
    for i in reversed(range(n - 1)):
        if c[i] is not None:
            circ.cx(c[i], c[i + 1])
        circ.and_dg(x[i], y[i], c[i + 1])
        if c[i] is not None:
            circ.cx(c[i], x[i])
        circ.cx(x[i], y[i])
    return circ


def build_adder(b: int, controlled: bool = False, kind: str = "cuccaro") -> Circuit:
    """In-place adder ``|x>|y> -> |x>|y + x mod 2^b>``.

    Args:
        b: register width.
        controlled: add a single control qubit (majority adder only).
        kind: ``"cuccaro"`` (one clean ancilla) or ``"gidney"`` (``b - 1``
            clean carries, AND-based, measured uncompute).
    """
    if b < 1:
        raise ValueError("adder width must be positive")
    if controlled and kind != "cuccaro":
        raise ValueError("controlled addition is provided by the majority adder only")
    circ = Circuit(metadata={"builder": "adder", "b": b, "controlled": controlled, "kind": kind})
    ctrl = circ.add_register("control", 1, Role.CONTROL)[0] if controlled else None
    x = circ.add_register("x", b, Role.INDEX)
    y = circ.add_register("y", b, Role.OUTPUT)
    if kind == "cuccaro":
        anc = circ.add_register("carry", 1, Role.CLEAN)
        append_cuccaro_adder(circ, x.qubits, y.qubits, anc[0], ctrl)
    elif kind == "gidney":
        carries = circ.add_register("carry", b - 1, Role.CLEAN)
        append_gidney_adder(circ, x.qubits, y.qubits, carries.qubits)
    else:
        raise ValueError(f"unknown adder kind {kind!r}")
    return circ


# ---------------------------------------------------------------------------
# Comparator
# ---------------------------------------------------------------------------

def append_comparator(circ: Circuit, a: Sequence[int], j: Sequence[int], flag: int, carries: Sequence[int]) -> Circuit:
    """XOR ``[j >= a]`` into ``flag``; ``carries`` are ``b + 1`` clean qubits.

    ``j >= a`` exactly when ``j + (2^b - 1 - a) + 1`` carries out of ``b`` bits.
    """
    b = len(a)
    if len(j) != b or len(carries) < b + 1:
        raise ValueError("comparator needs equal-width inputs and b+1 carry qubits")
    c = list(carries[: b + 1])
    for q in a:
        circ.x(q)
    circ.x(c[0])
    for i in range(b):
        circ.cx(c[i], j[i]).cx(c[i], a[i]).and_(j[i], a[i], c[i + 1]).cx(c[i], c[i + 1])
    circ.cx(c[b], flag)
    for i in reversed(range(b)):
        circ.cx(c[i], c[i + 1]).and_dg(j[i], a[i], c[i + 1]).cx(c[i], a[i]).cx(c[i], j[i])
    circ.x(c[0])
    for q in a:
        circ.x(q)
    return circ


def build_comparator(b: int) -> Circuit:
    """``|a>|j>|0> -> |a>|j>|[j >= a]>`` with ``4b`` T under measured uncompute."""
    if b < 1:
        raise ValueError("comparator width must be positive")
    circ = Circuit(metadata={"builder": "comparator", "b": b})
    a = circ.add_register("a", b, Role.INDEX)
    j = circ.add_register("j", b, Role.INDEX)
    flag = circ.add_register("flag", 1, Role.OUTPUT)
    carries = circ.add_register("carry", b + 1, Role.CLEAN)
    return append_comparator(circ, a.qubits, j.qubits, flag[0], carries.qubits)


# ---------------------------------------------------------------------------
# Division by a constant
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DivmodLayout:
    """Where quotient and remainder live after :func:`append_divmod`.

    Both lists are little-endian.  ``zero`` lists qubits that the division
    leaves in ``|0>`` (available as clean workspace until uncomputation).
    """

    quotient: tuple[int, ...]
    remainder: tuple[int, ...]
    zero: tuple[int, ...] = ()


def divmod_ancillas(n: int, lam: int) -> int:
    """Clean qubits :func:`append_divmod` needs besides the ``n`` index qubits."""
    if lam & (lam - 1) == 0:
        return 0
    l = (lam - 1).bit_length()
    return 2 + (l + 2) + (l + 1)


def append_divmod(circ: Circuit, x: Sequence[int], lam: int, ancillas: Sequence[int] = ()) -> DivmodLayout:
    """Map ``|x>`` to ``|x // lam>|x % lam>`` in place.

    For ``lam`` a power of two this is a relabeling.  Otherwise ``x`` is
    extended by two sign qubits into a register ``R`` and non-restoring
    division runs from the top: at shift ``k`` the window ``R[k : k+l+2]``
    gets ``-lam`` added if the previous partial remainder was nonnegative and
    ``+lam`` otherwise, each window being one ``(l+2)``-bit addition of a
    constant loaded into workspace with CNOTs.  The sign left at bit
    ``k + l + 1`` is the complement of quotient bit ``k``; a final
    conditional ``+lam`` on the low ``l + 1`` bits fixes a negative remainder.

    Args:
        circ: circuit to append to.
        x: little-endian index qubits (``n`` of them).
        lam: divisor, ``1 <= lam``.
        ancillas: ``divmod_ancillas(n, lam)`` clean qubits.
    """
    n = len(x)
    if lam < 1:
        raise ValueError("divisor must be positive")
    l = (lam - 1).bit_length()
    if lam & (lam - 1) == 0:
        return DivmodLayout(tuple(x[l:]), tuple(x[:l]))
    if l > n:
        raise ValueError("divisor exceeds the index range")
    need = divmod_ancillas(n, lam)
    if len(ancillas) < need:
        raise ValueError(f"division by {lam} needs {need} clean ancillas")
    anc = list(ancillas)
    R = list(x) + anc[:2]
    const = anc[2: 2 + l + 2]
    carries = anc[2 + l + 2: need]
    w = l + 2
    neg = (-lam) % (1 << w)
    pos = lam
    top = n - l

    def load(value: int, control: int | None, other: int) -> None:
        for i in range(w):
            if (value >> i) & 1:
                circ.x(const[i])
        if control is not None:
            for i in range(w):
                if ((value ^ other) >> i) & 1:
                    circ.cx(control, const[i])

    for k in range(top, -1, -1):
        sign = None if k == top else R[k + l + 2]
        window = R[k: k + w]
        load(neg, sign, pos)
        append_gidney_adder(circ, const, window, carries)
        load(neg, sign, pos)
    # Negative final remainder: add lam on the low l+1 bits, controlled by its sign.
    low = R[: l + 1]
    lam_bits = [i for i in range(l + 1) if (lam >> i) & 1]
    for i in lam_bits:
        circ.cx(R[l + 1], const[i])
    append_gidney_adder(circ, const[: l + 1], low, carries)
    for i in lam_bits:
        circ.cx(R[l + 1], const[i])
    for q in R[l + 1:]:
        circ.x(q)
    zero = (R[l],) + tuple(const) + tuple(carries)
    return DivmodLayout(tuple(R[l + 1:]), tuple(R[:l]), zero)


def build_divmod(n_index: int, lam: int) -> Circuit:
    """Standalone in-place division of an ``n_index``-qubit index by ``lam``.

    ``metadata["quotient"]`` and ``metadata["remainder"]`` give the output
    qubits (little-endian).
    """
    if lam < 1:
        raise ValueError("divisor must be positive")
    circ = Circuit(metadata={"builder": "divmod", "lam": lam})
    x = circ.add_register("x", n_index, Role.INDEX)
    anc = circ.add_register("work", divmod_ancillas(n_index, lam), Role.CLEAN)
    layout = append_divmod(circ, x.qubits, lam, anc.qubits)
    circ.metadata.update(quotient=list(layout.quotient), remainder=list(layout.remainder))
    return circ


def append_controlled_constant(circ: Circuit, control: int, value: int, targets: Sequence[int], fanout: str = "logarithmic") -> Circuit:
    """XOR the classical ``value`` into ``targets`` when ``control`` is set."""
    append_fanout(circ, control, [t for i, t in enumerate(targets) if (value >> i) & 1], fanout)
    return circ
