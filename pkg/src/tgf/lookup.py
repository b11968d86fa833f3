"""Data-lookup oracles ``|x>|0> -> |x>|a_x>`` for a classical table ``a``.

* :func:`build_select`: unary iteration over the index, one AND per internal
  tree node (4 T each, uncomputed by measurement) and a fanout of X gates at
  every leaf.
* :func:`build_selectswap`: the index is split into quotient ``q = x // lam``
  and remainder ``r = x % lam``; a Select over ``q`` writes ``lam`` entries
  into ``lam`` copies of the output register and a swap network over ``r``
  brings the wanted copy to the front.  The other copies keep garbage.
* :func:`build_selectswap_dirty`: the garbage-free variant whose ``lam * b``
  copy qubits are borrowed in an arbitrary state and returned untouched.
  Select and swap are each run twice so the unknown contents cancel.
* :func:`build_indicator` and :func:`build_lookup_via_indicator`: the
  one-hot encoding ``e(x)`` and a lookup computed as the product of a
  Select-written data matrix with ``e`` of the low index bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .arith import DivmodLayout, append_divmod, divmod_ancillas
from .circuit import Circuit, Role
from .fanout import append_fanout
from .swapnet import append_swap_network


@dataclass(frozen=True)
class DataTable:
    """``N`` entries of ``b`` bits each."""

    b: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if self.b < 1:
            raise ValueError("entry width b must be positive")
        if not self.entries:
            raise ValueError("table must have at least one entry")
        for e in self.entries:
            if not 0 <= e < 1 << self.b:
                raise ValueError(f"entry {e} does not fit in {self.b} bits")

    @property
    def N(self) -> int:
        return len(self.entries)

    @property
    def index_width(self) -> int:
        return (self.N - 1).bit_length()

    def __getitem__(self, x: int) -> int:
        return self.entries[x]


@dataclass(frozen=True)
class LookupPlan:
    """Batch size ``lam`` and whether the copies are borrowed dirty qubits."""

    lam: int = 1
    dirty: bool = False

    def check(self, N: int) -> None:
        if not 1 <= self.lam <= N:
            raise ValueError(f"lambda={self.lam} outside [1, {N}]")

    def quotient_width(self, N: int) -> int:
        return (-(-N // self.lam) - 1).bit_length()

    def remainder_width(self) -> int:
        return (self.lam - 1).bit_length()


def _bits(value: int, qubits: Sequence[int]) -> list[int]:
    return [q for i, q in enumerate(qubits) if (value >> i) & 1]


# ---------------------------------------------------------------------------
# Unary iteration
# ---------------------------------------------------------------------------

def select_helpers(num_leaves: int, controlled: bool = False) -> int:
    """Clean helper qubits used by :func:`append_select`."""
    m = (num_leaves - 1).bit_length()
    return m if controlled else max(0, m - 1)


def append_select(
    circ: Circuit,
    index: Sequence[int],
    helpers: Sequence[int],
    leaves: Sequence[Sequence[int]],
    control: int | None = None,
    fanout: str = "tree_reuse",
) -> Circuit:
    """Flip ``leaves[x]`` when the (little-endian) index holds ``x``.

    Index values ``>= len(leaves)`` are assumed not to occur.  Subtrees whose
    leaves flip nothing are skipped.
    """
    L = len(leaves)
    m = (L - 1).bit_length()
    if len(index) < m:
        raise ValueError("index register too narrow")
    if len(helpers) < select_helpers(L, control is not None):
        raise ValueError("not enough helper qubits for unary iteration")
    busy = [bool(t) for t in leaves]

    def nonempty(lo: int, hi: int) -> bool:
        return any(busy[lo:min(hi, L)])

    def leaf(ctrl: int | None, value: int) -> None:
        if ctrl is None:
            for t in leaves[value]:
                circ.x(t)
        else:
            append_fanout(circ, ctrl, leaves[value], fanout)

    def node(ctrl: int, j: int, base: int, depth: int) -> None:
        if j < 0:
            leaf(ctrl, base)
            return
        half = 1 << j
        nz0 = nonempty(base, base + half)
        nz1 = nonempty(base + half, base + 2 * half)
        xj = index[j]
        if nz0 and base + half >= L:
            node(ctrl, j - 1, base, depth)  # the 1-branch holds no valid index
            return
        h = helpers[depth]
        if nz0:
            circ.x(xj).and_(ctrl, xj, h).x(xj)
            node(h, j - 1, base, depth + 1)
            if nz1:
                circ.cx(ctrl, h)
                node(h, j - 1, base + half, depth + 1)
                circ.and_dg(ctrl, xj, h)
            else:
                circ.x(xj).and_dg(ctrl, xj, h).x(xj)
        elif nz1:
            circ.and_(ctrl, xj, h)
            node(h, j - 1, base + half, depth + 1)
            circ.and_dg(ctrl, xj, h)

    if m == 0:
        leaf(control, 0)
    elif control is not None:
        node(control, m - 1, 0, 0)
    else:
        top = index[m - 1]
        half = 1 << (m - 1)
        if nonempty(0, half):
            circ.x(top)
            node(top, m - 2, 0, 0)
            circ.x(top)
        if nonempty(half, L):
            node(top, m - 2, half, 0)
    return circ


def build_select(table: DataTable, fanout: str = "tree_reuse") -> Circuit:
    """Unary-iteration lookup ``sum_x |x><x| (x) X^{a_x}``."""
    circ = Circuit(metadata={"builder": "select", "N": table.N, "b": table.b})
    idx = circ.add_register("index", table.index_width, Role.INDEX)
    out = circ.add_register("out", table.b, Role.OUTPUT)
    work = circ.add_register("select_work", select_helpers(table.N), Role.CLEAN)
    leaves = [_bits(a, out.qubits) for a in table.entries]
    return append_select(circ, idx.qubits, work.qubits, leaves, fanout=fanout)


# ---------------------------------------------------------------------------
# SelectSwap
# ---------------------------------------------------------------------------

def lookup_clean_workspace(N: int, lam: int, controlled: bool = False) -> int:
    """Clean qubits needed by the SelectSwap helpers beyond index/output/copies."""
    Q = -(-N // lam)
    n = (N - 1).bit_length()
    return select_helpers(Q) + divmod_ancillas(n, lam)


@dataclass
class _Layout:
    division: DivmodLayout
    select_work: list[int]
    leaves: list[list[int]] = field(default_factory=list)


def _prepare(circ: Circuit, entries: Sequence[int], b: int, lam: int, index: Sequence[int], copies: Sequence[Sequence[int]], workspace: Sequence[int]) -> _Layout:
    N = len(entries)
    Q = -(-N // lam)
    need_sel = select_helpers(Q)
    sel_work = list(workspace[:need_sel])
    div_work = list(workspace[need_sel:need_sel + divmod_ancillas(len(index), lam)])
    division = append_divmod(circ, index, lam, div_work)
    leaves = []
    for q in range(Q):
        flips = []
        for j in range(lam):
            x = q * lam + j
            if x < N:
                flips += _bits(entries[x], copies[j])
        leaves.append(flips)
    return _Layout(division, sel_work, leaves)


def append_selectswap(
    circ: Circuit,
    entries: Sequence[int],
    b: int,
    lam: int,
    index: Sequence[int],
    copies: Sequence[Sequence[int]],
    workspace: Sequence[int],
    swap_strategy: str = "phase_incorrect",
    fanout: str = "tree_reuse",
) -> Circuit:
    """Garbage-producing SelectSwap; ``copies[0]`` receives ``a_x``."""
    lay = _prepare(circ, entries, b, lam, index, copies, workspace)
    append_select(circ, lay.division.quotient, lay.select_work, lay.leaves, fanout=fanout)
    append_swap_network(circ, lay.division.remainder, copies, swap_strategy, fanout)
    _undo_divmod(circ, index, lam, workspace, len(lay.select_work))
    return circ


def _undo_divmod(circ: Circuit, index: Sequence[int], lam: int, workspace: Sequence[int], skip: int) -> None:
    if lam & (lam - 1) == 0:
        return
    div_work = list(workspace[skip:skip + divmod_ancillas(len(index), lam)])
    sub = Circuit()
    sub.add_register("all", circ.num_qubits, Role.CLEAN)
    append_divmod(sub, index, lam, div_work)
    circ.extend(sub.inverse().gates)


def append_selectswap_dirty(
    circ: Circuit,
    entries: Sequence[int],
    b: int,
    lam: int,
    index: Sequence[int],
    out: Sequence[int],
    copies: Sequence[Sequence[int]],
    workspace: Sequence[int],
    control: int | None = None,
    swap_strategy: str = "linear",
    fanout: str = "tree_reuse",
) -> Circuit:
    """Garbage-free lookup XOR-ing ``a_x`` into ``out`` using borrowed ``copies``.

    With ``control`` given only the two copy-out steps are controlled, which
    yields ``|c>|x>|y> -> |c>|x>|y xor c.a_x>``.
    """
    lay = _prepare(circ, entries, b, lam, index, copies, workspace)
    r = lay.division.remainder

    def copy_out() -> None:
        for s, t in zip(copies[0], out):
            if control is None:
                circ.cx(s, t)
            else:
                circ.ccx(control, s, t)

    def swap(inverse: bool = False) -> None:
        sub = Circuit()
        sub.add_register("all", circ.num_qubits, Role.CLEAN)
        append_swap_network(sub, r, copies, swap_strategy, fanout)
        circ.extend(sub.inverse().gates if inverse else sub.gates)

    for _ in range(2):
        append_select(circ, lay.division.quotient, lay.select_work, lay.leaves, fanout=fanout)
        swap()
        copy_out()
        swap(inverse=True)
    _undo_divmod(circ, index, lam, workspace, len(lay.select_work))
    return circ


def _lookup_circuit(table: DataTable, plan: LookupPlan, builder: str) -> tuple[Circuit, list, list]:
    circ = Circuit(metadata={"builder": builder, "N": table.N, "b": table.b, "lam": plan.lam})
    idx = circ.add_register("index", table.index_width, Role.INDEX)
    return circ, idx.qubits, []


def build_selectswap(table: DataTable, plan: LookupPlan | int = 1, swap_strategy: str = "phase_incorrect") -> Circuit:
    """Garbage-producing SelectSwap: register ``out`` ends holding ``a_x``.

    The ``garbage`` register holds the other ``lam - 1`` copies.  With the
    default phase-incorrect swaps the output is correct up to a sign that
    depends on ``x`` and the data.
    """
    plan = LookupPlan(plan) if isinstance(plan, int) else plan
    plan.check(table.N)
    lam, b = plan.lam, table.b
    circ, index, _ = _lookup_circuit(table, plan, "selectswap")
    out = circ.add_register("out", b, Role.OUTPUT)
    garbage = circ.add_register("garbage", b * (lam - 1), Role.CLEAN)
    work = circ.add_register("work", lookup_clean_workspace(table.N, lam), Role.CLEAN)
    copies = [out.qubits] + [garbage.qubits[j * b:(j + 1) * b] for j in range(lam - 1)]
    circ.metadata["swap_strategy"] = swap_strategy
    return append_selectswap(circ, table.entries, b, lam, index, copies, work.qubits, swap_strategy)


def build_selectswap_dirty(table: DataTable, plan: LookupPlan | int = 1, swap_strategy: str = "linear") -> Circuit:
    """Garbage-free SelectSwap with ``lam * b`` borrowed (dirty) qubits.

    Controlled swaps default to the exact 7-T layout: the sign errors of the
    phase-incorrect swaps depend on the borrowed contents and would not
    cancel between the two passes.
    """
    plan = LookupPlan(plan) if isinstance(plan, int) else plan
    plan.check(table.N)
    lam, b = plan.lam, table.b
    circ, index, _ = _lookup_circuit(table, plan, "selectswap_dirty")
    out = circ.add_register("out", b, Role.OUTPUT)
    dirty = circ.add_register("dirty", b * lam, Role.DIRTY)
    work = circ.add_register("work", lookup_clean_workspace(table.N, lam), Role.CLEAN)
    copies = [dirty.qubits[j * b:(j + 1) * b] for j in range(lam)]
    circ.metadata["swap_strategy"] = swap_strategy
    circ.macro_policy["CSWAP"] = "seven_t"
    return append_selectswap_dirty(circ, table.entries, b, lam, index, out.qubits, copies, work.qubits, swap_strategy=swap_strategy)


def optimal_lambda(N: int, b: int) -> int:
    """``lam`` in ``[1, N]`` minimizing ``4 ceil(N/lam) + 8 b lam`` (smallest on ties).

    The continuous minimizer sits at ``sqrt(N / 2b)`` and the ceiling adds at
    most 4, so scanning a factor-8 window around ``sqrt(N/b)`` plus the end
    points finds the exact optimum.
    """
    if N < 1 or b < 1:
        raise ValueError("N and b must be positive")
    s = math.sqrt(N / b)
    lo, hi = max(1, int(s / 8)), min(N, int(8 * s) + 2)
    cands = sorted({1, N, *range(lo, hi + 1)})
    return min(cands, key=lambda lam: (selectswap_t_formula(N, b, lam), lam))


def selectswap_t_formula(N: int, b: int, lam: int) -> int:
    return 4 * -(-N // lam) + 8 * b * lam


# ---------------------------------------------------------------------------
# Indicator function
# ---------------------------------------------------------------------------

def indicator_workspace(n: int) -> int:
    """Clean qubits used by :func:`append_indicator` on ``n`` input bits."""
    if n <= 1:
        return 0
    nh, nl = (n + 1) // 2, n // 2
    return (1 << nh) + 2 * (1 << nl) + max(indicator_workspace(nh), indicator_workspace(nl))


def append_indicator(circ: Circuit, x: Sequence[int], y: Sequence[int], workspace: Sequence[int]) -> Circuit:
    """XOR the one-hot string ``e(x)`` (length ``2^n``) into ``y``.

    The index splits into high and low halves whose indicators are computed
    recursively into clean workspace; every output bit is then the AND of
    one high and one low bit, taken in rounds that use each workspace bit
    once per round, and the halves are uncomputed by a second recursive call.
    """
    n = len(x)
    if len(y) != 1 << n:
        raise ValueError("output must have 2^n qubits")
    if n == 0:
        circ.x(y[0])
        return circ
    if n == 1:
        circ.x(x[0]).cx(x[0], y[0]).x(x[0]).cx(x[0], y[1])
        return circ
    nh, nl = (n + 1) // 2, n // 2
    H, L = 1 << nh, 1 << nl
    ws = list(workspace)
    if len(ws) < indicator_workspace(n):
        raise ValueError("not enough workspace for the indicator")
    eh, el, anc, rest = ws[:H], ws[H:H + L], ws[H + L:H + 2 * L], ws[H + 2 * L:]
    x_lo, x_hi = x[:nl], x[nl:]

    def halves() -> None:
        append_indicator(circ, x_hi, eh, rest)
        append_indicator(circ, x_lo, el, rest)

    halves()
    for rnd in range(H):
        pairs = [((l + rnd) % H, l) for l in range(L)]
        for h, l in pairs:
            circ.and_(eh[h], el[l], anc[l])
        for h, l in pairs:
            circ.cx(anc[l], y[h * L + l])
        for h, l in pairs:
            circ.and_dg(eh[h], el[l], anc[l])
    halves()
    return circ


def build_indicator(n: int) -> Circuit:
    """``|x>|y> -> |x>|y xor e(x)>`` on ``n`` inputs and ``2^n`` outputs."""
    if n < 0:
        raise ValueError("input width must be nonnegative")
    circ = Circuit(metadata={"builder": "indicator", "n": n})
    x = circ.add_register("x", n, Role.INDEX)
    y = circ.add_register("y", 1 << n, Role.OUTPUT)
    ws = circ.add_register("work", indicator_workspace(n), Role.CLEAN)
    return append_indicator(circ, x.qubits, y.qubits, ws.qubits)


def build_lookup_via_indicator(table: DataTable, k: int, lam: int = 1, dirty: bool = False) -> Circuit:
    """Lookup as ``a_x[i] = sum_l F(x_hi)[i, l] . e(x_lo)[l]`` over GF(2).

    ``F(x_hi)`` is the ``b x 2^k`` block of entries sharing the high index
    bits, written by a Select; ``e(x_lo)`` is the indicator of the low ``k``
    bits.  The ``b 2^k`` products use ``lam`` AND targets in parallel.

    With ``dirty=True`` the matrix register is borrowed: ``out`` is XOR-ed
    with ``<phi xor F, e>`` and then with ``<phi, e>``, which leaves
    ``<F, e>`` because the product is linear in the matrix.

    Raises:
        ValueError: ``k`` outside ``[0, n]`` or ``lam`` outside ``[1, b 2^k]``.
    """
    n, b = table.index_width, table.b
    if not 0 <= k <= n:
        raise ValueError(f"split k={k} outside [0, {n}]")
    K = 1 << k
    if not 1 <= lam <= b * K:
        raise ValueError(f"lambda={lam} outside [1, {b * K}]")
    circ = Circuit(metadata={"builder": "lookup_via_indicator", "N": table.N, "b": b, "k": k, "lam": lam, "dirty": dirty})
    idx = circ.add_register("index", n, Role.INDEX)
    out = circ.add_register("out", b, Role.OUTPUT)
    F = circ.add_register("matrix", b * K, Role.DIRTY if dirty else Role.CLEAN)
    E = circ.add_register("onehot", K, Role.CLEAN)
    hi_count = -(-table.N // K)
    work = circ.add_register(
        "work", max(select_helpers(hi_count), indicator_workspace(k)) + lam, Role.CLEAN)
    anc = work.qubits[-lam:]
    shared = work.qubits[:-lam]
    x_lo, x_hi = idx.qubits[:k], idx.qubits[k:]

    def fq(i: int, l: int) -> int:
        return F.qubits[i * K + l]

    leaves = []
    for h in range(hi_count):
        flips = []
        for l in range(K):
            x = h * K + l
            if x < table.N:
                flips += [fq(i, l) for i in range(b) if (table.entries[x] >> i) & 1]
        leaves.append(flips)

    def write_matrix() -> None:
        append_select(circ, x_hi, shared, leaves)

    def products() -> None:
        pairs = [(i, l) for i in range(b) for l in range(K)]
        for start in range(0, len(pairs), lam):
            chunk = list(zip(pairs[start:start + lam], anc))
            for (i, l), a in chunk:
                circ.and_(fq(i, l), E.qubits[l], a)
            for (i, l), a in chunk:
                circ.cx(a, out.qubits[i])
            for (i, l), a in chunk:
                circ.and_dg(fq(i, l), E.qubits[l], a)

    append_indicator(circ, x_lo, E.qubits, shared)
    write_matrix()
    products()
    write_matrix()
    if dirty:
        products()
    append_indicator(circ, x_lo, E.qubits, shared)
    return circ
