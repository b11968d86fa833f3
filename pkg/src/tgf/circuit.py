"""Gate-level intermediate representation for Clifford+T circuits.

A :class:`Circuit` is an ordered list of :class:`Gate` values acting on qubits
that are grouped into named registers with a role (index, output, clean or
dirty workspace, ...).  Builders emit a handful of macro gates (``CCX``,
``CSWAP``, ``AND``, ``ANDdg``) which :func:`expand_macros` lowers to the base
gate set according to a :class:`CostModel`.  :func:`resource_report` counts T
gates and computes T depth and Clifford depth by as-soon-as-possible layering.

Angles of ``RZ`` gates are measured in turns: ``RZ(a)`` is ``diag(1, e^{2 pi i a})``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from itertools import count
from typing import Callable, Iterable, Iterator, Sequence, Union

Angle = Union[Fraction, float]


class ConfigurationError(ValueError):
    """Raised when a macro cannot be expanded under the requested strategy."""


class CircuitFormatError(ValueError):
    """Raised when a circuit text file cannot be parsed."""


class Role(str, Enum):
    INDEX = "index"
    OUTPUT = "output"
    CLEAN = "workspace-clean"
    DIRTY = "workspace-dirty"
    CONTROL = "control"
    FOURIER = "fourier"
    CLASSICAL = "classical"


ONE_QUBIT = frozenset({"X", "Y", "Z", "H", "S", "Sdg", "T", "Tdg", "G", "Gdg", "RZ", "MZ"})
TWO_QUBIT = frozenset({"CX", "CZ"})
MACROS = frozenset({"CCX", "CSWAP", "AND", "ANDdg", "PCSWAP"})
T_LIKE = frozenset({"T", "Tdg", "G", "Gdg"})
CLIFFORD_1Q = frozenset({"X", "Y", "Z", "H", "S", "Sdg"})
CLASSICALLY_CONTROLLABLE = frozenset({"X", "Z", "CZ"})
BASE_KINDS = ONE_QUBIT | TWO_QUBIT | {"CC"}

_ARITY = {**{k: 1 for k in ONE_QUBIT}, **{k: 2 for k in TWO_QUBIT}, **{k: 3 for k in MACROS}}
_ARITY["PCSWAP"] = None  # 1 + 2n operands

_INVERSE_KIND = {
    "S": "Sdg", "Sdg": "S", "T": "Tdg", "Tdg": "T", "G": "Gdg", "Gdg": "G",
    "AND": "ANDdg", "ANDdg": "AND",
}


def _normalize_angle(angle: Angle) -> Angle:
    if isinstance(angle, Fraction):
        return angle - math.floor(angle)
    angle = float(angle) % 1.0
    return 0.0 if angle == 1.0 else angle


@dataclass(frozen=True)
class Gate:
    """A single gate.

    ``qubits`` lists operands in the order control(s) first, target last.  For
    ``CSWAP`` the order is ``(control, a, b)``; for ``AND``/``ANDdg`` it is
    ``(c1, c2, target)``.  ``PCSWAP`` is ``(control, a_0..a_{n-1}, b_0..b_{n-1})``:
    a controlled swap of two registers that is exact up to a sign ``-1`` for
    every pair with ``a_i = b_i = 0`` when the control is set.  ``MZ`` writes classical bit ``cbit``; ``CC`` applies
    ``inner`` when ``cbit`` is 1.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: Angle | None = None
    cbit: str | None = None
    inner: "Gate | None" = None

    def __post_init__(self) -> None:
        if self.kind == "CC":
            if self.inner is None or self.cbit is None:
                raise ValueError("classically controlled gate needs inner gate and cbit")
            if self.inner.kind not in CLASSICALLY_CONTROLLABLE:
                raise ValueError(f"classical control unsupported for {self.inner.kind}")
            object.__setattr__(self, "qubits", self.inner.qubits)
        elif self.kind not in _ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        elif self.kind == "PCSWAP":
            if len(self.qubits) < 3 or len(self.qubits) % 2 == 0:
                raise ValueError("PCSWAP takes a control and two equal-width registers")
        elif len(self.qubits) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {_ARITY[self.kind]} qubits, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"repeated operand in {self.kind} {self.qubits}")
        if self.kind == "RZ":
            if self.angle is None:
                raise ValueError("RZ needs an angle")
            object.__setattr__(self, "angle", _normalize_angle(self.angle))
        if self.kind == "MZ" and self.cbit is None:
            raise ValueError("MZ needs a classical bit id")

    @property
    def is_macro(self) -> bool:
        return self.kind in MACROS

    def inverse(self) -> "Gate":
        if self.kind in ("MZ", "CC"):
            raise ValueError("measurements are not invertible")
        if self.kind == "RZ":
            return replace(self, angle=_normalize_angle(-self.angle))
        return replace(self, kind=_INVERSE_KIND.get(self.kind, self.kind))

    def remap(self, mapping: Sequence[int] | dict[int, int]) -> "Gate":
        qubits = tuple(mapping[q] for q in self.qubits)
        if self.kind == "CC":
            return replace(self, inner=self.inner.remap(mapping), qubits=qubits)
        return replace(self, qubits=qubits)

    def __str__(self) -> str:
        qs = " ".join(map(str, self.qubits))
        if self.kind == "RZ":
            return f"RZ {_format_angle(self.angle)} {qs}"
        if self.kind == "MZ":
            return f"MZ {qs} -> {self.cbit}"
        if self.kind == "CC":
            return f"{self.inner.kind}? {self.cbit} {qs}"
        return f"{self.kind} {qs}"


@dataclass(frozen=True)
class Register:
    name: str
    start: int
    width: int
    role: Role

    @property
    def qubits(self) -> list[int]:
        return list(range(self.start, self.start + self.width))

    def __len__(self) -> int:
        return self.width

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.start, self.start + self.width))

    def __getitem__(self, i):
        return self.qubits[i]


@dataclass
class CostModel:
    """How macros are lowered and how rotations are priced.

    ``rz_t_cost`` maps a target synthesis error to a T budget for one ``RZ``;
    the default is ``ceil(3 log2(1/delta))``.
    """

    toffoli_strategy: str = "and_gadget_measured"
    uncompute_free_via_measurement: bool = True
    rz_error: float = 1e-10
    rz_t_cost: Callable[[float], int] = field(default=None)  # type: ignore[assignment]

    STRATEGIES = ("seven_t", "relphase_four_t", "and_gadget_measured")

    def __post_init__(self) -> None:
        if self.toffoli_strategy not in self.STRATEGIES:
            raise ConfigurationError(f"unknown Toffoli strategy {self.toffoli_strategy!r}")
        if self.rz_t_cost is None:
            self.rz_t_cost = default_rz_t_cost


def default_rz_t_cost(delta: float, c_rot: float = 3.0) -> int:
    if not 0 < delta < 1:
        raise ValueError("rotation error must lie in (0, 1)")
    return math.ceil(c_rot * math.log2(1.0 / delta))


class Circuit:
    """Ordered gate list over named registers.

    Builders mutate a circuit while constructing it; afterwards circuits are
    treated as values (every transformation returns a new circuit).
    """

    def __init__(
        self,
        registers: Iterable[Register] = (),
        gates: Iterable[Gate] = (),
        macro_policy: dict[str, str] | None = None,
        metadata: dict | None = None,
    ) -> None:
        self.registers: list[Register] = []
        self.gates: list[Gate] = []
        self.macro_policy: dict[str, str] = dict(macro_policy or {})
        self.metadata: dict = dict(metadata or {})
        for reg in registers:
            self._add_existing_register(reg)
        for g in gates:
            self.append(g)

    # -- registers ---------------------------------------------------------
    @property
    def num_qubits(self) -> int:
        return self.registers[-1].start + self.registers[-1].width if self.registers else 0

    def add_register(self, name: str, width: int, role: Role | str) -> Register:
        if any(r.name == name for r in self.registers):
            raise ValueError(f"duplicate register name {name!r}")
        if width < 0:
            raise ValueError("register width must be non-negative")
        reg = Register(name, self.num_qubits, width, Role(role))
        self.registers.append(reg)
        return reg

    def _add_existing_register(self, reg: Register) -> None:
        if reg.start != self.num_qubits:
            raise ValueError("registers must form a contiguous qubit range")
        if any(r.name == reg.name for r in self.registers):
            raise ValueError(f"duplicate register name {reg.name!r}")
        self.registers.append(Register(reg.name, reg.start, reg.width, Role(reg.role)))

    def register(self, name: str) -> Register:
        for r in self.registers:
            if r.name == name:
                return r
        raise KeyError(name)

    def qubits_with_role(self, *roles: Role) -> list[int]:
        return [q for r in self.registers if r.role in roles for q in r]

    def role_of(self, qubit: int) -> Role:
        for r in self.registers:
            if r.start <= qubit < r.start + r.width:
                return r.role
        raise IndexError(f"qubit {qubit} outside every register")

    @property
    def dirty_qubits(self) -> list[int]:
        return self.qubits_with_role(Role.DIRTY)

    # -- gates -------------------------------------------------------------
    def append(self, gate: Gate) -> "Circuit":
        n = self.num_qubits
        for q in gate.qubits:
            if not 0 <= q < n:
                raise ValueError(f"qubit {q} outside circuit of {n} qubits")
        if gate.kind == "MZ" and self.role_of(gate.qubits[0]) is Role.DIRTY:
            raise ValueError("dirty qubits may not be measured")
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def _g(self, kind: str, *qubits: int, **kw) -> "Circuit":
        return self.append(Gate(kind, tuple(int(q) for q in qubits), **kw))

    def x(self, q): return self._g("X", q)
    def y(self, q): return self._g("Y", q)
    def z(self, q): return self._g("Z", q)
    def h(self, q): return self._g("H", q)
    def s(self, q): return self._g("S", q)
    def sdg(self, q): return self._g("Sdg", q)
    def t(self, q): return self._g("T", q)
    def tdg(self, q): return self._g("Tdg", q)
    def g(self, q): return self._g("G", q)
    def gdg(self, q): return self._g("Gdg", q)
    def cx(self, c, t): return self._g("CX", c, t)
    def cz(self, a, b): return self._g("CZ", a, b)
    def ccx(self, c1, c2, t): return self._g("CCX", c1, c2, t)
    def cswap(self, c, a, b): return self._g("CSWAP", c, a, b)
    def and_(self, c1, c2, t): return self._g("AND", c1, c2, t)
    def and_dg(self, c1, c2, t): return self._g("ANDdg", c1, c2, t)
    def rz(self, angle: Angle, q): return self._g("RZ", q, angle=angle)
    def mz(self, q, cbit: str): return self._g("MZ", q, cbit=cbit)

    def classically_controlled(self, kind: str, cbit: str, *qubits: int) -> "Circuit":
        inner = Gate(kind, tuple(qubits))
        return self.append(Gate("CC", inner.qubits, cbit=cbit, inner=inner))

    # -- transformations ---------------------------------------------------
    def copy(self, gates: Iterable[Gate] | None = None) -> "Circuit":
        c = Circuit(self.registers, (), self.macro_policy, self.metadata)
        c.gates = list(self.gates if gates is None else gates)
        return c

    def inverse(self) -> "Circuit":
        return self.copy([g.inverse() for g in reversed(self.gates)])

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.registers == other.registers and self.gates == other.gates

    def count(self, *kinds: str) -> int:
        return sum(1 for g in self.gates if g.kind in kinds)

    def has_measurements(self) -> bool:
        return any(g.kind in ("MZ", "CC") for g in self.gates)

    # -- text format ---------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"qubits {self.num_qubits}"]
        lines += [f"register {r.name} {r.start} {r.width} {r.role.value}" for r in self.registers]
        lines += [str(g) for g in self.gates]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        return parse_circuit(text)

    def __repr__(self) -> str:
        return f"Circuit({self.num_qubits} qubits, {len(self.gates)} gates)"


def _format_angle(angle: Angle) -> str:
    if isinstance(angle, Fraction):
        return f"{angle.numerator}/{angle.denominator}"
    return repr(float(angle))


def _parse_angle(tok: str) -> Angle:
    if re.fullmatch(r"-?\d+/\d+", tok) or re.fullmatch(r"-?\d+", tok):
        return Fraction(tok)
    return float(tok)


def parse_circuit(text: str) -> Circuit:
    """Parse the one-gate-per-line text format produced by :meth:`Circuit.to_text`."""
    circ = Circuit()
    declared = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            head = tok[0]
            if head == "qubits":
                declared = int(tok[1])
            elif head == "register":
                name, start, width, role = tok[1], int(tok[2]), int(tok[3]), tok[4]
                circ._add_existing_register(Register(name, start, width, Role(role)))
            elif declared is not None and not circ.registers:
                # No register lines: treat the whole range as one clean register.
                circ.add_register("q", declared, Role.CLEAN)
            if head in ("qubits", "register"):
                pass
            elif head.endswith("?"):
                circ.classically_controlled(head[:-1], tok[1], *map(int, tok[2:]))
            elif head == "RZ":
                circ.rz(_parse_angle(tok[1]), int(tok[2]))
            elif head == "MZ":
                if len(tok) != 4 or tok[2] != "->":
                    raise CircuitFormatError("expected 'MZ <q> -> <cbit>'")
                circ.mz(int(tok[1]), tok[3])
            else:
                circ.append(Gate(head, tuple(map(int, tok[1:]))))
        except (ValueError, IndexError, KeyError) as exc:
            raise CircuitFormatError(f"line {lineno}: {raw.strip()!r}: {exc}") from exc
    if declared is None:
        raise CircuitFormatError("missing 'qubits' header")
    if declared != circ.num_qubits:
        raise CircuitFormatError(f"header declares {declared} qubits, registers cover {circ.num_qubits}")
    return circ


# ---------------------------------------------------------------------------
# Macro expansion
# ---------------------------------------------------------------------------

def _toffoli_7t(c1: int, c2: int, t: int) -> list[Gate]:
    seq = [
        ("H", t), ("CX", c2, t), ("Tdg", t), ("CX", c1, t), ("T", t), ("CX", c2, t),
        ("Tdg", t), ("CX", c1, t), ("T", c2), ("T", t), ("H", t), ("CX", c1, c2),
        ("T", c1), ("Tdg", c2), ("CX", c1, c2),
    ]
    return [Gate(k, tuple(q)) for k, *q in seq]


def _toffoli_4t(c1: int, c2: int, t: int) -> list[Gate]:
    # Equal to CCX except for a -1 on |c1=1, c2=0, t=0>.
    seq = [("G", t), ("CX", c2, t), ("G", t), ("CX", c1, t), ("Gdg", t), ("CX", c2, t), ("Gdg", t)]
    return [Gate(k, tuple(q)) for k, *q in seq]


def _and_gadget(c1: int, c2: int, t: int) -> list[Gate]:
    # Target must start in |0>; exact, 4 T.
    seq = [
        ("H", t), ("T", t), ("CX", c1, t), ("Tdg", t), ("CX", c2, t), ("T", t),
        ("CX", c1, t), ("Tdg", t), ("CX", c2, t), ("H", t), ("S", t),
    ]
    return [Gate(k, tuple(q)) for k, *q in seq]


def _and_measured_uncompute(c1: int, c2: int, t: int, cbit: str) -> list[Gate]:
    cz = Gate("CZ", (c1, c2))
    x = Gate("X", (t,))
    return [
        Gate("H", (t,)),
        Gate("MZ", (t,), cbit=cbit),
        Gate("CC", cz.qubits, cbit=cbit, inner=cz),
        Gate("CC", x.qubits, cbit=cbit, inner=x),
    ]


def _inverse_seq(gates: list[Gate]) -> list[Gate]:
    return [g.inverse() for g in reversed(gates)]


def expand_macros(circuit: Circuit, model: CostModel | None = None) -> Circuit:
    """Lower every macro gate to the base Clifford+T(+RZ, MZ) gate set.

    A per-kind entry in ``circuit.macro_policy`` overrides the model's
    Toffoli strategy for that macro kind.
    """
    model = model or CostModel()
    if not any(g.is_macro for g in circuit.gates):
        return circuit.copy()
    used = {g.cbit for g in circuit.gates if g.kind == "MZ"}
    fresh = (f"m{i}" for i in count() if f"m{i}" not in used)
    out: list[Gate] = []
    for g in circuit.gates:
        if not g.is_macro:
            out.append(g)
            continue
        strategy = circuit.macro_policy.get(g.kind, model.toffoli_strategy)
        if strategy not in CostModel.STRATEGIES:
            raise ConfigurationError(f"unknown strategy {strategy!r} for {g.kind}")
        out.extend(_expand_one(g, strategy, model, fresh))
    return circuit.copy(out)


def phase_incorrect_swap_gates(control: int, a: Sequence[int], b: Sequence[int], fanout: str = "tree_reuse") -> list[Gate]:
    """4n-T controlled swap: relative-phase Toffolis sharing one central fanout."""
    from .fanout import fanout_slices

    pairs = list(zip(a, b))
    out = [Gate("CX", (bi, ai)) for ai, bi in pairs]
    out += [Gate("G", (bi,)) for _, bi in pairs]
    out += [Gate("CX", (ai, bi)) for ai, bi in pairs]
    out += [Gate("G", (bi,)) for _, bi in pairs]
    out += [Gate("CX", cb) for layer in fanout_slices(control, list(b), fanout) for cb in layer]
    out += [Gate("Gdg", (bi,)) for _, bi in pairs]
    out += [Gate("CX", (ai, bi)) for ai, bi in pairs]
    out += [Gate("Gdg", (bi,)) for _, bi in pairs]
    out += [Gate("CX", (bi, ai)) for ai, bi in pairs]
    return out


def _ccx(strategy: str, c1: int, c2: int, t: int) -> list[Gate]:
    return _toffoli_4t(c1, c2, t) if strategy == "relphase_four_t" else _toffoli_7t(c1, c2, t)


def _expand_one(g: Gate, strategy: str, model: CostModel, fresh: Iterator[str]) -> list[Gate]:
    if g.kind == "CCX":
        return _ccx(strategy, *g.qubits)
    if g.kind == "CSWAP":
        c, a, b = g.qubits
        return [Gate("CX", (b, a)), *_ccx(strategy, c, a, b), Gate("CX", (b, a))]
    if g.kind == "PCSWAP":
        n = (len(g.qubits) - 1) // 2
        return phase_incorrect_swap_gates(g.qubits[0], g.qubits[1:1 + n], g.qubits[1 + n:])
    c1, c2, t = g.qubits
    if g.kind == "AND":
        if strategy == "and_gadget_measured":
            return _and_gadget(c1, c2, t)
        return _ccx(strategy, c1, c2, t)
    # ANDdg
    if strategy == "and_gadget_measured":
        if model.uncompute_free_via_measurement:
            return _and_measured_uncompute(c1, c2, t, next(fresh))
        return _inverse_seq(_and_gadget(c1, c2, t))
    if strategy == "relphase_four_t":
        return _inverse_seq(_toffoli_4t(c1, c2, t))
    return _toffoli_7t(c1, c2, t)


# ---------------------------------------------------------------------------
# Resource accounting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResourceReport:
    t_count: int
    t_depth: int
    clifford_count: int
    clifford_depth: int
    qubits_total: int
    qubits_clean: int
    qubits_dirty: int
    rz_count: int
    rz_t_budget: int
    measurements: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _weight(kind: str) -> int:
    return 1 if kind in T_LIKE or kind in TWO_QUBIT or kind == "RZ" else 0


def schedule_layers(gates: Sequence[Gate]) -> list[int | None]:
    """ASAP layer index of each weighted gate (None for zero-duration gates).

    Two-qubit Cliffords, T-type gates and RZ occupy one layer on their qubits;
    single-qubit Cliffords and measurements take no time but still order the
    qubits they touch.  A classically controlled gate starts no earlier than
    the measurement producing its bit.
    """
    level: dict[int, int] = {}
    cbit_level: dict[str, int] = {}
    layers: list[int | None] = []
    for g in gates:
        kind = g.inner.kind if g.kind == "CC" else g.kind
        start = max((level.get(q, 0) for q in g.qubits), default=0)
        if g.kind == "CC":
            start = max(start, cbit_level.get(g.cbit, 0))
        w = _weight(kind)
        for q in g.qubits:
            level[q] = start + w
        if g.kind == "MZ":
            cbit_level[g.cbit] = start
        layers.append(start if w else None)
    return layers


def resource_report(circuit: Circuit, model: CostModel | None = None) -> ResourceReport:
    """Count resources of ``circuit`` after macro expansion under ``model``."""
    model = model or CostModel()
    expanded = expand_macros(circuit, model)
    gates = expanded.gates
    layers = schedule_layers(gates)
    t_layers: set[int] = set()
    cliff_layers: set[int] = set()
    t_count = cliff_count = rz_count = meas = 0
    for g, layer in zip(gates, layers):
        kind = g.inner.kind if g.kind == "CC" else g.kind
        if kind in T_LIKE:
            t_count += 1
            t_layers.add(layer)
            cliff_layers.add(layer)
        elif kind in TWO_QUBIT:
            cliff_count += 1
            cliff_layers.add(layer)
        elif kind in CLIFFORD_1Q:
            cliff_count += 1
        elif kind == "RZ":
            rz_count += 1
        elif kind == "MZ":
            meas += 1
    dirty = len(expanded.dirty_qubits)
    return ResourceReport(
        t_count=t_count,
        t_depth=len(t_layers),
        clifford_count=cliff_count,
        clifford_depth=len(cliff_layers),
        qubits_total=expanded.num_qubits,
        qubits_clean=expanded.num_qubits - dirty,
        qubits_dirty=dirty,
        rz_count=rz_count,
        rz_t_budget=rz_count * model.rz_t_cost(model.rz_error) if rz_count else 0,
        measurements=meas,
    )
