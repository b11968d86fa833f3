"""Arbitrary state preparation and purified density-matrix preparation.

Pure states are prepared one qubit at a time from the most significant end.
With ``p_y`` the probability that the leading ``w`` qubits read ``y``, level
``w`` rotates the next qubit by ``theta_y = arccos sqrt(p_{y0} / p_y)`` using
a lookup of the ``b``-bit quantized angle controlled on ``y``; a final lookup
supplies the phases ``phi_x = arg a_x``.  Angles are stored in turns.

A ``b``-bit angle register ``k`` drives the rotation ``exp(-2 pi i k/2^b Z)``
in one of two ways:

* ``controlled_rotation``: one controlled phase pair per bit,
  ``P(2^j/2^b) CX P(-2^j/2^b) CX`` (two RZ gates each).
* ``phase_gradient``: the angle register is added into a Fourier-state
  register ``F``, whose eigenvalue under ``+k`` is ``exp(2 pi i k/2^b)``.  The
  sign is made to depend on the target qubit by bitwise-negating ``F``
  (turning it into its conjugate) when the target is ``|0>``.

Y rotations are the Z rotations conjugated by ``S H``.

Purified preparation writes a uniform superposition over ``x``, looks up an
alias pair ``(keep_x, alias_x)``, compares ``keep_x`` against a uniform
``b``-bit register and on ``j >= keep_x`` swaps ``alias_x`` into the index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import append_comparator, append_gidney_adder
from .circuit import Circuit, Role
from .fanout import append_fanout
from .lookup import append_selectswap_dirty, lookup_clean_workspace


# ---------------------------------------------------------------------------
# Classical preprocessing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StateSpec:
    """Target amplitudes ``a_x`` (normalized on use)."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.amplitudes, dtype=complex).ravel()
        if a.size == 0 or not np.any(a):
            raise ValueError("state must have a nonzero amplitude")
        object.__setattr__(self, "amplitudes", a)

    @property
    def N(self) -> int:
        return self.amplitudes.size

    @property
    def n(self) -> int:
        n = (self.N - 1).bit_length()
        if 1 << n != self.N:
            raise ValueError("state dimension must be a power of two")
        return n

    def norm(self, q: float = 2) -> float:
        return float(np.linalg.norm(self.amplitudes, q))

    @property
    def normalized(self) -> np.ndarray:
        return self.amplitudes / self.norm()


@dataclass
class AngleTable:
    """Prefix probabilities, rotation angles and phases, all angles in turns.

    ``prob[w]``, ``theta[w]`` and ``theta_q[w]`` are indexed by the ``w``-bit
    prefix ``y = x >> (n - w)``; ``theta_q`` and ``phi_q`` are the integers
    ``k`` of the quantized values ``k / 2^b``.
    """

    b: int
    prob: list[np.ndarray]
    theta: list[np.ndarray]
    theta_q: list[np.ndarray]
    phi: np.ndarray
    phi_q: np.ndarray

    @property
    def n(self) -> int:
        return len(self.theta)

    def reconstruct(self, quantized: bool = True) -> np.ndarray:
        """Amplitudes produced by the rotation tree and phase pass."""
        n = self.n
        scale = 2 * math.pi / (1 << self.b)
        amps = np.ones(1, dtype=complex)
        for w in range(n):
            th = self.theta_q[w] * scale if quantized else self.theta[w] * 2 * math.pi
            # Child bit 0 gets cos, bit 1 gets sin; prefixes stay MSB-first.
            amps = np.stack([amps * np.cos(th), amps * np.sin(th)], axis=1).ravel()
        ph = self.phi_q * scale if quantized else self.phi * 2 * math.pi
        return amps * np.exp(1j * ph)


def quantize_turns(turns: np.ndarray, b: int) -> np.ndarray:
    """Nearest ``k`` with ``k / 2^b`` equal to ``turns`` modulo one."""
    return np.mod(np.rint(np.asarray(turns, dtype=float) * (1 << b)), 1 << b).astype(np.int64)


def compute_angles(spec: StateSpec, b: int) -> AngleTable:
    """Rotation tree for ``spec`` with ``b``-bit angles.

    Prefixes of zero probability get angle 0, and phases of zero
    amplitudes are 0.
    """
    if b < 1:
        raise ValueError("precision b must be positive")
    a = spec.normalized
    n = spec.n
    probs = np.abs(a) ** 2
    prob = [None] * (n + 1)
    prob[n] = probs
    for w in range(n - 1, -1, -1):
        prob[w] = prob[w + 1].reshape(-1, 2).sum(axis=1)
    theta, theta_q = [], []
    for w in range(n):
        p_y = prob[w]
        p_y0 = prob[w + 1][0::2]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(p_y > 0, p_y0 / np.where(p_y > 0, p_y, 1), 1.0)
        th = np.arccos(np.sqrt(np.clip(ratio, 0.0, 1.0))) / (2 * math.pi)
        theta.append(th)
        theta_q.append(quantize_turns(th, b))
    phi = np.where(np.abs(a) > 0, np.angle(a) / (2 * math.pi), 0.0) % 1.0
    return AngleTable(b, prob[:n], theta, theta_q, phi, quantize_turns(phi, b))


def error_bound(n: int, b: int, eps_fourier: float = 0.0) -> float:
    """``2 pi n / 2^b + eps_F``: worst-case distance of the prepared state."""
    return 2 * math.pi * n / (1 << b) + eps_fourier


@dataclass(frozen=True)
class AliasTable:
    """Integer alias decomposition of rounded weights.

    ``rounded[x]`` sums to ``N 2^b``; ``keep[x]`` lies in ``[0, 2^b]`` and
    ``alias[x]`` in ``[0, N)`` with
    ``rounded[x] = keep[x] + sum_{y: alias[y] = x} (2^b - keep[y])``.
    """

    b: int
    rounded: tuple[int, ...]
    keep: tuple[int, ...]
    alias: tuple[int, ...]

    @property
    def N(self) -> int:
        return len(self.rounded)

    def check(self) -> bool:
        full = 1 << self.b
        total = list(self.keep)
        for y, fy in enumerate(self.alias):
            total[fy] += full - self.keep[y]
        return sum(self.rounded) == self.N * full and tuple(total) == self.rounded

    def distribution(self) -> np.ndarray:
        return np.array(self.rounded, dtype=float) / (self.N << self.b)

    def encoded(self) -> list[tuple[int, int]]:
        """``(keep, alias)`` pairs storable in ``b`` bits each.

        A full bin ``keep = 2^b`` is stored as ``keep = 0`` aliased to itself,
        which samples the same way and satisfies the same identity.
        """
        full = 1 << self.b
        return [(0, x) if k == full else (k, f) for x, (k, f) in enumerate(zip(self.keep, self.alias))]


def round_weights(weights: Sequence[float], b: int) -> list[int]:
    """Integers proportional to ``weights`` summing to ``N 2^b``.

    Each weight is floored and the shortfall handed out one unit at a time
    by largest remainder, lower index first on ties.
    """
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    total = w.sum()
    if total <= 0:
        raise ValueError("weights must not all be zero")
    target = len(w) << b
    scaled = [Fraction(float(v)) * target / Fraction(float(total)) for v in w]
    base = [math.floor(s) for s in scaled]
    short = target - sum(base)
    order = sorted(range(len(w)), key=lambda i: (-(scaled[i] - base[i]), i))
    for i in order[:short]:
        base[i] += 1
    return base


def alias_decompose(weights: Sequence[float], b: int) -> AliasTable:
    """Round ``weights`` and split them into keep thresholds and aliases.

    Raises:
        ValueError: a negative weight or an all-zero weight vector.
    """
    rounded = round_weights(weights, b)
    full = 1 << b
    N = len(rounded)
    residual = list(rounded)
    keep = [full] * N
    alias = list(range(N))
    under = [x for x in range(N) if residual[x] < full]
    over = [x for x in range(N) if residual[x] > full]
    while under and over:
        u = under.pop()
        o = over[-1]
        keep[u] = residual[u]
        alias[u] = o
        residual[o] -= full - residual[u]
        if residual[o] < full:
            over.pop()
            under.append(o)
        elif residual[o] == full:
            over.pop()
    table = AliasTable(b, tuple(rounded), tuple(keep), tuple(alias))
    assert table.check(), "alias decomposition broke the weight identity"
    return table


# ---------------------------------------------------------------------------
# Circuit building blocks
# ---------------------------------------------------------------------------

def append_controlled_z_rotation(circ: Circuit, angle: Sequence[int], target: int, b: int) -> Circuit:
    """``exp(-2 pi i k/2^b Z)`` on ``target`` for ``k`` held in ``angle``."""
    for j, c in enumerate(angle):
        a = Fraction(1 << j, 1 << b)
        circ.rz(a, target).cx(c, target).rz(-a, target).cx(c, target)
    return circ


def append_phase_gradient_z_rotation(circ: Circuit, angle: Sequence[int], target: int, fourier: Sequence[int], carries: Sequence[int], fanout: str = "tree_reuse") -> Circuit:
    """Same rotation as :func:`append_controlled_z_rotation` via Fourier-state kickback."""

    def negate_if_zero() -> None:
        circ.x(target)
        append_fanout(circ, target, fourier, fanout)
        circ.x(target)

    negate_if_zero()
    append_gidney_adder(circ, angle, fourier, carries)
    negate_if_zero()
    return circ


def append_fourier_state(circ: Circuit, qubits: Sequence[int]) -> Circuit:
    """``2^{-b/2} sum_k exp(-2 pi i k / 2^b) |k>`` as a product state."""
    b = len(qubits)
    for j, q in enumerate(qubits):
        circ.h(q).rz(-Fraction(1 << j, 1 << b), q)
    return circ


def fourier_state(b: int) -> np.ndarray:
    k = np.arange(1 << b)
    return np.exp(-2j * np.pi * k / (1 << b)) / math.sqrt(1 << b)


@dataclass(frozen=True)
class FourierResource:
    """A ``b``-qubit Fourier state prepared to error ``eps``."""

    b: int
    eps: float

    def rz_error(self) -> float:
        return self.eps / self.b


def build_fourier_state(b: int, eps: float = 1e-3) -> Circuit:
    """Hadamards and ``b`` RZ gates preparing the Fourier state.

    The RZ gates are exact here; ``metadata["rz_error"]`` is the per-gate
    synthesis budget ``eps / b`` to price them with.
    """
    if b < 1:
        raise ValueError("width must be positive")
    res = FourierResource(b, eps)
    circ = Circuit(metadata={"builder": "fourier_state", "b": b, "eps": eps, "rz_error": res.rz_error()})
    f = circ.add_register("fourier", b, Role.FOURIER)
    return append_fourier_state(circ, f.qubits)


@dataclass
class StatePrepLayout:
    """Qubits used by :func:`append_state_prep`."""

    state: list[int]
    angle: list[int]
    dirty: list[int]
    work: list[int]
    fourier: list[int] = field(default_factory=list)
    carries: list[int] = field(default_factory=list)


METHODS = ("controlled_rotation", "phase_gradient")


def state_prep_workspace(n: int, lam: int) -> int:
    """Clean helper qubits for every lookup of a width-``n`` preparation."""
    sizes = [lookup_clean_workspace(1 << w, min(lam, 1 << w)) for w in range(n + 1)]
    return max(sizes)


def allocate_state_prep(circ: Circuit, n: int, lam: int, b: int, method: str) -> StatePrepLayout:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    state = circ.add_register("state", n, Role.OUTPUT).qubits
    angle = circ.add_register("angle", b, Role.CLEAN).qubits
    dirty = circ.add_register("dirty", b * lam, Role.DIRTY).qubits
    work = circ.add_register("work", state_prep_workspace(n, lam), Role.CLEAN).qubits
    lay = StatePrepLayout(state, angle, dirty, work)
    if method == "phase_gradient":
        lay.fourier = circ.add_register("fourier", b, Role.FOURIER).qubits
        lay.carries = circ.add_register("carry", b - 1, Role.CLEAN).qubits
    return lay


def append_state_prep(
    circ: Circuit,
    table: AngleTable,
    lam: int,
    lay: StatePrepLayout,
    method: str = "controlled_rotation",
    control: int | None = None,
    inverse: bool = False,
) -> Circuit:
    """Append the rotation tree and phase pass for ``table`` on ``lay``.

    With ``control`` the lookups only write their angles when the control is
    set, so every rotation degenerates to the identity otherwise.  The
    Fourier register (phase-gradient method) must already hold the Fourier
    state.  ``inverse=True`` appends the exact inverse.
    """
    sub = Circuit()
    sub.add_register("all", circ.num_qubits, Role.CLEAN)
    n, b = table.n, table.b
    state = lay.state  # little-endian: qubit n-1 is the leading bit

    def lookup(entries, index, lam_w):
        copies = [lay.dirty[j * b:(j + 1) * b] for j in range(lam_w)]
        append_selectswap_dirty(sub, [int(e) for e in entries], b, lam_w, index, lay.angle, copies, lay.work, control=control)

    def rotate_z(target):
        if method == "controlled_rotation":
            append_controlled_z_rotation(sub, lay.angle, target, b)
        else:
            append_phase_gradient_z_rotation(sub, lay.angle, target, lay.fourier, lay.carries)

    for w in range(n):
        target = state[n - 1 - w]
        index = state[n - w:]
        lam_w = min(lam, 1 << w)
        lookup(table.theta_q[w], index, lam_w)
        sub.sdg(target).h(target)
        rotate_z(target)
        sub.h(target).s(target)
        lookup(table.theta_q[w], index, lam_w)
    lookup(table.phi_q, state, lam)
    if method == "controlled_rotation":
        for j, q in enumerate(lay.angle):
            sub.rz(Fraction(1 << j, 1 << b), q)
    else:
        append_gidney_adder(sub, lay.angle, lay.fourier, lay.carries)
    lookup(table.phi_q, state, lam)
    circ.extend(sub.inverse().gates if inverse else sub.gates)
    return circ


def build_state_prep(
    spec: StateSpec | Sequence[complex],
    lam: int = 1,
    b: int = 10,
    eps: float = 1e-3,
    method: str = "controlled_rotation",
) -> Circuit:
    """Circuit taking ``|0...0>`` to ``sum_x a_x/|a| |x>`` on register ``state``.

    Args:
        spec: target amplitudes (``N = 2^n``, ``n >= 1``).
        lam: copies per lookup (``1 <= lam <= N``); levels with fewer
            entries use ``min(lam, 2^w)``.
        b: angle precision in bits.
        eps: Fourier-state error budget (phase-gradient) or, for the
            rotation method, the total rotation synthesis budget; stored as
            ``metadata["rz_error"]`` per RZ gate.
        method: ``"controlled_rotation"`` or ``"phase_gradient"``.

    Raises:
        ValueError: ``N`` not a power of two, ``N < 2``, or ``lam`` out of range.
    """
    spec = spec if isinstance(spec, StateSpec) else StateSpec(np.asarray(spec))
    n, N = spec.n, spec.N
    if n < 1:
        raise ValueError("state must have at least two amplitudes")
    if not 1 <= lam <= N:
        raise ValueError(f"lambda={lam} outside [1, {N}]")
    table = compute_angles(spec, b)
    circ = Circuit(metadata={
        "builder": "state_prep", "N": N, "b": b, "lam": lam, "method": method, "eps": eps,
        "error_bound": error_bound(n, b, eps if method == "phase_gradient" else 0.0),
    })
    lay = allocate_state_prep(circ, n, lam, b, method)
    if method == "phase_gradient":
        append_fourier_state(circ, lay.fourier)
        circ.metadata["rz_error"] = eps / b
    else:
        rz = sum(2 * b for _ in range(n)) + b
        circ.metadata["rz_error"] = eps / rz
    return append_state_prep(circ, table, lam, lay, method)


def _place(value: int, qubits: Sequence[int]) -> int:
    return sum(((value >> i) & 1) << q for i, q in enumerate(qubits))


def expected_output(circ: Circuit, amplitudes: Sequence[complex], dirty_value: int = 0) -> dict[int, complex]:
    """Ideal final state of a preparation circuit as a sparse dictionary.

    Register ``state`` holds the normalized target, Fourier registers hold
    the Fourier state, dirty qubits hold ``dirty_value`` and every other
    qubit is ``|0>``.
    """
    a = np.asarray(amplitudes, dtype=complex)
    a = a / np.linalg.norm(a)
    state = circ.register("state").qubits
    base = _place(dirty_value, circ.dirty_qubits)
    terms = {base | _place(x, state): a[x] for x in range(a.size) if a[x] != 0}
    for r in circ.registers:
        if r.role is Role.FOURIER:
            f = fourier_state(r.width)
            terms = {k | _place(v, r.qubits): amp * f[v] for k, amp in terms.items() for v in range(f.size)}
    return terms


def prepared_state_error(circ: Circuit, amplitudes: Sequence[complex], dirty_value: int = 0) -> float:
    """Distance between the simulated and ideal output from ``|0>`` (dirty = ``dirty_value``)."""
    from .simulator import SparseState, distance, simulate

    n = circ.num_qubits
    out = simulate(circ, SparseState.basis(n, _place(dirty_value, circ.dirty_qubits)))
    return distance(out, SparseState.from_dict(expected_output(circ, amplitudes, dirty_value), n))


def build_purified_prep(weights: Sequence[float], lam: int = 1, b: int = 6) -> Circuit:
    """Purification whose ``index`` marginal is the rounded weight distribution.

    Registers: ``index`` (n), lookup output ``keep`` (b) and ``alias`` (n),
    ``uniform`` (b), ``flag``, comparator carries, borrowed lookup copies and
    lookup workspace.

    Raises:
        ValueError: negative weights or ``N`` not a power of two.
    """
    w = np.asarray(weights, dtype=float)
    N = w.size
    n = (N - 1).bit_length()
    if 1 << n != N:
        raise ValueError("number of weights must be a power of two")
    if not 1 <= lam <= N:
        raise ValueError(f"lambda={lam} outside [1, {N}]")
    table = alias_decompose(w, b)
    width = b + n
    entries = [k | (f << b) for k, f in table.encoded()]
    circ = Circuit(metadata={"builder": "purified_prep", "N": N, "b": b, "lam": lam,
                             "rounded": list(table.rounded)})
    index = circ.add_register("index", n, Role.OUTPUT)
    keep = circ.add_register("keep", b, Role.CLEAN)
    alias = circ.add_register("alias", n, Role.CLEAN)
    uniform = circ.add_register("uniform", b, Role.CLEAN)
    flag = circ.add_register("flag", 1, Role.CLEAN)
    carries = circ.add_register("carry", b + 1, Role.CLEAN)
    dirty = circ.add_register("dirty", width * lam, Role.DIRTY)
    work = circ.add_register("work", lookup_clean_workspace(N, lam), Role.CLEAN)
    for q in index:
        circ.h(q)
    copies = [dirty.qubits[j * width:(j + 1) * width] for j in range(lam)]
    append_selectswap_dirty(circ, entries, width, lam, index.qubits, keep.qubits + alias.qubits, copies, work.qubits)
    for q in uniform:
        circ.h(q)
    append_comparator(circ, keep.qubits, uniform.qubits, flag[0], carries.qubits)
    for x, f in zip(index, alias):
        circ.cswap(flag[0], x, f)
    circ.macro_policy["CSWAP"] = "seven_t"
    return circ
