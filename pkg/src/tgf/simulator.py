"""Exact statevector simulation of :class:`~tgf.circuit.Circuit` objects.

Two state representations are supported:

* :class:`StateVector` stores all ``2**n`` amplitudes and is limited to
  ``TGF_QUBIT_LIMIT`` qubits (default 24).
* :class:`SparseState` stores only the nonzero amplitudes keyed by basis
  index.  Lookup oracles act on hundreds of qubits but keep basis inputs in
  low-rank superpositions, so this is what the wide verification runs use.
  The number of stored terms is capped at ``2**TGF_QUBIT_LIMIT``.

Basis index convention is little-endian: qubit ``q`` is bit ``q`` of the index.
Macro gates (``CCX``, ``CSWAP``, ``PCSWAP``, ``AND``, ``ANDdg``) are applied natively as the
permutations (and signs) they denote; ``AND`` checks its target is ``|0>`` and ``ANDdg``
checks its target equals the AND of its controls.  Measurements fork the run
into branches; branches whose states coincide once a classical bit is no
longer read are merged again.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Union

import numpy as np

from .circuit import Circuit, CostModel, Gate, Role, expand_macros

TOL_NORM = 1e-10
TOL_DEVIATION = 1e-9
_DROP = 1e-13
DEFAULT_QUBIT_LIMIT = 24


class SimulatorLimitError(RuntimeError):
    """The requested simulation exceeds the configured qubit/term limit."""


class MacroPreconditionError(RuntimeError):
    """An ``AND``/``ANDdg`` gate saw a target value it does not allow."""


class BranchingError(RuntimeError):
    """A single state was requested but the run ended in several branches."""


def qubit_limit() -> int:
    return int(os.environ.get("TGF_QUBIT_LIMIT", DEFAULT_QUBIT_LIMIT))


# ---------------------------------------------------------------------------
# Gate matrices
# ---------------------------------------------------------------------------

_S2 = 1 / np.sqrt(2)
_H = np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex)
_S = np.diag([1, 1j])
_T = np.diag([1, np.exp(1j * np.pi / 4)])
G_MATRIX = _S.conj().T @ _H @ _T @ _H @ _S
_DENSE_1Q = {"H": _H, "G": G_MATRIX, "Gdg": G_MATRIX.conj().T}
_PHASE = {
    "Z": -1.0 + 0j, "S": 1j, "Sdg": -1j,
    "T": np.exp(1j * np.pi / 4), "Tdg": np.exp(-1j * np.pi / 4),
}


def gate_matrix(kind: str, angle=None) -> np.ndarray:
    """2x2 matrix of a single-qubit base gate."""
    if kind in _DENSE_1Q:
        return _DENSE_1Q[kind].copy()
    if kind in _PHASE:
        return np.diag([1, _PHASE[kind]])
    if kind == "RZ":
        return np.diag([1, np.exp(2j * np.pi * float(angle))])
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "Y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    raise ValueError(f"{kind} is not a single-qubit gate")


# ---------------------------------------------------------------------------
# State containers
# ---------------------------------------------------------------------------

@dataclass
class StateVector:
    """Dense state on ``n`` qubits."""

    amplitudes: np.ndarray
    n: int = -1

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).ravel()
        size = self.amplitudes.size
        n = size.bit_length() - 1
        if size != 1 << n:
            raise ValueError("amplitude count must be a power of two")
        if self.n == -1:
            self.n = n
        elif self.n != n:
            raise ValueError(f"{size} amplitudes do not describe {self.n} qubits")

    @classmethod
    def basis(cls, n: int, index: int = 0) -> "StateVector":
        amps = np.zeros(1 << n, dtype=complex)
        amps[index] = 1
        return cls(amps, n)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def to_dict(self, tol: float = 0.0) -> dict[int, complex]:
        nz = np.flatnonzero(np.abs(self.amplitudes) > tol)
        return {int(i): complex(self.amplitudes[i]) for i in nz}

    def to_dense(self) -> "StateVector":
        return self


class SparseState:
    """State stored as parallel arrays of basis keys and amplitudes.

    Keys are packed into ``ceil(n / 64)`` unsigned 64-bit words per term.
    """

    def __init__(self, keys: np.ndarray, amps: np.ndarray, n: int) -> None:
        self.n = n
        self.words = max(1, -(-n // 64))
        self.keys = np.asarray(keys, dtype=np.uint64).reshape(-1, self.words)
        self.amps = np.asarray(amps, dtype=complex).ravel()
        if len(self.keys) != len(self.amps):
            raise ValueError("keys and amplitudes differ in length")

    @classmethod
    def from_dict(cls, terms: Mapping[int, complex], n: int) -> "SparseState":
        words = max(1, -(-n // 64))
        items = [(k, a) for k, a in terms.items() if a != 0]
        keys = np.array([pack_key(k, words) for k, _ in items], dtype=np.uint64).reshape(-1, words)
        return cls(keys, np.array([a for _, a in items], dtype=complex), n)

    @classmethod
    def basis(cls, n: int, index: int = 0) -> "SparseState":
        return cls.from_dict({index: 1.0}, n)

    @classmethod
    def from_dense(cls, state: StateVector) -> "SparseState":
        return cls.from_dict(state.to_dict(), state.n)

    def to_dict(self, tol: float = 0.0) -> dict[int, complex]:
        out: dict[int, complex] = {}
        for row, a in zip(self.keys, self.amps):
            if abs(a) > tol:
                k = unpack_key(row)
                out[k] = out.get(k, 0) + complex(a)
        return out

    def to_dense(self) -> StateVector:
        if self.n > qubit_limit():
            raise SimulatorLimitError(f"{self.n} qubits exceed the dense limit {qubit_limit()}")
        amps = np.zeros(1 << self.n, dtype=complex)
        for k, a in self.to_dict().items():
            amps[k] += a
        return StateVector(amps, self.n)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def __len__(self) -> int:
        return len(self.amps)

    def copy(self) -> "SparseState":
        return SparseState(self.keys.copy(), self.amps.copy(), self.n)


State = Union[StateVector, SparseState]


def pack_key(index: int, words: int) -> list[int]:
    return [(index >> (64 * w)) & 0xFFFFFFFFFFFFFFFF for w in range(words)]


def unpack_key(row: Iterable[int]) -> int:
    return sum(int(v) << (64 * w) for w, v in enumerate(row))


def fidelity(a: State, b: State) -> float:
    """|<a|b>|^2 for normalized inputs of either representation."""
    da, db = a.to_dict(), b.to_dict()
    ip = sum(np.conj(v) * db.get(k, 0) for k, v in da.items())
    return float(abs(ip) ** 2)


def distance(a: State, b: State) -> float:
    """Euclidean norm of ``a - b`` (global phase included)."""
    da, db = a.to_dict(), b.to_dict()
    return float(np.sqrt(sum(abs(da.get(k, 0) - db.get(k, 0)) ** 2 for k in set(da) | set(db))))


# ---------------------------------------------------------------------------
# Engines: both expose bit(q), flip(q, mask), phase(mask, value), apply_1q(q, U),
# project(q, value) on an amplitude set.
# ---------------------------------------------------------------------------

class _DenseEngine:
    def __init__(self, amps: np.ndarray, n: int) -> None:
        self.n = n
        self.amps = amps
        self.idx = _index_array(n)

    def copy(self) -> "_DenseEngine":
        return _DenseEngine(self.amps.copy(), self.n)

    def bit(self, q: int) -> np.ndarray:
        return ((self.idx >> q) & 1).astype(bool)

    def flip(self, q: int, mask: np.ndarray | None = None) -> None:
        # Every permutation gate here is an involution, so gathering works.
        perm = self.idx ^ (1 << q) if mask is None else self.idx ^ (mask.astype(np.int64) << q)
        self.amps = self.amps[perm]

    def swap_bits(self, a: int, b: int, mask: np.ndarray) -> None:
        d = (self.bit(a) ^ self.bit(b)) & mask
        perm = self.idx ^ (d.astype(np.int64) << a) ^ (d.astype(np.int64) << b)
        self.amps = self.amps[perm]

    def phase(self, mask: np.ndarray, value: complex) -> None:
        self.amps = np.where(mask, self.amps * value, self.amps)

    def apply_1q(self, q: int, u: np.ndarray) -> None:
        a = self.amps.reshape(1 << (self.n - q - 1), 2, 1 << q)
        self.amps = np.einsum("ij,ajb->aib", u, a).reshape(-1)

    def support(self, mask: np.ndarray) -> bool:
        return bool(np.any(np.abs(self.amps[mask]) > _DROP))

    def project(self, q: int, value: int) -> "_DenseEngine":
        keep = self.bit(q) == bool(value)
        return _DenseEngine(np.where(keep, self.amps, 0), self.n)

    def norm2(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def canonical(self) -> tuple:
        return (self.amps,)

    def state(self, scale: float = 1.0) -> StateVector:
        return StateVector(self.amps * scale, self.n)


@lru_cache(maxsize=4)
def _index_array(n: int) -> np.ndarray:
    arr = np.arange(1 << n, dtype=np.int64)
    arr.setflags(write=False)
    return arr


class _SparseEngine:
    def __init__(self, keys: np.ndarray, amps: np.ndarray, n: int, max_terms: int) -> None:
        self.n = n
        self.keys = keys
        self.amps = amps
        self.max_terms = max_terms

    def copy(self) -> "_SparseEngine":
        return _SparseEngine(self.keys.copy(), self.amps.copy(), self.n, self.max_terms)

    def bit(self, q: int) -> np.ndarray:
        return ((self.keys[:, q >> 6] >> np.uint64(q & 63)) & np.uint64(1)).astype(bool)

    def flip(self, q: int, mask: np.ndarray | None = None) -> None:
        w, s = q >> 6, np.uint64(q & 63)
        if mask is None:
            self.keys[:, w] ^= np.uint64(1) << s
        else:
            self.keys[:, w] ^= mask.astype(np.uint64) << s

    def swap_bits(self, a: int, b: int, mask: np.ndarray) -> None:
        d = (self.bit(a) ^ self.bit(b)) & mask
        self.flip(a, d)
        self.flip(b, d)

    def phase(self, mask: np.ndarray, value: complex) -> None:
        self.amps = np.where(mask, self.amps * value, self.amps)

    def apply_1q(self, q: int, u: np.ndarray) -> None:
        v = self.bit(q)
        k0 = self.keys.copy()
        k0[:, q >> 6] &= ~(np.uint64(1) << np.uint64(q & 63))
        k1 = k0.copy()
        k1[:, q >> 6] |= np.uint64(1) << np.uint64(q & 63)
        vi = v.astype(np.intp)
        a0 = u[0, vi] * self.amps
        a1 = u[1, vi] * self.amps
        self._merge(np.concatenate([k0, k1]), np.concatenate([a0, a1]))

    def _merge(self, keys: np.ndarray, amps: np.ndarray) -> None:
        if keys.shape[1] == 1:
            uniq, inv = np.unique(keys[:, 0], return_inverse=True)
            uniq = uniq.reshape(-1, 1)
        else:
            view = np.ascontiguousarray(keys).view(np.dtype((np.void, 8 * keys.shape[1]))).ravel()
            _, first, inv = np.unique(view, return_index=True, return_inverse=True)
            uniq = keys[first]
        inv = inv.ravel()
        summed = np.bincount(inv, amps.real, len(uniq)) + 1j * np.bincount(inv, amps.imag, len(uniq))
        keep = np.abs(summed) > _DROP
        self.keys = np.ascontiguousarray(uniq[keep])
        self.amps = summed[keep]
        if len(self.amps) > self.max_terms:
            raise SimulatorLimitError(f"sparse state grew beyond {self.max_terms} terms")

    def support(self, mask: np.ndarray) -> bool:
        return bool(np.any(np.abs(self.amps[mask]) > _DROP))

    def project(self, q: int, value: int) -> "_SparseEngine":
        keep = self.bit(q) == bool(value)
        return _SparseEngine(self.keys[keep].copy(), self.amps[keep].copy(), self.n, self.max_terms)

    def norm2(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def canonical(self) -> tuple:
        order = np.lexsort(self.keys.T[::-1]) if len(self.keys) else np.array([], dtype=int)
        return (self.keys[order], self.amps[order])

    def state(self, scale: float = 1.0) -> SparseState:
        return SparseState(self.keys.copy(), self.amps * scale, self.n)


# ---------------------------------------------------------------------------
# Gate application
# ---------------------------------------------------------------------------

def _apply(eng, g: Gate) -> None:
    k, qs = g.kind, g.qubits
    if k == "X":
        eng.flip(qs[0])
    elif k == "CX":
        eng.flip(qs[1], eng.bit(qs[0]))
    elif k == "CCX":
        eng.flip(qs[2], eng.bit(qs[0]) & eng.bit(qs[1]))
    elif k == "AND":
        if eng.support(eng.bit(qs[2])):
            raise MacroPreconditionError(f"AND target {qs[2]} is not |0>")
        eng.flip(qs[2], eng.bit(qs[0]) & eng.bit(qs[1]))
    elif k == "ANDdg":
        both = eng.bit(qs[0]) & eng.bit(qs[1])
        if eng.support(both ^ eng.bit(qs[2])):
            raise MacroPreconditionError(f"ANDdg target {qs[2]} does not hold the AND of its controls")
        eng.flip(qs[2], both)
    elif k == "CSWAP":
        eng.swap_bits(qs[1], qs[2], eng.bit(qs[0]))
    elif k == "PCSWAP":
        z = eng.bit(qs[0])
        n = (len(qs) - 1) // 2
        for a, b in zip(qs[1:1 + n], qs[1 + n:]):
            eng.phase(z & ~eng.bit(a) & ~eng.bit(b), -1.0)
            eng.swap_bits(a, b, z)
    elif k in _PHASE:
        eng.phase(eng.bit(qs[0]), _PHASE[k])
    elif k == "RZ":
        eng.phase(eng.bit(qs[0]), np.exp(2j * np.pi * float(g.angle)))
    elif k == "CZ":
        eng.phase(eng.bit(qs[0]) & eng.bit(qs[1]), -1.0)
    elif k == "Y":
        b = eng.bit(qs[0])
        eng.phase(b, -1.0)
        eng.phase(np.ones_like(b), 1j)
        eng.flip(qs[0])
    elif k in _DENSE_1Q:
        eng.apply_1q(qs[0], _DENSE_1Q[k])
    else:
        raise ValueError(f"cannot apply {k} directly")


@dataclass
class Branch:
    """One measurement branch: normalized state, classical record, probability."""

    state: State
    cbits: dict[str, int]
    probability: float


@dataclass
class _Run:
    eng: object
    cbits: dict[str, int] = field(default_factory=dict)


def _last_uses(gates: list[Gate]) -> dict[int, list[str]]:
    last: dict[str, int] = {}
    for i, g in enumerate(gates):
        if g.cbit is not None:
            last[g.cbit] = i
    out: dict[int, list[str]] = {}
    for c, i in last.items():
        out.setdefault(i, []).append(c)
    return out


def _merge_runs(runs: list[_Run]) -> list[_Run]:
    merged: list[_Run] = []
    for r in runs:
        for m in merged:
            if m.cbits == r.cbits and _same_direction(m.eng, r.eng):
                # Same normalized state: fold r's weight into m.
                scale = np.sqrt((m.eng.norm2() + r.eng.norm2()) / m.eng.norm2())
                m.eng.amps = m.eng.amps * scale
                break
        else:
            merged.append(r)
    return merged


def _same_direction(a, b) -> bool:
    ca, cb = a.canonical(), b.canonical()
    if len(ca) == 2 and (ca[0].shape != cb[0].shape or not np.array_equal(ca[0], cb[0])):
        return False
    na, nb = np.sqrt(a.norm2()), np.sqrt(b.norm2())
    return bool(np.allclose(ca[-1] / na, cb[-1] / nb, atol=1e-12))


def _make_engine(initial: State):
    if isinstance(initial, StateVector):
        if initial.n > qubit_limit():
            raise SimulatorLimitError(f"{initial.n} qubits exceed the limit {qubit_limit()}")
        return _DenseEngine(initial.amplitudes.copy(), initial.n)
    return _SparseEngine(initial.keys.copy(), initial.amps.copy(), initial.n, 1 << qubit_limit())


def run(circuit: Circuit, initial: State | None = None, model: CostModel | None = None) -> list[Branch]:
    """Simulate ``circuit`` exploring every measurement outcome.

    Args:
        circuit: circuit to run; macros are applied natively unless ``model``
            is given, in which case they are first expanded under it.
        initial: input state (defaults to sparse ``|0...0>``, which suits the
            mostly classical circuits built here); its width must equal the
            circuit's.  Dense inputs are limited to ``qubit_limit()`` qubits.
        model: optional cost model used to expand macros before simulating.

    Returns:
        Branches with nonzero probability, each carrying a normalized state.
    """
    if model is not None:
        circuit = expand_macros(circuit, model)
    n = circuit.num_qubits
    if initial is None:
        initial = SparseState.basis(n)
    if initial.n != n:
        raise ValueError(f"state has {initial.n} qubits, circuit has {n}")
    if abs(initial.norm - 1) > TOL_NORM:
        raise ValueError(f"initial state norm {initial.norm} is not 1")
    runs = [_Run(_make_engine(initial))]
    last = _last_uses(circuit.gates)
    for i, g in enumerate(circuit.gates):
        if g.kind == "MZ":
            nxt = []
            for r in runs:
                for v in (0, 1):
                    e = r.eng.project(g.qubits[0], v)
                    if e.norm2() > 1e-24:
                        nxt.append(_Run(e, {**r.cbits, g.cbit: v}))
            runs = nxt
        elif g.kind == "CC":
            for r in runs:
                if r.cbits.get(g.cbit) is None:
                    raise ValueError(f"classical bit {g.cbit} read before it is written")
                if r.cbits[g.cbit]:
                    _apply(r.eng, g.inner)
        else:
            for r in runs:
                _apply(r.eng, g)
        if i in last:
            for r in runs:
                for c in last[i]:
                    r.cbits.pop(c, None)
            if len(runs) > 1:
                runs = _merge_runs(runs)
    out = []
    for r in runs:
        p = r.eng.norm2()
        out.append(Branch(r.eng.state(1 / np.sqrt(p)), dict(r.cbits), p))
    return out


def simulate(circuit: Circuit, initial: State | None = None, model: CostModel | None = None) -> State:
    """Simulate ``circuit`` and return the single resulting state.

    Raises:
        BranchingError: measurement outcomes led to distinguishable branches;
            use :func:`run` to inspect them.
        SimulatorLimitError: the state does not fit under the qubit limit.
    """
    branches = run(circuit, initial, model)
    if len(branches) != 1:
        raise BranchingError(f"run ended in {len(branches)} branches")
    return branches[0].state


def circuit_unitary(circuit: Circuit, model: CostModel | None = None) -> np.ndarray:
    """Dense matrix of a measurement-free circuit (column j = image of |j>)."""
    n = circuit.num_qubits
    if n > 12:
        raise SimulatorLimitError("unitary extraction is limited to 12 qubits")
    cols = [simulate(circuit, StateVector.basis(n, j), model).amplitudes for j in range(1 << n)]
    return np.array(cols).T


# ---------------------------------------------------------------------------
# Dirty-register restoration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirtyTrial:
    """Outcome of one restoration trial.

    ``dirty_init`` is the packed basis value of the dirty qubits (bit i is the
    i-th dirty qubit in ascending order) or a label for superposition trials.
    """

    dirty_init: Union[int, str]
    passed: bool
    max_deviation: float


def _split(state: State, dirty: list[int]) -> dict[tuple[int, int], complex]:
    dmask = sum(1 << q for q in dirty)
    out: dict[tuple[int, int], complex] = {}
    for k, a in state.to_dict(tol=_DROP).items():
        d = sum(((k >> q) & 1) << i for i, q in enumerate(dirty))
        out[(k & ~dmask, d)] = a
    return out


def _embed(rest: Mapping[int, complex], dirty: list[int], dirty_terms: Mapping[int, complex], n: int) -> SparseState:
    terms: dict[int, complex] = {}
    for r, ar in rest.items():
        for d, ad in dirty_terms.items():
            k = r | sum(((d >> i) & 1) << q for i, q in enumerate(dirty))
            terms[k] = ar * ad
    return SparseState.from_dict(terms, n)


def default_probe(circuit: Circuit, seed: int = 0) -> dict[int, complex]:
    """Random superposition over every index and control qubit, all else ``|0>``.

    Amplitudes are seeded random complex numbers rather than uniform, so that
    dirty-controlled bit flips or phases on these inputs cannot go unnoticed.
    Above 16 such qubits a random product state is used instead.
    """
    idx = sorted(circuit.qubits_with_role(Role.INDEX) + circuit.qubits_with_role(Role.CONTROL))
    rng = np.random.default_rng(seed)
    if len(idx) > 16:
        th = rng.uniform(0.2, np.pi - 0.2, len(idx))
        ph = rng.uniform(0, 2 * np.pi, len(idx))
        out = {}
        for v in range(1 << len(idx)):
            amp = 1.0 + 0j
            for i in range(len(idx)):
                amp *= np.sin(th[i] / 2) * np.exp(1j * ph[i]) if (v >> i) & 1 else np.cos(th[i] / 2)
            out[sum(((v >> i) & 1) << q for i, q in enumerate(idx))] = amp
        return out
    amps = rng.normal(size=1 << len(idx)) + 1j * rng.normal(size=1 << len(idx))
    amps /= np.linalg.norm(amps)
    return {sum(((v >> i) & 1) << q for i, q in enumerate(idx)): complex(a) for v, a in enumerate(amps)}


def verify_dirty_restoration(
    circuit: Circuit,
    trials: int = 8,
    seed: int = 0,
    probe: Mapping[int, complex] | None = None,
    superposition_limit: int = 10,
) -> list[DirtyTrial]:
    """Check that workspace-dirty registers come back exactly as they went in.

    The non-dirty qubits start in ``probe`` (by default a seeded random
    superposition of the index registers).  A reference run puts the dirty qubits in
    ``|0...0>``; every trial then uses a random dirty basis value and must end
    in ``reference_rest (x) |dirty value>`` with no phase.  Matching the same
    rest state for every basis value makes the circuit act as ``U (x) I`` on
    the dirty qubits, which by linearity covers all dirty inputs.  When there
    are at most ``superposition_limit`` dirty qubits each trial additionally
    runs a random product superposition and checks the output factorizes.

    Raises:
        ValueError: the circuit declares no workspace-dirty register.
    """
    dirty = circuit.dirty_qubits
    if not dirty:
        raise ValueError("circuit declares no workspace-dirty register")
    n = circuit.num_qubits
    probe = dict(probe) if probe is not None else default_probe(circuit, seed)
    rng = np.random.default_rng(seed)

    ref = _split(simulate(circuit, _embed(probe, dirty, {0: 1.0}, n)), dirty)
    rest_ref = {r: a for (r, d), a in ref.items()}
    results = [DirtyTrial(0, *_compare(ref, rest_ref, {0: 1.0}))]
    for _ in range(trials):
        value = int.from_bytes(rng.bytes((len(dirty) + 7) // 8), "little") & ((1 << len(dirty)) - 1)
        out = _split(simulate(circuit, _embed(probe, dirty, {value: 1.0}, n)), dirty)
        results.append(DirtyTrial(value, *_compare(out, rest_ref, {value: 1.0})))
        if len(dirty) <= superposition_limit:
            th = rng.uniform(0, np.pi, len(dirty))
            ph = rng.uniform(0, 2 * np.pi, len(dirty))
            dterms = {}
            for v in range(1 << len(dirty)):
                amp = 1.0 + 0j
                for i in range(len(dirty)):
                    amp *= np.sin(th[i] / 2) * np.exp(1j * ph[i]) if (v >> i) & 1 else np.cos(th[i] / 2)
                dterms[v] = amp
            out = _split(simulate(circuit, _embed(probe, dirty, dterms, n)), dirty)
            label = f"product-superposition#{len(results)}"
            results.append(DirtyTrial(label, *_compare(out, rest_ref, dterms)))
    return results


def _compare(out: dict, rest_ref: dict, dterms: Mapping[int, complex]) -> tuple[bool, float]:
    dev2 = 0.0
    seen = set()
    for (r, d), a in out.items():
        seen.add((r, d))
        dev2 += abs(a - rest_ref.get(r, 0) * dterms.get(d, 0)) ** 2
    for r, ar in rest_ref.items():
        for d, ad in dterms.items():
            if (r, d) not in seen:
                dev2 += abs(ar * ad) ** 2
    dev = float(np.sqrt(dev2))
    return dev <= TOL_DEVIATION, dev
