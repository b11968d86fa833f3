"""Isometry synthesis as a product of reflections about prepared states.

With one extra qubit ``f``, the states
``|w_k> = (|1>|k> - |0>|u_k>) / sqrt(2)`` are orthonormal whenever the columns
``u_k`` are, and ``W = prod_k (I - 2|w_k><w_k|)`` maps ``|1>|k>`` to
``|0>|u_k>`` for every ``k < K``.  Each reflection is
``B_k R B_k^dagger`` where ``R = I - 2|0..0><0..0|`` on ``f`` and the system
and ``B_k`` prepares ``|w_k>`` (up to sign) from ``|0>|0...0>``:

1. Hadamard then Z on ``f``;
2. CNOTs from ``f`` onto the set bits of ``k``;
3. the preparation ``A_k`` of ``u_k``, active when ``f = 0``.

Qubit 0 is ``f`` and the system occupies register ``state``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import Circuit, Role
from .stateprep import (
    METHODS,
    StateSpec,
    allocate_state_prep,
    append_fourier_state,
    append_state_prep,
    compute_angles,
    error_bound,
    expected_output,
)

ORTHONORMAL_TOL = 1e-10


@dataclass(frozen=True)
class IsometrySpec:
    """``K`` orthonormal columns of length ``N`` (stored as an ``N x K`` array)."""

    columns: np.ndarray

    def __post_init__(self) -> None:
        u = np.atleast_2d(np.asarray(self.columns, dtype=complex))
        if u.ndim != 2 or u.shape[1] == 0:
            raise ValueError("isometry needs at least one column")
        if u.shape[1] > u.shape[0]:
            raise ValueError("more columns than the dimension allows")
        object.__setattr__(self, "columns", u)
        gram = u.conj().T @ u
        dev = float(np.max(np.abs(gram - np.eye(u.shape[1]))))
        if dev > ORTHONORMAL_TOL:
            raise ValueError(f"columns are not orthonormal (deviation {dev:.2e})")

    @property
    def N(self) -> int:
        return self.columns.shape[0]

    @property
    def K(self) -> int:
        return self.columns.shape[1]

    @property
    def n(self) -> int:
        n = (self.N - 1).bit_length()
        if 1 << n != self.N:
            raise ValueError("dimension must be a power of two")
        return n

    def column(self, k: int) -> np.ndarray:
        return self.columns[:, k]

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[complex]]) -> "IsometrySpec":
        """Build from a list of columns (each of length ``N``)."""
        return cls(np.array(columns, dtype=complex).T)


def gram_schmidt(columns: Sequence[Sequence[complex]]) -> np.ndarray:
    """Orthonormalize ``columns`` (a list of vectors) in order.

    Raises:
        ValueError: the vectors are linearly dependent.
    """
    out = []
    for v in np.array(columns, dtype=complex):
        for u in out:
            v = v - np.vdot(u, v) * u
        nrm = np.linalg.norm(v)
        if nrm < 1e-12:
            raise ValueError("columns are linearly dependent")
        out.append(v / nrm)
    return np.array(out).T


def random_isometry(N: int, K: int, rng: np.random.Generator) -> IsometrySpec:
    """Haar-like random isometry from the QR decomposition of a Gaussian matrix."""
    z = rng.normal(size=(N, K)) + 1j * rng.normal(size=(N, K))
    q, r = np.linalg.qr(z)
    return IsometrySpec(q * (np.diag(r) / np.abs(np.diag(r))))


def _embed(x: int, flag: int) -> int:
    return flag | (x << 1)


@dataclass(frozen=True)
class ReflectionProgram:
    """The reflection states ``|w_k>`` on ``f`` (bit 0) and the system (bits 1..n)."""

    spec: IsometrySpec
    states: tuple[np.ndarray, ...]

    def reflection(self, k: int) -> np.ndarray:
        w = self.states[k]
        return np.eye(w.size, dtype=complex) - 2 * np.outer(w, w.conj())

    def product(self) -> np.ndarray:
        out = np.eye(2 * self.spec.N, dtype=complex)
        for k in range(self.spec.K):
            out = self.reflection(k) @ out
        return out

    def check(self, tol: float = ORTHONORMAL_TOL) -> float:
        """Largest ``|| W|1>|k> - |0>|u_k> ||``; raises if above ``tol``."""
        W = self.product()
        err = 0.0
        for k in range(self.spec.K):
            target = np.zeros(2 * self.spec.N, dtype=complex)
            target[[_embed(x, 0) for x in range(self.spec.N)]] = self.spec.column(k)
            err = max(err, float(np.linalg.norm(W[:, _embed(k, 1)] - target)))
        if err > tol:
            raise ValueError(f"reflection product misses the isometry by {err:.2e}")
        return err


def reflection_states(spec: IsometrySpec) -> ReflectionProgram:
    """``|w_k> = (|1>|k> - |0>|u_k>)/sqrt(2)`` with the product identity checked."""
    N = spec.N
    states = []
    for k in range(spec.K):
        w = np.zeros(2 * N, dtype=complex)
        w[_embed(k, 1)] += 1
        w[[_embed(x, 0) for x in range(N)]] -= spec.column(k)
        states.append(w / np.sqrt(2))
    prog = ReflectionProgram(spec, tuple(states))
    prog.check()
    return prog


def append_zero_reflection(circ: Circuit, qubits: Sequence[int], work: Sequence[int]) -> Circuit:
    """``I - 2|0..0><0..0|`` on ``qubits`` using ``len(qubits) - 2`` clean ``work`` qubits."""
    m = len(qubits)
    if m == 0:
        raise ValueError("need at least one qubit")
    for q in qubits:
        circ.x(q)
    if m == 1:
        circ.z(qubits[0])
    else:
        chain = [qubits[0]]
        for i in range(1, m - 1):
            circ.and_(chain[-1], qubits[i], work[i - 1])
            chain.append(work[i - 1])
        circ.cz(chain[-1], qubits[-1])
        for i in reversed(range(1, m - 1)):
            circ.and_dg(chain[i - 1], qubits[i], work[i - 1])
    for q in qubits:
        circ.x(q)
    return circ


def build_isometry(
    spec: IsometrySpec,
    lam: int = 1,
    b: int = 14,
    eps: float = 1e-3,
    method: str = "controlled_rotation",
    ks: Sequence[int] | None = None,
) -> Circuit:
    """Circuit for ``W`` acting on register ``flag`` (qubit 0) and ``state``.

    Args:
        spec: orthonormal columns, ``N = 2^n``.
        lam: copies per lookup inside each preparation.
        b: angle precision in bits.
        eps: Fourier-state budget (phase-gradient) recorded in metadata.
        method: rotation method of the inner preparations.
        ks: apply only the reflections for these columns, in this order
            (default: all of them).

    Raises:
        ValueError: non-orthonormal columns, ``N`` not a power of two,
            ``lam`` out of range or a column index outside ``[0, K)``.
    """
    n, N = spec.n, spec.N
    if n < 1:
        raise ValueError("dimension must be at least 2")
    if not 1 <= lam <= N:
        raise ValueError(f"lambda={lam} outside [1, {N}]")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    reflection_states(spec)
    ks = list(range(spec.K)) if ks is None else list(ks)
    if any(not 0 <= k < spec.K for k in ks):
        raise ValueError(f"column indices must lie in [0, {spec.K})")
    circ = Circuit(metadata={
        "builder": "isometry", "N": N, "K": spec.K, "b": b, "lam": lam, "method": method, "eps": eps,
        "error_bound": len(ks) * error_bound(n, b, eps if method == "phase_gradient" else 0.0),
    })
    flag = circ.add_register("flag", 1, Role.CONTROL)[0]
    lay = allocate_state_prep(circ, n, lam, b, method)
    refl_work = circ.add_register("reflect_work", max(0, n - 1), Role.CLEAN).qubits
    if method == "phase_gradient":
        append_fourier_state(circ, lay.fourier)
    for k in ks:
        table = compute_angles(StateSpec(spec.column(k)), b)
        bits = [q for i, q in enumerate(lay.state) if (k >> i) & 1]

        def prepare(inverse: bool) -> None:
            if not inverse:
                circ.h(flag).z(flag)
                for q in bits:
                    circ.cx(flag, q)
            circ.x(flag)
            append_state_prep(circ, table, lam, lay, method, control=flag, inverse=inverse)
            circ.x(flag)
            if inverse:
                for q in reversed(bits):
                    circ.cx(flag, q)
                circ.z(flag).h(flag)

        prepare(inverse=True)
        append_zero_reflection(circ, [flag] + lay.state, refl_work)
        prepare(inverse=False)
    circ.macro_policy["CSWAP"] = "seven_t"
    return circ


def column_errors(circ: Circuit, spec: IsometrySpec, dirty_value: int = 0) -> list[float]:
    """``|| V|1>|k> - |0>|u_k> ||`` for each ``k`` by simulation (ancillas included)."""
    from .simulator import SparseState, distance, simulate

    n = circ.num_qubits
    state = circ.register("state").qubits
    flag = circ.register("flag")[0]
    dirty = sum(((dirty_value >> i) & 1) << q for i, q in enumerate(circ.dirty_qubits))
    errs = []
    for k in range(spec.K):
        start = dirty | (1 << flag) | sum(((k >> i) & 1) << q for i, q in enumerate(state))
        out = simulate(circ, SparseState.basis(n, start))
        target = SparseState.from_dict(expected_output(circ, spec.column(k), dirty_value), n)
        errs.append(distance(out, target))
    return errs
