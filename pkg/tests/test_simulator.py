
import numpy as np
import pytest
from hypothesis import given, strategies as st

from tgf.arith import build_adder
from tgf.circuit import Circuit, CostModel, Role
from tgf.lookup import DataTable, build_selectswap_dirty
from tgf.simulator import (
    BranchingError,
    MacroPreconditionError,
    SimulatorLimitError,
    SparseState,
    StateVector,
    circuit_unitary,
    distance,
    run,
    simulate,
    verify_dirty_restoration,
)
from tgf.stateprep import append_fourier_state, fourier_state

from conftest import place, random_state
from test_circuit import circuits

TOFFOLI = np.eye(8)
TOFFOLI[[3, 7]] = TOFFOLI[[7, 3]]  # qubits 0,1 control qubit 2 (little-endian)
CSWAP = np.eye(8)
CSWAP[[3, 5]] = CSWAP[[5, 3]]  # control 0, swap qubits 1 and 2


def _one(kind, n=3):
    c = Circuit()
    c.add_register("q", n, Role.CLEAN)
    c._g(kind, *range(n))
    return c


def test_hadamard():
    c = Circuit()
    c.add_register("q", 1, Role.CLEAN)
    c.h(0)
    out = simulate(c, StateVector.basis(1))
    assert np.allclose(out.amplitudes, [2 ** -0.5, 2 ** -0.5])


def test_seven_t_toffoli_on_110():
    c = _one("CCX")
    out = simulate(c, StateVector.basis(3, 0b011), CostModel("seven_t"))
    assert abs(out.amplitudes[0b111] - 1) < 1e-12


def test_macro_equivalence():
    u7 = circuit_unitary(_one("CCX"), CostModel("seven_t"))
    assert np.max(np.abs(u7 - TOFFOLI)) < 1e-12
    u4 = circuit_unitary(_one("CCX"), CostModel("relphase_four_t"))
    diag = np.diag(u4 @ TOFFOLI.T)
    assert np.allclose(np.abs(diag), 1) and np.allclose(u4 @ TOFFOLI.T, np.diag(diag))
    assert sorted(np.round(diag.real).astype(int)) == [-1] + [1] * 7
    assert np.max(np.abs(circuit_unitary(_one("CSWAP"), CostModel("seven_t")) - CSWAP)) < 1e-12
    # Native macros equal their exact matrices.
    assert np.max(np.abs(circuit_unitary(_one("CCX")) - TOFFOLI)) < 1e-12


def test_pcswap_native_matches_expansion():
    c = Circuit()
    c.add_register("q", 5, Role.CLEAN)
    from tgf.circuit import Gate

    c.append(Gate("PCSWAP", (0, 1, 2, 3, 4)))
    assert np.max(np.abs(circuit_unitary(c) - circuit_unitary(c, CostModel()))) < 1e-12


def test_and_precondition_enforced():
    c = Circuit()
    c.add_register("q", 3, Role.CLEAN)
    c.and_(0, 1, 2)
    with pytest.raises(MacroPreconditionError):
        simulate(c, SparseState.basis(3, 0b100))


def test_measurement_branches():
    c = Circuit()
    c.add_register("q", 2, Role.CLEAN)
    c.h(0).mz(0, "c").classically_controlled("X", "c", 1)
    branches = run(c)
    assert len(branches) == 2
    assert sorted(round(b.probability, 12) for b in branches) == [0.5, 0.5]
    with pytest.raises(BranchingError):
        simulate(c)
    c2 = Circuit()
    c2.add_register("q", 1, Role.CLEAN)
    c2.mz(0, "c")
    assert len(run(c2)) == 1  # certain outcome collapses deterministically


def test_measured_uncompute_merges_branches():
    c = Circuit()
    c.add_register("q", 3, Role.CLEAN)
    c.h(0).h(1).and_(0, 1, 2).t(2).and_dg(0, 1, 2)
    native = simulate(c)
    expanded = simulate(c, model=CostModel())
    assert distance(native, expanded) < 1e-12


def test_dense_limit(monkeypatch):
    monkeypatch.setenv("TGF_QUBIT_LIMIT", "3")
    with pytest.raises(SimulatorLimitError):
        simulate(_wide(4), StateVector.basis(4))


def _wide(n):
    c = Circuit()
    c.add_register("q", n, Role.CLEAN)
    c.h(0)
    return c


def test_non_normalized_input_rejected():
    with pytest.raises(ValueError):
        simulate(_wide(1), SparseState.from_dict({0: 2.0}, 1))


@given(circuits(n=4, with_measure=False), st.integers(0, 2 ** 32))
def test_unitarity_and_sparse_dense_agreement(c, seed):
    psi = random_state(np.random.default_rng(seed), 16)
    dense = simulate(c, StateVector(psi, 4))
    sparse = simulate(c, SparseState.from_dense(StateVector(psi, 4)))
    assert abs(dense.norm - 1) < 1e-10
    assert distance(dense, sparse) < 1e-9


@given(circuits(n=4, with_measure=False))
def test_reversibility(c):
    both = c.copy(c.gates + c.inverse().gates)
    rng = np.random.default_rng(len(c.gates))
    for _ in range(100 if len(c.gates) < 8 else 10):
        psi = random_state(rng, 16)
        out = simulate(both, StateVector(psi, 4))
        assert np.max(np.abs(out.amplitudes - psi)) < 1e-9


@pytest.mark.parametrize("b", [1, 2, 3, 4])
def test_phase_gradient_kickback(b):
    c = Circuit()
    x = c.add_register("x", b, Role.INDEX)
    f = c.add_register("y", b, Role.FOURIER)
    carry = c.add_register("carry", max(0, b - 1), Role.CLEAN)
    from tgf.arith import append_gidney_adder

    append_gidney_adder(c, x.qubits, f.qubits, carry.qubits)
    F = fourier_state(b)
    for v in range(1 << b):
        init = SparseState.from_dict({place(v, x) | place(k, f): F[k] for k in range(1 << b)}, c.num_qubits)
        out = simulate(c, init).to_dict()
        for k in range(1 << b):
            key = place(v, x) | place(k, f)
            assert abs(out.get(key, 0) - np.exp(2j * np.pi * v / 2 ** b) * F[k]) < 1e-10


def test_fourier_state_product_form():
    c = Circuit()
    f = c.add_register("f", 3, Role.FOURIER)
    append_fourier_state(c, f.qubits)
    assert abs(np.vdot(fourier_state(3), simulate(c, StateVector.basis(3)).amplitudes)) ** 2 > 1 - 1e-12
    c1 = Circuit()
    c1.add_register("f", 1, Role.FOURIER)
    append_fourier_state(c1, [0])
    assert np.allclose(simulate(c1, StateVector.basis(1)).amplitudes, np.array([1, -1]) / np.sqrt(2))


def test_dirty_restoration_identity_and_missing():
    c = Circuit()
    c.add_register("a", 1, Role.INDEX)
    c.add_register("d", 2, Role.DIRTY)
    assert all(t.passed for t in verify_dirty_restoration(c, trials=3))
    c2 = Circuit()
    c2.add_register("a", 1, Role.INDEX)
    with pytest.raises(ValueError):
        verify_dirty_restoration(c2)


def test_dirty_controlled_gate_detected():
    c = Circuit()
    c.add_register("a", 2, Role.INDEX)
    c.add_register("d", 1, Role.DIRTY)
    c.cx(2, 0)
    assert not all(t.passed for t in verify_dirty_restoration(c, trials=4))
    p = Circuit()
    p.add_register("a", 1, Role.INDEX)
    p.add_register("d", 1, Role.DIRTY)
    p.cz(0, 1)
    assert not all(t.passed for t in verify_dirty_restoration(p, trials=4))


def test_fig1d_example_all_inputs():
    table = DataTable(1, (1, 0, 1, 1))
    c = build_selectswap_dirty(table, 2)
    idx, out, dirty = (c.register(r).qubits for r in ("index", "out", "dirty"))
    for x in range(4):
        for d in range(4):
            res = simulate(c, SparseState.basis(c.num_qubits, place(x, idx) | place(d, dirty))).to_dict(1e-12)
            expect = place(x, idx) | place(table[x], out) | place(d, dirty)
            assert list(res) == [expect] and abs(res[expect] - 1) < 1e-9
    assert all(t.passed and t.max_deviation <= 1e-9 for t in verify_dirty_restoration(c, trials=8))


def test_linear_layer_applied_twice_restores():
    # T(x ^ y) ^ T(y) = T(x) for a GF(2)-linear T: borrowed y is restored.
    c = Circuit()
    x = c.add_register("x", 2, Role.INDEX)
    y = c.add_register("y", 2, Role.DIRTY)
    o = c.add_register("o", 2, Role.OUTPUT)

    def layer():
        c.cx(y[0], o[0]).cx(y[1], o[0]).cx(y[1], o[1])

    for q, d in zip(x, y):
        c.cx(q, d)
    layer()
    for q, d in zip(x, y):
        c.cx(q, d)
    layer()
    assert all(t.passed for t in verify_dirty_restoration(c, trials=6))


def test_adder_exact_on_all_pairs():
    c = build_adder(3)
    xs, ys = c.register("x").qubits, c.register("y").qubits
    u = circuit_unitary(c)
    for a in range(8):
        for b in range(8):
            col = u[:, place(a, xs) | place(b, ys)]
            assert abs(col[place(a, xs) | place((a + b) % 8, ys)] - 1) < 1e-12
