import itertools

import numpy as np
import pytest

from tgf.circuit import CostModel, resource_report
from tgf.simulator import SparseState, circuit_unitary, simulate
from tgf.swapnet import (
    build_controlled_swap_n,
    build_multi_target_controlled,
    build_swap_network,
    swap_network_levels,
)

from conftest import place, read


def _ideal_swap(n, key):
    if key & 1:
        a = read(key, range(1, n + 1))
        b = read(key, range(n + 1, 2 * n + 1))
        return 1 | place(b, range(1, n + 1)) | place(a, range(n + 1, 2 * n + 1))
    return key


@pytest.mark.parametrize("strategy", ["linear", "logarithmic", "phase_incorrect"])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_controlled_swap_action(strategy, n):
    c = build_controlled_swap_n(n, strategy)
    for key in range(1 << (2 * n + 1)):
        for model in (None, CostModel("seven_t")):
            out = simulate(c, SparseState.basis(c.num_qubits, key), model).to_dict(1e-12)
            (k, a), = out.items()
            assert k == _ideal_swap(n, key)
            if strategy == "phase_incorrect":
                a_bits = read(key, range(1, n + 1))
                b_bits = read(key, range(n + 1, 2 * n + 1))
                zeros = sum(1 for i in range(n) if not (a_bits >> i) & 1 and not (b_bits >> i) & 1)
                assert abs(a - ((-1) ** zeros if key & 1 else 1)) < 1e-9
            else:
                assert abs(a - 1) < 1e-9


@pytest.mark.parametrize("n", [1, 2, 3])
def test_phase_incorrect_diagonal_is_real_sign(n):
    c = build_controlled_swap_n(n, "phase_incorrect")
    ideal = np.zeros((1 << (2 * n + 1),) * 2)
    for key in range(ideal.shape[0]):
        ideal[_ideal_swap(n, key), key] = 1
    d = ideal.T @ circuit_unitary(c, CostModel())
    assert np.allclose(d, np.diag(np.diag(d)))
    assert np.allclose(np.abs(np.diag(d).imag), 0) and np.allclose(np.abs(np.diag(d)), 1)


@pytest.mark.parametrize("strategy", ["linear", "logarithmic", "phase_incorrect"])
def test_swap_twice_is_identity(strategy):
    c = build_controlled_swap_n(3, strategy)
    u = circuit_unitary(c.copy(c.gates + c.gates))
    assert np.allclose(u, np.eye(u.shape[0]), atol=1e-9)


def test_t_counts():
    for n in range(1, 7):
        assert resource_report(build_controlled_swap_n(n, "linear"), CostModel("seven_t")).t_count == 7 * n
        assert resource_report(build_controlled_swap_n(n, "phase_incorrect")).t_count == 4 * n
        assert resource_report(build_controlled_swap_n(n, "logarithmic"), CostModel("seven_t")).t_count <= 10 * n
    assert resource_report(build_controlled_swap_n(3, "phase_incorrect")).t_count == 12


def test_phase_incorrect_metadata_flag():
    assert "phase" in build_controlled_swap_n(2, "phase_incorrect").metadata


def test_levels_layout():
    assert swap_network_levels(1) == []
    assert swap_network_levels(4) == [[(0, 1), (2, 3)], [(0, 2)]]
    assert swap_network_levels(5) == [[(0, 1), (2, 3)], [(0, 2)], [(0, 4)]]


def test_network_n1_empty():
    assert len(build_swap_network(1, 2).gates) == 0


@pytest.mark.parametrize("strategy", ["linear", "logarithmic", "phase_incorrect"])
def test_network_n4_b1_exhaustive(strategy):
    c = build_swap_network(4, 1, strategy)
    idx = c.register("index").qubits
    regs = [c.register(f"reg{i}").qubits for i in range(4)]
    for x in range(4):
        for payload in itertools.product([0, 1], repeat=4):
            key = place(x, idx) | sum(place(v, r) for v, r in zip(payload, regs))
            (k, a), = simulate(c, SparseState.basis(c.num_qubits, key)).to_dict(1e-12).items()
            assert read(k, idx) == x and read(k, regs[0]) == payload[x] and abs(abs(a) - 1) < 1e-9


@pytest.mark.parametrize("N,b", [(3, 2), (5, 1), (7, 2), (8, 2)])
def test_network_general_N(N, b):
    c = build_swap_network(N, b, "linear")
    idx = c.register("index").qubits
    regs = [c.register(f"reg{i}").qubits for i in range(N)]
    rng = np.random.default_rng(N)
    for x in range(N):
        vals = rng.integers(0, 1 << b, N)
        key = place(x, idx) | sum(place(int(v), r) for v, r in zip(vals, regs))
        (k, a), = simulate(c, SparseState.basis(c.num_qubits, key)).to_dict(1e-12).items()
        assert read(k, regs[0]) == vals[x] and read(k, idx) == x and abs(a - 1) < 1e-9


def test_network_t_bound():
    for strategy in ["linear", "logarithmic", "phase_incorrect"]:
        c = build_swap_network(16, 2, strategy)
        assert resource_report(c, CostModel("seven_t")).t_count <= 8 * 2 * 16 or strategy != "phase_incorrect"
    assert resource_report(build_swap_network(16, 2)).t_count <= 256


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_multi_target_swap_matches_logarithmic(n):
    # The borrowed controls are other pairs' data qubits, so matching the
    # exact swap on every basis state also shows they are restored.
    a = circuit_unitary(build_multi_target_controlled("swap", n), CostModel("seven_t"))
    b = circuit_unitary(build_controlled_swap_n(n, "logarithmic"), CostModel("seven_t"))
    assert np.allclose(a, b, atol=1e-9)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_multi_target_x(n):
    c = build_multi_target_controlled("x", n)
    for key in range(1 << (n + 1)):
        (k, a), = simulate(c, SparseState.basis(n + 1, key)).to_dict(1e-12).items()
        assert k == (key ^ (((1 << n) - 1) << 1) if key & 1 else key)


def test_multi_target_errors():
    with pytest.raises(ValueError):
        build_multi_target_controlled("h", 2)
    with pytest.raises(ValueError):
        build_controlled_swap_n(0)
