import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tgf.circuit import Circuit, CostModel, Role, resource_report
from tgf.simulator import SparseState, StateVector, distance, fidelity, simulate
from tgf.stateprep import (
    StateSpec,
    alias_decompose,
    append_controlled_z_rotation,
    append_fourier_state,
    append_phase_gradient_z_rotation,
    build_fourier_state,
    build_purified_prep,
    build_state_prep,
    compute_angles,
    error_bound,
    fourier_state,
    prepared_state_error,
    round_weights,
)
from tgf.verify import check_purified, reduced_distribution

from conftest import place, random_state


def test_spec_validation():
    with pytest.raises(ValueError):
        StateSpec([0, 0])
    with pytest.raises(ValueError):
        StateSpec([1, 1, 1]).n
    s = StateSpec([3, 4j])
    assert s.N == 2 and s.n == 1 and abs(s.norm() - 5) < 1e-12


def test_angles_basis_state():
    t = compute_angles(StateSpec([1, 0, 0, 0, 0, 0, 0, 0]), 8)
    assert all((q == 0).all() for q in t.theta_q) and (t.phi_q == 0).all()


def test_angles_uniform():
    t = compute_angles(StateSpec(np.ones(4)), 10)
    assert np.allclose(np.concatenate(t.theta), 1 / 8)
    assert all((q == 1 << 7).all() for q in t.theta_q)


def test_angles_prefix_sums():
    rng = np.random.default_rng(2)
    t = compute_angles(StateSpec(random_state(rng, 16)), 8)
    assert abs(t.prob[0][0] - 1) < 1e-12
    for w in range(t.n - 1):
        assert np.allclose(t.prob[w + 1].reshape(-1, 2).sum(axis=1), t.prob[w])


def test_angles_zero_prefix():
    t = compute_angles(StateSpec([0, 0, 1, 1]), 6)
    assert t.theta_q[1][0] == 0
    assert np.allclose(t.reconstruct(), [0, 0, 1 / math.sqrt(2), 1 / math.sqrt(2)], atol=2 ** -4)


def test_reconstruction_n8_b16():
    rng = np.random.default_rng(5)
    a = random_state(rng, 8)
    assert np.linalg.norm(compute_angles(StateSpec(a), 16).reconstruct() - a) < 2 ** -12


@given(st.integers(1, 5), st.integers(4, 16), st.integers(0, 2 ** 31))
def test_reconstruction_within_bound(n, b, seed):
    a = random_state(np.random.default_rng(seed), 1 << n)
    t = compute_angles(StateSpec(a), b)
    assert np.allclose(t.reconstruct(quantized=False), a, atol=1e-10)
    assert np.linalg.norm(t.reconstruct() - a) <= n * 2.0 ** (-b + 2)


def test_round_weights_ties_and_sum():
    assert round_weights([1, 1, 1], 2) == [4, 4, 4]
    r = round_weights([1, 1, 1, 1, 1, 1], 0)
    assert sum(r) == 6
    r = round_weights([1, 2], 1)
    assert sum(r) == 4 and r == [1, 3]
    with pytest.raises(ValueError):
        round_weights([1, -1], 3)
    with pytest.raises(ValueError):
        round_weights([0, 0], 3)


def test_alias_example():
    t = alias_decompose([1, 2, 3, 10], 3)
    assert sum(t.rounded) == 32 and t.check()
    full = 8
    for x in range(4):
        assert t.rounded[x] == t.keep[x] + sum(full - t.keep[y] for y in range(4) if t.alias[y] == x)


def test_alias_uniform_never_aliases():
    t = alias_decompose([2.0] * 8, 5)
    assert all(k == 32 for k in t.keep)


@given(st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=32), st.integers(1, 10))
def test_alias_invariant(weights, b):
    if sum(weights) <= 0:
        return
    t = alias_decompose(weights, b)
    assert t.check()
    assert all(0 <= k <= 1 << b for k in t.keep) and all(0 <= f < t.N for f in t.alias)
    w = np.asarray(weights) / sum(weights)
    assert np.max(np.abs(t.distribution() - w)) <= 1 / (t.N << (b - 1)) + 1e-12
    # Encoded pairs sample the same distribution.
    dist = np.zeros(t.N)
    for x, (k, f) in enumerate(t.encoded()):
        dist[x] += k
        dist[f] += (1 << b) - k
    assert np.allclose(dist / (t.N << b), t.distribution())


def test_fourier_state_b1_and_b3():
    c = build_fourier_state(1)
    out = simulate(c, SparseState.basis(1))
    assert fidelity(out, StateVector(np.array([1, -1]) / math.sqrt(2), 1)) > 1 - 1e-12
    c = build_fourier_state(3, 1e-3)
    assert fidelity(simulate(c, SparseState.basis(3)), StateVector(fourier_state(3), 3)) > 1 - 1e-12
    model = CostModel(rz_error=c.metadata["rz_error"])
    assert resource_report(c, model).rz_t_budget == 3 * model.rz_t_cost(1e-3 / 3)


def test_state_prep_basis_state_is_identity():
    c = build_state_prep(StateSpec([1, 0, 0, 0]), lam=1, b=8)
    assert prepared_state_error(c, [1, 0, 0, 0]) < 1e-12


@pytest.mark.parametrize("method", ["controlled_rotation", "phase_gradient"])
def test_state_prep_real_positive_n8(method):
    a = np.random.default_rng(8).random(8)
    c = build_state_prep(StateSpec(a), lam=2, b=12, method=method)
    assert prepared_state_error(c, a / np.linalg.norm(a), 5) <= c.metadata["error_bound"]
    assert c.metadata["error_bound"] == error_bound(3, 12, 1e-3 if method == "phase_gradient" else 0.0)


def test_state_prep_complex_n16_fidelity():
    a = random_state(np.random.default_rng(16), 16)
    c = build_state_prep(StateSpec(a), lam=2, b=14)
    err = prepared_state_error(c, a)
    bound = error_bound(4, 14)
    # Distance bounds infidelity: 1 - |<a|b>|^2 <= ||a - b||^2.
    assert err <= bound and 1 - err ** 2 >= 1 - bound ** 2


def test_state_prep_matches_classical_tree():
    a = random_state(np.random.default_rng(1), 8)
    c = build_state_prep(StateSpec(a), lam=1, b=6)
    ideal = compute_angles(StateSpec(a), 6).reconstruct()
    assert prepared_state_error(c, ideal) < 1e-9


def test_state_prep_errors():
    with pytest.raises(ValueError):
        build_state_prep(StateSpec([1, 1, 1]), 1)
    with pytest.raises(ValueError):
        build_state_prep(StateSpec([1, 1]), 3)
    with pytest.raises(ValueError):
        build_state_prep(StateSpec([1, 1]), 1, method="magic")


def test_state_prep_t_count_decreases_then_grows():
    a = random_state(np.random.default_rng(0), 1024)
    t = {lam: resource_report(build_state_prep(StateSpec(a), lam, b=4)).t_count for lam in (1, 4, 64)}
    assert t[4] < t[1] and t[4] < t[64]


def test_purified_example():
    w = [1, 2, 3, 10]
    c = build_purified_prep(w, lam=2, b=6)
    v = check_purified(c, w, 6)
    assert v.passed and v.details["l1_to_weights"] <= 2 ** -5


def test_purified_uniform_exact():
    c = build_purified_prep([1] * 8, lam=1, b=4)
    assert np.allclose(reduced_distribution(c), 1 / 8, atol=1e-12)


def test_purified_errors():
    with pytest.raises(ValueError):
        build_purified_prep([1, 2, 3], b=4)
    with pytest.raises(ValueError):
        build_purified_prep([1, -2], b=4)


@settings(max_examples=8)
@given(st.lists(st.integers(0, 50), min_size=4, max_size=4), st.integers(3, 6))
def test_purified_matches_alias(weights, b):
    if sum(weights) == 0:
        return
    assert check_purified(build_purified_prep(weights, lam=2, b=b), weights, b).passed


@pytest.mark.parametrize("b", [1, 2, 3, 4])
def test_rotation_methods_agree(b):
    def rotated(method):
        c = Circuit()
        ang = c.add_register("angle", b, Role.INDEX)
        tgt = c.add_register("target", 1, Role.OUTPUT)[0]
        f = c.add_register("fourier", b, Role.FOURIER)
        carry = c.add_register("carry", max(0, b - 1), Role.CLEAN)
        append_fourier_state(c, f.qubits)
        c.h(tgt)
        if method == "controlled":
            append_controlled_z_rotation(c, ang.qubits, tgt, b)
        else:
            append_phase_gradient_z_rotation(c, ang.qubits, tgt, f.qubits, carry.qubits)
        return c, ang

    for k in range(1 << b):
        outs = []
        for method in ("controlled", "gradient"):
            c, ang = rotated(method)
            outs.append(simulate(c, SparseState.basis(c.num_qubits, place(k, ang.qubits))))
        assert distance(*outs) < 1e-10
