import numpy as np
import pytest

from tgf.circuit import resource_report
from tgf.simulator import SparseState, distance, simulate
from tgf.stateprep import error_bound
from tgf.unitarysynth import (
    IsometrySpec,
    build_isometry,
    column_errors,
    gram_schmidt,
    random_isometry,
    reflection_states,
)

from conftest import place


def _apply(circ, vec):
    """Run ``circ`` on ``vec`` given over (flag, state) with every other qubit at 0."""
    flag = circ.register("flag")[0]
    state = circ.register("state").qubits
    terms = {}
    for i, a in enumerate(vec):
        if abs(a) > 0:
            terms[((i & 1) << flag) | place(i >> 1, state)] = a
    return simulate(circ, SparseState.from_dict(terms, circ.num_qubits))


def _basis(N, flag, x):
    v = np.zeros(2 * N, dtype=complex)
    v[flag | (x << 1)] = 1
    return v


def test_spec_validation():
    with pytest.raises(ValueError):
        IsometrySpec(np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        IsometrySpec(np.ones((2, 3)) / 2)
    with pytest.raises(ValueError):
        IsometrySpec(np.eye(3)[:, :1]).n
    s = IsometrySpec.from_columns([[1, 0, 0, 0], [0, 0, 1, 0]])
    assert s.N == 4 and s.K == 2 and s.n == 2


def test_gram_schmidt():
    u = gram_schmidt([[1, 1, 0, 0], [1, 0, 1, 0]])
    assert np.allclose(u.conj().T @ u, np.eye(2))
    with pytest.raises(ValueError):
        gram_schmidt([[1, 0], [2, 0]])


def test_reflection_states_trivial():
    prog = reflection_states(IsometrySpec.from_columns([[1, 0]]))
    assert np.allclose(prog.states[0], (_basis(2, 1, 0) - _basis(2, 0, 0)) / np.sqrt(2))
    R = prog.reflection(0)
    assert np.allclose(R @ _basis(2, 1, 0), _basis(2, 0, 0))


def test_reflection_states_random():
    spec = random_isometry(4, 2, np.random.default_rng(0))
    prog = reflection_states(spec)
    assert prog.check() < 1e-10
    assert abs(np.vdot(prog.states[0], prog.states[1])) < 1e-12


def test_reflection_states_rejects_bad_columns():
    with pytest.raises(ValueError):
        reflection_states(IsometrySpec.from_columns([[1, 0]]).__class__(np.array([[1.0], [1.0]])))


def test_k1_basis_column_exact():
    c = build_isometry(IsometrySpec.from_columns([[1, 0, 0, 0]]), b=8)
    assert max(column_errors(c, IsometrySpec.from_columns([[1, 0, 0, 0]]))) < 1e-12


@pytest.mark.parametrize("method", ["controlled_rotation", "phase_gradient"])
def test_n4_k2_bound(method):
    spec = random_isometry(4, 2, np.random.default_rng(4))
    c = build_isometry(spec, lam=2, b=14, method=method)
    eps_f = 1e-3 if method == "phase_gradient" else 0.0
    assert c.metadata["error_bound"] == 2 * error_bound(2, 14, eps_f)
    assert max(column_errors(c, spec, dirty_value=3)) <= c.metadata["error_bound"]


def test_reflection_involution():
    spec = random_isometry(8, 1, np.random.default_rng(1))
    c = build_isometry(spec, b=10)
    twice = c.copy(c.gates + c.gates)
    rng = np.random.default_rng(2)
    v = rng.normal(size=16) + 1j * rng.normal(size=16)
    v /= np.linalg.norm(v)
    out = _apply(twice, v)
    assert distance(out, _apply(c.copy([]), v)) < 1e-9


def test_reflections_commute():
    spec = random_isometry(4, 3, np.random.default_rng(3))
    b = 14
    refl = [build_isometry(spec, b=b, ks=[k]) for k in range(3)]
    delta = error_bound(2, b)
    rng = np.random.default_rng(5)
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    v /= np.linalg.norm(v)
    for j in range(3):
        for k in range(j + 1, 3):
            ab = refl[j].copy(refl[j].gates + refl[k].gates)
            ba = refl[k].copy(refl[k].gates + refl[j].gates)
            # Each approximate reflection is within 2 delta of the exact one.
            assert distance(_apply(ab, v), _apply(ba, v)) <= 8 * delta


def test_w_structure():
    spec = random_isometry(4, 2, np.random.default_rng(6))
    c = build_isometry(spec, b=14)
    for k in range(spec.K):
        v = np.zeros(8, dtype=complex)
        v[[x << 1 for x in range(4)]] = spec.column(k)
        out = _apply(c, v)
        target = _apply(c.copy([]), _basis(4, 1, k))
        assert distance(out, target) <= c.metadata["error_bound"]


def test_t_count_scales_with_k():
    spec = random_isometry(8, 4, np.random.default_rng(7))
    t4 = resource_report(build_isometry(spec, b=10)).t_count
    t1 = [resource_report(build_isometry(spec, b=10, ks=[k])).t_count for k in range(4)]
    assert abs(t4 - sum(t1)) <= 0.1 * t4
    assert abs(t4 - 4 * np.mean(t1)) <= 0.1 * t4


def test_build_errors():
    spec = random_isometry(4, 1, np.random.default_rng(0))
    with pytest.raises(ValueError):
        build_isometry(spec, lam=5)
    with pytest.raises(ValueError):
        build_isometry(spec, method="magic")
    with pytest.raises(ValueError):
        build_isometry(IsometrySpec(np.eye(6)[:, :1]))
    with pytest.raises(ValueError):
        build_isometry(spec, ks=[1])
