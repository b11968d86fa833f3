import pytest
from hypothesis import given, strategies as st

from tgf.arith import build_adder, build_comparator, build_divmod, divmod_ancillas
from tgf.circuit import resource_report
from tgf.simulator import SparseState, simulate

from conftest import place, read


def _run_basis(c, key):
    (k, a), = simulate(c, SparseState.basis(c.num_qubits, key)).to_dict(1e-12).items()
    assert abs(a - 1) < 1e-9
    return k


@pytest.mark.parametrize("kind", ["cuccaro", "gidney"])
@pytest.mark.parametrize("b", [1, 2, 3, 4])
def test_adder_exhaustive(kind, b):
    c = build_adder(b, kind=kind)
    xs, ys = c.register("x").qubits, c.register("y").qubits
    for x in range(1 << b):
        for y in range(1 << b):
            k = _run_basis(c, place(x, xs) | place(y, ys))
            assert k == place(x, xs) | place((x + y) % (1 << b), ys)


def test_adder_examples():
    c = build_adder(3)
    xs, ys = c.register("x").qubits, c.register("y").qubits
    assert read(_run_basis(c, place(2, xs) | place(3, ys)), ys) == 5
    assert read(_run_basis(c, place(6, xs) | place(5, ys)), ys) == 3


@pytest.mark.parametrize("b", [1, 2, 3])
def test_controlled_adder(b):
    c = build_adder(b, controlled=True)
    z = c.register("control")[0]
    xs, ys = c.register("x").qubits, c.register("y").qubits
    for ctl in (0, 1):
        for x in range(1 << b):
            for y in range(1 << b):
                k = _run_basis(c, (ctl << z) | place(x, xs) | place(y, ys))
                assert read(k, ys) == ((x + y) % (1 << b) if ctl else y)


def test_adder_t_linear_in_b():
    for b in range(1, 9):
        assert resource_report(build_adder(b, kind="gidney")).t_count == 4 * (b - 1)
        assert resource_report(build_adder(b)).t_count <= 14 * b
        assert resource_report(build_adder(b, controlled=True)).t_count <= 28 * b


def test_adder_errors():
    with pytest.raises(ValueError):
        build_adder(0)
    with pytest.raises(ValueError):
        build_adder(2, controlled=True, kind="gidney")


@pytest.mark.parametrize("b", [1, 2, 3])
def test_comparator_exhaustive(b):
    c = build_comparator(b)
    A, J, F = c.register("a").qubits, c.register("j").qubits, c.register("flag")[0]
    for a in range(1 << b):
        for j in range(1 << b):
            k = _run_basis(c, place(a, A) | place(j, J))
            assert k == place(a, A) | place(j, J) | (int(j >= a) << F)
    assert resource_report(c).t_count == 4 * b


def test_comparator_amplitude_split():
    b, a = 3, 5
    c = build_comparator(b)
    A, J, F = c.register("a").qubits, c.register("j").qubits, c.register("flag")[0]
    init = SparseState.from_dict({place(a, A) | place(j, J): 2 ** (-b / 2) for j in range(1 << b)}, c.num_qubits)
    p1 = sum(abs(v) ** 2 for k, v in simulate(c, init).to_dict().items() if (k >> F) & 1)
    assert abs(p1 - 3 / 8) < 1e-12 and abs((1 - p1) - 5 / 8) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_divmod_exhaustive(n):
    for lam in range(1, (1 << n) + 1):
        c = build_divmod(n, lam)
        xs = c.register("x").qubits
        quo, rem = c.metadata["quotient"], c.metadata["remainder"]
        for x in range(1 << n):
            k = _run_basis(c, place(x, xs))
            assert read(k, quo) == x // lam and read(k, rem) == x % lam
            others = [q for q in range(c.num_qubits) if q not in quo and q not in rem]
            assert read(k, others) == 0


@given(st.integers(1, 12), st.integers(1, 300))
def test_divmod_ancilla_count(n, lam):
    need = divmod_ancillas(n, lam)
    l = (lam - 1).bit_length()
    assert need == (0 if lam & (lam - 1) == 0 else 2 * l + 5)
