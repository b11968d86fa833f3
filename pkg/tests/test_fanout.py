import math

import pytest

from tgf.circuit import resource_report
from tgf.fanout import FanoutStrategy, build_fanout, fanout_capacity, fanout_depth_bound
from tgf.simulator import SparseState, simulate

STRATEGIES = [s.value for s in FanoutStrategy]


def test_capacity_recurrence_values():
    assert fanout_capacity(1) == 1
    assert fanout_capacity(2) == 2
    assert fanout_capacity(4) == 2 * (2 ** 2 - 1) == 6
    assert [fanout_capacity(d) for d in range(1, 8)] == [1, 2, 4, 6, 10, 14, 22]


def test_depth_bound_values():
    assert fanout_depth_bound(1) == math.ceil(2 * math.log2(1.5)) == 2
    for n in range(1, 300):
        assert fanout_depth_bound(n) == math.ceil(2 * math.log2((n + 2) / 2) - 1e-12)


def test_capacity_within_bound():
    # The closed-form bound is never tighter than the recurrence.
    for d in range(1, 16):
        assert fanout_depth_bound(fanout_capacity(d)) >= d


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_single_target_is_one_cx(strategy):
    c = build_fanout(1, strategy)
    assert [(g.kind, g.qubits) for g in c.gates] == [("CX", (0, 1))]
    assert resource_report(c).clifford_depth == 1


@pytest.mark.parametrize("strategy", STRATEGIES)
@pytest.mark.parametrize("n", range(1, 11))
def test_exhaustive_action(strategy, n):
    c = build_fanout(n, strategy)
    full = (1 << n) - 1
    for v in range(1 << (n + 1)):
        out = simulate(c, SparseState.basis(n + 1, v)).to_dict()
        ctrl = v & 1
        expect = v ^ ((full << 1) if ctrl else 0)
        assert list(out) == [expect]


@pytest.mark.parametrize("n", range(1, 65))
def test_table_depths_and_counts(n):
    lin = resource_report(build_fanout(n, "linear"))
    log = resource_report(build_fanout(n, "logarithmic"))
    tree = resource_report(build_fanout(n, "tree_reuse"))
    assert lin.clifford_depth == n
    assert log.clifford_depth == 2 * math.ceil(math.log2(n)) + 1
    assert tree.clifford_depth <= fanout_depth_bound(n)
    assert log.clifford_count <= 2 * n - 1 and tree.clifford_count <= 2 * n - 1
    assert lin.t_count == log.t_count == tree.t_count == 0


def test_depth_bound_up_to_512():
    for n in range(1, 513):
        assert resource_report(build_fanout(n)).clifford_depth <= fanout_depth_bound(n)


def test_invalid_n():
    with pytest.raises(ValueError):
        build_fanout(0)
