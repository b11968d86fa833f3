"""Multi-target CNOT (quantum fanout) without ancillary qubits.

``CNOT_n`` flips ``n`` target qubits when a control is set.  Three layouts:

* ``linear``: the control drives every target in turn (depth ``n``).
* ``logarithmic``: targets are first replaced by differences along a binary
  tree, the root is flipped once, and the differences are undone (depth
  ``2*ceil(log2 n) + 1``, ``2n - 1`` CNOTs).
* ``tree_reuse``: the control is idle in all but the middle slice of the
  logarithmic layout, so it seeds a further logarithmic fanout in every time
  slice.  A depth-``d`` budget then covers ``n(d)`` targets, see
  :func:`fanout_capacity`.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Sequence

from .circuit import Circuit, Role


class FanoutStrategy(str, Enum):
    LINEAR = "linear"
    LOGARITHMIC = "logarithmic"
    TREE_REUSE = "tree_reuse"


def fanout_capacity(d: int) -> int:
    """Largest target count reachable by ``tree_reuse`` in Clifford depth ``d``."""
    if d < 1:
        return 0
    if d % 2:
        return 3 * 2 ** ((d - 1) // 2) - 2
    return 2 * (2 ** (d // 2) - 1)


def fanout_depth_bound(n: int) -> int:
    """``ceil(2 log2((n + 2) / 2))``, the depth guaranteed by ``tree_reuse``."""
    if n < 1:
        raise ValueError("fanout needs at least one target")
    # Exact integer form of the ceiling: least d with 2^d >= ((n+2)/2)^2.
    d = max(0, math.ceil(2 * math.log2((n + 2) / 2)) - 1)
    while 4 * 2**d < (n + 2) ** 2:
        d += 1
    return d


def _tree_depth(m: int) -> int:
    return (m - 1).bit_length()


def _tree_layers(targets: Sequence[int]) -> list[list[tuple[int, int]]]:
    """CNOT layers replacing each target by its XOR with its tree parent."""
    m = len(targets)
    layers = []
    for k in range(_tree_depth(m)):
        step = 1 << k
        layers.append([(targets[i], targets[i + step]) for i in range(0, m - step, 2 * step)])
    return layers


def _log_fanout_slices(control: int, targets: Sequence[int]) -> list[list[tuple[int, int]]]:
    pre = _tree_layers(targets)
    return pre + [[(control, targets[0])]] + pre[::-1]


def fanout_slices(control: int, targets: Sequence[int], strategy: FanoutStrategy | str) -> list[list[tuple[int, int]]]:
    """Time slices of disjoint CNOT pairs realising ``CNOT_n``."""
    strategy = FanoutStrategy(strategy)
    targets = list(targets)
    if not targets:
        return []
    if strategy is FanoutStrategy.LINEAR:
        return [[(control, t)] for t in targets]
    if strategy is FanoutStrategy.LOGARITHMIC:
        return _log_fanout_slices(control, targets)
    n = len(targets)
    depth = 1
    while fanout_capacity(depth) < n:
        depth += 1
    slices: list[list[tuple[int, int]]] = [[] for _ in range(depth)]
    pos = 0
    for t in range(depth):
        k = min(t, depth - 1 - t)
        chunk = targets[pos:pos + (1 << k)]
        pos += len(chunk)
        if not chunk:
            break
        sub = _log_fanout_slices(control, chunk)
        centre = len(sub) // 2
        for j, layer in enumerate(sub):
            slices[t - centre + j].extend(layer)
    return slices


def append_fanout(circ: Circuit, control: int, targets: Sequence[int], strategy: FanoutStrategy | str = "logarithmic") -> Circuit:
    """Append ``CNOT_n`` from ``control`` onto ``targets`` to ``circ``."""
    for layer in fanout_slices(control, targets, strategy):
        for c, t in layer:
            circ.cx(c, t)
    return circ


def build_fanout(n: int, strategy: FanoutStrategy | str = "tree_reuse") -> Circuit:
    """Standalone ``CNOT_n`` on ``1 + n`` qubits (qubit 0 is the control).

    Raises:
        ValueError: ``n < 1``.
    """
    if n < 1:
        raise ValueError("fanout needs at least one target")
    circ = Circuit(metadata={"builder": "fanout", "strategy": FanoutStrategy(strategy).value, "n": n})
    ctrl = circ.add_register("control", 1, Role.CONTROL)
    tgt = circ.add_register("targets", n, Role.OUTPUT)
    return append_fanout(circ, ctrl[0], tgt.qubits, strategy)
