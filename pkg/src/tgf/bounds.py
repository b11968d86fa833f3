"""Circuit-counting lower bounds and closed-form cost rows.

A ``q``-qubit circuit with ``Gamma`` T gates interleaved with Clifford
layers can realize at most ``4^{q Gamma + c q^2}`` distinct unitaries, ``c``
absorbing the Clifford group count (default 4).  Comparing with the number of
objects a synthesizer must distinguish gives:

* table lookup, ``2^{bN}`` Boolean functions:
  ``Gamma >= (bN/2 - c q^2) / q``;
* state preparation, ``sqrt(N) eps^{-(N-1)}`` distinguishable states:
  ``Gamma >= ((N-1) log2(1/eps)/2 + log2(N)/4 - c q^2) / q``;
* with measurements and post-selection, at most ``4 * 4^{Gamma(Gamma+n)}``
  reachable states, independent of ``q``.

Every function returns the least integer satisfying its inequality.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .circuit import default_rz_t_cost
from .lookup import optimal_lambda, selectswap_t_formula

C_CLIFFORD = 4

MEASUREMENT_NOTE = (
    "counting gives Gamma(Gamma+n) >= log2 of the state count, i.e. "
    "Omega(sqrt(N log(1/eps))); a sqrt(log N) stronger form is quoted without derivation"
)


@dataclass(frozen=True)
class BoundQuery:
    """Parameters shared by the lower-bound calculators."""

    N: int
    b: int = 1
    K: int = 1
    q: int = 1
    eps: float = 1e-3
    c_clifford: float = C_CLIFFORD

    def __post_init__(self) -> None:
        if min(self.N, self.b, self.K, self.q) < 1:
            raise ValueError("N, b, K and q must be positive")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.c_clifford < 0:
            raise ValueError("Clifford constant must be nonnegative")


def _ceil_div_clip(numerator, q: int) -> int:
    return max(0, math.ceil(numerator / q))


def lookup_lower_bound(query: BoundQuery) -> int:
    """Least ``Gamma >= 0`` with ``2^{bN} <= 4^{q Gamma + c q^2}``."""
    c = Fraction(query.c_clifford).limit_denominator(10**6)
    return _ceil_div_clip(Fraction(query.b * query.N, 2) - c * query.q ** 2, query.q)


def state_count_log2(N: int, eps: float) -> float:
    """``log2(sqrt(N) eps^{-(N-1)})``."""
    return math.log2(N) / 2 + (N - 1) * math.log2(1 / eps)


def stateprep_lower_bound(query: BoundQuery) -> int:
    """Least ``Gamma >= 0`` with ``sqrt(N) eps^{-(N-1)} <= 4^{q Gamma + c q^2}``."""
    half = state_count_log2(query.N, query.eps) / 2
    return _ceil_div_clip(half - query.c_clifford * query.q ** 2, query.q)


def measurement_assisted_lower_bound(N: int, eps: float) -> int:
    """Least ``Gamma >= 0`` with ``4 * 4^{Gamma(Gamma+n)} >= sqrt(N) eps^{-(N-1)}``.

    Solved with the quadratic formula and then corrected by one step either
    way against the inequality itself.

    Raises:
        ValueError: ``N`` not a power of two or ``eps`` outside ``(0, 1)``.
    """
    n = (N - 1).bit_length()
    if N < 1 or 1 << n != N:
        raise ValueError("N must be a power of two")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    L = (state_count_log2(N, eps) - 2) / 2  # need Gamma (Gamma + n) >= L

    def ok(g: int) -> bool:
        return g * (g + n) >= L

    if ok(0):
        return 0
    g = max(0, math.ceil((-n + math.sqrt(n * n + 4 * L)) / 2))
    while g > 0 and ok(g - 1):
        g -= 1
    while not ok(g):
        g += 1
    return g


def isometry_count_log2(N: int, K: int, eps: float) -> float:
    """``log2`` of the roughly ``(1/eps)^{KN}`` distinguishable isometries (informational)."""
    return K * N * math.log2(1 / eps)


# ---------------------------------------------------------------------------
# Upper-bound rows
# ---------------------------------------------------------------------------

def select_t(N: int) -> int:
    return 4 * N


def swap_network_t(N: int, b: int) -> int:
    return 8 * b * N


def selectswap_dirty_t(N: int, b: int, lam: int) -> int:
    return 8 * -(-N // lam) + 32 * b * lam


def rotation_t(b: int) -> int:
    """Phase-gradient rotation: one ``b``-bit measured-uncompute adder."""
    return 4 * (b - 1)


def state_prep_t(N: int, b: int, lam: int, eps: float) -> int:
    """Upper bound for preparing an ``N``-amplitude state.

    Each of the ``n`` levels and the phase pass computes and uncomputes one
    garbage-free lookup (``2 * selectswap_dirty_t`` with ``min(lam, 2^w)``
    copies) around one phase-gradient rotation; the Fourier state costs
    ``b`` rotations synthesized to ``eps / b``.
    """
    n = (N - 1).bit_length()
    total = 0
    for w in range(n + 1):
        size = 1 << w if w < n else N
        total += 2 * selectswap_dirty_t(size, b, min(lam, size)) + rotation_t(b)
    return total + b * default_rz_t_cost(eps / b)


def isometry_t(N: int, K: int, b: int, lam: int, eps: float) -> int:
    """Two controlled preparations per column."""
    return 2 * K * state_prep_t(N, b, lam, eps)


@dataclass(frozen=True)
class CostRow:
    """One evaluated formula; ``lam`` is ``None`` for rows independent of it."""

    row: str
    N: int
    b: int
    lam: int | None
    t_count: int | float
    kind: str = "upper"
    note: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def cost_table(
    N: int,
    b: int,
    K: int = 1,
    eps: float = 1e-3,
    lam_list: Iterable[int] = (1,),
    q: int | None = None,
) -> list[CostRow]:
    """Every upper-bound formula at the given parameters, plus optional lower bounds.

    With ``q`` given, the lookup, state-preparation and measurement-assisted
    lower bounds are appended (``kind="lower"``), as is the informational
    isometry count.
    """
    if min(N, b, K) < 1 or not 0 < eps < 1:
        raise ValueError("N, b, K must be positive and eps in (0, 1)")
    rows = [CostRow("select", N, b, None, select_t(N)), CostRow("swap_network", N, b, None, swap_network_t(N, b))]
    lams = sorted(set(lam_list))
    if any(not 1 <= lam <= N for lam in lams):
        raise ValueError(f"lambda values must lie in [1, {N}]")
    for lam in lams:
        rows.append(CostRow("selectswap", N, b, lam, selectswap_t_formula(N, b, lam)))
        rows.append(CostRow("selectswap_dirty", N, b, lam, selectswap_dirty_t(N, b, lam)))
        if N & (N - 1) == 0 and N > 1:
            rows.append(CostRow("state_prep", N, b, lam, state_prep_t(N, b, lam, eps)))
            rows.append(CostRow("isometry", N, b, lam, isometry_t(N, K, b, lam, eps), note=f"K={K}"))
    lam_opt = optimal_lambda(N, b)
    rows.append(CostRow("optimal_lambda", N, b, lam_opt, selectswap_t_formula(N, b, lam_opt), note="selectswap cost at the optimum"))
    if q is not None:
        query = BoundQuery(N, b, K, q, eps)
        rows.append(CostRow("lookup_lower_bound", N, b, None, lookup_lower_bound(query), "lower", f"q={q}"))
        rows.append(CostRow("stateprep_lower_bound", N, b, None, stateprep_lower_bound(query), "lower", f"q={q}"))
        if N & (N - 1) == 0:
            rows.append(CostRow("measurement_assisted_lower_bound", N, b, None,
                                measurement_assisted_lower_bound(N, eps), "lower", MEASUREMENT_NOTE))
        rows.append(CostRow("isometry_count_log2", N, b, None, round(isometry_count_log2(N, K, eps), 3),
                            "info", f"K={K}; informational"))
    return rows


def format_rows(rows: Sequence[CostRow | dict]) -> str:
    """Aligned plain-text table."""
    dicts = [r.as_dict() if isinstance(r, CostRow) else dict(r) for r in rows]
    if not dicts:
        return ""
    cols = list(dicts[0])
    cells = [[("" if d.get(c) is None else str(d.get(c))) for c in cols] for d in dicts]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"
