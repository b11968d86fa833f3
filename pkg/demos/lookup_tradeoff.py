"""T count of the three lookup oracles as the copy count lambda grows.

Run: python demos/lookup_tradeoff.py [N] [b]
"""

import sys

import numpy as np

from tgf.circuit import resource_report
from tgf.lookup import DataTable, build_select, build_selectswap, build_selectswap_dirty, optimal_lambda
from tgf.verify import check_lookup


def main(N: int = 64, b: int = 2) -> None:
    rng = np.random.default_rng(0)
    table = DataTable(b, [int(v) for v in rng.integers(0, 1 << b, N)])
    print(f"N={N} b={b} select t_count={resource_report(build_select(table)).t_count}")
    print(f"{'lam':>4} {'selectswap':>11} {'dirty':>7} {'dirty qubits':>13}")
    lam = 1
    while lam <= N:
        clean = resource_report(build_selectswap(table, lam))
        dirty = resource_report(build_selectswap_dirty(table, lam))
        print(f"{lam:>4} {clean.t_count:>11} {dirty.t_count:>7} {dirty.qubits_dirty:>13}")
        lam *= 2
    best = optimal_lambda(N, b)
    verdict = check_lookup(build_selectswap_dirty(table, best), table, trials=4)
    print(f"optimal lambda={best}; dirty oracle at that lambda: {verdict.label}")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:3]))
