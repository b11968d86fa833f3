"""Synthesize a random two-column isometry and report per-column errors.

Run: python demos/isometry.py [N] [K]
"""

import sys

import numpy as np

from tgf.circuit import resource_report
from tgf.unitarysynth import build_isometry, column_errors, random_isometry


def main(N: int = 8, K: int = 2) -> None:
    spec = random_isometry(N, K, np.random.default_rng(2))
    circ = build_isometry(spec, lam=2, b=14)
    errs = column_errors(circ, spec)
    rep = resource_report(circ)
    print(f"N={N} K={K} qubits={rep.qubits_total} t_count={rep.t_count} rz={rep.rz_count}")
    print("column errors:", " ".join(f"{e:.2e}" for e in errs), f"bound {circ.metadata['error_bound']:.2e}")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:3]))
