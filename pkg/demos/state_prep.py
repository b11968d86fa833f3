"""Prepare a random state with both rotation methods and report error and cost.

Run: python demos/state_prep.py [N] [b] [lambda]
"""

import sys

import numpy as np

from tgf.circuit import CostModel, resource_report
from tgf.stateprep import StateSpec, build_state_prep, prepared_state_error


def main(N: int = 16, b: int = 12, lam: int = 2) -> None:
    rng = np.random.default_rng(1)
    a = rng.normal(size=N) + 1j * rng.normal(size=N)
    a /= np.linalg.norm(a)
    for method in ("controlled_rotation", "phase_gradient"):
        circ = build_state_prep(StateSpec(a), lam, b=b, method=method)
        rep = resource_report(circ, CostModel(rz_error=circ.metadata.get("rz_error", 1e-10)))
        err = prepared_state_error(circ, a, dirty_value=int(rng.integers(1 << 20)))
        print(f"{method:>20}: qubits={rep.qubits_total} t_count={rep.t_count} rz={rep.rz_count} "
              f"error={err:.2e} bound={circ.metadata['error_bound']:.2e}")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:4]))
