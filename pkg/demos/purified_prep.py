"""Sample-free check of the alias-method preparation of a weight vector.

Run: python demos/purified_prep.py [b]
"""

import sys

import numpy as np

from tgf.stateprep import alias_decompose, build_purified_prep
from tgf.verify import reduced_distribution


def main(b: int = 6) -> None:
    weights = [1, 2, 3, 10, 0, 4, 4, 8]
    table = alias_decompose(weights, b)
    got = reduced_distribution(build_purified_prep(weights, lam=2, b=b))
    target = np.array(weights) / sum(weights)
    print("x  keep  alias  prepared  target")
    for x in range(len(weights)):
        print(f"{x}  {table.keep[x]:>4}  {table.alias[x]:>5}  {got[x]:.5f}   {target[x]:.5f}")
    print(f"L1 distance {np.abs(got - target).sum():.2e} (limit {2.0 ** (1 - b):.2e})")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:2]))
