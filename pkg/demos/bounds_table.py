"""Lower bounds next to the closed-form upper rows for a few table sizes.

Run: python demos/bounds_table.py
"""

from tgf.bounds import cost_table, format_rows


def main() -> None:
    for N in (64, 1024):
        print(format_rows(cost_table(N, b=4, eps=1e-3, lam_list=[1, 4, 16], q=20)))


if __name__ == "__main__":
    main()
