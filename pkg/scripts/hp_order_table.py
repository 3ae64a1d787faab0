"""Hermite-Pade order table.

Fits the far-field decay order of |Q_n(lam) z_0(lam)^j - Q_{n-j}(lam)|
on a log-log grid and compares with the prescribed interpolation order
n_j + 1 from the balanced multi-index.
"""

import numpy as np

from symlab import build_symbol, hp_error_order, multi_index

GRID = np.geomspace(1e3, 1e6, 12)


def main():
    for label, coeffs in (("(0,1/4)", (0.0, 0.25)), ("(0,7,3)", (0.0, 7.0, 3.0))):
        sym = build_symbol(len(coeffs) - 1, coeffs)
        print(f"# {label}")
        print(f"{'n':>3} {'j':>3} {'slope':>10} {'target':>8} {'dev':>9}")
        for n in range(2, 9):
            comps = multi_index(n, sym.p).components
            for j in range(1, sym.p + 1):
                slope = hp_error_order(sym, n, j, GRID)
                target = -(comps[j - 1] + 1)
                print(f"{n:>3} {j:>3} {slope:>10.5f} {target:>8} {abs(slope - target):>9.1e}")
        print()


if __name__ == "__main__":
    main()
