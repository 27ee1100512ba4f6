"""Compare the Jensen stability constant c_p with the smallest ratio
deficit / deviation^2 found on the two-point family."""

import argparse

import numpy as np

from lpstab.jensen import empirical_constant, stability_constant


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=400)
    ap.add_argument("--ps", type=float, nargs="+", default=list(np.round(np.linspace(0.1, 3.0, 30), 2)))
    args = ap.parse_args()

    print(f"{'p':>6} {'c_p':>10} {'empirical':>10} {'ratio':>8}")
    for p in args.ps:
        c = stability_constant(p)
        e = empirical_constant(p, args.grid)
        print(f"{p:6.2f} {c:10.6f} {e:10.6f} {e / c:8.3f}")


if __name__ == "__main__":
    main()
