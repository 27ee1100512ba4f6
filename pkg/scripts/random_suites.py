"""Random polygon suites for both stability bounds and the proof chain.

Prints the worst margin per suite and the tightest instance, i.e. the pair
whose deficit is closest to the bound relative to its size.
"""

import argparse

import numpy as np

from lpstab.mixed import check_theorem_1, check_theorem_2, proof_chain
from lpstab.random_instances import DEFAULT_SEED, random_polygon_pair


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--instances", type=int, default=500)
    ap.add_argument("--ps", type=float, nargs="+", default=[1.5, 2.0, 4.0])
    ap.add_argument("--directions", type=int, default=4096)
    args = ap.parse_args()

    pairs = [random_polygon_pair(args.seed, i) for i in range(args.instances)]
    for p in args.ps:
        t1 = [check_theorem_1(K, L, p) for K, L in pairs]
        ratio = np.array([r.lhs / r.rhs if r.rhs > 0 else np.inf for r in t1])
        i = int(np.argmin(ratio))
        print(f"p={p:g} mixed-volume bound: min margin {min(r.margin for r in t1):.3e}, "
              f"smallest lhs/rhs {ratio[i]:.1f} at instance {i}")

        t2 = [check_theorem_2(K, L, p, args.directions) for K, L in pairs[:100]]
        worst = min(t2, key=lambda r: r.margin + 3 * r.estimated_error)
        print(f"p={p:g} Brunn-Minkowski-Firey bound: min margin {min(r.margin for r in t2):.3e} "
              f"(error estimate {worst.estimated_error:.1e})")

        chains = [proof_chain(K, L, p) for K, L in pairs]
        steps = {name: min(c.margins[name] for c in chains) for name in chains[0].margins}
        tight = min(steps, key=steps.get)
        print(f"p={p:g} proof chain: {len(steps)} steps, tightest '{tight}' {steps[tight]:.3e}, "
              f"max gap below min-support {max(c.support_min_gap for c in chains):.3e}")


if __name__ == "__main__":
    main()
