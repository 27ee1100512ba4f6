"""Ball-versus-translated-ball scans in several dimensions.

Writes one CSV per (n, p) plus a combined JSON of fitted slopes and limits.
"""

import argparse
import json
from pathlib import Path

from lpstab.cli import write_atomic
from lpstab.sharpness import DEFAULT_EPSILONS, delta_series, sharpness_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/sharpness")
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 3, 5, 10])
    ap.add_argument("--ps", type=float, nargs="+", default=[1.5, 2.0, 4.0])
    ap.add_argument("--beta", action="store_true", help="include beta_p in the planar scans")
    args = ap.parse_args()

    out = Path(args.out)
    summary = []
    for n in args.dims:
        for p in args.ps:
            scan = sharpness_scan(n, p, DEFAULT_EPSILONS, include_beta=args.beta)
            write_atomic(str(out / f"scan_n{n}_p{p:g}.csv"), scan.to_csv())
            s = scan.summary()
            s["series_constant"] = delta_series(n, p, 1.0)
            summary.append(s)
            lim = s["ratio_limits"]
            print(
                f"n={n:<3d} p={p:<4g} slope(delta)={s['fitted_slopes']['delta_p']:.4f} "
                f"slope(A^2)={s['fitted_slopes']['asymmetry_sq']:.4f} "
                f"delta/eps^2={lim['delta_over_eps_sq']:.6f} (series {s['series_constant']:.6f}) "
                f"delta/A^2={lim['delta_over_asymmetry_sq']:.6f} sharp={s['sharp']}"
            )
    write_atomic(str(out / "summary.json"), json.dumps(summary, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
