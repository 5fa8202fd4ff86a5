"""Exact minimum gap against the closed-form bound and the two earlier bounds."""

import argparse
import math

from clockgap.bounds import compare_prior_bounds


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--L", type=int, nargs="+", default=[1, 2, 4, 8, 16, 32, 64, 128])
    p.add_argument("--no-exact", action="store_true", help="skip the exact minimisation")
    args = p.parse_args()

    print(f"{'L':>5} {'min gap':>12} {'s*':>8} {'bound':>12} {'eps^2/2':>12} "
          f"{'/Aharonov':>10} {'/Deift':>8}")
    for L in args.L:
        r = compare_prior_bounds(L, table_points=0, exact=not args.no_exact)
        print(f"{L:>5} {r.min_gap_exact:>12.6g} {r.s_star:>8.4f} {r.bound_closed_form:>12.6g} "
              f"{r.bound_leading_order:>12.6g} {r.ratio_to_aharonov:>10.2f} {r.ratio_to_deift:>8.4f}")
    print(f"limits: 18 pi^2 = {18 * math.pi**2:.2f}, pi^2/4 = {math.pi**2 / 4:.4f}")


if __name__ == "__main__":
    main()
