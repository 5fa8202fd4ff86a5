"""Final ground-state overlap as a function of total time for a few path lengths."""

import argparse

from clockgap.adiabatic import success_vs_T


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--L", type=int, nargs="+", default=[2, 4, 8])
    p.add_argument("--T", type=float, nargs="+", default=[1, 10, 100, 1000])
    args = p.parse_args()

    print(f"{'L':>3} {'T':>8} {'steps':>8} {'overlap':>10} {'P(clock=L)':>11}")
    for L in args.L:
        for row in success_vs_T(L, args.T):
            print(f"{L:>3} {row['T']:>8g} {row['steps']:>8} {row['final_overlap']:>10.6f} "
                  f"{row['p_clock_L']:>11.6f}")


if __name__ == "__main__":
    main()
