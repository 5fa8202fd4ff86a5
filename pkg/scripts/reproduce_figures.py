"""Write the CSV tables behind the branch-function and exact-vs-approximate plots."""

import argparse

from clockgap.cli import cmd_figures, figure_data


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="figures")
    p.add_argument("--L", type=int, default=8)
    p.add_argument("--points", type=int, default=101)
    args = p.parse_args()

    for path in cmd_figures(args.out, args.L, args.points):
        print(path)
    _, sims = figure_data(args.L, n_points=2)["fig2_similarity.csv"]
    for level, sim in sims:
        print(f"level {level}: cosine similarity {sim:.6f}")


if __name__ == "__main__":
    main()
