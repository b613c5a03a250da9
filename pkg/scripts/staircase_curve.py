"""Average payoff curves on the staircase MDP, written as CSV."""

import argparse
import csv
import sys

from commgames.play import evaluate_strategy
from commgames.staircase import crossing_strategy, staircase_game, staircase_mixed_strategy
from commgames.strategies import constant


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=192)
    ap.add_argument("--ups", type=int, default=4, help="T moves before the pure crossing leaves h^1")
    args = ap.parse_args()
    game = staircase_game(window=4 * args.n + 8)
    mixed = evaluate_strategy(game, (0, 0), staircase_mixed_strategy(), constant("-"), args.n)
    pure = evaluate_strategy(game, (0, 0), crossing_strategy(args.ups), constant("-"), args.n)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "mixed", "crossing"])
    for n, (a, b) in enumerate(zip(mixed, pure), start=1):
        w.writerow([n, f"{float(a):.6f}", f"{float(b):.6f}"])
    print(f"# min mixed = {min(mixed)} (n = {mixed.index(min(mixed)) + 1})", file=sys.stderr)


if __name__ == "__main__":
    main()
