"""Uniform value estimates for the built-in games."""

import argparse

from commgames.dynamics import uniform_value_estimate
from commgames.gallery import gallery
from commgames.game import GameError

GAMES = ["counter", "big-match", "big-match-transform", "gimbert-belief", "belief-map", "triangle-belief"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", default="0.1,0.05", help="comma-separated schedule")
    ap.add_argument("--tol", type=float, default=1e-3)
    args = ap.parse_args()
    sched = tuple(float(e) for e in args.eps.split(","))
    for name in GAMES:
        g = gallery(name)
        try:
            r = uniform_value_estimate(g, g.start, sched, args.tol)
        except GameError as exc:
            print(f"{name:22s} skipped: {exc}")
            continue
        kind = "finite" if r.base_case else f"{len(r.levels)} levels"
        print(f"{name:22s} {r.value:.4f}  ({kind}, horizon {r.horizon}, converged={r.converged})")


if __name__ == "__main__":
    main()
