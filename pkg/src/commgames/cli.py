"""Command-line interface.

Every command writes CSV to standard output, preceded by ``#`` metadata
lines. Exit codes: 0 success, 1 a check failed (or a witness was found),
2 bad usage or input, 3 inconclusive numeric result.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .commutativity import check_commutative, simplex_grid
from .dynamics import DEFAULT_EPS_SCHEDULE, detect_cycle, uniform_value_estimate
from .fileformat import dumps_game, format_number, format_state, load_profile, parse_state, read_game
from .gallery import ENTRIES, gallery
from .game import GameError, GameSpec, HistoryCapExceeded, Inconclusive, finite_closure
from .play import evaluate_strategy, simulate
from .reproduce import MANIFESTS
from .reproduce import run as run_manifest
from .transforms import AbsorbingGameSpec, absorbing_to_commutative, aumann_maschler_game, belief_game
from .values import discounted_value, value_iterate_n

OK, FAILED, USAGE, INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _out():
    return csv.writer(sys.stdout, lineterminator="\n")


def _meta(**kv) -> None:
    for k, v in kv.items():
        print(f"# {k}: {v}")


def load_game(arg: str, **params) -> GameSpec:
    """A game file path, or the name of a built-in game."""
    p = Path(arg)
    if p.is_file():
        return read_game(p)
    if arg in ENTRIES:
        return gallery(arg, **params)
    raise UsageError(f"{arg!r} is neither a game file nor a built-in game")


def _state(game: GameSpec, tok: str | None):
    if tok is None:
        if game.start is None:
            raise UsageError("this game has no start state; pass --state")
        return game.start
    return parse_state(tok, game.kind, game.dim)


def _finite(game: GameSpec, state=None) -> GameSpec:
    if game.states is not None:
        return game
    start = state if state is not None else game.start
    if start is None:
        raise UsageError("implicit game without a start state")
    closed = finite_closure(game, start)
    if closed is None:
        raise Inconclusive("too many reachable states for a finite solve")
    return closed


def _fmt(v) -> str:
    if isinstance(v, (Fraction, int)) and not isinstance(v, bool):
        return format_number(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return "(" + ",".join(_fmt(c) for c in v) + ")"
    if isinstance(v, list):
        return "[" + " ".join(_fmt(c) for c in v) + "]"
    return str(v)


def cmd_check(args) -> int:
    game = load_game(args.game)
    if args.grid_denominator:
        if game.kind != "euclidean":
            raise UsageError("--grid-denominator needs a game on the simplex")
        states = simplex_grid(game.dim, args.grid_denominator)
    else:
        states = _finite(game).states
    rep = check_commutative(game, states, args.tol)
    _meta(game=game.name, states=len(states), checked=rep.checked)
    w = _out()
    if rep.passed:
        w.writerow(["result", "checked"])
        w.writerow(["pass", rep.checked])
        return OK
    w.writerow(["state", "pair", "other", "pair_then_other", "other_then_pair", "distance"])
    for x in rep.witnesses:
        w.writerow(
            [
                format_state(x.state, game.kind),
                ",".join(map(str, x.pair)),
                ",".join(map(str, x.other)),
                " ".join(f"{format_state(y, game.kind)}:{_fmt(p)}" for y, p in x.first.items()),
                " ".join(f"{format_state(y, game.kind)}:{_fmt(p)}" for y, p in x.second.items()),
                _fmt(x.distance),
            ]
        )
    return FAILED


def cmd_value_iterate(args) -> int:
    game = load_game(args.game)
    x = _state(game, args.state) if args.state or game.states is None else None
    fin = _finite(game, x)
    tables = value_iterate_n(fin, args.n)
    _meta(game=game.name, horizon=args.n)
    w = _out()
    w.writerow(["n", "state", "value"])
    rows = [x] if x is not None else list(fin.states)
    for t in tables:
        for s in rows:
            w.writerow([t.horizon, format_state(s, game.kind), f"{t[s]:.12g}"])
    return OK


def cmd_discounted(args) -> int:
    game = load_game(args.game)
    x = _state(game, args.state) if args.state or game.states is None else None
    fin = _finite(game, x)
    lam = Fraction(args.lam) if "/" in args.lam else float(args.lam)
    table = discounted_value(fin, lam, args.tol)
    _meta(game=game.name, discount=args.lam, tol=args.tol)
    w = _out()
    w.writerow(["state", "value"])
    for s in [x] if x is not None else fin.states:
        w.writerow([format_state(s, game.kind), f"{table[s]:.12g}"])
    return OK


def cmd_cycle(args) -> int:
    game = load_game(args.game)
    x = _state(game, args.state)
    pair = tuple(args.pair.split(","))
    if len(pair) == 1 and len(game.actions_J) == 1:
        pair = (pair[0], game.actions_J[0])
    if pair[0] not in game.actions_I or pair[1] not in game.actions_J:
        raise UsageError(f"unknown action pair {args.pair!r}")
    r = detect_cycle(game, x, pair, args.eps, args.max_iter)
    _meta(game=game.name, pair=args.pair, eps=args.eps)
    w = _out()
    w.writerow(["period", "stage", "exact", "snapped", "converged", "phase", "state"])
    if not r.converged:
        w.writerow([0, -1, False, False, False, "", ""])
        return INCONCLUSIVE
    for k, s in enumerate(r.states):
        w.writerow([r.period, r.stage, r.exact, r.snapped, True, k, format_state(s, game.kind)])
    return OK


def cmd_uniform(args) -> int:
    game = load_game(args.game)
    x = _state(game, args.state)
    sched = tuple(float(e) for e in args.eps_schedule.split(",")) if args.eps_schedule else DEFAULT_EPS_SCHEDULE
    res = uniform_value_estimate(game, x, sched, args.tol, n_max=args.n_max)
    _meta(game=game.name, state=format_state(x, game.kind), base_case=res.base_case, estimate=f"{res.value:.9g}")
    w = _out()
    w.writerow(["eps", "eta", "phi_states", "frontier_states", "value", "horizon", "converged"])
    if res.base_case:
        w.writerow(["", "", "", "", f"{res.value:.9g}", res.horizon, res.converged])
    for lv in res.levels:
        w.writerow([lv.eps, _fmt(lv.eta), lv.interior, lv.frontier, f"{lv.value:.9g}", lv.horizon, lv.converged])
    return OK if res.converged else INCONCLUSIVE


def _am_grid(d: int, n_rows: int, K: int):
    mixed = simplex_grid(n_rows, d)
    return [tuple(p) for p in itertools.product(mixed, repeat=K)]


def cmd_transform(args) -> int:
    if args.kind == "absorbing":
        game = load_game(args.file)
        alpha = args.alpha if args.alpha is not None else game.start
        if alpha is None:
            raise UsageError("pass --alpha for the non-absorbing state")
        out, start = absorbing_to_commutative(AbsorbingGameSpec.from_game(game, alpha))
        sys.stdout.write(dumps_game(out, start))
        return OK
    if args.kind == "belief":
        game = load_game(args.file)
        out = belief_game(game)
        if out.start is None:
            raise UsageError("the hidden game needs a start state")
        sys.stdout.write(dumps_game(out, cap=args.cap))
        return OK
    spec = json.loads(Path(args.file).read_text())
    mats = spec["matrices"]
    grid = spec.get("grid")
    if args.grid:
        grid = _am_grid(args.grid, len(mats[0]), len(mats))
    out = aumann_maschler_game(mats, [Fraction(str(v)) for v in spec["p1"]], grid)
    sys.stdout.write(dumps_game(out, cap=args.cap))
    return OK


def cmd_evaluate(args) -> int:
    game = load_game(args.game)
    x = _state(game, args.state)
    sigma, tau = load_profile(args.strategy, game)
    _meta(game=game.name, state=format_state(x, game.kind), n=args.n)
    w = _out()
    if args.simulate:
        r = simulate(game, x, sigma, tau, args.n, seed=args.seed, reps=args.reps)
        _meta(seed=args.seed, reps=args.reps)
        w.writerow(["n", "mean", "stderr", "ci_low", "ci_high"])
        w.writerow([args.n, f"{r.mean:.12g}", f"{r.stderr:.6g}", f"{r.ci_low:.12g}", f"{r.ci_high:.12g}"])
        return OK
    curve = evaluate_strategy(game, x, sigma, tau, args.n)
    w.writerow(["n", "gamma", "gamma_float"])
    for n, v in enumerate(curve, start=1):
        w.writerow([n, _fmt(v), f"{float(v):.12g}"])
    return OK


def cmd_gallery_list(args) -> int:
    w = _out()
    w.writerow(["name", "finite", "description"])
    for e in ENTRIES.values():
        w.writerow([e.name, e.finite, e.description])
    return OK


def cmd_gallery_export(args) -> int:
    params = {"window": args.window} if args.name == "staircase" else {}
    if args.name == "staircase":
        params["enumerate_states"] = True
    game = gallery(args.name, **params)
    text = dumps_game(game, cap=args.cap)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_reproduce(args) -> int:
    rows = run_manifest(args.example)
    _meta(example=args.example)
    w = _out()
    w.writerow(["check", "detail", "value", "expected", "status"])
    ok = True
    for check, detail, value, expected, passed in rows:
        ok &= bool(passed)
        w.writerow([check, detail, _fmt(value), _fmt(expected), "pass" if passed else "FAIL"])
    return OK if ok else FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="commgames", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-commutativity", help="test that transitions commute")
    s.add_argument("game")
    s.add_argument("--grid-denominator", type=int, default=None, help="check on the simplex grid with this denominator")
    s.add_argument("--tol", type=float, default=0.0)
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("value-iterate", help="n-stage values v_1..v_n")
    s.add_argument("game")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--state", default=None)
    s.set_defaults(fn=cmd_value_iterate)

    s = sub.add_parser("discounted", help="discounted value")
    s.add_argument("game")
    s.add_argument("--lam", required=True, help="discount factor in (0,1], e.g. 0.25 or 1/4")
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--state", default=None)
    s.set_defaults(fn=cmd_discounted)

    s = sub.add_parser("cycle", help="limit cycle of one repeated action pair")
    s.add_argument("game")
    s.add_argument("--state", default=None)
    s.add_argument("--pair", required=True, help="i,j")
    s.add_argument("--eps", type=float, default=1e-9)
    s.add_argument("--max-iter", type=int, default=10_000)
    s.set_defaults(fn=cmd_cycle)

    s = sub.add_parser("uniform-value", help="uniform value estimate")
    s.add_argument("game")
    s.add_argument("--state", default=None)
    s.add_argument("--eps-schedule", default=None, help="comma-separated, e.g. 0.1,0.05")
    s.add_argument("--tol", type=float, default=1e-3)
    s.add_argument("--n-max", type=int, default=8192)
    s.set_defaults(fn=cmd_uniform)

    s = sub.add_parser("transform", help="write a transformed game")
    s.add_argument("kind", choices=["absorbing", "belief", "aumann"])
    s.add_argument("file", help="game file or built-in name; JSON {matrices, p1[, grid]} for aumann")
    s.add_argument("--alpha", default=None, help="non-absorbing state (absorbing)")
    s.add_argument("--grid", type=int, default=None, help="profile grid denominator (aumann)")
    s.add_argument("--cap", type=int, default=100_000, help="maximum number of states written")
    s.set_defaults(fn=cmd_transform)

    s = sub.add_parser("evaluate", help="evaluate a strategy profile")
    s.add_argument("game")
    s.add_argument("--strategy", required=True, help="JSON strategy file")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--state", default=None)
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact evaluation (default)")
    mode.add_argument("--simulate", action="store_true", help="Monte-Carlo estimate")
    s.add_argument("--reps", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_evaluate)

    s = sub.add_parser("gallery-list", help="list built-in games")
    s.set_defaults(fn=cmd_gallery_list)

    s = sub.add_parser("gallery-export", help="write a built-in game to the text format")
    s.add_argument("name")
    s.add_argument("--out", default=None)
    s.add_argument("--window", type=int, default=8, help="staircase window")
    s.add_argument("--cap", type=int, default=100_000)
    s.set_defaults(fn=cmd_gallery_export)

    s = sub.add_parser("reproduce", help="run the checks for one built-in example")
    s.add_argument("example", choices=sorted(MANIFESTS))
    s.set_defaults(fn=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.fn(args)
    except (UsageError, GameError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (Inconclusive, HistoryCapExceeded) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
