"""Named reproduction manifests: each yields (check, detail, value, expected, passed) rows."""

from __future__ import annotations

from collections.abc import Callable, Iterator
from fractions import Fraction

from .commutativity import check_commutative, simplex_grid
from .dist import Dist
from .dynamics import detect_cycle, uniform_value_estimate
from .gallery import aumann_maschler, belief_map, big_match, big_match_absorbing, circle, gimbert, triangle
from .play import evaluate_strategy
from .staircase import crossing_strategy, staircase_game, staircase_mixed_strategy
from .strategies import Stationary, constant
from .transforms import absorbing_to_commutative, belief_game, dirac_belief, posterior_split
from .values import value_iterate_n

Row = tuple[str, str, object, object, bool]
half = Fraction(1, 2)


def _triangle() -> Iterator[Row]:
    hidden = triangle()
    rep = check_commutative(hidden)
    yield ("commutative", "hidden states", rep.checked, "no witness", rep.passed)
    bg = belief_game(hidden)
    grid = simplex_grid(3, 4)
    rep = check_commutative(bg, grid)
    yield ("commutative", "belief grid 1/4", rep.checked, "no witness", rep.passed)
    p = (Fraction(1, 2), Fraction(1, 3), Fraction(1, 6))
    got = bg.step(p, "T", "L")
    want = ((p[1] + p[2]) / 2, (p[0] + p[2]) / 2, (p[0] + p[1]) / 2)
    yield ("belief step", "(T,L) at (1/2,1/3,1/6)", got, want, got == want)
    got = bg.step(p, "B", "L")
    yield ("belief step", "(B,L) at (1/2,1/3,1/6)", got, (p[2], p[0], p[1]), got == (p[2], p[0], p[1]))
    r = detect_cycle(bg, dirac_belief(hidden, "k0"), ("B", "L"))
    yield ("cycle", "(B,L) from k0", r.period, 3, r.exact and r.period == 3)


def _gimbert() -> Iterator[Row]:
    g = gimbert()
    rep = check_commutative(g)
    ok = len(rep.witnesses) == 1 and rep.witnesses[0].state == "alpha"
    w = rep.witnesses[0] if rep.witnesses else None
    yield ("not commutative", "witness states", [x.state for x in rep.witnesses], ["alpha"], ok)
    if w is not None:
        k0 = Dist.dirac("k0")
        mix = Dist([("k0", half), ("k1", half)])
        yield ("witness", "laws", f"{dict(w.first)} vs {dict(w.second)}", "k0 vs k0/k1 halves", {w.first, w.second} == {k0, mix})
        yield ("witness", "distance", w.distance, half, w.distance == half)
    bg = belief_game(g)
    start = dirac_belief(g, "alpha")
    res = uniform_value_estimate(bg, start)
    yield ("uniform value", "from alpha", round(res.value, 6), 1, abs(res.value - 1) <= 1e-2)
    sigma = Stationary(lambda p: "B" if p[1] >= Fraction(9, 10) else "T")
    curve = evaluate_strategy(bg, start, sigma, constant("-"), 1000)
    yield ("strategy", "T until P(beta)>=0.9 then B, n=1000", float(curve[-1]), ">= 0.9", curve[-1] >= Fraction(9, 10))


def _staircase() -> Iterator[Row]:
    game = staircase_game(window=400)
    mix = staircase_mixed_strategy()
    curve = evaluate_strategy(game, (0, 0), mix, constant("-"), 192)
    for n, v in enumerate(curve, start=1):
        yield ("mixed >= 3/8", f"n={n}", str(v), "3/8", v >= Fraction(3, 8))
    ends = set()
    for _, b in mix.parts:
        x = (0, 0)
        for t in range(1, 193):
            x = game.step(x, b.action(t), "-")
        ends.add(x)
    yield ("common state", "after 192 actions", sorted(ends), [(144, 48)], ends == {(144, 48)})
    s = crossing_strategy(4)
    curve = evaluate_strategy(game, (0, 0), s, constant("-"), 17)
    yield ("crossing", "gamma at n=16", str(curve[15]), "< 1/2", curve[15] < half)


def _big_match() -> Iterator[Row]:
    bm = big_match()
    abs_game = big_match_absorbing()
    tr, start = absorbing_to_commutative(abs_game)
    vs = value_iterate_n(bm, 10)
    vt = value_iterate_n(tr, 10)
    for n in range(10):
        a, b = vs[n]["alpha"], vt[n][start]
        yield ("transform", f"v_{n + 1}", f"{a:.12f}/{b:.12f}", "equal", abs(a - b) <= 1e-9)
    rep = check_commutative(tr)
    yield ("commutative", "transform", rep.checked, "no witness", rep.passed)
    res = uniform_value_estimate(tr, start)
    yield ("uniform value", "transform", round(res.value, 6), 0.5, abs(res.value - 0.5) <= 1e-2)


def _belief_map() -> Iterator[Row]:
    g = belief_map()
    r = detect_cycle(g, (Fraction(1), Fraction(0)), ("*", "-"), eps=1e-6)
    dist = sum(abs(c - half) for c in r.states[0]) if r.states else None
    yield ("cycle", "period", r.period, 1, r.period == 1)
    yield ("cycle", "limit distance to (1/2,1/2)", float(dist), "<= 1e-6", dist is not None and dist <= 1e-6)
    yield ("cycle", "convergence stage", r.stage, "<= 50", 0 <= r.stage <= 50)


def _aumann_maschler() -> Iterator[Row]:
    g = aumann_maschler()
    grid = simplex_grid(2, 4)
    rep = check_commutative(g, grid, tol=1e-12)
    yield ("commutative", "belief grid 1/4", rep.checked, "no witness", rep.passed)
    ok = True
    for p in grid:
        for a in g.meta["profiles"].values():
            parts = posterior_split(p, a)
            mean = tuple(sum(w * post[k] for _, w, post in parts) for k in range(2))
            ok &= mean == tuple(p)
    yield ("martingale", "posterior mean equals prior", ok, True, ok)


def _circle() -> Iterator[Row]:
    g = circle()
    pts = [(Fraction(k, 24),) for k in range(24)]
    rep = check_commutative(g, pts)
    yield ("commutative", "24 angles", rep.checked, "no witness", rep.passed)


MANIFESTS: dict[str, Callable[[], Iterator[Row]]] = {
    "triangle": _triangle,
    "gimbert": _gimbert,
    "staircase": _staircase,
    "big-match": _big_match,
    "belief-map": _belief_map,
    "aumann-maschler": _aumann_maschler,
    "circle": _circle,
}


def run(example: str) -> list[Row]:
    try:
        fn = MANIFESTS[example]
    except KeyError:
        raise KeyError(f"unknown example {example!r}; known: {', '.join(MANIFESTS)}") from None
    return list(fn())
