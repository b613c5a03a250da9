"""Built-in example games."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction

from .dist import Dist, as_number
from .game import GameError, GameSpec
from .staircase import staircase_game
from .transforms import AbsorbingGameSpec, absorbing_to_commutative, aumann_maschler_game, belief_game

NOBODY = "-"
half = Fraction(1, 2)


def triangle() -> GameSpec:
    """Random walk on Z/3 driven by both players; payoff 1 in state k0."""
    K = ("k0", "k1", "k2")
    shift = {
        ("T", "L"): Dist([(1, half), (2, half)]),
        ("T", "R"): Dist.dirac(1),
        ("B", "L"): Dist.dirac(1),
        ("B", "R"): Dist.dirac(0),
    }
    trans, pay = {}, {}
    for n, k in enumerate(K):
        for (i, j), d in shift.items():
            trans[(k, i, j)] = d.map(lambda s, n=n: K[(n + s) % 3])
            pay[(k, i, j)] = 1 if k == "k0" else 0
    return GameSpec.from_tables(("T", "B"), ("L", "R"), trans, pay, states=K, name="triangle", start="k0")


def gimbert() -> GameSpec:
    """Four-state blind POMDP whose transition does not commute."""
    trans = {
        ("alpha", "T", NOBODY): Dist([("alpha", half), ("beta", half)]),
        ("beta", "T", NOBODY): Dist.dirac("beta"),
        ("alpha", "B", NOBODY): Dist.dirac("k0"),
        ("beta", "B", NOBODY): Dist.dirac("k1"),
    }
    for k in ("k0", "k1"):
        for i in ("T", "B"):
            trans[(k, i, NOBODY)] = Dist.dirac(k)
    pay = {key: (1 if key[0] == "k1" else 0) for key in trans}
    return GameSpec.from_tables(
        ("T", "B"), (NOBODY,), trans, pay, states=("alpha", "beta", "k0", "k1"), name="gimbert", start="alpha"
    )


def big_match_absorbing() -> AbsorbingGameSpec:
    """Top absorbs with payoff 1 against L and 0 against R; Bottom pays 0 against L and 1 against R."""
    return AbsorbingGameSpec(
        ("T", "B"),
        ("L", "R"),
        payoff={("T", "L"): 1, ("T", "R"): 0, ("B", "L"): 0, ("B", "R"): 1},
        absorb_prob={("T", "L"): 1, ("T", "R"): 1, ("B", "L"): 0, ("B", "R"): 0},
        absorbed={("T", "L"): Dist.dirac("1*"), ("T", "R"): Dist.dirac("0*")},
        absorbing_payoffs={"1*": 1, "0*": 0},
        alpha="alpha",
        name="big-match",
    )


def big_match() -> GameSpec:
    return big_match_absorbing().to_game()


def big_match_transform() -> GameSpec:
    return absorbing_to_commutative(big_match_absorbing())[0]


def belief_map_hidden(Q=((Fraction(1, 4), Fraction(3, 4)), (Fraction(3, 4), Fraction(1, 4)))) -> GameSpec:
    K = ("k0", "k1")
    trans = {}
    for n, k in enumerate(K):
        trans[(k, "*", NOBODY)] = Dist([(K[m], as_number(Q[n][m])) for m in range(2)])
    pay = {key: (1 if key[0] == "k0" else 0) for key in trans}
    return GameSpec.from_tables(("*",), (NOBODY,), trans, pay, states=K, name="belief-map-hidden", start="k0")


def belief_map(Q=None) -> GameSpec:
    """Belief dynamics of a two-state Markov chain, seen as a one-action game."""
    hidden = belief_map_hidden() if Q is None else belief_map_hidden(Q)
    return belief_game(hidden, name="belief-map")


def circle(rotations: dict | None = None) -> GameSpec:
    """Random rotations of the circle R/Z; payoff 1 at angle 0 decaying linearly to 0 at 1/2.

    Angles are stored as 1-tuples; rational rotations keep them exact.
    """
    rot = rotations or {
        ("a", "c"): Dist.dirac(Fraction(1, 3)),
        ("a", "d"): Dist([(Fraction(0), half), (Fraction(1, 4), half)]),
        ("b", "c"): Dist.dirac(Fraction(1, 4)),
        ("b", "d"): Dist([(Fraction(1, 3), half), (half, half)]),
    }
    rot = {k: (v if isinstance(v, Dist) else Dist(v)) for k, v in rot.items()}
    I = tuple(dict.fromkeys(i for i, _ in rot))
    J = tuple(dict.fromkeys(j for _, j in rot))

    def q(x, i, j):
        return rot[(i, j)].map(lambda r: ((x[0] + r) % 1,))

    def arc(x, y):
        d = abs(x[0] - y[0]) % 1
        return min(d, 1 - d)

    def g(x, i, j):
        return 1 - 2 * arc(x, (0,))

    return GameSpec(I, J, q, g, kind="euclidean", dim=1, name="circle", metric=arc, lipschitz=2, start=(Fraction(0),))


def counter() -> GameSpec:
    """Z/3 rotation (action a) times a counter saturating at 2 (action b)."""
    states = tuple(f"{r}.{c}" for r in range(3) for c in range(3))
    trans, pay = {}, {}
    for r in range(3):
        for c in range(3):
            x = f"{r}.{c}"
            trans[(x, "a", NOBODY)] = Dist.dirac(f"{(r + 1) % 3}.{c}")
            trans[(x, "b", NOBODY)] = Dist.dirac(f"{r}.{min(c + 1, 2)}")
            for i in ("a", "b"):
                pay[(x, i, NOBODY)] = Fraction(int(r == 0), 2) + Fraction(c, 4)
    return GameSpec.from_tables(("a", "b"), (NOBODY,), trans, pay, states=states, name="counter", start="0.0")


def aumann_maschler(grid=None) -> GameSpec:
    return aumann_maschler_game([[[1, 0], [0, 0]], [[0, 0], [0, 1]]], (half, half), grid)


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    build: Callable[..., GameSpec]
    description: str
    finite: bool


ENTRIES = {
    e.name: e
    for e in [
        GalleryEntry("staircase", staircase_game, "deterministic MDP on N x N with staircase payoffs (window-truncated)", False),
        GalleryEntry("triangle", triangle, "two-player random walk on Z/3", True),
        GalleryEntry("triangle-belief", lambda: belief_game(triangle()), "belief game of triangle", False),
        GalleryEntry("circle", circle, "random rotations of the circle", False),
        GalleryEntry("gimbert", gimbert, "non-commutative blind POMDP", True),
        GalleryEntry("gimbert-belief", lambda: belief_game(gimbert()), "belief MDP of gimbert", False),
        GalleryEntry("big-match", big_match, "absorbing game with value 1/2", True),
        GalleryEntry("big-match-transform", big_match_transform, "commutative game equivalent to big-match", True),
        GalleryEntry("belief-map", belief_map, "belief dynamics of a two-state chain", False),
        GalleryEntry("aumann-maschler", aumann_maschler, "posterior game of a two-matrix incomplete-information game", False),
        GalleryEntry("counter", counter, "Z/3 rotation times a saturating counter", True),
    ]
}


def gallery(name: str, **params) -> GameSpec:
    try:
        entry = ENTRIES[name]
    except KeyError:
        raise GameError(f"unknown gallery game {name!r}; known: {', '.join(ENTRIES)}") from None
    return entry.build(**params)

