"""Checking that one-step transitions commute."""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction

from .dist import Dist, Number, state_is_exact
from .game import GameError, GameSpec, linear_extension


@dataclass(frozen=True)
class CommuteWitness:
    state: object
    pair: tuple
    other: tuple
    first: Dist   # play ``pair`` then ``other``
    second: Dist  # play ``other`` then ``pair``
    distance: Number


@dataclass
class CommutativityReport:
    passed: bool
    witnesses: list = field(default_factory=list)
    checked: int = 0
    tol: float = 0.0


def _exact_states(*dists: Dist) -> bool:
    return all(state_is_exact(x) for d in dists for x in d)


def two_step(game: GameSpec, x, first: tuple, then: tuple) -> Dist:
    return linear_extension(game, game.q(x, *first), *then)


def commute_pair(game: GameSpec, x, pair: tuple, other: tuple, tol: float = 0.0) -> CommuteWitness | None:
    """None when the two orders agree within ``tol`` in total variation."""
    a = two_step(game, x, pair, other)
    b = two_step(game, x, other, pair)
    # float states need tolerant matching; exact states compare by equality
    metric = None if _exact_states(a, b) else game.distance
    d = a.tv(b, metric=metric)
    if d > tol:
        return CommuteWitness(x, tuple(pair), tuple(other), a, b, d)
    return None


def check_commutative(game: GameSpec, states: Iterable | None = None, tol: float = 0.0) -> CommutativityReport:
    """Test every state against every unordered pair of distinct action pairs.

    Witnesses come out in state order, then in the order of the action pairs.
    """
    if states is None:
        if game.states is None:
            raise GameError("no state enumeration: pass a sample of states")
        states = game.states
    states = list(states)
    if not states:
        raise GameError("empty state set")
    pairs = game.action_pairs
    out = CommutativityReport(True, tol=tol)
    for x in states:
        for p, r in itertools.combinations(pairs, 2):
            out.checked += 1
            w = commute_pair(game, x, p, r, tol)
            if w is not None:
                out.witnesses.append(w)
    out.passed = not out.witnesses
    return out


def simplex_grid(dim: int, denominator: int) -> list[tuple]:
    """All points of the simplex in R^dim with coordinates in (1/denominator) Z."""
    if dim < 1 or denominator < 1:
        raise ValueError("dimension and denominator must be positive")
    out = []
    for cut in itertools.combinations(range(denominator + dim - 1), dim - 1):
        edges = (-1,) + cut + (denominator + dim - 1,)
        counts = [edges[k + 1] - edges[k] - 1 for k in range(dim)]
        out.append(tuple(Fraction(c, denominator) for c in counts))
    return out


def order_invariant(game: GameSpec, x, multiset: Iterable[tuple], tol: float = 0.0) -> bool:
    """Whether every ordering of ``multiset`` leads to the same state law.

    Orderings sharing a prefix multiset and an intermediate law are expanded
    once, so a commutative game costs one expansion per sub-multiset.
    """
    items = sorted((tuple(p) for p in multiset), key=repr)
    memo: dict = {}

    def finals(z: Dist, rest: tuple) -> set:
        if not rest:
            return {z}
        key = (z, rest)
        if key not in memo:
            out: set = set()
            for k, p in enumerate(rest):
                if k and rest[k - 1] == p:
                    continue
                out |= finals(linear_extension(game, z, *p), rest[:k] + rest[k + 1 :])
            memo[key] = out
        return memo[key]

    laws = list(finals(Dist.dirac(x), tuple(items)))
    ref = laws[0]
    metric = None if _exact_states(*laws) else game.distance
    return all(ref.tv(z, metric=metric) <= tol for z in laws[1:])
