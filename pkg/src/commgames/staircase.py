"""The staircase MDP on N x N and its explicit strategies.

Action R increments the first coordinate and T the second. The state space
is partitioned into staircases h^1, h^2, ... (payoff 1 - 2^-l on h^l) and
the rest h^0 (payoff 0). Staying on h^l means playing T at the right end of
each step and R otherwise, which follows the pattern (T R^{4^{l-1}-1}).
"""

from __future__ import annotations

import math
from fractions import Fraction

from .dist import Dist, fraction_from_decimal
from .game import GameSpec
from .strategies import LevelOracle, Mixture, PureSequence

R, T = "R", "T"
NOBODY = "-"


def w(l: int) -> int:
    """Abscissa of the bottom point (w^l, 0) of h^l."""
    return (4**l - 1) // 3 - l


def step_width(l: int) -> int:
    return 4 ** (l - 1) - 1


def band(l: int, y: int) -> tuple[int, int]:
    """Range of x with (x, y) in h^l; a single point when y = 0."""
    if y == 0:
        return w(l), w(l)
    return w(l) + (y - 1) * step_width(l), w(l) + y * step_width(l)


def level(x: int, y: int) -> int:
    """The l with (x, y) in h^l, or 0 on h^0."""
    if y == 0:
        l = 1
        while w(l) < x:
            l += 1
        return l if w(l) == x else 0
    l = 1
    while True:
        lo, hi = band(l, y)
        if x < lo:
            return 0
        if x <= hi:
            return l
        l += 1


def payoff_of_level(l: int) -> Fraction:
    return Fraction(0) if l == 0 else 1 - Fraction(1, 2**l)


def staircase_game(window: int = 4096, enumerate_states: bool = False) -> GameSpec:
    """Staircase MDP truncated to [0, window]^2; moves past the window saturate."""

    def q(s, i, j):
        x, y = s
        if i == R:
            return Dist.dirac((min(x + 1, window), y))
        if i == T:
            return Dist.dirac((x, min(y + 1, window)))
        raise KeyError(i)

    def g(s, i, j):
        return payoff_of_level(level(*s))

    states = None
    if enumerate_states:
        states = tuple((x, y) for x in range(window + 1) for y in range(window + 1))
    return GameSpec(
        (R, T),
        (NOBODY,),
        q,
        g,
        states=states,
        kind="euclidean",
        dim=2,
        name="staircase",
        start=(0, 0),
        meta={"window": window},
    )


def stay_action(x: int, y: int, l: int) -> str:
    """Action keeping a state of h^l on h^l."""
    return T if x == band(l, y)[1] else R


def stay_sequence(x: int, y: int, l: int) -> PureSequence:
    """From (x, y) on h^l, the eventually periodic stream that never leaves h^l."""
    if level(x, y) != l:
        raise ValueError(f"({x}, {y}) is not on h^{l}")
    hi = band(l, y)[1]
    return PureSequence((R,) * (hi - x), (T,) + (R,) * step_width(l))


def _target_level(eps: Fraction) -> int:
    m = 1
    while Fraction(1, 2**m) >= eps:
        m += 1
    return m


def _entry(a: int, b: int, m: int) -> int | None:
    """Number of R moves from (a, b) to reach h^m, or None if it lies behind."""
    lo, hi = band(m, b)
    if a > hi:
        return None
    return max(0, lo - a)


def level_plan(eps, x) -> tuple[int, int]:
    """(target level m, number of off-target stages r) for the level strategy."""
    eps = fraction_from_decimal(eps)
    a, b = x
    m = _target_level(eps)
    while _entry(a, b, m) is None:
        m += 1
    return m, _entry(a, b, m)


def _horizon(eps: Fraction, m: int, r: int) -> int:
    delta = Fraction(1, 2**m)
    # (n - r)(1 - delta) / n >= 1 - eps  iff  n >= r (1 - delta) / (eps - delta)
    return max(1, math.ceil(r * (1 - delta) / (eps - delta)))


def level_strategy(eps, x) -> tuple[PureSequence, int]:
    """Play R into the first staircase with 2^-m < eps, then stay on it.

    Returns the action stream and a horizon N such that the average payoff
    over any n >= N stages is at least 1 - eps.
    """
    eps = fraction_from_decimal(eps)
    a, b = x
    m, r = level_plan(eps, x)
    stay = stay_sequence(a + r, b, m)
    return PureSequence((R,) * r + stay.prefix, stay.cycle), _horizon(eps, m, r)


def level_horizon(eps, x) -> int:
    return level_strategy(eps, x)[1]


def max_level_horizon(eps, x1, k: int) -> int:
    """max N over states reachable from ``x1`` with at most ``k`` actions.

    Along a row y the number of R moves needed shrinks as x grows, except
    where x passes the end of a staircase step and the target moves to the
    next staircase; only the row start and those jump points are checked.
    """
    eps = fraction_from_decimal(eps)
    a0, b0 = x1
    m0 = _target_level(eps)
    best = 0
    for b in range(b0, b0 + k + 1):
        a_max = a0 + k - (b - b0)
        cands = {a0}
        m = m0
        while True:
            hi = band(m, b)[1]
            if hi + 1 > a_max:
                break
            if hi + 1 >= a0:
                cands.add(hi + 1)
            m += 1
        for a in cands:
            mm, r = level_plan(eps, (a, b))
            best = max(best, _horizon(eps, mm, r))
    return best


def staircase_oracle(eps_schedule) -> LevelOracle:
    eps = [fraction_from_decimal(e) for e in eps_schedule]
    return LevelOracle(
        strategy=lambda l, x: level_strategy(eps[l - 1], x)[0],
        horizon=lambda l, x: level_strategy(eps[l - 1], x)[1],
        max_horizon=lambda l, x1, k: max_level_horizon(eps[l - 1], x1, k),
    )


def staircase_mixed_strategy() -> Mixture:
    """Four equally likely ways of moving from h^1 to h^2.

    Branch c stays on h^1 for 0, 3, 12 or 48 stages, then plays R three
    times as often to reach h^2, and stays there.
    """
    parts = []
    for ups in (0, 3, 12, 48):
        rights = 3 * max(ups, 1)
        x, y = rights, ups
        stay = stay_sequence(x, y, 2)
        parts.append((Fraction(1, 4), PureSequence((T,) * ups + (R,) * rights + stay.prefix, stay.cycle)))
    return Mixture(parts)


def crossing_strategy(ups: int) -> PureSequence:
    """Stay on h^1 for ``ups`` T moves, then walk right to h^2 and stay."""
    if ups < 1:
        raise ValueError("need at least one move up")
    x, y = 3 * ups, ups
    stay = stay_sequence(x, y, 2)
    return PureSequence((T,) * ups + (R,) * x + stay.prefix, stay.cycle)
