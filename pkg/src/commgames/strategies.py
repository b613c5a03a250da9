"""Strategy types and the schedule constructions for commutative MDPs.

A strategy maps ``(t, history)`` to a distribution over actions, where
``t`` is the 1-based stage and ``history`` is ``(x_1, i_1, j_1, ..., x_t)``.
The ``memory`` attribute tells the evaluator how much of the history a
strategy looks at: ``"time"`` (open loop), ``"state"`` (Markov) or
``"history"``.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .dist import Dist, as_number, fraction_from_decimal
from .game import GameError, GameSpec


class Strategy:
    memory = "history"

    def action_dist(self, t: int, history: tuple) -> Dist:
        raise NotImplementedError


class PureSequence(Strategy):
    """Eventually periodic action stream ``prefix + cycle + cycle + ...``.

    An empty cycle makes the stream finite; asking for an action past the
    prefix is then an error.
    """

    memory = "time"

    def __init__(self, prefix: Iterable = (), cycle: Iterable = ()):
        self.prefix = tuple(prefix)
        self.cycle = tuple(cycle)

    def action(self, t: int):
        if t < 1:
            raise ValueError("stages start at 1")
        if t <= len(self.prefix):
            return self.prefix[t - 1]
        if not self.cycle:
            raise IndexError(f"finite action sequence of length {len(self.prefix)} has no stage {t}")
        return self.cycle[(t - len(self.prefix) - 1) % len(self.cycle)]

    def actions(self, n: int) -> list:
        return [self.action(t) for t in range(1, n + 1)]

    def action_dist(self, t, history=()) -> Dist:
        return Dist.dirac(self.action(t))

    def shifted(self, k: int) -> PureSequence:
        """The stream with its first ``k`` actions removed."""
        if k <= len(self.prefix):
            return PureSequence(self.prefix[k:], self.cycle)
        if not self.cycle:
            raise IndexError("shift beyond a finite sequence")
        r = (k - len(self.prefix)) % len(self.cycle)
        return PureSequence((), self.cycle[r:] + self.cycle[:r])

    def count(self, n: int) -> dict:
        """Action counts among the first ``n`` actions, in closed form."""
        out: dict = {}
        head = self.prefix[:n]
        for a in head:
            out[a] = out.get(a, 0) + 1
        rest = n - len(head)
        if rest > 0:
            full, part = divmod(rest, len(self.cycle))
            for a in self.cycle:
                out[a] = out.get(a, 0) + full
            for a in self.cycle[:part]:
                out[a] = out.get(a, 0) + 1
        return out

    def __eq__(self, other):
        return isinstance(other, PureSequence) and (self.prefix, self.cycle) == (other.prefix, other.cycle)

    def __hash__(self):
        return hash((self.prefix, self.cycle))

    def __repr__(self):
        return f"PureSequence(prefix={self.prefix!r}, cycle={self.cycle!r})"


def constant(action) -> PureSequence:
    return PureSequence((), (action,))


class Stationary(Strategy):
    """Markov strategy: the action distribution depends on the current state only."""

    memory = "state"

    def __init__(self, rule: Callable | dict | Dist):
        self.rule = rule

    def dist_at(self, x) -> Dist:
        r = self.rule
        if isinstance(r, Dist):
            return r
        out = r(x) if callable(r) else r[x]
        return out if isinstance(out, Dist) else Dist.dirac(out)

    def action_dist(self, t, history) -> Dist:
        return self.dist_at(history[-1])


class Behavioral(Strategy):
    """General behavioral strategy given by a function of ``(t, history)``."""

    def __init__(self, fn: Callable[[int, tuple], Any]):
        self.fn = fn

    def action_dist(self, t, history) -> Dist:
        out = self.fn(t, history)
        return out if isinstance(out, Dist) else Dist.dirac(out)


class Mixture(Strategy):
    """Finite mixture of strategies, drawn once before play starts."""

    def __init__(self, parts: Iterable[tuple[Any, Strategy]]):
        flat: list[tuple[Any, Strategy]] = []
        for w, s in parts:
            w = as_number(w)
            if w < 0:
                raise ValueError("mixture weights must be nonnegative")
            if w == 0:
                continue
            if isinstance(s, Mixture):
                flat.extend((w * v, t) for v, t in s.parts)
            else:
                flat.append((w, s))
        total = sum((w for w, _ in flat), Fraction(0))
        if isinstance(total, Fraction) and total != 1 or not isinstance(total, Fraction) and abs(total - 1) > 1e-12:
            raise ValueError(f"mixture weights sum to {total}, not 1")
        self.parts = flat

    @property
    def memory(self):
        return "mixture"

    def action_dist(self, t, history):
        raise TypeError("a mixture has no behavioral form here; evaluate its branches")


def branches(s: Strategy) -> list[tuple[Any, Strategy]]:
    if isinstance(s, Mixture):
        return list(s.parts)
    return [(Fraction(1), s)]


# ---------------------------------------------------------------------------
# stopping-time concatenation


def _as_fraction(e) -> Fraction:
    return fraction_from_decimal(e)


def n_choices(eps) -> int:
    """t_l = floor(1/eps_l) + 1."""
    return math.floor(1 / _as_fraction(eps)) + 1


def reachable_within(game: GameSpec, x1, k: int) -> set:
    """States reachable from ``x1`` with at most ``k`` actions (deterministic game)."""
    frontier = {x1}
    seen = {x1}
    for _ in range(k):
        nxt = set()
        for x in frontier:
            for i, j in game.action_pairs:
                y = game.step(x, i, j)
                if y not in seen:
                    seen.add(y)
                    nxt.add(y)
        frontier = nxt
        if not frontier:
            break
    return seen


@dataclass
class ConcatenationSchedule:
    eps: tuple
    t: tuple
    T: tuple
    next_start: int
    horizons: dict = field(default_factory=dict)


@dataclass
class LevelOracle:
    """Supplies ``(sigma_l(x), N(l,x))`` for the concatenation.

    ``strategy(l, x)`` returns a PureSequence and ``horizon(l, x)`` the
    integer N(l,x). ``max_horizon(l, x1, k)`` may be given to compute the
    maximum of N(l,.) over states reachable with at most ``k`` actions
    faster than enumeration.
    """

    strategy: Callable[[int, Hashable], PureSequence]
    horizon: Callable[[int, Hashable], int]
    max_horizon: Callable[[int, Hashable, int], int] | None = None


def _max_N(mdp: GameSpec, oracle: LevelOracle, l: int, x1, t: int) -> int:
    # X(t): states reachable in fewer than t stages, i.e. with at most t-1 actions
    if oracle.max_horizon is not None:
        return int(oracle.max_horizon(l, x1, t - 1))
    states = reachable_within(mdp, x1, t - 1)
    try:
        return max(int(oracle.horizon(l, x)) for x in states)
    except KeyError as exc:
        raise GameError(f"level oracle has no entry for level {l} at state {exc.args[0]!r}") from exc


def concatenation_stages(mdp: GameSpec, x1, eps: Sequence, oracle: LevelOracle, levels: int) -> ConcatenationSchedule:
    """The stage sets T_1, ..., T_levels and the first stage of T_{levels+1}."""
    if levels < 1 or len(eps) < levels:
        raise ValueError("need one epsilon per level")
    eps_f = tuple(_as_fraction(e) for e in eps[:levels])
    if any(e <= 0 for e in eps_f) or any(a < b for a, b in zip(eps_f, eps_f[1:])):
        raise ValueError("epsilons must be positive and non-increasing")
    ts = [1]
    T = [(1,)]
    horizons: dict = {}

    def maxN(l, t):
        key = (l, t)
        if key not in horizons:
            horizons[key] = _max_N(mdp, oracle, l, x1, t)
        return horizons[key]

    def first_of_next(l: int) -> int:
        last = T[-1][-1]
        return last + maxN(l, last) + math.floor(1 / eps_f[l - 1] + 1) * last

    for l in range(2, levels + 1):
        t_l = n_choices(eps_f[l - 1])
        stages = [first_of_next(l - 1)]
        for _ in range(t_l - 1):
            stages.append(stages[-1] + maxN(l, stages[-1]))
        ts.append(t_l)
        T.append(tuple(stages))
    next_start = first_of_next(levels)
    return ConcatenationSchedule(eps_f, tuple(ts), tuple(T), next_start, horizons)


def play_states(mdp: GameSpec, x, seq: PureSequence, n_actions: int, opponent=None):
    """States visited when playing ``n_actions`` actions of ``seq`` from ``x``."""
    j = opponent if opponent is not None else mdp.actions_J[0]
    out = [x]
    for t in range(1, n_actions + 1):
        x = mdp.step(x, seq.action(t), j)
        out.append(x)
    return out


def concatenate(mdp: GameSpec, x1, switch_stages: Sequence[int], oracle: LevelOracle) -> PureSequence:
    """Play sigma_1(x1), then from each switch stage restart with the next level."""
    j = mdp.actions_J[0]
    prefix: list = []
    x = x1
    current = oracle.strategy(1, x1)
    start = 1
    for l, n_l in enumerate(switch_stages, start=2):
        if n_l <= start:
            raise ValueError("switch stages must be increasing")
        for t in range(start, n_l):
            a = current.action(t - start + 1)
            prefix.append(a)
            x = mdp.step(x, a, j)
        current = oracle.strategy(l, x)
        start = n_l
    return PureSequence(tuple(prefix) + current.prefix, current.cycle)


def build_concatenation(mdp: GameSpec, x1, eps: Sequence, oracle: LevelOracle, levels: int):
    """Schedule and the mixed strategy sigma* truncated at ``levels``.

    Each pure branch picks one switch stage in each T_l (l >= 2) and has
    weight prod_l 1/t_l.
    """
    if not mdp.single_player:
        raise GameError("the concatenation is defined for one-player games")
    sched = concatenation_stages(mdp, x1, eps, oracle, levels)
    if levels == 1:
        return sched, Mixture([(1, oracle.strategy(1, x1))])
    parts = []
    weight = Fraction(1)
    for t_l in sched.t[1:]:
        weight /= t_l
    for choice in itertools.product(*sched.T[1:]):
        parts.append((weight, concatenate(mdp, x1, choice, oracle)))
    return sched, Mixture(parts)


def successor(sched: ConcatenationSchedule, stage: int) -> int:
    """Smallest element of the stage sets (or the next start) above ``stage``."""
    pool = [s for T in sched.T[1:] for s in T] + [sched.next_start]
    later = [s for s in pool if s > stage]
    return min(later)


# ---------------------------------------------------------------------------
# block schedule


class ScheduleError(GameError):
    """Block splitting violates one of the four admissibility conditions.

    ``condition`` names the first violated condition; ``violations`` lists
    all of them as ``(condition, level, detail)``.
    """

    def __init__(self, violations: list[tuple[str, int, str]]):
        self.violations = violations
        self.condition = violations[0][0]
        lines = "; ".join(f"{c} (level {l}): {d}" for c, l, d in violations)
        super().__init__(f"block schedule rejected: {lines}")


CONDITIONS = ("horizon", "prefix_weight", "tail_weight", "approach")


@dataclass
class BlockSchedule:
    anchors: tuple
    splits: tuple
    eps: tuple
    A: tuple
    B: tuple
    L: tuple

    @property
    def stream(self) -> list:
        out: list = []
        for a, b in zip(self.A, self.B):
            out.extend(a)
            out.extend(b)
        return out

    def block_starts(self) -> list[int]:
        """Stage at which each A_l begins."""
        return list(self.L)


def validate_block_schedule(
    mdp: GameSpec,
    anchors: Sequence,
    splits: Sequence[Sequence[int]],
    eps: Sequence,
    horizons: Sequence[int],
    strategies: Sequence[PureSequence],
    eta,
) -> list[tuple[str, int, str]]:
    """All violations of the four splitting conditions.

    ``anchors`` holds x^1..x^{L+1}; ``splits[l-1]`` holds n^l_1..n^l_{L+1};
    ``horizons`` holds N(1,x^1)..N(L+1,x^{L+1}); ``eta`` is a number or a
    sequence indexed from k = 1.
    Conditions:
      horizon        n^l_{l+1} >= N(l, x^l)
      prefix_weight  L_l / n^l_{l+1} <= eps_l
      tail_weight    (N(l+1, x^{l+1}) + sum_{j<l} (n^j_{l+1} - n^j_l)) / n^l_{l+1} <= eps_l
      approach       d(x^l_{n^l_k}, x^{l+1}) <= eta_k / (k-1) for k >= 2
    """
    L = len(strategies)
    eps_f = [fraction_from_decimal(e) for e in eps]

    def eta_k(k):
        if isinstance(eta, (list, tuple)):
            return fraction_from_decimal(eta[k - 1])
        return fraction_from_decimal(eta)

    def n(l, k):
        return splits[l - 1][k - 1]

    out = []
    for l in range(1, L + 1):
        Ll = 1 + sum(n(j, l) - 1 for j in range(1, l))
        top = n(l, l + 1)
        if top < horizons[l - 1]:
            out.append(("horizon", l, f"n^{l}_{l + 1} = {top} < N = {horizons[l - 1]}"))
        if Fraction(Ll, top) > eps_f[l - 1]:
            out.append(("prefix_weight", l, f"L_{l}/n^{l}_{l + 1} = {Ll}/{top} > {eps_f[l - 1]}"))
        tail = horizons[l] + sum(n(j, l + 1) - n(j, l) for j in range(1, l))
        if Fraction(tail, top) > eps_f[l - 1]:
            out.append(("tail_weight", l, f"{tail}/{top} > {eps_f[l - 1]}"))
        states = play_states(mdp, anchors[l - 1], strategies[l - 1], max(splits[l - 1]) - 1)
        for k in range(2, len(splits[l - 1]) + 1):
            x = states[n(l, k) - 1]
            d = mdp.distance(x, anchors[l])
            if d > eta_k(k) / (k - 1):
                out.append(("approach", l, f"d(x^{l}_{n(l, k)}, x^{l + 1}) = {d} > eta_{k}/{k - 1}"))
    return out


def build_block_schedule(
    mdp: GameSpec,
    anchors: Sequence,
    splits: Sequence[Sequence[int]],
    eps: Sequence,
    horizons: Sequence[int],
    strategies: Sequence[PureSequence],
    eta,
) -> tuple[BlockSchedule, PureSequence]:
    """Interleave blocks of the level strategies as (A_1, B_1, A_2, B_2, ...).

    A_l is the first n^l_{l+1} - 1 actions of sigma_l(x^l); B_l plays, for
    each l' < l, the actions of sigma_{l'}(x^{l'}) from stage n^{l'}_l to
    n^{l'}_{l+1} - 1. The inputs are validated first and any violation
    raises :class:`ScheduleError`.
    """
    L = len(strategies)
    if len(anchors) != L + 1 or len(horizons) != L + 1 or len(splits) != L:
        raise ValueError("need L strategies, L split lists, L+1 anchors and L+1 horizons")
    for l, sp in enumerate(splits, start=1):
        if len(sp) < L + 1:
            raise ValueError(f"level {l} needs split stages n^{l}_1..n^{l}_{L + 1}")
        if sp[0] < 1 or any(a >= b for a, b in zip(sp, sp[1:])):
            raise ValueError(f"level {l} split stages must be increasing and positive")
    violations = validate_block_schedule(mdp, anchors, splits, eps, horizons, strategies, eta)
    if violations:
        raise ScheduleError(violations)

    def n(l, k):
        return splits[l - 1][k - 1]

    A, B, starts = [], [], []
    for l in range(1, L + 1):
        starts.append(1 + sum(n(j, l) - 1 for j in range(1, l)))
        A.append(tuple(strategies[l - 1].actions(n(l, l + 1) - 1)))
        blk: list = []
        for lp in range(1, l):
            s = strategies[lp - 1]
            blk.extend(s.action(t) for t in range(n(lp, l), n(lp, l + 1)))
        B.append(tuple(blk))
    sched = BlockSchedule(tuple(anchors), tuple(map(tuple, splits)), tuple(eps), tuple(A), tuple(B), tuple(starts))
    return sched, PureSequence(tuple(sched.stream), ())
