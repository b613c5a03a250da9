"""Exact and Monte-Carlo evaluation of strategy profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dist import Dist, as_dist, as_number
from .game import GameSpec, HistoryCapExceeded
from .strategies import Strategy, branches

HISTORY_CAP = 10**6

_MARKOV = ("time", "state")


def _stage_payoffs_markov(game: GameSpec, z: Dist, sigma: Strategy, tau: Strategy, n: int) -> list:
    out = []
    for t in range(1, n + 1):
        exp = Fraction(0)
        items = []
        for x, p in z.items():
            h = (x,)
            a = sigma.action_dist(t, h)
            b = tau.action_dist(t, h)
            for i, pi in a.items():
                for j, pj in b.items():
                    w = p * pi * pj
                    exp += w * game.g(x, i, j)
                    if t < n:
                        items.extend((y, w * r) for y, r in game.q(x, i, j).items())
        out.append(exp)
        if t < n:
            z = Dist(items)
    return out


def _propagate_histories(game: GameSpec, z: Dist, sigma: Strategy, tau: Strategy, n: int, cap: int):
    layer = {(x,): p for x, p in z.items()}
    payoffs = []
    for t in range(1, n + 1):
        exp = Fraction(0)
        nxt: dict = {}
        last = t == n
        for h, p in layer.items():
            x = h[-1]
            a = sigma.action_dist(t, h)
            b = tau.action_dist(t, h)
            for i, pi in a.items():
                for j, pj in b.items():
                    w = p * pi * pj
                    exp += w * game.g(x, i, j)
                    if last:
                        continue
                    for y, r in game.q(x, i, j).items():
                        k = h + (i, j, y)
                        nxt[k] = nxt.get(k, 0) + w * r
                        if len(nxt) > cap:
                            raise HistoryCapExceeded(
                                f"more than {cap} weighted histories at stage {t + 1}; use simulate() instead"
                            )
        payoffs.append(exp)
        if not last:
            layer = nxt
    return payoffs, layer


def stage_payoffs(game: GameSpec, z1, sigma: Strategy, tau: Strategy, n: int, cap: int = HISTORY_CAP) -> list:
    """Expected stage payoffs E[g(x_t, i_t, j_t)] for t = 1..n."""
    if n < 1:
        raise ValueError("horizon must be at least 1")
    z = as_dist(z1)
    total = [Fraction(0)] * n
    for ws, s in branches(sigma):
        for wt, t in branches(tau):
            if s.memory in _MARKOV and t.memory in _MARKOV:
                part = _stage_payoffs_markov(game, z, s, t, n)
            else:
                part, _ = _propagate_histories(game, z, s, t, n, cap)
            w = ws * wt
            total = [a + w * b for a, b in zip(total, part)]
    return total


def exact_play_distribution(game: GameSpec, z1, sigma: Strategy, tau: Strategy, n: int, cap: int = HISTORY_CAP) -> Dist:
    """Law of the history (x_1, i_1, j_1, ..., x_n)."""
    if n < 1:
        raise ValueError("horizon must be at least 1")
    z = as_dist(z1)
    items = []
    for ws, s in branches(sigma):
        for wt, t in branches(tau):
            layer = {(x,): p for x, p in z.items()}
            for stage in range(1, n):
                nxt: dict = {}
                for h, p in layer.items():
                    x = h[-1]
                    for i, pi in s.action_dist(stage, h).items():
                        for j, pj in t.action_dist(stage, h).items():
                            for y, r in game.q(x, i, j).items():
                                k = h + (i, j, y)
                                nxt[k] = nxt.get(k, 0) + p * pi * pj * r
                                if len(nxt) > cap:
                                    raise HistoryCapExceeded(
                                        f"more than {cap} weighted histories; use simulate() instead"
                                    )
                layer = nxt
            items.extend((h, ws * wt * p) for h, p in layer.items())
    return Dist(items)


def gamma_n(game: GameSpec, z1, sigma: Strategy, tau: Strategy, n: int, m: int = 1, cap: int = HISTORY_CAP):
    """Expected average payoff over stages m..n."""
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    g = stage_payoffs(game, z1, sigma, tau, n, cap)
    return sum(g[m - 1 :], Fraction(0)) / (n - m + 1)


def evaluate_strategy(game: GameSpec, z1, sigma: Strategy, tau: Strategy, n: int, cap: int = HISTORY_CAP) -> list:
    """The curve gamma_1, ..., gamma_n."""
    g = stage_payoffs(game, z1, sigma, tau, n, cap)
    out = []
    acc = Fraction(0)
    for t, v in enumerate(g, start=1):
        acc += v
        out.append(acc / t)
    return out


def gamma_lambda(game: GameSpec, z1, sigma: Strategy, tau: Strategy, lam, horizon_cap: int = 200, cap: int = HISTORY_CAP):
    """Discounted payoff truncated after ``horizon_cap`` stages.

    Returns ``(estimate, bound)``. The estimate closes the geometric tail
    with the expected payoff of stage ``horizon_cap + 1``, so plays whose
    payoff is eventually constant in expectation are evaluated exactly;
    ``bound = (1-lam)^horizon_cap`` bounds the error in every case.
    """
    lam = as_number(lam)
    if not 0 < lam <= 1:
        raise ValueError("discount factor must lie in (0,1]")
    g = stage_payoffs(game, z1, sigma, tau, horizon_cap + 1, cap)
    s = Fraction(0)
    disc = Fraction(1) if isinstance(lam, Fraction) else 1.0
    for v in g[:-1]:
        s += lam * disc * v
        disc *= 1 - lam
    return s + disc * g[-1], disc


@dataclass(frozen=True)
class SimulationResult:
    mean: float
    stderr: float
    ci_low: float
    ci_high: float
    reps: int
    exact_mean: object = None


def _draw(parts, rng):
    if len(parts) == 1:
        return parts[0][1]
    k = Dist([(k, w) for k, (w, _) in enumerate(parts)], check=False).sample(rng)
    return parts[k][1]


def simulate(game: GameSpec, z1, sigma: Strategy, tau: Strategy, n: int, seed: int = 0, reps: int = 1000, z: float = 1.96) -> SimulationResult:
    """Monte-Carlo estimate of gamma_n with a normal-approximation interval.

    Each replication gets its own generator spawned from ``seed``, so the
    result does not depend on how replications are scheduled.
    """
    if reps < 1:
        raise ValueError("need at least one replication")
    z1 = as_dist(z1)
    sp = branches(sigma)
    tp = branches(tau)
    values = []
    for child in np.random.SeedSequence(seed).spawn(reps):
        rng = np.random.default_rng(child)
        s = _draw(sp, rng)
        t = _draw(tp, rng)
        x = z1.sample(rng)
        h = (x,)
        total = Fraction(0)
        for stage in range(1, n + 1):
            i = s.action_dist(stage, h).sample(rng)
            j = t.action_dist(stage, h).sample(rng)
            total += game.g(x, i, j)
            if stage < n:
                x = game.q(x, i, j).sample(rng)
                h = h + (i, j, x) if s.memory == "history" or t.memory == "history" else (x,)
        values.append(total / n)
    exact_mean = sum(values, Fraction(0)) / reps
    arr = np.array([float(v) for v in values])
    mean = float(exact_mean)
    se = float(arr.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    return SimulationResult(mean, se, mean - z * se, mean + z * se, reps, exact_mean)
