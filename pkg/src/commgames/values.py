"""n-stage and discounted values of finite stochastic games."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dist import Dist, as_number
from .game import FiniteModel, GameSpec, Inconclusive, ValueTable, compile_finite
from .matrix import matrix_values_batch


def _model(game_or_model) -> FiniteModel:
    if isinstance(game_or_model, FiniteModel):
        return game_or_model
    return compile_finite(game_or_model)


def _shapley_step(model: FiniteModel, v_prev: np.ndarray, n: int, tol: float) -> np.ndarray:
    cont = model.P @ v_prev
    stage = model.G / n + cont * ((n - 1) / n)
    return matrix_values_batch(stage, tol)


def iterate_values(game, n: int, tol: float = 1e-9):
    """Yield the value vectors v_1, ..., v_n as numpy arrays."""
    model = _model(game)
    v = np.zeros(len(model.states))
    for t in range(1, n + 1):
        v = _shapley_step(model, v, t, tol)
        yield v


def value_iterate_n(game: GameSpec, n: int, tol: float = 1e-9) -> list[ValueTable]:
    """Tables of v_1..v_n via the recursion n v_n = val[g + (n-1) E v_{n-1}]."""
    if n < 1:
        raise ValueError("horizon must be at least 1")
    model = _model(game)
    out = []
    for t, v in enumerate(iterate_values(model, n, tol), start=1):
        out.append(ValueTable(t, dict(zip(model.states, np.clip(v, 0.0, 1.0).tolist()))))
    return out


def discounted_value(game: GameSpec, lam, tol: float = 1e-9, max_iter: int = 10_000_000) -> ValueTable:
    """Fixed point of v = val[lam g + (1-lam) E v].

    Iterates the contraction until successive iterates differ by at most
    ``tol * lam`` in sup norm, which puts the result within ``tol`` of the
    fixed point.
    """
    lam = float(as_number(lam))
    if not 0 < lam <= 1:
        raise ValueError("discount factor must lie in (0,1]")
    model = _model(game)
    v = np.zeros(len(model.states))
    for _ in range(max_iter):
        stage = lam * model.G + (1 - lam) * (model.P @ v)
        new = matrix_values_batch(stage, 1e-12)
        diff = np.max(np.abs(new - v))
        v = new
        if diff <= tol * lam:
            break
    else:
        raise Inconclusive("discounted iteration did not converge", {"lambda": lam})
    return ValueTable(None, dict(zip(model.states, np.clip(v, 0.0, 1.0).tolist())))


@dataclass(frozen=True)
class LimitEstimate:
    value: float
    horizon: int
    gap: float
    converged: bool


def limit_value(game, x, tol: float = 1e-3, n_max: int = 8192, n_min: int | None = None) -> LimitEstimate:
    """Estimate lim v_n(x) by doubling: stop once |v_n(x) - v_{2n}(x)| <= tol.

    Reports v_{2n}. Only n >= ``n_min`` is tested; the default is the number
    of states, so that every reachable state can be visited before the test
    applies. If no doubling pair qualifies up to ``n_max`` the last pair is
    reported with ``converged=False``.
    """
    model = _model(game)
    k = model.index[x]
    if n_min is None:
        n_min = min(len(model.states), max(1, n_max // 2))
    checkpoints: dict[int, float] = {}
    last = None
    for t, v in enumerate(iterate_values(model, n_max), start=1):
        if t & (t - 1) == 0:
            checkpoints[t] = float(v[k])
            half = t // 2
            if half >= n_min and half in checkpoints:
                gap = abs(checkpoints[t] - checkpoints[half])
                last = LimitEstimate(checkpoints[t], t, gap, gap <= tol)
                if gap <= tol:
                    return last
    if last is None:
        return LimitEstimate(checkpoints.get(1, 0.0), 1, float("inf"), False)
    return last


def fix_stationary(game: GameSpec, sigma, tau) -> GameSpec:
    """Game in which both players are replaced by stationary mixed actions.

    ``sigma`` and ``tau`` are mappings state -> Dist over actions, or a
    single Dist used at every state. The result has one action per player.
    """

    def pick(strategy, x) -> Dist:
        if isinstance(strategy, Dist):
            return strategy
        if callable(strategy):
            return strategy(x)
        return strategy[x]

    def q(x, i, j):
        a, b = pick(sigma, x), pick(tau, x)
        items = []
        for ii, p in a.items():
            for jj, r in b.items():
                for y, w in game.q(x, ii, jj).items():
                    items.append((y, p * r * w))
        return Dist(items)

    def g(x, i, j):
        a, b = pick(sigma, x), pick(tau, x)
        return sum(p * r * game.g(x, ii, jj) for ii, p in a.items() for jj, r in b.items())

    return replace(game, actions_I=("*",), actions_J=("*",), transition=q, payoff=g, name=f"{game.name}|fixed")
