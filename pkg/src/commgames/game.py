"""Game representation, linear extension, reachability and finite compilation."""

from __future__ import annotations

from collections import deque
from collections.abc import Callable, Hashable, Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .dist import Dist, Number, as_dist, as_number, discrete_metric, l1


class GameError(ValueError):
    """Malformed game or invalid request on a game."""


class UndefinedTransition(GameError):
    pass


class NotDeterministic(GameError):
    pass


class HistoryCapExceeded(RuntimeError):
    """Exact propagation would exceed the configured history cap."""


class Inconclusive(RuntimeError):
    """A numeric procedure hit its cap without reaching a conclusion."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


KINDS = ("symbolic", "euclidean")


@dataclass(frozen=True)
class GameSpec:
    """A two-player zero-sum stochastic game with payoffs in [0,1].

    ``transition(x, i, j)`` returns a :class:`Dist` (a bare state is read as a
    Dirac mass) and ``payoff(x, i, j)`` a number. ``states`` enumerates the
    state space when it is finite; implicitly defined spaces leave it None.
    Euclidean states are tuples of length ``dim`` compared in L1.
    """

    actions_I: tuple
    actions_J: tuple
    transition: Callable[[Hashable, Any, Any], Any]
    payoff: Callable[[Hashable, Any, Any], Any]
    states: tuple | None = None
    kind: str = "symbolic"
    dim: int | None = None
    name: str = ""
    lipschitz: Number | None = None
    metric: Callable[[Hashable, Hashable], Number] | None = None
    start: Hashable | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if not self.actions_I or not self.actions_J:
            raise GameError("action sets must be non-empty")
        if len(set(self.actions_I)) != len(self.actions_I) or len(set(self.actions_J)) != len(self.actions_J):
            raise GameError("duplicate action labels")
        if self.kind not in KINDS:
            raise GameError(f"unknown state kind {self.kind!r}")
        if self.kind == "euclidean" and self.dim is None:
            raise GameError("euclidean games need a dimension")
        object.__setattr__(self, "actions_I", tuple(self.actions_I))
        object.__setattr__(self, "actions_J", tuple(self.actions_J))
        if self.states is not None:
            object.__setattr__(self, "states", tuple(self.states))

    @property
    def action_pairs(self) -> list[tuple]:
        return [(i, j) for i in self.actions_I for j in self.actions_J]

    @property
    def single_player(self) -> bool:
        return len(self.actions_J) == 1

    @property
    def finite(self) -> bool:
        return self.states is not None

    def q(self, x, i, j) -> Dist:
        try:
            out = self.transition(x, i, j)
        except (KeyError, IndexError) as exc:
            raise UndefinedTransition(f"transition undefined at state {x!r}, actions ({i!r}, {j!r})") from exc
        if out is None:
            raise UndefinedTransition(f"transition undefined at state {x!r}, actions ({i!r}, {j!r})")
        return as_dist(out)

    def g(self, x, i, j) -> Number:
        try:
            v = as_number(self.payoff(x, i, j))
        except (KeyError, IndexError) as exc:
            raise UndefinedTransition(f"payoff undefined at state {x!r}, actions ({i!r}, {j!r})") from exc
        if not 0 <= v <= 1:
            raise GameError(f"payoff {v} at ({x!r}, {i!r}, {j!r}) lies outside [0,1]")
        return v

    def step(self, x, i, j):
        """Successor state of a deterministic transition."""
        d = self.q(x, i, j)
        if not d.is_dirac:
            raise NotDeterministic(f"transition at ({x!r}, {i!r}, {j!r}) is not a Dirac mass: {d!r}")
        return d.the_state()

    def distance(self, x, y) -> Number:
        if self.metric is not None:
            return self.metric(x, y)
        if self.kind == "euclidean":
            return l1(x, y)
        return discrete_metric(x, y)

    @classmethod
    def from_tables(
        cls,
        actions_I: Iterable,
        actions_J: Iterable,
        transitions: Mapping,
        payoffs: Mapping,
        **kwargs,
    ) -> GameSpec:
        """Build a finite game from ``{(x,i,j): Dist}`` and ``{(x,i,j): payoff}``."""
        trans = {k: as_dist(v) for k, v in transitions.items()}
        pay = {k: as_number(v) for k, v in payoffs.items()}
        if "states" not in kwargs or kwargs["states"] is None:
            seen: dict = {}
            for (x, _, _), d in trans.items():
                seen.setdefault(x, None)
                for y in d:
                    seen.setdefault(y, None)
            kwargs["states"] = tuple(seen)
        game = cls(
            actions_I=tuple(actions_I),
            actions_J=tuple(actions_J),
            transition=lambda x, i, j: trans[(x, i, j)],
            payoff=lambda x, i, j: pay[(x, i, j)],
            **kwargs,
        )
        validate_finite(game)
        return game


def validate_finite(game: GameSpec) -> None:
    """Check that a finite game is closed and has all payoffs in [0,1]."""
    if game.states is None:
        raise GameError("game has no finite state enumeration")
    known = set(game.states)
    for x in game.states:
        for i, j in game.action_pairs:
            game.g(x, i, j)
            for y in game.q(x, i, j):
                if y not in known:
                    raise GameError(f"transition from {x!r} under ({i!r}, {j!r}) leaves the state set: {y!r}")


def linear_extension(game: GameSpec, z, i, j) -> Dist:
    """Mixture over the support of ``z`` of the one-step transitions."""
    z = as_dist(z)
    items = []
    for x, p in z.items():
        for y, w in game.q(x, i, j).items():
            items.append((y, p * w))
    return Dist(items)


def deterministic_play(game: GameSpec, x, pairs: Iterable[tuple]):
    for i, j in pairs:
        x = game.step(x, i, j)
    return x


def reachable_support(game: GameSpec, start, cap: int = 20000) -> list | None:
    """All states reachable from ``start`` (a state or a Dist).

    Returns the states in BFS order, or None when more than ``cap`` states
    are found.
    """
    z = as_dist(start)
    seen = dict.fromkeys(z)
    queue = deque(z)
    while queue:
        x = queue.popleft()
        for i, j in game.action_pairs:
            for y in game.q(x, i, j):
                if y not in seen:
                    seen[y] = None
                    if len(seen) > cap:
                        return None
                    queue.append(y)
    return list(seen)


def restrict(game: GameSpec, states: Iterable) -> GameSpec:
    """The same game with an explicit (closed) state enumeration."""
    states = tuple(states)
    from dataclasses import replace

    return replace(game, states=states)


def finite_closure(game: GameSpec, start, cap: int = 20000) -> GameSpec | None:
    states = reachable_support(game, start, cap)
    if states is None:
        return None
    return restrict(game, states)


@dataclass(frozen=True)
class MatrixGame:
    """Payoff matrix of a one-shot zero-sum game; the row player maximizes."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.size == 0:
            raise ValueError("matrix game must be a non-empty 2-d array")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix game entries must be finite")
        object.__setattr__(self, "entries", a)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


@dataclass(frozen=True)
class ValueTable:
    horizon: int | None
    values: dict

    def __post_init__(self):
        for x, v in self.values.items():
            if not -1e-9 <= v <= 1 + 1e-9:
                raise ValueError(f"value {v} at {x!r} outside [0,1]")

    def __getitem__(self, x) -> float:
        return self.values[x]


@dataclass
class FiniteModel:
    """Dense numeric form of a finite game: G[s,i,j] and P[s,i,j,s']."""

    states: list
    index: dict
    G: np.ndarray
    P: np.ndarray


def compile_finite(game: GameSpec) -> FiniteModel:
    if game.states is None:
        raise GameError(
            "value iteration needs a finite state set; for implicitly defined games "
            "use uniform_value_estimate, which builds finite auxiliary games"
        )
    states = list(game.states)
    index = {x: k for k, x in enumerate(states)}
    nI, nJ, nS = len(game.actions_I), len(game.actions_J), len(states)
    G = np.zeros((nS, nI, nJ))
    P = np.zeros((nS, nI, nJ, nS))
    for s, x in enumerate(states):
        for a, i in enumerate(game.actions_I):
            for b, j in enumerate(game.actions_J):
                G[s, a, b] = float(game.g(x, i, j))
                for y, p in game.q(x, i, j).items():
                    if y not in index:
                        raise GameError(f"transition from {x!r} leaves the state set: {y!r}")
                    P[s, a, b, index[y]] += float(p)
    return FiniteModel(states, index, G, P)
