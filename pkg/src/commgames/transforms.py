"""Constructions that turn other games into commutative ones.

* absorbing games into commutative games with the same n-stage values,
* state-blind games into deterministic games on beliefs,
* repeated games with one-sided incomplete information into a game on the
  uninformed player's posterior.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .dist import Dist, as_number
from .game import GameError, GameSpec


ALPHA = "alpha'"
OMEGA = "omega"


@dataclass(frozen=True)
class AbsorbingGameSpec:
    """Stochastic game with one non-absorbing state ``alpha``.

    ``payoff[(i,j)]`` is g(alpha,i,j); ``absorb_prob[(i,j)]`` is the total
    probability of leaving alpha; ``absorbed[(i,j)]`` is the conditional law
    of the absorbing state reached (needed only where the probability is
    positive); ``absorbing_payoffs`` gives the frozen payoff of each
    absorbing state.
    """

    actions_I: tuple
    actions_J: tuple
    payoff: Mapping
    absorb_prob: Mapping
    absorbed: Mapping
    absorbing_payoffs: Mapping
    alpha: str = "alpha"
    name: str = "absorbing"

    def __post_init__(self):
        I, J = tuple(self.actions_I), tuple(self.actions_J)
        object.__setattr__(self, "actions_I", I)
        object.__setattr__(self, "actions_J", J)
        if self.alpha in self.absorbing_payoffs:
            raise GameError("the non-absorbing state cannot also be absorbing")
        for x, v in self.absorbing_payoffs.items():
            if not 0 <= as_number(v) <= 1:
                raise GameError(f"absorbing payoff at {x!r} outside [0,1]")
        for i in I:
            for j in J:
                if (i, j) not in self.payoff or (i, j) not in self.absorb_prob:
                    raise GameError(f"missing data for action pair ({i!r}, {j!r})")
                if not 0 <= as_number(self.payoff[(i, j)]) <= 1:
                    raise GameError(f"payoff at ({i!r}, {j!r}) outside [0,1]")
                p = as_number(self.absorb_prob[(i, j)])
                if not 0 <= p <= 1:
                    raise GameError(f"absorption probability {p} at ({i!r}, {j!r}) outside [0,1]")
                if p > 0:
                    d = self.absorbed.get((i, j))
                    if d is None:
                        raise GameError(f"no absorbed distribution for ({i!r}, {j!r})")
                    d = d if isinstance(d, Dist) else Dist(d)
                    for y in d:
                        if y not in self.absorbing_payoffs:
                            raise GameError(f"absorbed state {y!r} has no payoff")

    def conditional(self, i, j) -> Dist:
        d = self.absorbed[(i, j)]
        return d if isinstance(d, Dist) else Dist(d)

    def absorbed_payoff(self, i, j):
        """E_{q(alpha,i,j|X)} g."""
        return self.conditional(i, j).expect(lambda y: as_number(self.absorbing_payoffs[y]))

    def to_game(self) -> GameSpec:
        alpha = self.alpha
        X = tuple(self.absorbing_payoffs)

        def q(x, i, j):
            if x != alpha:
                if x not in self.absorbing_payoffs:
                    raise KeyError(x)
                return Dist.dirac(x)
            p = as_number(self.absorb_prob[(i, j)])
            if p == 0:
                return Dist.dirac(alpha)
            items = [(alpha, 1 - p)] + [(y, p * w) for y, w in self.conditional(i, j).items()]
            return Dist(items)

        def g(x, i, j):
            if x == alpha:
                return self.payoff[(i, j)]
            return self.absorbing_payoffs[x]

        return GameSpec(self.actions_I, self.actions_J, q, g, states=(alpha,) + X, name=self.name, start=alpha)

    @classmethod
    def from_game(cls, game: GameSpec, alpha) -> AbsorbingGameSpec:
        """Read an absorbing game off a finite GameSpec whose other states are absorbing."""
        if game.states is None:
            raise GameError("need a finite game")
        others = [x for x in game.states if x != alpha]
        pay_abs = {}
        for x in others:
            vals = set()
            for i, j in game.action_pairs:
                if game.q(x, i, j) != Dist.dirac(x):
                    raise GameError(f"state {x!r} is not absorbing")
                vals.add(game.g(x, i, j))
            if len(vals) != 1:
                raise GameError(f"absorbing state {x!r} has action-dependent payoff")
            pay_abs[x] = vals.pop()
        payoff, prob, absorbed = {}, {}, {}
        for i, j in game.action_pairs:
            d = game.q(alpha, i, j)
            payoff[(i, j)] = game.g(alpha, i, j)
            stay = d.get(alpha, 0)
            p = 1 - stay
            prob[(i, j)] = p
            if p > 0:
                absorbed[(i, j)] = Dist([(y, w / p) for y, w in d.items() if y != alpha])
        return cls(game.actions_I, game.actions_J, payoff, prob, absorbed, pay_abs, alpha=alpha, name=game.name)


def s_I(x, i):
    """Player 1's bookkeeping map on {alpha'} u {x_i} u {omega}."""
    if x == ALPHA:
        return f"x_{i}"
    if x == OMEGA:
        return OMEGA
    return x if x == f"x_{i}" else OMEGA


s_J = s_I


def split_label(x: str) -> tuple[str, str]:
    a, b = x.split("/")
    return a, b


def absorbing_to_commutative(abs_game: AbsorbingGameSpec) -> tuple[GameSpec, str]:
    """Commutative game with the same n-stage values at the returned start state.

    States are labels ``"a/b"`` with a, b in {alpha', x_<action>, omega};
    the start state is ``"alpha'/alpha'"``. With probability q(alpha,i,j)(alpha)
    the state stays put, otherwise it moves by the product bookkeeping map.
    States mixing alpha' with another component are unreachable from the
    start and get payoff 1/2.
    """
    I, J = abs_game.actions_I, abs_game.actions_J
    XI = [ALPHA] + [f"x_{i}" for i in I] + [OMEGA]
    XJ = [ALPHA] + [f"x_{j}" for j in J] + [OMEGA]
    if len(set(XI)) != len(XI) or len(set(XJ)) != len(XJ):
        raise GameError("action labels clash with the reserved state names")
    states = tuple(f"{a}/{b}" for a in XI for b in XJ)
    by_I = {f"x_{i}": i for i in I}
    by_J = {f"x_{j}": j for j in J}
    half = Fraction(1, 2)

    def q(x, i, j):
        a, b = split_label(x)
        p = as_number(abs_game.absorb_prob[(i, j)])
        moved = f"{s_I(a, i)}/{s_J(b, j)}"
        return Dist([(x, 1 - p), (moved, p)])

    def g(x, i, j):
        a, b = split_label(x)
        if a == ALPHA and b == ALPHA:
            return abs_game.payoff[(i, j)]
        if a in by_I and b in by_J:
            ii, jj = by_I[a], by_J[b]
            if as_number(abs_game.absorb_prob[(ii, jj)]) == 0:
                return half
            return abs_game.absorbed_payoff(ii, jj)
        if a in by_I and b == OMEGA:
            return Fraction(1)
        if a == OMEGA and b in by_J:
            return Fraction(0)
        return half

    start = f"{ALPHA}/{ALPHA}"
    game = GameSpec(I, J, q, g, states=states, name=f"{abs_game.name}-commutative", start=start)
    return game, start


# ---------------------------------------------------------------------------
# belief games


def belief_game(sb: GameSpec, name: str | None = None) -> GameSpec:
    """Deterministic game on beliefs over the hidden states of ``sb``.

    Beliefs are tuples aligned with ``sb.states``. The transition is the
    linear extension of the hidden transition, the payoff the linear
    extension of the hidden payoff.
    """
    if sb.states is None:
        raise GameError("the hidden game must have finitely many states")
    K = list(sb.states)
    index = {k: n for n, k in enumerate(K)}
    zero = Fraction(0)

    def q(p, i, j):
        if len(p) != len(K):
            raise GameError(f"belief {p!r} has wrong dimension")
        out = [zero] * len(K)
        for n, w in enumerate(p):
            if w == 0:
                continue
            for y, r in sb.q(K[n], i, j).items():
                out[index[y]] += w * r
        return Dist.dirac(tuple(out))

    def g(p, i, j):
        return sum((w * sb.g(K[n], i, j) for n, w in enumerate(p) if w != 0), zero)

    spread = max(max(sb.g(k, i, j) for k in K) - min(sb.g(k, i, j) for k in K) for i, j in sb.action_pairs)
    return GameSpec(
        sb.actions_I,
        sb.actions_J,
        q,
        g,
        kind="euclidean",
        dim=len(K),
        name=name or f"{sb.name}-belief",
        lipschitz=Fraction(spread) / 2 if not isinstance(spread, float) else spread / 2,
        start=dirac_belief(sb, sb.start) if sb.start is not None else None,
        meta={"hidden": sb, "labels": tuple(K)},
    )


def dirac_belief(sb: GameSpec, k) -> tuple:
    return tuple(Fraction(1) if s == k else Fraction(0) for s in sb.states)


def belief_of(sb: GameSpec, z) -> tuple:
    z = z if isinstance(z, Dist) else Dist.dirac(z)
    return tuple(Fraction(z.get(k, 0)) if not isinstance(z.get(k, 0), float) else z.get(k, 0) for k in sb.states)


# ---------------------------------------------------------------------------
# incomplete information on one side


def posterior_split(p: Sequence, a: Sequence[Sequence]) -> list[tuple[int, object, tuple]]:
    """Observation probabilities and posteriors for belief ``p`` and profile ``a``.

    ``a[k][i]`` is the probability of action i in hidden state k. Returns
    ``(i, a(i), posterior)`` for every observation with a(i) > 0.
    """
    K = len(p)
    I = len(a[0])
    out = []
    for i in range(I):
        ai = sum((p[k] * a[k][i] for k in range(K)), Fraction(0))
        if ai == 0:
            continue
        out.append((i, ai, tuple(p[k] * a[k][i] / ai for k in range(K))))
    if not out:
        raise GameError("degenerate action profile: every observation has probability zero")
    return out


def default_am_grid(n_rows: int, K: int) -> list[tuple]:
    """All pure profiles (one row per hidden state) plus the uniform profile."""
    rows = []
    for r in range(n_rows):
        rows.append(tuple(Fraction(int(c == r)) for c in range(n_rows)))
    grid = [tuple(prof) for prof in itertools.product(rows, repeat=K)]
    uni = tuple(Fraction(1, n_rows) for _ in range(n_rows))
    grid.append(tuple(uni for _ in range(K)))
    return grid


def aumann_maschler_game(matrices: Sequence, p1: Sequence, grid: Sequence | None = None, normalize: bool = True) -> GameSpec:
    """Game on player 2's posterior for a repeated game with one-sided information.

    Player 1's actions are the profiles in ``grid`` (one mixed row action
    per hidden state), labelled ``a0, a1, ...``; player 2 chooses a pure
    column ``b<j>`` or the uniform mixture ``bu``. Payoffs are rescaled
    affinely into [0,1] when ``normalize`` is set.
    """
    Gs = [[[as_number(v) for v in row] for row in M] for M in matrices]
    K = len(Gs)
    if K == 0:
        raise GameError("need at least one matrix")
    n_rows, n_cols = len(Gs[0]), len(Gs[0][0])
    if any(len(M) != n_rows or any(len(r) != n_cols for r in M) for M in Gs):
        raise GameError("all matrices must share dimensions")
    p1 = tuple(as_number(v) for v in p1)
    if len(p1) != K or sum(p1) != 1 and abs(sum(p1) - 1) > 1e-12:
        raise GameError("initial belief must be a distribution over the matrices")
    flat = [v for M in Gs for r in M for v in r]
    lo, hi = min(flat), max(flat)
    if normalize and (lo < 0 or hi > 1):
        span = hi - lo
        Gs = [[[(v - lo) / span for v in r] for r in M] for M in Gs]
    grid = default_am_grid(n_rows, K) if grid is None else [tuple(tuple(as_number(c) for c in ak) for ak in a) for a in grid]
    for a in grid:
        if len(a) != K or any(len(ak) != n_rows or sum(ak) != 1 or min(ak) < 0 for ak in a):
            raise GameError(f"invalid action profile {a!r}")
    A = {f"a{n}": a for n, a in enumerate(grid)}
    B = {f"b{j}": tuple(Fraction(int(c == j)) for c in range(n_cols)) for j in range(n_cols)}
    B["bu"] = tuple(Fraction(1, n_cols) for _ in range(n_cols))

    def q(p, ia, jb):
        a = A[ia]
        return Dist([(post, w) for _, w, post in posterior_split(p, a)])

    def g(p, ia, jb):
        a, b = A[ia], B[jb]
        return sum(
            (p[k] * a[k][i] * b[j] * Gs[k][i][j] for k in range(K) for i in range(n_rows) for j in range(n_cols)),
            Fraction(0),
        )

    return GameSpec(
        tuple(A),
        tuple(B),
        q,
        g,
        kind="euclidean",
        dim=K,
        name="aumann-maschler",
        start=p1,
        meta={"profiles": A, "columns": B, "matrices": Gs},
    )
