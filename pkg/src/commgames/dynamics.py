"""Orbits of repeated action pairs, reachability and the uniform-value recursion.

All routines here assume a deterministic transition: every ``q(x, i, j)``
is a Dirac mass, so a play is determined by its action sequence.
"""

from __future__ import annotations

import logging
from collections import Counter, deque
from collections.abc import Callable, Hashable, Sequence
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .dist import Dist, Number, fraction_from_decimal
from .game import GameError, GameSpec, Inconclusive, NotDeterministic, finite_closure
from .values import limit_value

log = logging.getLogger(__name__)

DEFAULT_EPS_SCHEDULE = (0.1, 0.05, 0.02, 0.01)
MAX_PERIOD = 64


@dataclass(frozen=True)
class CycleReport:
    """Limit cycle reached by repeating one action pair.

    ``states`` lists the L cycle states in the order the pair visits them;
    ``stage`` is the first t with the t-th iterate within ``eps`` of the
    cycle. ``exact`` means the orbit itself entered the cycle; ``snapped``
    means a numerically detected limit was rounded to rationals and verified
    to be an exact cycle. ``converged`` is False when nothing was found
    within the iteration budget, in which case ``states`` is empty.
    """

    pair: tuple
    start: Hashable
    period: int
    states: tuple
    stage: int
    eps: float
    exact: bool
    snapped: bool = False
    converged: bool = True
    returns_to_start: bool = False


def _snap_coord(c, denominator: int):
    return Fraction(c).limit_denominator(denominator)


def _snap_state(x, denominator: int):
    if isinstance(x, tuple):
        return tuple(_snap_coord(c, denominator) for c in x)
    if isinstance(x, (float, Fraction)):
        return _snap_coord(x, denominator)
    return None


def _try_snap(game: GameSpec, pair, states: list, denominator: int):
    snapped = [_snap_state(s, denominator) for s in states]
    if any(s is None for s in snapped):
        return None
    L = len(snapped)
    for k, s in enumerate(snapped):
        try:
            if game.step(s, *pair) != snapped[(k + 1) % L]:
                return None
        except (KeyError, GameError):
            return None
    return snapped


def detect_cycle(
    game: GameSpec,
    x,
    pair: tuple,
    eps: float = 1e-9,
    max_iter: int = 10_000,
    max_period: int = MAX_PERIOD,
    snap_denominator: int = 10**6,
) -> CycleReport:
    """Find the eventual cycle of the orbit of ``x`` under ``pair``.

    Exact revisits are found through a table of visited states. Otherwise
    the orbit is scanned for the smallest period L <= ``max_period`` with
    ``|Q^{t+L} x - Q^t x|_1 <= eps``; the detected cycle is refined by
    further iteration and, when possible, snapped to an exact rational cycle.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    pair = tuple(pair)
    orbit = [x]
    seen = {x: 0}
    metric_ok = game.kind == "euclidean" or game.metric is not None
    for t in range(1, max_iter + 1):
        y = game.step(orbit[-1], *pair)
        if y in seen:
            s = seen[y]
            cyc = tuple(orbit[s:])
            return CycleReport(pair, x, len(cyc), cyc, s, eps, True, returns_to_start=s == 0)
        seen[y] = t
        orbit.append(y)
        if not metric_ok:
            continue
        for L in range(1, min(max_period, t) + 1):
            if game.distance(y, orbit[t - L]) <= eps:
                return _finish_float(game, x, pair, orbit, L, eps, max_iter, snap_denominator)
    return CycleReport(pair, x, 0, (), -1, eps, False, converged=False)


def _finish_float(game, x, pair, orbit, L, eps, max_iter, denominator) -> CycleReport:
    # refine: keep iterating while the cycle still moves noticeably
    budget = min(max_iter, len(orbit) + 20 * L + 200)
    while len(orbit) < budget:
        y = game.step(orbit[-1], *pair)
        orbit.append(y)
        if game.distance(y, orbit[-1 - L]) <= eps * 1e-6:
            break
    t = len(orbit) - 1
    raw = orbit[t - L + 1 : t + 1]
    # phase-align so that states[k] is the limit of Q^{mL + r} x with r = (t - L + 1 + k) mod L
    shift = (t - L + 1) % L
    raw = raw[-shift:] + raw[:-shift] if shift else raw
    snapped = _try_snap(game, pair, list(raw), denominator)
    cyc = tuple(snapped) if snapped is not None else tuple(raw)
    stage = t
    for s, z in enumerate(orbit):
        if game.distance(z, cyc[s % L]) <= eps:
            stage = s
            break
    back = any(game.distance(orbit[0], z) <= eps for z in orbit[1:])
    return CycleReport(pair, x, L, cyc, stage, eps, False, snapped=snapped is not None, returns_to_start=back)


@dataclass
class Classification:
    state: Hashable
    cyclic: list
    noncyclic: list
    reports: dict


def classify_actions(game: GameSpec, x, eps: float = 1e-9, max_iter: int = 10_000, max_period: int = MAX_PERIOD) -> Classification:
    """Split the action pairs at ``x`` into cyclic and non-cyclic ones.

    A pair is cyclic when repeating it brings the play back to ``x``
    (exactly for exact states, within ``eps`` otherwise).
    """
    cyc, nc, reps = [], [], {}
    for p in game.action_pairs:
        r = detect_cycle(game, x, p, eps, max_iter, max_period)
        reps[p] = r
        (cyc if r.returns_to_start else nc).append(p)
    return Classification(x, cyc, nc, reps)


class _Classifier:
    """Memoized classify_actions."""

    def __init__(self, game, eps, max_iter, max_period):
        self.game, self.eps, self.max_iter, self.max_period = game, eps, max_iter, max_period
        self.memo: dict = {}

    def __call__(self, x) -> Classification:
        if x not in self.memo:
            self.memo[x] = classify_actions(self.game, x, self.eps, self.max_iter, self.max_period)
        return self.memo[x]


def monotonicity_violations(game: GameSpec, x, eps: float = 1e-9, max_iter: int = 10_000) -> list:
    """Cycle states of non-cyclic pairs at ``x`` that fail to gain a cyclic pair."""
    clf = _Classifier(game, eps, max_iter, MAX_PERIOD)
    base = len(clf(x).cyclic)
    bad = []
    for p in clf(x).noncyclic:
        rep = clf(x).reports[p]
        if not rep.converged:
            continue
        for s in rep.states:
            if len(clf(s).cyclic) < base + 1:
                bad.append((p, s))
    return bad


# ---------------------------------------------------------------------------
# reachability


def reach(game: GameSpec, x1, depth: int, dedup: str = "state") -> dict:
    """States reachable with at most ``depth`` actions, mapped to the fewest actions needed.

    ``dedup="state"`` explores action sequences pruned by visited states;
    ``dedup="action-count"`` explores multisets of action pairs, which under
    commutativity reach the same states while keeping the frontier
    polynomial in ``depth`` even when states never repeat.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    out = {x1: 0}
    if dedup == "state":
        frontier = [x1]
        for d in range(1, depth + 1):
            nxt = []
            for x in frontier:
                for p in game.action_pairs:
                    y = game.step(x, *p)
                    if y not in out:
                        out[y] = d
                        nxt.append(y)
            frontier = nxt
        return out
    if dedup != "action-count":
        raise ValueError("dedup must be 'state' or 'action-count'")
    pairs = game.action_pairs
    # a multiset is a tuple of counts aligned with ``pairs``; extend only at
    # positions >= the last nonzero one so each multiset is built once
    frontier = {tuple([0] * len(pairs)): (x1, 0)}
    for d in range(1, depth + 1):
        nxt = {}
        for counts, (x, last) in frontier.items():
            for k in range(last, len(pairs)):
                c = list(counts)
                c[k] += 1
                y = game.step(x, *pairs[k])
                nxt[tuple(c)] = (y, k)
                if y not in out:
                    out[y] = d
        frontier = nxt
    return out


def count_vector(pairs: Sequence[tuple]) -> Counter:
    return Counter(tuple(p) for p in pairs)


def dominates(m: Counter, m2: Counter) -> bool:
    """Coordinatewise count dominance m >= m2."""
    return all(m.get(k, 0) >= v for k, v in m2.items())


def play_counts(game: GameSpec, x1, counts: Counter):
    """State reached after playing each pair as often as ``counts`` says (any order)."""
    x = x1
    for p in sorted(counts, key=repr):
        for _ in range(counts[p]):
            x = game.step(x, *p)
    return x


# ---------------------------------------------------------------------------
# Phi(eta) and the auxiliary game


@dataclass
class PhiResult:
    k: int
    interior: list
    frontier: list
    xi: dict
    anchors: dict
    eta: Number


def phi_eta(
    game: GameSpec,
    x1,
    eta,
    eps: float = 1e-9,
    max_iter: int = 10_000,
    max_states: int = 20_000,
    k: int | None = None,
    classifier: _Classifier | None = None,
) -> PhiResult:
    """Reachable states with no anchor within ``eta``, and their frontier.

    Anchors are states with at least ``k`` cyclic pairs (default: one more
    than at ``x1``). They are discovered as cycle states of non-cyclic
    pairs, and any visited state with enough cyclic pairs is its own
    anchor. ``interior`` is Phi(eta); ``frontier`` collects the successors
    of interior states that lie within ``eta`` of an anchor, and ``xi``
    maps each of them to such an anchor.
    """
    clf = classifier or _Classifier(game, eps, max_iter, MAX_PERIOD)
    if k is None:
        k = len(clf(x1).cyclic) + 1
    anchors: dict = {}

    def consider(s):
        if s not in anchors:
            c = len(clf(s).cyclic)
            if c >= k:
                anchors[s] = c

    def nearest(x):
        best = None
        for a in anchors:
            d = game.distance(x, a)
            if d <= eta and (best is None or d < best[0]):
                best = (d, a)
        return None if best is None else best[1]

    for _ in range(100):
        interior, frontier, xi = [], [], {}
        seen = {x1}
        queue = deque([x1])
        while queue:
            x = queue.popleft()
            cls = clf(x)
            if len(cls.cyclic) >= k:
                anchors[x] = len(cls.cyclic)
            for p in cls.noncyclic:
                rep = cls.reports[p]
                if rep.converged:
                    for s in rep.states:
                        consider(s)
            a = nearest(x)
            if a is not None:
                frontier.append(x)
                xi[x] = a
                continue
            interior.append(x)
            for p in game.action_pairs:
                y = game.step(x, *p)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
                    if len(seen) > max_states:
                        raise Inconclusive(
                            f"Phi(eta) exceeded {max_states} states",
                            {"eta": eta, "k": k, "interior": len(interior), "anchors": len(anchors)},
                        )
        # anchors found late may sit next to states already expanded
        if all(nearest(x) is None for x in interior):
            return PhiResult(k, interior, frontier, xi, dict(anchors), eta)
    raise Inconclusive("anchor discovery did not stabilize", {"eta": eta, "k": k})


@dataclass
class AuxiliaryGame:
    game: GameSpec
    xi: dict
    absorbed: dict
    eps: Number
    eta: Number
    x1: Hashable
    interior: list
    frontier: list


def auxiliary_game(game: GameSpec, x1, phi: PhiResult, anchor_value: Callable, eps=None) -> AuxiliaryGame:
    """Finite game on Phi(eta) and its frontier, frontier states frozen at anchor values."""
    inside = set(phi.interior)
    absorbed = {x: float(anchor_value(phi.xi[x])) for x in phi.frontier}
    for x, v in absorbed.items():
        if not 0 <= v <= 1:
            raise GameError(f"absorbed payoff {v} at {x!r} outside [0,1]")

    def q(x, i, j):
        if x in inside:
            return game.q(x, i, j)
        return Dist.dirac(x)

    def g(x, i, j):
        if x in inside:
            return game.g(x, i, j)
        return absorbed[x]

    states = tuple(phi.interior) + tuple(phi.frontier)
    aux = replace(game, transition=q, payoff=g, states=states, start=x1, name=f"{game.name}|aux")
    return AuxiliaryGame(aux, dict(phi.xi), absorbed, eps, phi.eta, x1, list(phi.interior), list(phi.frontier))


@dataclass
class LevelCertificate:
    eps: Number
    eta: Number
    interior: int
    frontier: int
    value: float
    horizon: int
    converged: bool


@dataclass
class UniformValueResult:
    state: Hashable
    value: float
    base_case: bool
    levels: list = field(default_factory=list)
    horizon: int = 0
    converged: bool = True


def _is_deterministic(game: GameSpec, x) -> bool:
    try:
        for p in game.action_pairs:
            game.step(x, *p)
    except NotDeterministic:
        return False
    return True


def uniform_value_estimate(
    game: GameSpec,
    x1,
    eps_schedule: Sequence = DEFAULT_EPS_SCHEDULE,
    tol: float = 1e-3,
    eta_of: Callable | None = None,
    n_max: int = 8192,
    base_cap: int = 5000,
    cycle_eps: float = 1e-9,
    max_iter: int = 10_000,
    max_states: int = 20_000,
    _cache: dict | None = None,
    _classifier: _Classifier | None = None,
) -> UniformValueResult:
    """Estimate the uniform value at ``x1`` by induction on cyclic pairs.

    If only finitely many states are reachable, the value is the limit of
    v_n on that finite game (doubling until |v_n - v_2n| <= tol). Otherwise,
    for each epsilon, an auxiliary finite game is built on Phi(eta) whose
    frontier states are frozen at the (recursively estimated) uniform value
    of their anchors; the estimate is the value of the last auxiliary game.
    ``eta_of(eps)`` defaults to ``eps / game.lipschitz``.
    """
    cache = {} if _cache is None else _cache
    if x1 in cache:
        return cache[x1]
    closure = finite_closure(game, x1, cap=base_cap)
    if closure is not None:
        est = limit_value(closure, x1, tol, n_max)
        res = UniformValueResult(x1, min(max(est.value, 0.0), 1.0), True, [], est.horizon, est.converged)
        cache[x1] = res
        return res
    if not _is_deterministic(game, x1):
        raise GameError("infinite reachable set with a random transition: the induction needs a deterministic game")
    if eta_of is None:
        if not game.lipschitz:
            raise GameError("need eta_of or a Lipschitz constant for the payoff")
        G = fraction_from_decimal(game.lipschitz)
        eta_of = lambda e: fraction_from_decimal(e) / G  # noqa: E731
    clf = _classifier or _Classifier(game, cycle_eps, max_iter, MAX_PERIOD)
    levels = []
    for eps in eps_schedule:
        eta = eta_of(eps)
        phi = phi_eta(game, x1, eta, cycle_eps, max_iter, max_states, classifier=clf)

        def anchor_value(a):
            return uniform_value_estimate(
                game, a, eps_schedule, tol, eta_of, n_max, base_cap, cycle_eps, max_iter, max_states, cache, clf
            ).value

        aux = auxiliary_game(game, x1, phi, anchor_value, eps)
        est = limit_value(aux.game, x1, tol, n_max)
        levels.append(
            LevelCertificate(eps, eta, len(phi.interior), len(phi.frontier), est.value, est.horizon, est.converged)
        )
        log.info("eps=%s eta=%s |Phi|=%d frontier=%d v=%.6f", eps, eta, len(phi.interior), len(phi.frontier), est.value)
    last = levels[-1]
    res = UniformValueResult(x1, min(max(last.value, 0.0), 1.0), False, levels, last.horizon, all(l.converged for l in levels))
    cache[x1] = res
    return res
