"""Exact long-run values and level oracles for finite deterministic one-player games.

In a finite deterministic MDP the uniform value at x is the largest mean
payoff of a cycle reachable from x. Walking to such a cycle and looping on
it is optimal, and the value stays constant along that play.
"""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Hashable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .dist import as_number, fraction_from_decimal
from .game import GameError, GameSpec, reachable_support
from .strategies import LevelOracle, PureSequence


@dataclass(frozen=True)
class CyclePlan:
    """Optimal pure play from ``state``: ``path`` once, then ``cycle`` forever.

    ``deficit`` is max_m (m * value - S_m) over the first len(path) + len(cycle)
    stages, S_m being the payoff sum; since every later full loop earns
    exactly len(cycle) * value, the average over any n stages is at least
    value - deficit / n.
    """

    state: Hashable
    value: Fraction
    path: tuple
    cycle: tuple
    deficit: Fraction

    @property
    def strategy(self) -> PureSequence:
        return PureSequence(self.path, self.cycle)

    def horizon(self, eps) -> int:
        """Smallest N such that every n >= N has average at least value - eps."""
        eps = fraction_from_decimal(eps)
        return max(1, math.ceil(self.deficit / eps))


def _edges(mdp: GameSpec, states: Sequence) -> dict:
    j = mdp.actions_J[0]
    return {x: [(i, mdp.step(x, i, j), Fraction(as_number(mdp.g(x, i, j)))) for i in mdp.actions_I] for x in states}


def _karp(nodes: list, edges: dict):
    """(mean, start node, actions) of a max-mean cycle inside one component, or None."""
    inside = set(nodes)
    m = len(nodes)
    D = [{nodes[0]: Fraction(0)}]
    pred: list[dict] = [{}]
    for _ in range(m):
        cur, back = {}, {}
        for u, du in D[-1].items():
            for a, v, w in edges[u]:
                if v in inside and (v not in cur or du + w > cur[v]):
                    cur[v] = du + w
                    back[v] = (u, a, w)
        D.append(cur)
        pred.append(back)
    best = None
    for v, dm in D[m].items():
        worst = min((dm - D[k][v]) / (m - k) for k in range(m) if v in D[k])
        if best is None or worst > best[0]:
            best = (worst, v)
    if best is None:
        return None
    mu, v = best
    # any cycle on a best length-m walk into v has mean mu
    walk, acts = [v], []
    for k in range(m, 0, -1):
        u, a, w = pred[k][walk[-1]]
        walk.append(u)
        acts.append((a, w))
    walk.reverse()
    acts.reverse()
    first = {}
    for t, node in enumerate(walk):
        if node in first:
            s = first[node]
            seg = acts[s:t]
            if sum(w for _, w in seg) / len(seg) == mu:
                return mu, node, tuple(a for a, _ in seg)
        first.setdefault(node, t)
    raise AssertionError("no optimal cycle on the critical walk")


def _components(states: list, edges: dict) -> list[list]:
    index = {x: k for k, x in enumerate(states)}
    rows, cols = [], []
    for x in states:
        for _, y, _ in edges[x]:
            rows.append(index[x])
            cols.append(index[y])
    graph = csr_matrix(([1] * len(rows), (rows, cols)), shape=(len(states), len(states)))
    n, labels = connected_components(graph, directed=True, connection="strong")
    comps: list[list] = [[] for _ in range(n)]
    for x, c in zip(states, labels):
        comps[c].append(x)
    return comps


def _path_to(edges: dict, x, targets: set):
    """Fewest actions from ``x`` into ``targets`` (BFS); returns (actions, entry state)."""
    back = {x: None}
    queue = deque([x])
    while queue:
        u = queue.popleft()
        if u in targets:
            acts = []
            v = u
            while back[v] is not None:
                p, a = back[v]
                acts.append(a)
                v = p
            return tuple(reversed(acts)), u
        for a, v, _ in edges[u]:
            if v not in back:
                back[v] = (u, a)
                queue.append(v)
    raise GameError("target set not reachable")


def _rotate(edges: dict, start, cycle: tuple, entry) -> tuple:
    """The same cycle, read from ``entry`` instead of ``start``."""
    x, k = start, 0
    by_action = {x: {a: y for a, y, _ in edges[x]} for x in edges}
    while x != entry:
        x = by_action[x][cycle[k]]
        k += 1
    return cycle[k:] + cycle[:k]


def cycle_plans(mdp: GameSpec, x1, cap: int = 20_000) -> dict:
    """:class:`CyclePlan` for every state reachable from ``x1``."""
    if not mdp.single_player:
        raise GameError("cycle plans need a one-player game")
    states = reachable_support(mdp, x1, cap)
    if states is None:
        raise GameError(f"more than {cap} reachable states")
    edges = _edges(mdp, states)
    comps = _components(list(states), edges)
    cyc = {}
    for c in comps:
        r = _karp(c, edges)
        if r is not None:
            cyc[id(c)] = r
    comp_of = {x: id(c) for c in comps for x in c}
    by_id = {id(c): c for c in comps}
    succ = {cid: set() for cid in by_id}
    for x in states:
        for _, y, _ in edges[x]:
            if comp_of[y] != comp_of[x]:
                succ[comp_of[x]].add(comp_of[y])
    best_from: dict = {}
    for root in by_id:
        stack = [root]
        while stack:
            cid = stack[-1]
            todo = [c for c in succ[cid] if c not in best_from]
            if todo:
                stack.extend(todo)
                continue
            stack.pop()
            cands = [(cyc[cid][0], cid)] if cid in cyc else []
            cands += [best_from[c] for c in succ[cid]]
            best_from[cid] = max(cands, key=lambda t: t[0])

    plans = {}
    for x in states:
        mu, cid = best_from[comp_of[x]]
        _, start, cycle = cyc[cid]
        on_cycle = set()
        y = start
        for a in cycle:
            on_cycle.add(y)
            y = next(z for b, z, _ in edges[y] if b == a)
        path, entry = _path_to(edges, x, on_cycle)
        loop = _rotate(edges, start, cycle, entry)
        plans[x] = CyclePlan(x, mu, path, loop, _deficit(edges, x, path + loop, mu))
    return plans


def _deficit(edges: dict, x, actions: tuple, mu: Fraction) -> Fraction:
    worst = Fraction(0)
    total = Fraction(0)
    for m, a in enumerate(actions, start=1):
        (y, w), = [(y, w) for b, y, w in edges[x] if b == a]
        total += w
        x = y
        worst = max(worst, m * mu - total)
    return worst


def uniform_value_mdp(mdp: GameSpec, x1) -> Fraction:
    """Exact uniform value of a finite deterministic one-player game."""
    return cycle_plans(mdp, x1)[x1].value


def cycle_oracle(mdp: GameSpec, x1, eps_schedule: Sequence) -> LevelOracle:
    """Level oracle: sigma_l(x) walks to an optimal cycle; N(l,x) from the deficit bound."""
    plans = cycle_plans(mdp, x1)
    eps = [fraction_from_decimal(e) for e in eps_schedule]

    def plan(x):
        try:
            return plans[x]
        except KeyError:
            raise GameError(f"state {x!r} is not reachable from {x1!r}") from None

    return LevelOracle(
        strategy=lambda l, x: plan(x).strategy,
        horizon=lambda l, x: plan(x).horizon(eps[l - 1]),
    )
