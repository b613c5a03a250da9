"""Finite-support distributions and number/state helpers.

Probabilities are kept as :class:`fractions.Fraction` whenever the inputs
are rational, so identities such as commutativity can be checked exactly.
Floats are accepted everywhere and simply propagate.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping
from fractions import Fraction
from numbers import Rational
from typing import Any, Union

Number = Union[Fraction, float]
State = Hashable

FLOAT_SUM_TOL = 1e-12
STATE_TOL = 1e-9


def as_number(x: Any) -> Number:
    """Convert ints, rationals and ``"p/q"`` strings to Fraction; keep floats."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        s = x.strip()
        if any(c in s for c in ".eE") and "/" not in s:
            return float(s)
        return Fraction(s)
    # numpy scalars and the like
    if hasattr(x, "item"):
        return as_number(x.item())
    raise TypeError(f"cannot interpret {x!r} as a number")


def is_exact(x: Any) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def fraction_from_decimal(x: Any) -> Fraction:
    """Fraction via the decimal representation, so 0.2 becomes 1/5."""
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(as_number(x))


def state_is_exact(x: State) -> bool:
    if isinstance(x, tuple):
        return all(is_exact(c) for c in x)
    return not isinstance(x, float)


def l1(a: tuple, b: tuple) -> Number:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return sum((abs(u - v) for u, v in zip(a, b)), Fraction(0))


def discrete_metric(a: State, b: State) -> Number:
    return Fraction(0) if a == b else Fraction(1)


class Dist(Mapping):
    """Probability distribution with finite support.

    Duplicate states are merged and zero-probability entries dropped on
    construction, so two distributions describing the same law compare
    equal (exactly, when all probabilities are rational).
    """

    __slots__ = ("_p", "_hash")

    def __init__(self, items: Iterable[tuple[State, Any]] | Mapping, *, check: bool = True):
        if isinstance(items, Mapping):
            items = items.items()
        p: dict = {}
        for x, w in items:
            w = as_number(w)
            if w < 0:
                raise ValueError(f"negative probability {w} for state {x!r}")
            if w == 0:
                continue
            p[x] = p.get(x, 0) + w
        self._p = p
        self._hash = None
        if check:
            total = sum(p.values(), Fraction(0))
            if isinstance(total, Fraction):
                if total != 1:
                    raise ValueError(f"probabilities sum to {total}, not 1")
            elif abs(total - 1) > FLOAT_SUM_TOL:
                raise ValueError(f"probabilities sum to {total!r}, not 1")

    @classmethod
    def dirac(cls, x: State) -> Dist:
        return cls([(x, Fraction(1))], check=False)

    @classmethod
    def uniform(cls, xs: Iterable[State]) -> Dist:
        xs = list(xs)
        if not xs:
            raise ValueError("uniform distribution over an empty set")
        w = Fraction(1, len(xs))
        return cls([(x, w) for x in xs])

    @classmethod
    def mixture(cls, parts: Iterable[tuple[Any, Dist]]) -> Dist:
        """Sum of ``w * d`` over ``(w, d)`` pairs; the weights must sum to one."""
        items = []
        for w, d in parts:
            w = as_number(w)
            items.extend((x, w * p) for x, p in d._p.items())
        return cls(items)

    def __getitem__(self, x: State) -> Number:
        return self._p[x]

    def get(self, x: State, default: Any = 0) -> Any:
        return self._p.get(x, default)

    def __iter__(self) -> Iterator[State]:
        return iter(self._p)

    def __len__(self) -> int:
        return len(self._p)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Dist):
            return self._p == other._p
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._p.items()))
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{x!r}: {p}" for x, p in self._p.items())
        return f"Dist({{{inner}}})"

    @property
    def support(self) -> list:
        return list(self._p)

    @property
    def is_dirac(self) -> bool:
        return len(self._p) == 1

    def the_state(self) -> State:
        """The single support point of a Dirac distribution."""
        if len(self._p) != 1:
            raise ValueError(f"not a Dirac distribution: {self!r}")
        return next(iter(self._p))

    @property
    def total(self) -> Number:
        return sum(self._p.values(), Fraction(0))

    @property
    def exact(self) -> bool:
        return all(isinstance(w, Fraction) for w in self._p.values())

    def map(self, f: Callable[[State], State]) -> Dist:
        return Dist(((f(x), p) for x, p in self._p.items()), check=False)

    def expect(self, f: Callable[[State], Any]) -> Number:
        return sum((p * f(x) for x, p in self._p.items()), Fraction(0))

    def tv(self, other: Dist, metric: Callable | None = None, state_tol: float = STATE_TOL) -> Number:
        """Total-variation distance.

        States are matched by equality; when ``metric`` is given, states of
        ``other`` within ``state_tol`` of a state of ``self`` are identified
        with it first (needed for float-valued states).
        """
        q = dict(other._p)
        if metric is not None:
            keys = list(self._p)
            remapped: dict = {}
            for y, w in q.items():
                target = y
                if y not in self._p:
                    for x in keys:
                        if metric(x, y) <= state_tol:
                            target = x
                            break
                remapped[target] = remapped.get(target, 0) + w
            q = remapped
        keys = set(self._p) | set(q)
        total = sum((abs(self._p.get(x, 0) - q.get(x, 0)) for x in keys), Fraction(0))
        return total / 2

    def sample(self, rng) -> State:
        xs = list(self._p)
        ws = [float(w) for w in self._p.values()]
        u = rng.random() * math.fsum(ws)
        acc = 0.0
        for x, w in zip(xs, ws):
            acc += w
            if u < acc:
                return x
        return xs[-1]


def as_dist(z: Any) -> Dist:
    return z if isinstance(z, Dist) else Dist.dirac(z)
