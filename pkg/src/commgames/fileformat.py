"""Plain-text game files and JSON strategy files.

See docs/game_format.md for the grammar.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .dist import Dist, as_number
from .game import GameError, GameSpec, reachable_support
from .strategies import Mixture, PureSequence, Strategy, constant

MAGIC = "commgame 1"


def format_number(v) -> str:
    v = as_number(v)
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(v)


def parse_number(tok: str):
    return as_number(tok)


def format_state(x, kind: str) -> str:
    if kind == "euclidean":
        return "(" + ",".join(format_number(c) for c in x) + ")"
    s = str(x)
    if not s or any(c.isspace() for c in s) or ":" in s or s.startswith("(") or s.startswith("#"):
        raise GameError(f"symbolic state label {s!r} cannot be written to a game file")
    return s


def parse_state(tok: str, kind: str, dim: int | None = None):
    if kind == "euclidean":
        if not (tok.startswith("(") and tok.endswith(")")):
            raise GameError(f"euclidean state must look like (a,b,...): {tok!r}")
        coords = tuple(parse_number(c) for c in tok[1:-1].split(","))
        if dim is not None and len(coords) != dim:
            raise GameError(f"state {tok} has dimension {len(coords)}, expected {dim}")
        return coords
    return tok


def dumps_game(game: GameSpec, start=None, cap: int = 100_000) -> str:
    """Serialize a game with finitely many (reachable) states."""
    states = game.states
    if states is None:
        z = start if start is not None else game.start
        if z is None:
            raise GameError("implicit game: give a start state to enumerate the reachable states")
        states = reachable_support(game, z, cap)
        if states is None:
            raise GameError(f"more than {cap} reachable states; cannot write the game")
    kind = game.kind
    out = [MAGIC, f"name {game.name or 'game'}", f"kind {kind}"]
    if kind == "euclidean":
        out.append(f"dim {game.dim}")
    out.append("I " + " ".join(map(str, game.actions_I)))
    out.append("J " + " ".join(map(str, game.actions_J)))
    st = start if start is not None else game.start
    if st is not None:
        out.append(f"start {format_state(st, kind)}")
    if game.lipschitz is not None:
        out.append(f"lipschitz {format_number(game.lipschitz)}")
    out.append("states " + " ".join(format_state(x, kind) for x in states))
    for x in states:
        for i in game.actions_I:
            for j in game.actions_J:
                d = game.q(x, i, j)
                succ = " ".join(f"{format_state(y, kind)} {format_number(p)}" for y, p in d.items())
                out.append(f"{format_state(x, kind)} {i} {j} {format_number(game.g(x, i, j))} : {succ}")
    return "\n".join(out) + "\n"


def loads_game(text: str) -> GameSpec:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != MAGIC:
        raise GameError(f"not a game file: first line must be {MAGIC!r}")
    header: dict = {}
    records = []
    for ln in lines[1:]:
        key, _, rest = ln.partition(" ")
        if key in ("name", "kind", "dim", "I", "J", "start", "lipschitz", "states") and ":" not in ln:
            header[key] = rest.strip()
        else:
            records.append(ln)
    kind = header.get("kind", "symbolic")
    dim = int(header["dim"]) if "dim" in header else None
    if "I" not in header or "J" not in header:
        raise GameError("game file needs I and J lines")
    I, J = tuple(header["I"].split()), tuple(header["J"].split())
    trans, pay = {}, {}
    for ln in records:
        left, sep, right = ln.partition(":")
        if not sep:
            raise GameError(f"record without ':' separator: {ln!r}")
        toks = left.split()
        if len(toks) != 4:
            raise GameError(f"record must start with '<state> <i> <j> <payoff>': {ln!r}")
        x = parse_state(toks[0], kind, dim)
        i, j = toks[1], toks[2]
        if i not in I or j not in J:
            raise GameError(f"unknown action in record: {ln!r}")
        rt = right.split()
        if len(rt) % 2 or not rt:
            raise GameError(f"successors must come in '<state> <prob>' pairs: {ln!r}")
        d = Dist([(parse_state(rt[k], kind, dim), parse_number(rt[k + 1])) for k in range(0, len(rt), 2)])
        if (x, i, j) in trans:
            raise GameError(f"duplicate record for {toks[0]} {i} {j}")
        trans[(x, i, j)] = d
        pay[(x, i, j)] = parse_number(toks[3])
    states = tuple(parse_state(t, kind, dim) for t in header["states"].split()) if "states" in header else None
    if states is not None:
        missing = [(x, i, j) for x in states for i in I for j in J if (x, i, j) not in trans]
        if missing:
            raise GameError(f"no record for {missing[0]!r}")
    start = parse_state(header["start"], kind, dim) if "start" in header else None
    lip = parse_number(header["lipschitz"]) if "lipschitz" in header else None
    return GameSpec.from_tables(
        I, J, trans, pay, states=states, kind=kind, dim=dim, name=header.get("name", ""), lipschitz=lip, start=start
    )


def read_game(path) -> GameSpec:
    return loads_game(Path(path).read_text())


def write_game(game: GameSpec, path, start=None) -> None:
    Path(path).write_text(dumps_game(game, start))


# ---------------------------------------------------------------------------
# strategies


def _pure(spec: dict) -> PureSequence:
    return PureSequence(tuple(spec.get("prefix", ())), tuple(spec.get("cycle", ())))


def strategy_from_spec(spec) -> Strategy:
    """``{"prefix": [...], "cycle": [...]}`` or ``{"mixture": [{"weight": w, ...}, ...]}``."""
    if "mixture" in spec:
        return Mixture([(as_number(str(p["weight"])), _pure(p)) for p in spec["mixture"]])
    return _pure(spec)


def strategy_to_spec(s: Strategy) -> dict:
    if isinstance(s, Mixture):
        return {
            "mixture": [
                {"weight": format_number(w), "prefix": list(p.prefix), "cycle": list(p.cycle)} for w, p in s.parts
            ]
        }
    if isinstance(s, PureSequence):
        return {"prefix": list(s.prefix), "cycle": list(s.cycle)}
    raise TypeError("only pure sequences and their mixtures can be written")


def load_profile(path, game: GameSpec) -> tuple[Strategy, Strategy]:
    """Strategies of both players from a JSON file with keys player1/player2.

    A missing player2 entry is allowed when player 2 has a single action.
    """
    spec = json.loads(Path(path).read_text())
    if "player1" not in spec:
        raise GameError("strategy file needs a 'player1' entry")
    sigma = strategy_from_spec(spec["player1"])
    if "player2" in spec:
        tau = strategy_from_spec(spec["player2"])
    elif len(game.actions_J) == 1:
        tau = constant(game.actions_J[0])
    else:
        raise GameError("strategy file needs a 'player2' entry for a two-player game")
    return sigma, tau
