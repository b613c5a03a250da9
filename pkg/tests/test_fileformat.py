import json
from fractions import Fraction

import pytest

from commgames.fileformat import (
    dumps_game,
    load_profile,
    loads_game,
    read_game,
    strategy_from_spec,
    strategy_to_spec,
    write_game,
)
from commgames.gallery import ENTRIES, gallery
from commgames.game import GameError, reachable_support
from commgames.staircase import staircase_game
from commgames.strategies import Mixture, PureSequence

half = Fraction(1, 2)
FINITE_REACH = ["triangle", "gimbert", "big-match", "big-match-transform", "counter", "circle", "aumann-maschler"]
INFINITE_REACH = ["triangle-belief", "belief-map", "gimbert-belief"]


def assert_same_game(a, b, states):
    assert a.actions_I == b.actions_I and a.actions_J == b.actions_J
    for x in states:
        for p in a.action_pairs:
            assert a.q(x, *p) == b.q(x, *p)
            assert a.g(x, *p) == b.g(x, *p)


@pytest.mark.parametrize("name", FINITE_REACH)
def test_round_trip_of_finite_gallery_entries(name):
    g = gallery(name)
    back = loads_game(dumps_game(g))
    states = g.states or reachable_support(g, g.start)
    assert set(back.states) == set(states)
    assert back.start == g.start
    assert_same_game(g, back, states)


def test_enumerated_staircase_round_trip(tmp_path):
    g = staircase_game(window=5, enumerate_states=True)
    path = tmp_path / "stairs.game"
    write_game(g, path)
    back = read_game(path)
    assert back.kind == "euclidean" and back.dim == 2
    assert_same_game(g, back, g.states)


@pytest.mark.parametrize("name", INFINITE_REACH)
def test_infinite_reachable_sets_cannot_be_written(name):
    with pytest.raises(GameError):
        dumps_game(gallery(name), cap=500)


def test_every_entry_is_classified():
    assert set(ENTRIES) == set(FINITE_REACH + INFINITE_REACH + ["staircase"])


@pytest.mark.parametrize(
    "text,msg",
    [
        ("hello\n", "not a game file"),
        ("commgame 1\nI a\n", "I and J"),
        ("commgame 1\nI a\nJ b\nstates s\ns a b 0 s 1\n", "separator"),
        ("commgame 1\nI a\nJ b\nstates s\ns a b : s 1\n", "record must start"),
        ("commgame 1\nI a\nJ b\nstates s\ns c b 0 : s 1\n", "unknown action"),
        ("commgame 1\nI a\nJ b\nstates s\ns a b 0 : s\n", "pairs"),
        ("commgame 1\nI a\nJ b\nstates s t\ns a b 0 : s 1\n", "no record"),
        ("commgame 1\nI a\nJ b\nstates s\ns a b 0 : s 1\ns a b 0 : s 1\n", "duplicate"),
        ("commgame 1\nkind euclidean\ndim 2\nI a\nJ b\nstates (1,0)\n(1) a b 0 : (1,0) 1\n", "dimension"),
    ],
)
def test_parse_errors(text, msg):
    with pytest.raises(GameError, match=msg):
        loads_game(text)


def test_comments_and_rationals():
    text = """commgame 1  # header
    name tiny
    I a
    J b
    start s
    states s t
    s a b 1/3 : s 1/4 t 3/4
    t a b 1 : t 1
    """
    g = loads_game(text)
    assert g.name == "tiny" and g.start == "s"
    assert g.q("s", "a", "b")["t"] == Fraction(3, 4)
    assert g.g("s", "a", "b") == Fraction(1, 3)


def test_strategy_round_trip():
    s = Mixture([(Fraction(1, 3), PureSequence(("T",), ("B",))), (Fraction(2, 3), PureSequence((), ("T", "B")))])
    back = strategy_from_spec(json.loads(json.dumps(strategy_to_spec(s))))
    assert back.parts == s.parts
    p = PureSequence(("a", "b"), ("c",))
    assert strategy_from_spec(strategy_to_spec(p)) == p


def test_load_profile(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"player1": {"cycle": ["T"]}}))
    sigma, tau = load_profile(path, gallery("gimbert"))
    assert sigma == PureSequence((), ("T",)) and tau.action(3) == "-"
    with pytest.raises(GameError):
        load_profile(path, gallery("triangle"))
    path.write_text("{}")
    with pytest.raises(GameError):
        load_profile(path, gallery("gimbert"))
