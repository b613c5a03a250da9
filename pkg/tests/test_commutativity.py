from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commgames.commutativity import check_commutative, commute_pair, order_invariant, simplex_grid, two_step
from commgames.dist import Dist
from commgames.gallery import aumann_maschler, belief_map, big_match_transform, counter, gimbert, triangle
from commgames.game import GameError, GameSpec
from commgames.transforms import belief_game

half = Fraction(1, 2)


def test_simplex_grid_counts_and_sums():
    g = simplex_grid(3, 4)
    assert len(g) == 15
    assert all(sum(p) == 1 and min(p) >= 0 for p in g)
    assert len(set(g)) == len(g)
    with pytest.raises(ValueError):
        simplex_grid(0, 3)


def test_identical_pairs_commute_trivially():
    g = triangle()
    for x in g.states:
        for p in g.action_pairs:
            assert commute_pair(g, x, p, p) is None


def test_gimbert_witnesses_match_hand_computation():
    rep = check_commutative(gimbert())
    assert not rep.passed
    assert rep.checked == 4
    (w,) = rep.witnesses
    assert w.state == "alpha"
    # T then B: alpha/beta halves go to k0/k1; B then T stays at k0
    laws = {w.first, w.second}
    assert laws == {Dist.dirac("k0"), Dist([("k0", half), ("k1", half)])}
    assert w.distance == half


def test_markov_chain_game_is_commutative():
    # a single action pair commutes with itself
    assert check_commutative(belief_map(), [(1, 0), (half, half), (Fraction(1, 3), Fraction(2, 3))]).passed


def test_triangle_and_counter_commute():
    assert check_commutative(triangle()).passed
    assert check_commutative(counter()).passed
    assert check_commutative(big_match_transform()).passed


def test_belief_game_of_triangle_on_grid():
    bg = belief_game(triangle())
    assert check_commutative(bg, simplex_grid(3, 4)).passed


def test_no_states_is_an_error():
    with pytest.raises(GameError):
        check_commutative(belief_map())
    with pytest.raises(GameError):
        check_commutative(triangle(), [])


def test_aumann_maschler_commutes_on_grid():
    am = aumann_maschler()
    assert check_commutative(am, simplex_grid(2, 6), tol=1e-12).passed


def test_two_step_is_composition():
    g = triangle()
    z = two_step(g, "k0", ("B", "L"), ("B", "L"))
    assert z == Dist.dirac("k2")


def test_order_invariance():
    g = triangle()
    assert order_invariant(g, "k1", [("T", "L"), ("B", "R"), ("T", "L"), ("B", "L")])
    assert not order_invariant(gimbert(), "alpha", [("T", "-"), ("B", "-")])
    assert order_invariant(gimbert(), "alpha", [("T", "-"), ("T", "-")])


pair_st = st.tuples(st.sampled_from("TB"), st.sampled_from("LR"))


@given(st.sampled_from(simplex_grid(3, 6)), pair_st, pair_st)
def test_commute_pair_symmetric(p, a, b):
    bg = belief_game(triangle())
    w1, w2 = commute_pair(bg, p, a, b), commute_pair(bg, p, b, a)
    assert (w1 is None) == (w2 is None)


@settings(max_examples=25)
@given(st.lists(st.integers(0, 3), min_size=2, max_size=3))
def test_random_deterministic_rotation_game_commutes(steps):
    # any family of rotations of Z/5 commutes
    n = 5
    I = tuple(f"i{k}" for k in range(len(steps)))
    trans = {(x, i, "-"): (x + s) % n for x in range(n) for i, s in zip(I, steps)}
    g = GameSpec.from_tables(I, ("-",), trans, {k: 0 for k in trans}, states=tuple(range(n)))
    assert check_commutative(g).passed
