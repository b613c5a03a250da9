from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from commgames.dist import Dist
from commgames.gallery import big_match, gimbert, triangle
from commgames.game import GameSpec
from commgames.transforms import AbsorbingGameSpec, belief_game, dirac_belief
from commgames.values import discounted_value, limit_value, value_iterate_n

half = Fraction(1, 2)


def constant_game(c):
    trans = {("s", i, j): "s" for i in "ab" for j in "cd"}
    return GameSpec.from_tables("ab", "cd", trans, {k: c for k in trans}, states=("s",))


def alternating():
    trans = {("a", "*", "-"): "b", ("b", "*", "-"): "a"}
    return GameSpec.from_tables(("*",), ("-",), trans, {("a", "*", "-"): 0, ("b", "*", "-"): 1}, states=("a", "b"))


def as_tables(game):
    return (
        game.states,
        game.actions_I,
        game.actions_J,
        lambda x, i, j: dict(game.q(x, i, j)),
        lambda x, i, j: game.g(x, i, j),
    )


@pytest.mark.parametrize("c", [0, Fraction(3, 10), 1])
def test_constant_payoff(c):
    for t in value_iterate_n(constant_game(c), 5):
        assert t["s"] == pytest.approx(float(c))
    assert discounted_value(constant_game(c), 0.3)["s"] == pytest.approx(float(c))


def test_big_match_is_one_half_up_to_twenty():
    # brute-force recursion fixes the first three stages exactly
    exact = oracles.exact_values(*as_tables(big_match()), 3)
    assert [v["alpha"] for v in exact] == [half, half, half]
    for t in value_iterate_n(big_match(), 20):
        assert t["alpha"] == pytest.approx(0.5, abs=1e-9)


@pytest.mark.parametrize("game", [triangle(), gimbert(), big_match()], ids=lambda g: g.name)
def test_recursion_matches_exact_oracle(game):
    exact = oracles.exact_values(*as_tables(game), 6)
    got = value_iterate_n(game, 6)
    for e, t in zip(exact, got):
        for x in game.states:
            assert t[x] == pytest.approx(float(e[x]), abs=1e-9)


def test_random_absorbing_games_match_oracle():
    for seed in range(3):
        I, J, payoff, prob, absorbed, pay_abs = oracles.random_absorbing(seed)
        ag = AbsorbingGameSpec(I, J, payoff, prob, {k: Dist(v) for k, v in absorbed.items() if prob[k]}, pay_abs)
        g = ag.to_game()
        exact = oracles.exact_values(*as_tables(g), 4)
        got = value_iterate_n(g, 4)
        assert [t["alpha"] for t in got] == pytest.approx([float(e["alpha"]) for e in exact], abs=1e-9)


def test_values_bounded_and_slowly_varying():
    for game in (triangle(), big_match(), gimbert()):
        tables = value_iterate_n(game, 40)
        for n in range(1, 40):
            for x in game.states:
                a, b = tables[n - 1][x], tables[n][x]
                assert 0 <= a <= 1
                assert abs(a - b) <= 2 / (n + 1) + 1e-12


@given(st.fractions(min_value=Fraction(1, 50), max_value=1))
def test_alternation_discounted_closed_form(lam):
    # lam * sum_t (1-lam)^t g_t with g = 0, 1, 0, 1, ...
    v = discounted_value(alternating(), lam, tol=1e-12)
    assert v["a"] == pytest.approx(float((1 - lam) / (2 - lam)), abs=1e-9)


def test_alternation_small_discount_tends_to_half():
    assert discounted_value(alternating(), 0.001, tol=1e-9)["a"] == pytest.approx(0.5, abs=1e-3)


def test_big_match_discounted_matches_long_horizon():
    v = discounted_value(big_match(), Fraction(1, 4))["alpha"]
    assert v == pytest.approx(limit_value(big_match(), "alpha").value, abs=1e-3)


def test_limit_value_waits_until_all_states_can_be_reached():
    # payoff 1 only after three forced moves: v_1 = v_2 = 0 but the limit is 1
    trans = {(k, "*", "-"): min(k + 1, 3) for k in range(4)}
    pay = {(k, "*", "-"): int(k == 3) for k in range(4)}
    g = GameSpec.from_tables(("*",), ("-",), trans, pay, states=tuple(range(4)))
    est = limit_value(g, 0, tol=1e-2)
    assert est.converged and est.value == pytest.approx(1, abs=1e-2)


def test_belief_game_is_not_finite_for_value_iteration():
    with pytest.raises(ValueError):
        value_iterate_n(belief_game(triangle()), 2)
    assert dirac_belief(triangle(), "k1") == (0, 1, 0)
