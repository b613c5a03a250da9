from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from commgames.dist import Dist
from commgames.gallery import big_match, counter, gimbert, triangle
from commgames.game import GameSpec, HistoryCapExceeded
from commgames.play import evaluate_strategy, gamma_lambda, gamma_n, simulate, stage_payoffs
from commgames.staircase import staircase_game, staircase_mixed_strategy, stay_sequence
from commgames.strategies import Behavioral, Mixture, PureSequence, Stationary, constant
from commgames.values import discounted_value, fix_stationary
from oracles import staircase_payoff

half = Fraction(1, 2)


def constant_game(c):
    trans = {("s", i, j): "s" for i in "ab" for j in "cd"}
    return GameSpec.from_tables("ab", "cd", trans, {k: c for k in trans}, states=("s",))


def one_then_zero():
    trans = {("a", "*", "-"): "b", ("b", "*", "-"): "b"}
    return GameSpec.from_tables(("*",), ("-",), trans, {("a", "*", "-"): 1, ("b", "*", "-"): 0})


def test_constant_payoff_gamma():
    g = constant_game(Fraction(2, 7))
    s = PureSequence(("a", "b"), ("b",))
    t = constant("c")
    for n in range(1, 6):
        for m in range(1, n + 1):
            assert gamma_n(g, "s", s, t, n, m) == Fraction(2, 7)


def test_staying_on_first_staircase_pays_half():
    game = staircase_game()
    curve = evaluate_strategy(game, (0, 0), stay_sequence(0, 0, 1), constant("-"), 50)
    assert set(curve) == {half}


def test_mixed_staircase_strategy_at_ten_by_branch_enumeration():
    game = staircase_game()
    mix = staircase_mixed_strategy()
    expected = Fraction(0)
    for w, branch in mix.parts:
        x, y = 0, 0
        total = Fraction(0)
        for t in range(1, 11):
            total += staircase_payoff(x, y)
            if branch.action(t) == "R":
                x += 1
            else:
                y += 1
        expected += w * total / 10
    got = gamma_n(game, (0, 0), mix, constant("-"), 10)
    assert got == expected
    assert got >= Fraction(3, 8)


def test_gamma_lambda_constant_is_exact():
    est, bound = gamma_lambda(constant_game(Fraction(1, 3)), "s", constant("a"), constant("c"), Fraction(1, 5), horizon_cap=20)
    assert est == Fraction(1, 3)
    assert bound == Fraction(4, 5) ** 20


def test_gamma_lambda_first_stage_only():
    est, bound = gamma_lambda(one_then_zero(), "a", constant("*"), constant("-"), half, horizon_cap=30)
    assert abs(est - half) <= bound


def test_gamma_lambda_big_match_stationary_against_fixed_point():
    mix = Dist([("T", half), ("B", half)])
    mixj = Dist([("L", half), ("R", half)])
    est, bound = gamma_lambda(big_match(), "alpha", Stationary(mix), Stationary(mixj), half, horizon_cap=60)
    ref = discounted_value(fix_stationary(big_match(), mix, mixj), 0.5, tol=1e-12)["alpha"]
    assert float(est) == pytest.approx(ref, abs=float(bound) + 1e-9)


plays = st.lists(st.sampled_from(["T", "B"]), min_size=1, max_size=6)


@given(plays, plays, st.data())
def test_gamma_convex_combination(a, b, data):
    g = triangle()
    n = min(len(a), len(b))
    m = data.draw(st.integers(2, n)) if n >= 2 else 1
    s = PureSequence(a[:n])
    t = PureSequence(["L" if x == "T" else "R" for x in b[:n]])
    lhs = gamma_n(g, "k0", s, t, n)
    if m == 1:
        assert lhs == gamma_n(g, "k0", s, t, n, 1)
        return
    rhs = Fraction(m - 1, n) * gamma_n(g, "k0", s, t, m - 1) + Fraction(n - m + 1, n) * gamma_n(g, "k0", s, t, n, m)
    assert lhs == rhs


def test_mixture_is_weight_average_of_branches():
    g = triangle()
    s1, s2 = PureSequence(("T", "B", "T")), PureSequence(("B", "B", "T"))
    mix = Mixture([(Fraction(1, 3), s1), (Fraction(2, 3), s2)])
    t = PureSequence(("L", "R", "L"))
    assert evaluate_strategy(g, "k1", mix, t, 3) == [
        Fraction(1, 3) * a + Fraction(2, 3) * b
        for a, b in zip(evaluate_strategy(g, "k1", s1, t, 3), evaluate_strategy(g, "k1", s2, t, 3))
    ]


def test_history_strategies_match_markov_path():
    g = triangle()
    s = PureSequence(("T", "B", "T", "T"))
    hist = Behavioral(lambda t, h: s.action(t))
    t = constant("L")
    assert stage_payoffs(g, "k0", s, t, 4) == stage_payoffs(g, "k0", hist, t, 4)


def test_history_cap_asks_for_simulation():
    g = triangle()
    follow = Behavioral(lambda t, h: "T")
    with pytest.raises(HistoryCapExceeded, match="simulate"):
        stage_payoffs(g, "k0", follow, constant("L"), 30, cap=50)


@pytest.mark.parametrize("seed", [0, 1, 12345])
def test_simulation_is_exact_on_deterministic_pure_play(seed):
    g = counter()
    s = PureSequence(("a", "b"), ("a",))
    exact = gamma_n(g, "0.0", s, constant("-"), 12)
    r = simulate(g, "0.0", s, constant("-"), 12, seed=seed, reps=5)
    assert r.exact_mean == exact
    assert r.stderr == 0


def test_simulation_is_reproducible_and_close():
    g = gimbert()
    s = Stationary({"alpha": "T", "beta": "B", "k0": "T", "k1": "T"})
    exact = gamma_n(g, "alpha", s, constant("-"), 8)
    r1 = simulate(g, "alpha", s, constant("-"), 8, seed=4, reps=2000)
    r2 = simulate(g, "alpha", s, constant("-"), 8, seed=4, reps=2000)
    assert r1 == r2
    assert abs(r1.mean - float(exact)) <= 3 * r1.stderr
    assert r1.ci_low <= r1.mean <= r1.ci_high


def test_simulation_of_mixture_within_three_standard_errors():
    g = triangle()
    mix = Mixture([(half, PureSequence((), ("T",))), (half, PureSequence((), ("B", "T")))])
    t = PureSequence((), ("L", "R"))
    exact = gamma_n(g, "k0", mix, t, 10)
    r = simulate(g, "k0", mix, t, 10, seed=9, reps=3000)
    assert abs(r.mean - float(exact)) <= 3 * r.stderr
