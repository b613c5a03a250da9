from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from commgames.dist import Dist, as_number, fraction_from_decimal, l1

half = Fraction(1, 2)


def test_merges_duplicates_and_drops_zeros():
    d = Dist([("a", Fraction(1, 4)), ("a", Fraction(1, 4)), ("b", half), ("c", 0)])
    assert dict(d) == {"a": half, "b": half}


def test_rejects_unnormalized():
    with pytest.raises(ValueError):
        Dist([("a", half)])
    with pytest.raises(ValueError):
        Dist([("a", Fraction(3, 2)), ("b", -half)])


def test_float_weights_within_tolerance():
    d = Dist([("a", 0.1), ("b", 0.2), ("c", 0.7)])
    assert abs(d.total - 1) <= 1e-12
    assert not d.exact


def test_map_merges_images():
    d = Dist([("a", half), ("b", half)]).map(lambda _: "c")
    assert d == Dist.dirac("c")


def test_expect_and_tv():
    d = Dist([(0, Fraction(1, 4)), (1, Fraction(3, 4))])
    assert d.expect(lambda x: x) == Fraction(3, 4)
    assert d.tv(Dist.dirac(1)) == Fraction(1, 4)
    assert d.tv(d) == 0


def test_tv_matches_float_states_within_tolerance():
    a = Dist.dirac((0.5, 0.5))
    b = Dist.dirac((0.5 + 1e-12, 0.5 - 1e-12))
    assert a.tv(b, metric=l1) == 0


def test_sample_is_reproducible():
    d = Dist.uniform(range(5))
    draws = [d.sample(np.random.default_rng(3)) for _ in range(3)]
    assert len(set(draws)) == 1


def test_as_number_parses_rationals():
    assert as_number("3/4") == Fraction(3, 4)
    assert as_number(2) == Fraction(2)
    assert isinstance(as_number("0.25"), float)
    assert fraction_from_decimal(0.1) == Fraction(1, 10)


weights = st.lists(st.integers(min_value=0, max_value=20), min_size=1, max_size=8).filter(lambda w: sum(w) > 0)


@given(weights)
def test_normalized_rational_weights_sum_to_one(ws):
    total = sum(ws)
    d = Dist([(k % 3, Fraction(w, total)) for k, w in enumerate(ws)])
    assert d.total == 1
    assert len(set(d)) == len(d)
    assert all(p > 0 for p in d.values())


@given(weights, weights)
def test_mixture_is_normalized(a, b):
    da = Dist([(k, Fraction(w, sum(a))) for k, w in enumerate(a)])
    db = Dist([(k, Fraction(w, sum(b))) for k, w in enumerate(b)])
    m = Dist.mixture([(Fraction(1, 3), da), (Fraction(2, 3), db)])
    assert m.total == 1
    assert m.expect(lambda x: x) == Fraction(1, 3) * da.expect(lambda x: x) + Fraction(2, 3) * db.expect(lambda x: x)
