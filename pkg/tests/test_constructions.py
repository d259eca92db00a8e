from fractions import Fraction as F

import pytest

from helpers import equal_revenue_market, example4, example4_market
from stableseg.constructions import (
    equal_revenue_level,
    greedy_stable_segmentation,
    mer_segmentation,
    two_value_stable,
)
from stableseg.errors import WrongArity
from stableseg.market import Market, optimal_prices, revenue
from stableseg.segmentation import (
    average_consumer_surplus,
    canonicalize,
    trivial_segmentation,
    weak_surplus_equivalent,
)
from stableseg.stability import is_stable


def test_mer_equal_revenue_market_steps():
    s, trace = mer_segmentation(equal_revenue_market())
    assert trace.levels == (F(2, 3), F(1, 3), F(1, 2))
    assert trace.steps[0].coalition.masses == (F(3, 9), F(1, 9), F(2, 9))
    assert trace.steps[1].coalition.masses == (0, F(1, 18), F(2, 18))
    assert trace.steps[2].coalition.masses == (0, 0, F(3, 18))
    assert trace.steps[0].exhausted == (0,)
    assert s.prices == (1, 2, 3)
    assert is_stable(s)


def test_mer_steps_are_equal_revenue():
    _, trace = mer_segmentation(equal_revenue_market())
    for step in trace.steps:
        prices = step.coalition.support_values
        assert {revenue(step.coalition, p) for p in prices} == {step.revenue_level}
        assert optimal_prices(step.coalition) == set(prices)


def test_mer_example4_canonical():
    s, _ = mer_segmentation(example4_market())
    k = canonicalize(s)
    assert k.prices == (1, 2)
    assert k[1].coalition.masses == (0, F(2, 9), F(1, 9))
    assert average_consumer_surplus(k) == F(2, 3)


def test_mer_single_value_is_trivial():
    m = Market.from_pairs([(2, F(1))])
    s, trace = mer_segmentation(m)
    assert s == trivial_segmentation(m)
    assert len(trace.steps) == 1


def test_equal_revenue_level():
    lam, idx = equal_revenue_level([F(1), F(2), F(3)], [F(1, 3), F(1, 6), F(1, 2)])
    assert lam == F(2, 3) and idx == [0]


def test_greedy_reproduces_example4():
    assert greedy_stable_segmentation(example4_market()) == example4()


def test_greedy_equal_revenue_market():
    m = equal_revenue_market()
    g = greedy_stable_segmentation(m)
    assert g[0].coalition.masses == (F(1, 3), F(1, 6), F(1, 6))
    assert optimal_prices(g[0].coalition) == {1, 2}
    assert g.prices == (1, 3)
    assert is_stable(g)
    mer, _ = mer_segmentation(m)
    assert not weak_surplus_equivalent(g, mer)


def test_two_value_closed_form():
    m = Market.from_pairs([(1, F(1, 4)), (3, F(3, 4))])
    s = two_value_stable(m)
    assert s[0].coalition.masses == (F(1, 4), F(1, 8))
    assert is_stable(s)
    assert weak_surplus_equivalent(s, canonicalize(mer_segmentation(m)[0]))
    assert weak_surplus_equivalent(s, greedy_stable_segmentation(m))


def test_two_value_trivial_when_low_price_optimal():
    m = Market.from_pairs([(1, F(3, 4)), (2, F(1, 4))])
    assert two_value_stable(m) == trivial_segmentation(m, 1)


def test_two_value_arity():
    with pytest.raises(WrongArity):
        two_value_stable(example4_market())
