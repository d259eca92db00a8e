"""Acceptance criteria 1-10, one test each; every test prints a PASS/FAIL line."""

import random
from fractions import Fraction as F

from acceptance_log import criterion
from helpers import (
    EXAMPLE6_S,
    EXAMPLE6_S1,
    EXAMPLE6_S2,
    equal_revenue_market,
    example2,
    example4,
    example4_market,
    example6_plan,
    max_cs_not_stable,
    random_atomized_market,
    random_market,
    random_segmentation,
)
from stableseg.chains import ChainVariant, build_rv_chain, check_chain
from stableseg.constructions import greedy_stable_segmentation, mer_segmentation
from stableseg.cooperative import core_description, harsanyi_blocks, strong_blocks_some_equivalent
from stableseg.market import Coalition, add, optimal_prices, revenue, scale
from stableseg.oracle import (
    VerifyReport,
    check_necessity,
    check_witnesses,
    distinct_by_surplus,
    enumerate_segmentations,
    two_value_triple,
)
from stableseg.segmentation import (
    average_consumer_surplus,
    blocks,
    canonicalize,
    trivial_segmentation,
    weak_surplus_equivalent,
    weakly_blocks,
)
from stableseg.stability import is_efficient, is_saturated, is_stable


@criterion(1, 1.0, "Example 2 optimal prices and canonical saturation")
def test_criterion_1_example2():
    s = example2()
    assert optimal_prices(s[0].coalition) == {1, 2}
    assert optimal_prices(s[1].coalition) == {1, 3}
    assert is_saturated(s)
    assert not is_saturated(canonicalize(s))
    assert not is_stable(s)


@criterion(2, 1.0, "MER of the equal-revenue market")
def test_criterion_2_mer():
    s, trace = mer_segmentation(equal_revenue_market())
    assert trace.steps[0].revenue_level == F(2, 3)
    assert trace.steps[0].coalition.masses == (F(3, 9), F(1, 9), F(2, 9))
    assert trace.steps[1].coalition.masses[1:] == (F(1, 18), F(2, 18))
    assert is_stable(s)


@criterion(3, 1.0, "Example 4 surplus and canonical MER")
def test_criterion_3_example4():
    assert average_consumer_surplus(example4()) == F(1, 3)
    mer = canonicalize(mer_segmentation(example4_market())[0])
    assert average_consumer_surplus(mer) == F(2, 3)
    price2 = [seg for seg in mer if seg.price == 2]
    assert len(price2) == 1 and price2[0].coalition.masses == (0, F(2, 9), F(1, 9))


@criterion(4, 1.0, "max-CS segmentation is efficient, unsaturated, unstable")
def test_criterion_4_max_cs():
    s = max_cs_not_stable()
    assert is_efficient(s)
    assert not is_saturated(s)
    assert not is_stable(s)


@criterion(5, 1.0, "Example 6 blocking and weak blocking")
def test_criterion_5_example6():
    assert not blocks(example6_plan(EXAMPLE6_S, EXAMPLE6_S1))
    assert weakly_blocks(example6_plan(EXAMPLE6_S, EXAMPLE6_S1))
    assert blocks(example6_plan(EXAMPLE6_S2, EXAMPLE6_S1))


@criterion(6, 10.0, "core characterization over random markets")
def test_criterion_6_core():
    rng = random.Random(606)
    nonempty = 0
    for _ in range(200):
        m = random_market(rng, max_n=5)
        core = core_description(m)
        lowest_optimal = m.values[0] in optimal_prices(m.full())
        assert core.is_empty == (not lowest_optimal)
        if core.is_empty:
            continue
        nonempty += 1
        trivial = trivial_segmentation(m, m.values[0])
        assert is_stable(trivial)
        assert weak_surplus_equivalent(trivial, canonicalize(mer_segmentation(m)[0]))
        assert weak_surplus_equivalent(trivial, greedy_stable_segmentation(m))
    assert nonempty > 0


@criterion(7, 60.0, "oracle directional agreement on small atomizations")
def test_criterion_7_oracle():
    rng = random.Random(707)
    report = VerifyReport()
    for _ in range(50):
        am = random_atomized_market(rng, 6)
        segs = list(enumerate_segmentations(am))
        check_necessity(segs, distinct_by_surplus(segs), report)
        check_witnesses(segs, report)
    assert report.checks > 0
    assert report.ok, report.violations[:3]


@criterion(8, 60.0, "two-value triple equivalence over enumeration")
def test_criterion_8_two_value():
    rng = random.Random(808)
    unequal, inequivalent = [], []
    for _ in range(50):
        am = random_atomized_market(rng, 6, n_values=2)
        result = two_value_triple(list(enumerate_segmentations(am)))
        if not result.sets_equal:
            unequal.append(am.market)
        if not result.pairwise_equivalent:
            inequivalent.append(am.market)
    assert not unequal, f"sets differ on {len(unequal)} markets"
    assert not inequivalent, f"members not pairwise weak-surplus-equivalent on {len(inequivalent)} of 50 markets"


@criterion(9, 30.0, "blocking chains round-trip through the checker")
def test_criterion_9_chains():
    rng = random.Random(909)
    done = strong = 0
    while done < 100:
        m = random_market(rng, max_n=4, max_den=20)
        blocked, blocker = random_segmentation(rng, m), random_segmentation(rng, m)
        if average_consumer_surplus(blocker) == 0:
            continue
        done += 1
        assert harsanyi_blocks(blocker, blocked)
        chain = build_rv_chain(blocked, blocker, ChainVariant.WEAK)
        assert check_chain(chain, ChainVariant.WEAK, rv=True)
        if strong_blocks_some_equivalent(blocker, blocked):
            strong += 1
            chain = build_rv_chain(blocked, blocker, ChainVariant.STRONG)
            assert check_chain(chain, ChainVariant.STRONG, rv=True)
    assert strong > 0


def _split(rng, m):
    a = Coalition(m, tuple(x * F(rng.randint(0, 6), 6) for x in m.masses))
    return a, m.full() - a


@criterion(10, 60.0, "property suite over 1000 random markets")
def test_criterion_10_properties():
    rng = random.Random(1010)
    for _ in range(1000):
        m = random_market(rng, max_n=6, max_den=60)
        a, b = _split(rng, m)
        for p in m.values:
            assert revenue(add(a, b), p) == revenue(a, p) + revenue(b, p)
        if not a.is_empty() and not b.is_empty():
            for p in optimal_prices(a) & optimal_prices(b):
                assert p in optimal_prices(add(a, b))
        alpha = F(rng.randint(1, 60), rng.randint(1, 60))
        assert optimal_prices(scale(m.full(), alpha)) == optimal_prices(m.full())
        s = random_segmentation(rng, m)
        assert canonicalize(canonicalize(s)) == canonicalize(s)
        _, trace = mer_segmentation(m)
        for step in trace.steps:
            assert all(revenue(step.coalition, v) == step.revenue_level
                       for v in step.coalition.support_values)
        assert is_stable(greedy_stable_segmentation(m))


if __name__ == "__main__":
    import acceptance_log

    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(acceptance_log.summary_lines()))
