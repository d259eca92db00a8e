from fractions import Fraction as F

import pytest

from helpers import (
    EXAMPLE6_S,
    EXAMPLE6_S1,
    EXAMPLE6_S2,
    example2,
    example4,
    example4_market,
    example6_plan,
    equal_revenue_market,
)
from stableseg.constructions import mer_segmentation
from stableseg.errors import InvalidSegment, PartitionError, PlanError
from stableseg.market import Market
from stableseg.segmentation import (
    Segment,
    Segmentation,
    TransportPlan,
    average_consumer_surplus,
    blocks,
    canonicalize,
    consumer_surplus,
    fosd_dominates,
    is_canonical,
    isolated_segmentation,
    objects_to,
    pareto_dominates,
    same_surplus_distribution,
    seller_revenue,
    strictly_better_under_every_coupling,
    surplus_profile,
    traded_value,
    trivial_segmentation,
    weak_surplus_equivalent,
    weakly_blocks,
    weakly_objects_to,
)


def test_consumer_surplus():
    assert consumer_surplus(3, 1) == 2
    assert consumer_surplus(1, 3) == 0


def test_segment_requires_optimal_price():
    m = example4_market()
    with pytest.raises(InvalidSegment):
        Segment(m.full(), 1)


def test_partition_must_cover_market():
    m = example4_market()
    with pytest.raises(PartitionError):
        Segmentation.of((m.coalition({1: F(1, 3)}), 1))


def test_trivial_defaults_to_an_optimal_price():
    m = equal_revenue_market()
    assert trivial_segmentation(m).prices == (3,)


def test_canonicalize_merges_same_price():
    s = example2()
    k = canonicalize(s)
    assert k.prices == (1, 4)
    assert k[0].coalition.masses == (F(1, 2), F(1, 4), F(1, 8), 0)
    assert is_canonical(k) and not is_canonical(s)
    assert canonicalize(k) == k


def test_surplus_and_revenue_accounting():
    s = example4()
    assert average_consumer_surplus(s) == F(1, 3)
    assert seller_revenue(s) == F(5, 3)
    assert traded_value(s) == seller_revenue(s) + average_consumer_surplus(s)


def test_isolated_segmentation_leaves_no_surplus():
    s = isolated_segmentation(example4_market())
    assert average_consumer_surplus(s) == 0
    assert len(s) == 3


def test_surplus_profile_of_example4():
    prof = surplus_profile(example4())
    assert prof.at(2) == {1: F(1, 3)}
    assert prof.surplus_distribution(1) == {1: F(1, 3)}


def test_weak_equivalence():
    s = example2()
    assert weak_surplus_equivalent(s, canonicalize(s))
    mer, _ = mer_segmentation(example4_market())
    assert not weak_surplus_equivalent(example4(), mer)


def test_same_surplus_distribution_ignores_zero_surplus_prices():
    m = Market.from_pairs([(1, F(1, 2)), (4, F(1, 2))])
    everyone = trivial_segmentation(m, 4)
    split = isolated_segmentation(m)
    assert same_surplus_distribution(everyone, split)
    assert not weak_surplus_equivalent(everyone, split)


def test_transport_plan_marginals_checked():
    s = example4()
    with pytest.raises(PlanError):
        TransportPlan.from_cells(s, s, {(0, 0, 0): F(1, 3)})


def test_identity_plan_blocks_nothing():
    s = example4()
    plan = TransportPlan.identity(s)
    assert not blocks(plan)
    assert not weakly_blocks(plan)
    assert not pareto_dominates(s, s, plan)


def test_example6_blocking_relations():
    assert not blocks(example6_plan(EXAMPLE6_S, EXAMPLE6_S1))
    assert weakly_blocks(example6_plan(EXAMPLE6_S, EXAMPLE6_S1))
    plan = example6_plan(EXAMPLE6_S2, EXAMPLE6_S1)
    assert blocks(plan)
    assert objects_to(2, plan)
    assert not objects_to(0, plan)


def test_example6_second_segment_weakly_but_not_strictly_objects():
    plan = example6_plan(EXAMPLE6_S, EXAMPLE6_S1)
    assert weakly_objects_to(1, plan)
    assert not objects_to(1, plan)


def test_blocks_implies_weakly_blocks_on_example6():
    plan = example6_plan(EXAMPLE6_S2, EXAMPLE6_S1)
    assert blocks(plan) and weakly_blocks(plan)


def test_trivial_at_lowest_value_dominates_other_distributions():
    m = Market.from_pairs([(1, F(3, 4)), (2, F(1, 4))])
    trivial = trivial_segmentation(m, 1)
    other = isolated_segmentation(m)
    assert pareto_dominates(trivial, other)
    assert not pareto_dominates(other, trivial)


def test_pareto_plan_direction_checked():
    s, t = example4(), isolated_segmentation(example4_market())
    with pytest.raises(PlanError):
        pareto_dominates(s, t, TransportPlan.independent(t, s))


def test_fosd():
    assert fosd_dominates({2: F(1)}, {0: F(1, 2), 2: F(1, 2)})
    assert not fosd_dominates({0: F(1, 2), 2: F(1, 2)}, {1: F(1)})


def test_strictly_better_under_every_coupling_example4_vs_mer():
    s = example4()
    mer, _ = mer_segmentation(example4_market())
    assert strictly_better_under_every_coupling(s, mer)
    assert strictly_better_under_every_coupling(mer, s)
    assert not strictly_better_under_every_coupling(s, s)
