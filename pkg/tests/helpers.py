"""Random instance generators shared by the property and acceptance tests."""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from hypothesis import strategies as st

from stableseg.intervals import interval_plan, segmentation_from_intervals
from stableseg.market import Coalition, Market, optimal_prices
from stableseg.oracle import AtomizedMarket, atomize
from stableseg.segmentation import Segment, Segmentation

DATA = Path(__file__).parent / "data"
F = Fraction


def random_fraction(rng: random.Random, max_den: int = 60, max_num: int | None = None) -> Fraction:
    q = rng.randint(1, max_den)
    return F(rng.randint(1, max_num or q), q)


def random_market(rng: random.Random, max_n: int = 6, max_den: int = 60) -> Market:
    n = rng.randint(1, max_n)
    values: set[Fraction] = set()
    while len(values) < n:
        values.add(random_fraction(rng, max_den, max_num=6 * max_den))
    return Market(tuple(sorted(values)), tuple(random_fraction(rng, max_den) for _ in range(n)))


def random_atomized_market(rng: random.Random, max_atoms: int = 6, n_values: int | None = None) -> AtomizedMarket:
    n = n_values or rng.randint(1, min(3, max_atoms))
    total = rng.randint(n, max_atoms)
    counts = [1] * n
    for _ in range(total - n):
        counts[rng.randrange(n)] += 1
    values = sorted(rng.sample(range(1, 9), n))
    market = Market(tuple(F(v) for v in values), tuple(F(c, total) for c in counts))
    return atomize(market, total, cap=max_atoms)


def random_segmentation(rng: random.Random, market: Market, max_parts: int = 4) -> Segmentation:
    """Split every value's mass at random among up to ``max_parts`` coalitions."""
    k = rng.randint(1, max_parts)
    rows = [[F(0)] * market.n for _ in range(k)]
    for i, mass in enumerate(market.masses):
        weights = [F(rng.randint(0, 6)) for _ in range(k)]
        if not any(weights):
            weights[rng.randrange(k)] = F(1)
        total = sum(weights)
        for j in range(k):
            rows[j][i] = mass * weights[j] / total
    segments = []
    for row in rows:
        c = Coalition(market, tuple(row))
        if not c.is_empty():
            segments.append(Segment(c, rng.choice(sorted(optimal_prices(c)))))
    return Segmentation(tuple(segments))


@st.composite
def markets(draw, max_n: int = 6, max_den: int = 60) -> Market:
    n = draw(st.integers(1, max_n))
    dens = st.integers(1, max_den)
    values = draw(st.lists(
        st.builds(lambda p, q: F(p, q), st.integers(1, 6 * max_den), dens),
        min_size=n, max_size=n, unique=True,
    ))
    masses = draw(st.lists(
        st.builds(lambda p, q: F(p, q), st.integers(1, max_den), dens),
        min_size=n, max_size=n,
    ))
    return Market(tuple(sorted(values)), tuple(masses))


@st.composite
def segmentations(draw, max_n: int = 5, max_parts: int = 4) -> Segmentation:
    market = draw(markets(max_n=max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_segmentation(random.Random(seed), market, max_parts)


# -- fixed instances ------------------------------------------------------

def example2_market() -> Market:
    return Market.from_pairs([(1, F(1, 2)), (2, F(1, 4)), (3, F(1, 8)), (4, F(1, 8))])


EXAMPLE2_S = [
    ([(F(1, 4), F(3, 4))], 1),
    ([(0, F(1, 4)), (F(3, 4), F(7, 8))], 1),
    ([(F(7, 8), 1)], 4),
]


def example2() -> Segmentation:
    return segmentation_from_intervals(example2_market(), EXAMPLE2_S)


def equal_revenue_market() -> Market:
    return Market.from_pairs([(1, F(1, 3)), (2, F(1, 6)), (3, F(1, 2))])


def max_cs_not_stable() -> Segmentation:
    return segmentation_from_intervals(equal_revenue_market(), [
        ([(0, F(1, 3)), (F(5, 6), 1)], 1),
        ([(F(1, 3), F(5, 6))], 2),
    ])


def example4_market() -> Market:
    return Market.from_pairs([(1, F(1, 3)), (2, F(1, 3)), (3, F(1, 3))])


def example4() -> Segmentation:
    m = example4_market()
    return Segmentation.of((m.coalition({1: F(1, 3), 2: F(1, 3)}), 1), (m.coalition({3: F(1, 3)}), 3))


def example6_market() -> Market:
    return Market.from_pairs([(1, F(6, 21)), (2, F(4, 21)), (3, F(11, 21))])


def _t(k: int) -> Fraction:
    return F(k, 21)


EXAMPLE6_S = [([(0, _t(6)), (_t(18), 1)], 1), ([(_t(6), _t(18))], 2)]
EXAMPLE6_S1 = [([(0, _t(7)), (_t(18), 1)], 1), ([(_t(7), _t(18))], 3)]
EXAMPLE6_S2 = [
    ([(0, _t(6)), (_t(18), 1)], 1),
    ([(_t(6), _t(7)), (_t(16), _t(18))], 2),
    ([(_t(7), _t(16))], 2),
]


def example6(layout=EXAMPLE6_S) -> Segmentation:
    return segmentation_from_intervals(example6_market(), layout)


def example6_plan(source, target):
    return interval_plan(example6_market(), source, target)
