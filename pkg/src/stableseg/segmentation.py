"""Segments, segmentations, surplus accounting and deviation semantics.

Coalitions are mass vectors, so "which consumer ends up where" is recorded
separately in a :class:`TransportPlan`: ``flow[a][b][i]`` is the mass of
value-``i`` consumers that sit in segment ``a`` of the source segmentation and
in segment ``b`` of the target.  Objection, blocking and plan-based Pareto
comparisons read consumer surplus through such a plan.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InvalidSegment, PartitionError, PlanError, ValidationError
from .market import (
    Coalition,
    Market,
    Number,
    add,
    as_fraction,
    optimal_prices,
    revenue,
    sum_coalitions,
)

ZERO = Fraction(0)


def consumer_surplus(value: Number, price: Number) -> Fraction:
    return max(as_fraction(value) - as_fraction(price), ZERO)


@dataclass(frozen=True)
class Segment:
    coalition: Coalition
    price: Fraction

    def __post_init__(self) -> None:
        price = as_fraction(self.price)
        object.__setattr__(self, "price", price)
        if self.coalition.is_empty():
            raise InvalidSegment("a segment needs a nonempty coalition")
        if price not in optimal_prices(self.coalition):
            raise InvalidSegment(
                f"price {price} is not optimal for {self.coalition!r}"
            )

    @property
    def market(self) -> Market:
        return self.coalition.market

    def surplus_mass(self) -> Fraction:
        """Total consumer surplus generated in this segment (not averaged)."""
        return sum(
            (m * consumer_surplus(v, self.price)
             for v, m in zip(self.market.values, self.coalition.masses)),
            ZERO,
        )


@dataclass(frozen=True)
class Segmentation:
    """A partition of the market into segments priced optimally."""

    segments: tuple[Segment, ...]

    def __post_init__(self) -> None:
        segments = tuple(self.segments)
        object.__setattr__(self, "segments", segments)
        if not segments:
            raise ValidationError("a segmentation needs at least one segment")
        market = segments[0].market
        if any(s.market != market for s in segments):
            raise ValidationError("segments belong to different markets")
        total = sum_coalitions((s.coalition for s in segments), market)
        if total.masses != market.masses:
            raise PartitionError(
                "segment coalitions do not sum to the market: "
                f"got {list(map(str, total.masses))}, expected {list(map(str, market.masses))}"
            )

    @classmethod
    def of(cls, *pairs: tuple[Coalition, Number]) -> "Segmentation":
        return cls(tuple(Segment(c, as_fraction(p)) for c, p in pairs))

    @property
    def market(self) -> Market:
        return self.segments[0].market

    @property
    def prices(self) -> tuple[Fraction, ...]:
        return tuple(s.price for s in self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __getitem__(self, index: int) -> Segment:
        return self.segments[index]


def trivial_segmentation(market: Market, price: Number | None = None) -> Segmentation:
    """Everybody in one segment; defaults to the lowest optimal price."""
    full = market.full()
    p = min(optimal_prices(full)) if price is None else as_fraction(price)
    return Segmentation((Segment(full, p),))


def isolated_segmentation(market: Market) -> Segmentation:
    """One segment per value, each priced at that value."""
    return Segmentation(tuple(
        Segment(market.coalition({v: m}), v) for v, m in zip(market.values, market.masses)
    ))


def canonicalize(s: Segmentation) -> Segmentation:
    """Merge same-price segments; output sorted by ascending price."""
    by_price: dict[Fraction, Coalition] = {}
    for seg in s.segments:
        if seg.price in by_price:
            by_price[seg.price] = add(by_price[seg.price], seg.coalition)
        else:
            by_price[seg.price] = seg.coalition
    return Segmentation(tuple(Segment(by_price[p], p) for p in sorted(by_price)))


def is_canonical(s: Segmentation) -> bool:
    return len(set(s.prices)) == len(s.segments)


def average_consumer_surplus(s: Segmentation) -> Fraction:
    return sum((seg.surplus_mass() for seg in s.segments), ZERO) / s.market.total_mass


def seller_revenue(s: Segmentation) -> Fraction:
    """Total (not averaged) revenue collected across segments."""
    return sum((revenue(seg.coalition, seg.price) for seg in s.segments), ZERO)


def traded_value(s: Segmentation) -> Fraction:
    """Total value of consumers who buy, i.e. consumer surplus plus revenue."""
    total = ZERO
    for seg in s.segments:
        for v, m in zip(s.market.values, seg.coalition.masses):
            if v >= seg.price:
                total += v * m
    return total


@dataclass(frozen=True)
class SurplusProfile:
    """For each value index, the mass facing each price."""

    market: Market
    prices_faced: tuple[tuple[tuple[Fraction, Fraction], ...], ...]

    def at(self, value: Number) -> dict[Fraction, Fraction]:
        return dict(self.prices_faced[self.market.index_of(value)])

    def surplus_distribution(self, index: int) -> dict[Fraction, Fraction]:
        v = self.market.values[index]
        dist: dict[Fraction, Fraction] = defaultdict(Fraction)
        for price, mass in self.prices_faced[index]:
            dist[consumer_surplus(v, price)] += mass
        return dict(dist)


def surplus_profile(s: Segmentation) -> SurplusProfile:
    market = s.market
    rows = []
    for i in range(market.n):
        faced: dict[Fraction, Fraction] = defaultdict(Fraction)
        for seg in s.segments:
            m = seg.coalition.masses[i]
            if m > 0:
                faced[seg.price] += m
        rows.append(tuple(sorted(faced.items())))
    return SurplusProfile(market, tuple(rows))


def weak_surplus_equivalent(s: Segmentation, t: Segmentation) -> bool:
    """Same price -> mass-vector map after canonicalization."""
    if s.market != t.market:
        raise ValidationError("segmentations belong to different markets")
    a = {seg.price: seg.coalition.masses for seg in canonicalize(s).segments}
    b = {seg.price: seg.coalition.masses for seg in canonicalize(t).segments}
    return a == b


def same_surplus_distribution(s: Segmentation, t: Segmentation) -> bool:
    """Every value class has the same distribution of surplus in both.

    This is the identity-free reading of surplus-equivalence: some relabelling
    of consumers within each value class leaves every consumer indifferent.
    Unlike :func:`weak_surplus_equivalent` it ignores which price a
    zero-surplus consumer faces.
    """
    ps, pt = surplus_profile(s), surplus_profile(t)
    return all(
        ps.surplus_distribution(i) == pt.surplus_distribution(i) for i in range(s.market.n)
    )


@dataclass(frozen=True)
class TransportPlan:
    """Mass flow between the segments of two segmentations of one market."""

    source: Segmentation
    target: Segmentation
    flow: tuple[tuple[tuple[Fraction, ...], ...], ...] = field(repr=False)

    def __post_init__(self) -> None:
        if self.source.market != self.target.market:
            raise PlanError("plan endpoints belong to different markets")
        flow = tuple(
            tuple(tuple(as_fraction(x) for x in cell) for cell in row) for row in self.flow
        )
        object.__setattr__(self, "flow", flow)
        k, k2, n = len(self.source), len(self.target), self.source.market.n
        if len(flow) != k or any(len(row) != k2 for row in flow):
            raise PlanError(f"flow must be a {k} x {k2} x {n} array")
        if any(len(cell) != n for row in flow for cell in row):
            raise PlanError(f"flow must be a {k} x {k2} x {n} array")
        if any(x < 0 for row in flow for cell in row for x in cell):
            raise PlanError("flows must be non-negative")
        for a, seg in enumerate(self.source.segments):
            for i in range(n):
                if sum((flow[a][b][i] for b in range(k2)), ZERO) != seg.coalition.masses[i]:
                    raise PlanError(f"row marginal mismatch at source segment {a}, value index {i}")
        for b, seg in enumerate(self.target.segments):
            for i in range(n):
                if sum((flow[a][b][i] for a in range(k)), ZERO) != seg.coalition.masses[i]:
                    raise PlanError(f"column marginal mismatch at target segment {b}, value index {i}")

    @classmethod
    def from_cells(
        cls,
        source: Segmentation,
        target: Segmentation,
        cells: Mapping[tuple[int, int, int], Number],
    ) -> "TransportPlan":
        """Build from a sparse ``{(a, b, i): mass}`` mapping."""
        k, k2, n = len(source), len(target), source.market.n
        flow = [[[ZERO] * n for _ in range(k2)] for _ in range(k)]
        for (a, b, i), mass in cells.items():
            flow[a][b][i] += as_fraction(mass)
        return cls(source, target, tuple(tuple(tuple(c) for c in row) for row in flow))

    @classmethod
    def independent(cls, source: Segmentation, target: Segmentation) -> "TransportPlan":
        """Within each value class, split every source cell proportionally to the target."""
        market = source.market
        cells = {}
        for a, sa in enumerate(source.segments):
            for b, tb in enumerate(target.segments):
                for i, f in enumerate(market.masses):
                    x = sa.coalition.masses[i] * tb.coalition.masses[i] / f
                    if x:
                        cells[a, b, i] = x
        return cls.from_cells(source, target, cells)

    @classmethod
    def identity(cls, s: Segmentation) -> "TransportPlan":
        cells = {
            (a, a, i): m
            for a, seg in enumerate(s.segments)
            for i, m in enumerate(seg.coalition.masses)
            if m
        }
        return cls.from_cells(s, s, cells)

    def reversed(self) -> "TransportPlan":
        k, k2 = len(self.source), len(self.target)
        flow = tuple(tuple(self.flow[a][b] for a in range(k)) for b in range(k2))
        return TransportPlan(self.target, self.source, flow)

    def cells(self) -> Iterable[tuple[int, int, int, Fraction]]:
        """Positive-mass cells as ``(a, b, i, mass)``."""
        for a, row in enumerate(self.flow):
            for b, cell in enumerate(row):
                for i, x in enumerate(cell):
                    if x > 0:
                        yield a, b, i, x

    def row(self, a: int) -> Iterable[tuple[int, int, Fraction]]:
        for b, cell in enumerate(self.flow[a]):
            for i, x in enumerate(cell):
                if x > 0:
                    yield b, i, x


# A deviation from an incumbent (source) to an alternative (target).
DeviationScenario = TransportPlan


def _check_index(plan: TransportPlan, segment_index: int) -> None:
    if not 0 <= segment_index < len(plan.source):
        raise IndexError(f"segment index {segment_index} out of range")


def objects_to(segment_index: int, plan: TransportPlan) -> bool:
    """Does source segment ``segment_index`` object to the target segmentation?

    Every member must weakly prefer the segment's price to the price it faces
    in the target, and some positive mass must strictly prefer it.
    """
    _check_index(plan, segment_index)
    seg = plan.source.segments[segment_index]
    values = plan.source.market.values
    strict = False
    for b, i, _ in plan.row(segment_index):
        here = consumer_surplus(values[i], seg.price)
        there = consumer_surplus(values[i], plan.target.segments[b].price)
        if here < there:
            return False
        if here > there:
            strict = True
    return strict


def blocks(plan: TransportPlan) -> bool:
    """Source blocks target: some source segment objects to it."""
    return any(objects_to(a, plan) for a in range(len(plan.source)))


def weakly_objects_to(segment_index: int, plan: TransportPlan) -> bool:
    _check_index(plan, segment_index)
    seg = plan.source.segments[segment_index]
    values = plan.source.market.values
    optimal = optimal_prices(seg.coalition)
    strict = False
    weak_at_optimal = False
    for b, i, _ in plan.row(segment_index):
        here = consumer_surplus(values[i], seg.price)
        there = consumer_surplus(values[i], plan.target.segments[b].price)
        if here > there:
            strict = True
        if here >= there and values[i] in optimal:
            weak_at_optimal = True
    return strict and weak_at_optimal


def weakly_blocks(plan: TransportPlan) -> bool:
    return any(weakly_objects_to(a, plan) for a in range(len(plan.source)))


def _tail_masses(dist: Mapping[Fraction, Fraction], levels: Sequence[Fraction]) -> list[Fraction]:
    return [sum((m for s, m in dist.items() if s >= level), ZERO) for level in levels]


def fosd_dominates(
    better: Mapping[Fraction, Fraction], worse: Mapping[Fraction, Fraction]
) -> bool:
    """Weak first-order stochastic dominance between two equal-mass distributions."""
    levels = sorted(set(better) | set(worse))
    return all(x >= y for x, y in zip(_tail_masses(better, levels), _tail_masses(worse, levels)))


def pareto_dominates(
    s: Segmentation, t: Segmentation, plan: TransportPlan | None = None
) -> bool:
    """Does ``s`` Pareto dominate ``t``?

    With a plan (source ``s``, target ``t``) the comparison is consumer by
    consumer.  Without one, the question is whether *some* assignment of
    consumers makes ``s`` dominate: per value class, the surplus distribution
    under ``s`` must first-order dominate the one under ``t``, and differ from
    it somewhere.
    """
    if s.market != t.market:
        raise ValidationError("segmentations belong to different markets")
    values = s.market.values
    if plan is not None:
        if plan.source != s or plan.target != t:
            raise PlanError("plan must run from the dominating to the dominated segmentation")
        strict = False
        for a, b, i, _ in plan.cells():
            here = consumer_surplus(values[i], s.segments[a].price)
            there = consumer_surplus(values[i], t.segments[b].price)
            if here < there:
                return False
            if here > there:
                strict = True
        return strict
    ps, pt = surplus_profile(s), surplus_profile(t)
    differs = False
    for i in range(s.market.n):
        ds, dt = ps.surplus_distribution(i), pt.surplus_distribution(i)
        if not fosd_dominates(ds, dt):
            return False
        if {k: v for k, v in ds.items() if v} != {k: v for k, v in dt.items() if v}:
            differs = True
    return differs


def strictly_better_under_every_coupling(s: Segmentation, t: Segmentation) -> bool:
    """However consumers are matched, a positive mass is strictly better off in ``s``.

    Equivalent to: in some value class the surplus distribution under ``t``
    fails to first-order dominate the one under ``s``.
    """
    ps, pt = surplus_profile(s), surplus_profile(t)
    return any(
        not fosd_dominates(pt.surplus_distribution(i), ps.surplus_distribution(i))
        for i in range(s.market.n)
    )
