"""Consumers laid out on a line, for describing coalitions as unions of intervals.

Consumers are placed on ``[0, total_mass)`` in increasing order of value, so
value ``v_i`` occupies ``[F(v_{i-1}), F(v_i))``.  A coalition given as a list
of half-open intervals converts to a mass vector, and two interval-described
segmentations induce an exact transport plan from the overlaps.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .market import Coalition, Market, Number, as_fraction
from .segmentation import Segment, Segmentation, TransportPlan

Interval = tuple[Number, Number]


def value_ranges(market: Market) -> list[tuple[Fraction, Fraction]]:
    ranges, lo = [], Fraction(0)
    for m in market.masses:
        ranges.append((lo, lo + m))
        lo += m
    return ranges


def _overlap(a: tuple[Fraction, Fraction], b: tuple[Fraction, Fraction]) -> Fraction:
    return max(Fraction(0), min(a[1], b[1]) - max(a[0], b[0]))


def _normalize(intervals: Sequence[Interval]) -> list[tuple[Fraction, Fraction]]:
    return [(as_fraction(lo), as_fraction(hi)) for lo, hi in intervals]


def coalition_from_intervals(market: Market, intervals: Sequence[Interval]) -> Coalition:
    ranges = value_ranges(market)
    ivs = _normalize(intervals)
    return Coalition(market, tuple(sum((_overlap(r, iv) for iv in ivs), Fraction(0)) for r in ranges))


def segmentation_from_intervals(
    market: Market, segments: Sequence[tuple[Sequence[Interval], Number]]
) -> Segmentation:
    return Segmentation(tuple(
        Segment(coalition_from_intervals(market, ivs), as_fraction(p)) for ivs, p in segments
    ))


def interval_plan(
    market: Market,
    source: Sequence[tuple[Sequence[Interval], Number]],
    target: Sequence[tuple[Sequence[Interval], Number]],
) -> TransportPlan:
    """Plan in which every consumer keeps its position on the line."""
    src = segmentation_from_intervals(market, source)
    tgt = segmentation_from_intervals(market, target)
    ranges = value_ranges(market)
    cells = {}
    for a, (ivs_a, _) in enumerate(source):
        for b, (ivs_b, _) in enumerate(target):
            for i, r in enumerate(ranges):
                mass = Fraction(0)
                for x in _normalize(ivs_a):
                    for y in _normalize(ivs_b):
                        lo, hi = max(x[0], y[0], r[0]), min(x[1], y[1], r[1])
                        if hi > lo:
                            mass += hi - lo
                if mass:
                    cells[a, b, i] = mass
    return TransportPlan.from_cells(src, tgt, cells)
