"""Efficiency, saturation and the stability test, plus constructive witnesses.

A segmentation is stable exactly when its canonical form is efficient (every
segment is priced at its lowest value) and saturated (no low-priced segment
could absorb consumers from a higher-priced one without its price rising).
When either property fails, the witness builders return an explicit
alternative segmentation together with the plan that certifies it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .errors import NotApplicable
from .market import (
    Coalition,
    max_supported_value,
    min_supported_value,
    optimal_prices,
    revenue,
)
from .segmentation import Segment, Segmentation, TransportPlan, canonicalize

Witness = tuple[Segmentation, TransportPlan]


def is_efficient(s: Segmentation) -> bool:
    return all(seg.price == min_supported_value(seg.coalition) for seg in s.segments)


def _saturation_gap(lower: Segment, upper: Segment) -> bool:
    """True when some optimal price of ``lower`` lies in (p, lowest value of ``upper``]."""
    ceiling = min_supported_value(upper.coalition)
    return any(lower.price < q <= ceiling for q in optimal_prices(lower.coalition))


def _unsaturated_pairs(s: Segmentation):
    order = sorted(range(len(s)), key=lambda a: (s[a].price, a))
    for i in order:
        for j in order:
            if s[i].price < s[j].price and not _saturation_gap(s[i], s[j]):
                yield i, j


def is_saturated(s: Segmentation) -> bool:
    return next(_unsaturated_pairs(s), None) is None


def is_stable(s: Segmentation) -> bool:
    k = canonicalize(s)
    return is_efficient(k) and is_saturated(k)


def is_fragmentation_proof(s: Segmentation) -> bool:
    # Equivalent to efficiency; the definitional check lives in the oracle.
    return is_efficient(s)


def failing_condition(s: Segmentation) -> Optional[str]:
    """Name of the first stability condition the canonical form violates."""
    k = canonicalize(s)
    if not is_efficient(k):
        return "efficiency (canonical)"
    if not is_saturated(k):
        return "saturation (canonical)"
    return None


def _with_mass(c: Coalition, index: int, mass: Fraction) -> Coalition:
    masses = list(c.masses)
    masses[index] = mass
    return Coalition(c.market, tuple(masses))


def inefficiency_witness(s: Segmentation) -> Optional[Witness]:
    """A segmentation that Pareto dominates ``s``, or None if ``s`` is efficient.

    The lowest-priced inefficient segment ``(C, p)`` is split into the
    consumers of ``C`` valued below ``p`` plus a sliver of its highest-value
    (``h``) consumers, priced below ``p``, and the remainder, still priced at
    ``p``.  Every price ``q >= p`` earns ``q * eps`` from the split-off part,
    so all its optimal prices stay below ``p`` exactly when
    ``eps < max over q' < p of rev(low part, q') / (h - q')``.  The sliver is
    half of that threshold, capped at half of the value-``h`` mass.

    The returned plan runs from the witness to ``s``.
    """
    bad = [a for a, seg in enumerate(s.segments)
           if seg.price != min_supported_value(seg.coalition)]
    if not bad:
        return None
    a = min(bad, key=lambda x: (s[x].price, x))
    coalition, price = s[a].coalition, s[a].price
    market = coalition.market
    low = Coalition(market, tuple(
        m if v < price else Fraction(0) for v, m in zip(market.values, coalition.masses)
    ))
    high = max_supported_value(coalition)
    top = market.index_of(high)
    threshold = max(revenue(low, q) / (high - q) for q in market.values if q < price)
    eps = min(threshold, coalition.masses[top]) / 2
    split = _with_mass(low, top, low.masses[top] + eps)
    split_prices = optimal_prices(split)
    assert max(split_prices) < price
    rest = coalition - split
    new_segments = list(s.segments)
    new_segments[a] = Segment(rest, price)
    new_segments.insert(a + 1, Segment(split, min(split_prices)))
    witness = Segmentation(tuple(new_segments))

    cells = {}
    for w_index, seg in enumerate(witness.segments):
        origin = w_index if w_index <= a else w_index - 1
        for i, m in enumerate(seg.coalition.masses):
            if m:
                cells[w_index, origin, i] = m
    return witness, TransportPlan.from_cells(witness, s, cells)


def absorbable_mass(coalition: Coalition, price: Fraction, value: Fraction) -> Fraction:
    """Largest mass of ``value`` consumers that can join while ``price`` stays optimal.

    Assumes no optimal price of the coalition lies in ``(price, value]``, so
    each binding constraint is a strict revenue gap.
    """
    base = revenue(coalition, price)
    bounds = [
        (base - revenue(coalition, q)) / (q - price)
        for q in coalition.market.values
        if price < q <= value
    ]
    return min(bounds)


def nonsaturation_witness(s: Segmentation) -> Witness:
    """An alternative that ``s`` does not block and that is not equivalent to it.

    Applies to efficient segmentations whose canonical form is not saturated.
    Takes the lowest-priced unsaturated pair ``(C, p) < (C', w)`` of the
    canonical form and moves value-``w`` consumers from ``C'`` into ``C``:
    half of the largest mass that keeps ``p`` optimal (capped by what ``C'``
    holds).  Every raw segment priced ``w`` contributes the same fraction of
    its value-``w`` consumers.  The returned plan runs from ``s`` to the
    witness.
    """
    k = canonicalize(s)
    if not is_efficient(k):
        raise NotApplicable("segmentation is not efficient")
    pair = next(_unsaturated_pairs(k), None)
    if pair is None:
        raise NotApplicable("canonical form is saturated")
    i, j = pair
    low, high = k[i], k[j]
    p, w = low.price, high.price
    market = s.market
    wi = market.index_of(w)
    available = high.coalition.masses[wi]
    moved = min(absorbable_mass(low.coalition, p, w), available) / 2
    share = moved / available

    grown = _with_mass(low.coalition, wi, low.coalition.masses[wi] + moved)
    shrunk = _with_mass(high.coalition, wi, available - moved)
    segments = list(k.segments)
    segments[i] = Segment(grown, p)
    segments[j] = Segment(shrunk, min(optimal_prices(shrunk)))
    witness = Segmentation(tuple(segments))

    index_of_price = {seg.price: b for b, seg in enumerate(k.segments)}
    cells: dict[tuple[int, int, int], Fraction] = {}

    def put(a: int, b: int, idx: int, m: Fraction) -> None:
        if m:
            cells[a, b, idx] = cells.get((a, b, idx), Fraction(0)) + m

    for a, seg in enumerate(s.segments):
        b = index_of_price[seg.price]
        for idx, m in enumerate(seg.coalition.masses):
            if seg.price == w and idx == wi:
                put(a, i, idx, m * share)
                put(a, j, idx, m - m * share)
            else:
                put(a, b, idx, m)
    return witness, TransportPlan.from_cells(s, witness, cells)


def instability_witness(s: Segmentation) -> Optional[Witness]:
    """Whichever witness applies, or None for a stable segmentation.

    For an inefficient ``s`` the plan runs witness -> ``s`` (domination);
    otherwise it runs ``s`` -> witness (non-blocked deviation).
    """
    if not is_efficient(s):
        return inefficiency_witness(s)
    if is_stable(s):
        return None
    return nonsaturation_witness(s)
