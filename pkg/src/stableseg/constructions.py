"""Constructions of stable segmentations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import WrongArity
from .market import Coalition, Market, optimal_prices, revenue
from .segmentation import Segment, Segmentation, trivial_segmentation

ZERO = Fraction(0)


@dataclass(frozen=True)
class MerStep:
    revenue_level: Fraction          # common revenue of every supported price
    exhausted: tuple[int, ...]       # value indices whose residual mass hits zero
    coalition: Coalition
    price: Fraction
    residual: tuple[Fraction, ...]   # market left after removing this coalition


@dataclass(frozen=True)
class MerTrace:
    steps: tuple[MerStep, ...]

    @property
    def levels(self) -> tuple[Fraction, ...]:
        return tuple(step.revenue_level for step in self.steps)


def equal_revenue_level(values: list[Fraction], masses: list[Fraction]) -> tuple[Fraction, list[int]]:
    """Largest common revenue for an equal-revenue coalition over ``values``.

    A coalition in which every listed value earns revenue ``lam`` holds
    ``lam * (1/w_j - 1/w_{j+1})`` of value ``w_j`` (with ``1/w_{m+1} = 0``);
    the level is capped by the first value to run out.
    """
    ratios = []
    for j, (w, f) in enumerate(zip(values, masses)):
        step = 1 / w - (1 / values[j + 1] if j + 1 < len(values) else ZERO)
        ratios.append(f / step)
    lam = min(ratios)
    return lam, [j for j, r in enumerate(ratios) if r == lam]


def mer_segmentation(market: Market) -> tuple[Segmentation, MerTrace]:
    """Maximal equal-revenue segmentation, in raw (non-canonical) form, with its trace."""
    residual = list(market.masses)
    segments, steps = [], []
    while any(residual):
        support = [i for i, m in enumerate(residual) if m > 0]
        values = [market.values[i] for i in support]
        lam, argmin = equal_revenue_level(values, [residual[i] for i in support])
        masses = [ZERO] * market.n
        for j, i in enumerate(support):
            nxt = 1 / values[j + 1] if j + 1 < len(values) else ZERO
            masses[i] = lam * (1 / values[j] - nxt)
        coalition = Coalition(market, tuple(masses))
        residual = [r - m for r, m in zip(residual, masses)]
        exhausted = tuple(support[j] for j in argmin)
        assert all(residual[i] == 0 for i in exhausted)
        segment = Segment(coalition, values[0])
        segments.append(segment)
        steps.append(MerStep(lam, exhausted, coalition, values[0], tuple(residual)))
    return Segmentation(tuple(segments)), MerTrace(tuple(steps))


def _tie_mass(market: Market, base: list[Fraction], floor: Fraction, k: int) -> Fraction | None:
    """Smallest mass of value index ``k`` whose addition makes a second price tie ``floor``.

    ``base`` holds the coalition before the addition; ``floor`` is currently
    its unique optimal price.  Returns None when no price above ``floor`` (and
    at most ``v_k``) can tie.
    """
    coalition = Coalition(market, tuple(base))
    anchor = revenue(coalition, floor)
    best = None
    for q in market.values:
        if floor < q <= market.values[k]:
            t = (anchor - revenue(coalition, q)) / (q - floor)
            t = max(t, ZERO)
            if best is None or t < best:
                best = t
    return best


def greedy_stable_segmentation(market: Market) -> Segmentation:
    """Stable segmentation built by absorbing the lowest remaining values.

    Each segment starts with every remaining consumer of the lowest remaining
    value and absorbs higher values in order until some other price ties the
    lowest one; the tie point is solved exactly.  If the residual runs out
    first, the last segment keeps a single optimal price.
    """
    residual = list(market.masses)
    segments = []
    while any(residual):
        support = [i for i, m in enumerate(residual) if m > 0]
        floor = market.values[support[0]]
        current = [ZERO] * market.n
        current[support[0]] = residual[support[0]]
        for k in support[1:]:
            t = _tie_mass(market, current, floor, k)
            if t is not None and t <= residual[k]:
                current[k] = t
                break
            current[k] = residual[k]
        coalition = Coalition(market, tuple(current))
        segments.append(Segment(coalition, floor))
        residual = [r - c for r, c in zip(residual, current)]
    return Segmentation(tuple(segments))


def two_value_stable(market: Market) -> Segmentation:
    """Closed-form stable (and surplus-maximizing) segmentation for two values."""
    if market.n != 2:
        raise WrongArity(f"two-value construction needs exactly 2 values, got {market.n}")
    (v1, v2), (f1, f2) = market.values, market.masses
    if v1 in optimal_prices(market.full()):
        return trivial_segmentation(market, v1)
    x = v1 * f1 / (v2 - v1)
    low = market.coalition([f1, x])
    high = market.coalition([ZERO, f2 - x])
    return Segmentation((Segment(low, v1), Segment(high, v2)))
