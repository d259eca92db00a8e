"""Core, von Neumann-Morgenstern stable sets and farsighted (Harsanyi/RV) blocking."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .constructions import greedy_stable_segmentation, mer_segmentation
from .errors import EmptyCore, PlanError
from .market import Market, optimal_prices
from .segmentation import (
    Segmentation,
    TransportPlan,
    average_consumer_surplus,
    strictly_better_under_every_coupling,
    trivial_segmentation,
    weak_surplus_equivalent,
    weakly_blocks,
)
from .stability import is_stable


@dataclass(frozen=True)
class CoreResult:
    """Either an empty core or the class of the trivial segmentation at ``price``."""

    price: Optional[Fraction]
    market_optimal_prices: frozenset[Fraction]
    lowest_value: Fraction

    @property
    def is_empty(self) -> bool:
        return self.price is None

    def describe(self) -> str:
        optimal = ", ".join(str(p) for p in sorted(self.market_optimal_prices))
        if self.is_empty:
            return f"core: empty (market optimal price {optimal} != {self.lowest_value})"
        return f"core: trivial at price {self.price}"


def core_description(market: Market) -> CoreResult:
    optimal = optimal_prices(market.full())
    lowest = market.values[0]
    return CoreResult(lowest if lowest in optimal else None, optimal, lowest)


def in_core(s: Segmentation) -> bool:
    core = core_description(s.market)
    if core.is_empty:
        return False
    return weak_surplus_equivalent(s, trivial_segmentation(s.market, core.price))


def core_equals_stable_check(market: Market) -> bool:
    """With a nonempty core, the trivial segmentation and both constructions agree."""
    core = core_description(market)
    if core.is_empty:
        raise EmptyCore(core.describe())
    trivial = trivial_segmentation(market, core.price)
    mer, _ = mer_segmentation(market)
    greedy = greedy_stable_segmentation(market)
    return (
        is_stable(trivial)
        and weak_surplus_equivalent(mer, trivial)
        and weak_surplus_equivalent(greedy, trivial)
    )


@dataclass(frozen=True)
class CandidateVerdict:
    candidate: Segmentation
    equivalent: bool
    weakly_blocked: Optional[bool]


@dataclass(frozen=True)
class StableSetReport:
    verdicts: tuple[CandidateVerdict, ...]

    @property
    def all_blocked(self) -> bool:
        return all(v.weakly_blocked for v in self.verdicts if not v.equivalent)

    @property
    def checked(self) -> int:
        return sum(1 for v in self.verdicts if not v.equivalent)


def stable_set_check(
    s: Segmentation, candidates: Sequence[tuple[Segmentation, TransportPlan]]
) -> StableSetReport:
    """Does ``s`` weakly block every non-equivalent candidate in the corpus?

    Each plan must run from ``s`` to its candidate.
    """
    verdicts = []
    for candidate, plan in candidates:
        if plan.source != s or plan.target != candidate:
            raise PlanError("each candidate plan must run from the tested segmentation")
        if weak_surplus_equivalent(s, candidate):
            verdicts.append(CandidateVerdict(candidate, True, None))
        else:
            verdicts.append(CandidateVerdict(candidate, False, weakly_blocks(plan)))
    return StableSetReport(tuple(verdicts))


def harsanyi_blocks(s: Segmentation, other: Segmentation) -> bool:
    """Farsighted (Harsanyi or RV) blocking of ``other`` by ``s``.

    Holds exactly when ``s`` leaves some consumer surplus; chains certifying
    it are built by :func:`stableseg.chains.build_rv_chain`.
    """
    return average_consumer_surplus(s) > 0


rv_blocks = harsanyi_blocks


def strong_blocks_some_equivalent(s: Segmentation, other: Segmentation) -> bool:
    """Some segmentation equivalent to ``s`` strongly blocks ``other``.

    That is the case when a positive mass of consumers is strictly better off
    in ``s`` than in ``other``, whichever way consumers are matched.
    """
    return strictly_better_under_every_coupling(s, other)
