"""Markets, coalitions and monopoly revenue with exact rational arithmetic.

A market is a finite list of consumer values ``v_1 < ... < v_n`` with a
positive mass of consumers at each value.  A coalition is described only by
how much mass of each value it contains; consumer identity is handled one
level up by transport plans (see :mod:`stableseg.segmentation`).

All numbers are :class:`fractions.Fraction`, so revenue ties are detected
exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import EmptyCoalition, NegativeMass, ValidationError

Number = Union[int, Fraction, str]


def as_fraction(x: Number) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass an int, Fraction or 'p/q' string")
    return Fraction(x)


@dataclass(frozen=True)
class Market:
    """Consumer values (strictly increasing) and the mass at each value."""

    values: tuple[Fraction, ...]
    masses: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        values = tuple(as_fraction(v) for v in self.values)
        masses = tuple(as_fraction(m) for m in self.masses)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "masses", masses)
        if not values:
            raise ValidationError("a market needs at least one value")
        if len(values) != len(masses):
            raise ValidationError("values and masses differ in length")
        if any(v <= 0 for v in values):
            raise ValidationError("values must be positive")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValidationError("values must be strictly increasing")
        if any(m <= 0 for m in masses):
            raise ValidationError("masses must be positive")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Number, Number]]) -> "Market":
        """Build a market from unsorted ``(value, mass)`` pairs.

        Zero masses are dropped with a warning; duplicate values are an error.
        """
        seen: dict[Fraction, Fraction] = {}
        for value, mass in pairs:
            v, m = as_fraction(value), as_fraction(mass)
            if v in seen:
                raise ValidationError(f"duplicate value {v}")
            seen[v] = m
        kept = {}
        for v, m in seen.items():
            if m == 0:
                warnings.warn(f"dropping value {v} with zero mass", stacklevel=2)
                continue
            kept[v] = m
        ordered = sorted(kept)
        return cls(tuple(ordered), tuple(kept[v] for v in ordered))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def total_mass(self) -> Fraction:
        return sum(self.masses, Fraction(0))

    def index_of(self, value: Number) -> int:
        v = as_fraction(value)
        try:
            return self.values.index(v)
        except ValueError:
            raise ValidationError(f"{v} is not a value of this market") from None

    def full(self) -> "Coalition":
        """The coalition of all consumers."""
        return Coalition(self, self.masses)

    def empty(self) -> "Coalition":
        return Coalition(self, (Fraction(0),) * self.n)

    def coalition(self, masses: dict[Number, Number] | Sequence[Number]) -> "Coalition":
        """Coalition from a value->mass mapping or an index-aligned sequence."""
        if isinstance(masses, dict):
            vec = [Fraction(0)] * self.n
            for value, mass in masses.items():
                vec[self.index_of(value)] = as_fraction(mass)
            return Coalition(self, tuple(vec))
        return Coalition(self, tuple(as_fraction(m) for m in masses))


@dataclass(frozen=True)
class Coalition:
    """Mass of each market value held by a group of consumers."""

    market: Market
    masses: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        masses = tuple(as_fraction(m) for m in self.masses)
        object.__setattr__(self, "masses", masses)
        if len(masses) != self.market.n:
            raise ValidationError("coalition length does not match its market")
        if any(m < 0 for m in masses):
            raise NegativeMass("coalition masses must be non-negative")

    def __getitem__(self, value: Number) -> Fraction:
        return self.masses[self.market.index_of(value)]

    @property
    def total(self) -> Fraction:
        return sum(self.masses, Fraction(0))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.masses) if m > 0)

    @property
    def support_values(self) -> tuple[Fraction, ...]:
        return tuple(self.market.values[i] for i in self.support)

    def is_empty(self) -> bool:
        return not any(self.masses)

    def within_market(self) -> bool:
        return all(m <= f for m, f in zip(self.masses, self.market.masses))

    def upper_tail(self, price: Number) -> Fraction:
        """Mass of consumers whose value is at least ``price``."""
        p = as_fraction(price)
        return sum((m for v, m in zip(self.market.values, self.masses) if v >= p), Fraction(0))

    def as_dict(self) -> dict[Fraction, Fraction]:
        return {v: m for v, m in zip(self.market.values, self.masses) if m > 0}

    def __add__(self, other: "Coalition") -> "Coalition":
        return add(self, other)

    def __sub__(self, other: "Coalition") -> "Coalition":
        return subtract(self, other)

    def __repr__(self) -> str:
        inner = ", ".join(f"{v}: {m}" for v, m in self.as_dict().items())
        return f"Coalition({{{inner}}})"


def revenue(coalition: Coalition, price: Number) -> Fraction:
    """Seller revenue from offering ``price`` to the coalition."""
    p = as_fraction(price)
    if p <= 0:
        raise ValidationError("price must be positive")
    return p * coalition.upper_tail(p)


def optimal_prices(coalition: Coalition) -> frozenset[Fraction]:
    """All market values that maximize revenue for the coalition.

    Prices outside the value grid are never better than some value on it, so
    only market values are candidates.
    """
    if coalition.is_empty():
        raise EmptyCoalition("optimal prices of an empty coalition are undefined")
    revenues = {v: revenue(coalition, v) for v in coalition.market.values}
    best = max(revenues.values())
    return frozenset(v for v, r in revenues.items() if r == best)


def max_revenue(coalition: Coalition) -> Fraction:
    if coalition.is_empty():
        return Fraction(0)
    return max(revenue(coalition, v) for v in coalition.market.values)


def min_supported_value(coalition: Coalition) -> Fraction:
    support = coalition.support
    if not support:
        raise EmptyCoalition("an empty coalition has no lowest value")
    return coalition.market.values[support[0]]


def max_supported_value(coalition: Coalition) -> Fraction:
    support = coalition.support
    if not support:
        raise EmptyCoalition("an empty coalition has no highest value")
    return coalition.market.values[support[-1]]


def _check_same_market(a: Coalition, b: Coalition) -> None:
    if a.market != b.market:
        raise ValidationError("coalitions belong to different markets")


def add(a: Coalition, b: Coalition) -> Coalition:
    _check_same_market(a, b)
    return Coalition(a.market, tuple(x + y for x, y in zip(a.masses, b.masses)))


def subtract(a: Coalition, b: Coalition) -> Coalition:
    _check_same_market(a, b)
    if any(y > x for x, y in zip(a.masses, b.masses)):
        raise NegativeMass("cannot remove more mass than the coalition holds")
    return Coalition(a.market, tuple(x - y for x, y in zip(a.masses, b.masses)))


def scale(c: Coalition, alpha: Number) -> Coalition:
    k = as_fraction(alpha)
    if k < 0:
        raise ValueError("scale factor must be non-negative")
    return Coalition(c.market, tuple(k * m for m in c.masses))


def sum_coalitions(coalitions: Iterable[Coalition], market: Market) -> Coalition:
    total = market.empty()
    for c in coalitions:
        total = add(total, c)
    return total
