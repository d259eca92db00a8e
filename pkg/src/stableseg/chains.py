"""Farsighted blocking chains (Harsanyi and Ray-Vohra style) and their checker.

A chain ``S^0, S^1, ..., S^n`` moves from the blocked segmentation to the
blocker; at step ``i`` one segment of ``S^i`` is the moving coalition, and its
members must weakly prefer the terminal ``S^n`` to ``S^{i-1}``.  The weak
variant needs a strict gain for a positive mass in some step, the strong one
in every step.  The RV variant also requires every segment of ``S^{i-1}``
that the moving coalition does not touch to survive into ``S^i``.

Consumers are tracked through a fixed list of *cells*: parcels of a single
value that never get split along the chain.  Every segmentation in the chain
assigns each cell to one of its segments, which pins down exactly who moves
where; pairwise transport plans are derived from these assignments.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import MalformedChain, NotBlocking
from .market import Coalition, Market, optimal_prices
from .segmentation import (
    Segment,
    Segmentation,
    TransportPlan,
    average_consumer_surplus,
    consumer_surplus,
)

ZERO = Fraction(0)


class ChainVariant(enum.Enum):
    WEAK = "weak"
    STRONG = "strong"


@dataclass(frozen=True)
class Cell:
    value_index: int
    mass: Fraction


@dataclass(frozen=True)
class ChainStep:
    segmentation: Segmentation
    assignment: tuple[int, ...]   # cell -> segment index
    moving: int                   # index of the moving segment in ``segmentation``


@dataclass(frozen=True)
class BlockingChain:
    cells: tuple[Cell, ...]
    start: Segmentation
    start_assignment: tuple[int, ...]
    steps: tuple[ChainStep, ...]

    @property
    def terminal(self) -> Segmentation:
        return self.steps[-1].segmentation if self.steps else self.start

    def __len__(self) -> int:
        return len(self.steps)

    def stage(self, i: int) -> tuple[Segmentation, tuple[int, ...]]:
        """Segmentation and assignment of ``S^i`` (``S^0`` is the start)."""
        if i == 0:
            return self.start, self.start_assignment
        step = self.steps[i - 1]
        return step.segmentation, step.assignment

    def plan(self, i: int) -> TransportPlan:
        """Plan from ``S^{i-1}`` to ``S^i``, read off the cell assignments."""
        before, a_before = self.stage(i - 1)
        after, a_after = self.stage(i)
        cells: dict[tuple[int, int, int], Fraction] = {}
        for c, cell in enumerate(self.cells):
            key = (a_before[c], a_after[c], cell.value_index)
            cells[key] = cells.get(key, ZERO) + cell.mass
        return TransportPlan.from_cells(before, after, cells)

    @property
    def plans(self) -> tuple[TransportPlan, ...]:
        return tuple(self.plan(i) for i in range(1, len(self.steps) + 1))


# -- construction ---------------------------------------------------------

Group = tuple[frozenset[int], Fraction]   # (cell ids, price)


class _Builder:
    def __init__(self, market: Market, cells: list[Cell]) -> None:
        self.market = market
        self.cells = cells
        self.steps: list[ChainStep] = []

    def coalition(self, ids: frozenset[int]) -> Coalition:
        masses = [ZERO] * self.market.n
        for c in ids:
            masses[self.cells[c].value_index] += self.cells[c].mass
        return Coalition(self.market, tuple(masses))

    def realize(self, groups: Sequence[Group]) -> tuple[Segmentation, tuple[int, ...]]:
        segs = tuple(Segment(self.coalition(ids), price) for ids, price in groups)
        assignment = [0] * len(self.cells)
        for g, (ids, _) in enumerate(groups):
            for c in ids:
                assignment[c] = g
        return Segmentation(segs), tuple(assignment)

    def record(self, groups: list[Group], moving: Group) -> None:
        seg, assignment = self.realize(groups)
        self.steps.append(ChainStep(seg, assignment, groups.index(moving)))

    def by_value(self, ids: frozenset[int]) -> list[Group]:
        """Split a set of cells into single-value groups priced at their value."""
        out: dict[int, set[int]] = {}
        for c in sorted(ids):
            out.setdefault(self.cells[c].value_index, set()).add(c)
        return [(frozenset(v), self.market.values[i]) for i, v in sorted(out.items())]

    def insert(self, groups: list[Group], new: Group) -> list[Group]:
        """Carve ``new`` out of the groups it overlaps (all single-valued) and add it."""
        ids = new[0]
        out = []
        for g_ids, price in groups:
            if g_ids & ids:
                rest = g_ids - ids
                if rest:
                    out.append((rest, price))
            else:
                out.append((g_ids, price))
        out.append(new)
        return out


def _cells_from_plan(plan: TransportPlan) -> tuple[list[Cell], list[int], list[int]]:
    cells, src, dst = [], [], []
    for a, b, i, mass in plan.cells():
        cells.append(Cell(i, mass))
        src.append(a)
        dst.append(b)
    return cells, src, dst


def _groups_of(tags: Sequence[int], s: Segmentation) -> list[Group]:
    return [
        (frozenset(c for c, t in enumerate(tags) if t == a), seg.price)
        for a, seg in enumerate(s.segments)
    ]


def _default_plan(blocked: Segmentation, blocker: Segmentation,
                  plan: Optional[TransportPlan]) -> TransportPlan:
    if plan is None:
        return TransportPlan.independent(blocked, blocker)
    if plan.source != blocked or plan.target != blocker:
        raise MalformedChain("plan must run from the blocked segmentation to the blocker")
    return plan


def build_rv_chain(
    blocked: Segmentation,
    blocker: Segmentation,
    variant: ChainVariant = ChainVariant.WEAK,
    plan: Optional[TransportPlan] = None,
) -> BlockingChain:
    """Build a chain by which ``blocker`` (RV-)blocks ``blocked``.

    ``plan`` fixes which consumers of ``blocked`` are which consumers of
    ``blocker``; by default every cell is split proportionally.

    Weak variant: split every multi-value segment into single-value segments,
    then bring in the segments of ``blocker`` one at a time.  Ends exactly at
    ``blocker``.

    Strong variant: first a coalition mixing some strictly better-off
    consumers with a zero-surplus consumer from every segment of ``blocked``
    forms, and its home segment in ``blocker`` then reassembles; afterwards
    each positive-surplus segment of ``blocker`` is brought in.  The terminal
    may leave zero-surplus consumers of ``blocker`` in single-value segments,
    so it matches ``blocker`` consumer by consumer in surplus but need not
    equal it.
    """
    plan = _default_plan(blocked, blocker, plan)
    if variant is ChainVariant.WEAK:
        return _weak_chain(plan)
    return _strong_chain(plan)


def _weak_chain(plan: TransportPlan) -> BlockingChain:
    blocked, blocker = plan.source, plan.target
    if average_consumer_surplus(blocker) <= 0:
        raise NotBlocking("the blocker leaves no consumer surplus")
    cells, src, dst = _cells_from_plan(plan)
    b = _Builder(blocked.market, cells)
    groups = _groups_of(src, blocked)
    start, start_assignment = b.realize(groups)

    for group in list(groups):
        ids, price = group
        if len({cells[c].value_index for c in ids}) < 2:
            continue
        pieces = b.by_value(ids)
        pos = groups.index(group)
        groups = groups[:pos] + pieces + groups[pos + 1:]
        moving = next(g for g in pieces if g[1] == price)
        b.record(groups, moving)

    targets = _groups_of(dst, blocker)
    for target in targets:
        if target in groups:
            continue
        groups = b.insert(groups, target)
        if set(groups) == set(targets):
            groups = targets   # list the terminal in the blocker's own order
        b.record(groups, target)
    return BlockingChain(tuple(cells), start, start_assignment, tuple(b.steps))


def _split(cells: list[Cell], tags: list[list[int]], c: int, fraction: Fraction) -> int:
    """Split cell ``c``; the new cell (``fraction`` of the mass) is appended."""
    cell = cells[c]
    piece = cell.mass * fraction
    cells[c] = Cell(cell.value_index, cell.mass - piece)
    cells.append(Cell(cell.value_index, piece))
    for t in tags:
        t.append(t[c])
    return len(cells) - 1


def _strong_chain(plan: TransportPlan) -> BlockingChain:
    blocked, blocker = plan.source, plan.target
    market = blocked.market
    values = market.values
    base, src, dst = _cells_from_plan(plan)

    def gain(c: int) -> bool:
        v = values[base[c].value_index]
        return consumer_surplus(v, blocker[dst[c]].price) > consumer_surplus(v, blocked[src[c]].price)

    winners = [c for c in range(len(base)) if gain(c)]
    if not winners:
        raise NotBlocking("no consumers are strictly better off in the blocker")
    home = min(dst[c] for c in winners)
    seed = next(c for c in winners if dst[c] == home)
    home_price = blocker[home].price

    # Zero-surplus recruits: a lowest-value cell from each blocked segment the
    # seed does not already reach.
    recruit_from = {}
    for a, seg in enumerate(blocked.segments):
        if a == src[seed]:
            continue
        low = seg.coalition.support[0]
        recruit_from[a] = next(c for c in range(len(base)) if src[c] == a and base[c].value_index == low)

    delta = Fraction(1, 2)
    while True:
        cells = list(base)
        tags = [list(src), list(dst)]
        seed_piece = _split(cells, tags, seed, Fraction(1, 2))
        first = {seed_piece}
        for a, c in recruit_from.items():
            first.add(_split(cells, tags, c, delta))
        b = _Builder(market, cells)
        first_ids = frozenset(first)
        price = max(optimal_prices(b.coalition(first_ids)))
        ok = all(
            consumer_surplus(values[cells[c].value_index], price)
            <= consumer_surplus(values[cells[c].value_index], home_price)
            for c in first_ids if tags[1][c] == home
        )
        if ok:
            break
        delta /= 2
    src, dst = tags

    groups = _groups_of(src, blocked)
    start, start_assignment = b.realize(groups)

    everyone = frozenset(range(len(cells)))
    coalition_one = (first_ids, price)
    groups = [coalition_one] + b.by_value(everyone - first_ids)
    b.record(groups, coalition_one)

    home_ids = frozenset(c for c in range(len(cells)) if dst[c] == home)
    home_group = (home_ids, home_price)
    rebuilt = []
    for g_ids, g_price in groups:
        if g_ids == first_ids:
            rebuilt.extend(b.by_value(g_ids - home_ids))
        elif g_ids & home_ids:
            if g_ids - home_ids:
                rebuilt.append((g_ids - home_ids, g_price))
        else:
            rebuilt.append((g_ids, g_price))
    groups = rebuilt + [home_group]
    b.record(groups, home_group)

    for t, seg in enumerate(blocker.segments):
        if t == home or seg.surplus_mass() == 0:
            continue
        target = (frozenset(c for c in range(len(cells)) if dst[c] == t), seg.price)
        if target in groups:
            continue
        groups = b.insert(groups, target)
        b.record(groups, target)
    return BlockingChain(tuple(cells), start, start_assignment, tuple(b.steps))


# -- checking -------------------------------------------------------------

def _validate_structure(chain: BlockingChain) -> None:
    if not chain.steps:
        raise MalformedChain("a chain needs at least one step")
    market = chain.start.market
    if any(cell.mass <= 0 for cell in chain.cells):
        raise MalformedChain("cells must carry positive mass")
    for i in range(len(chain.steps) + 1):
        seg, assignment = chain.stage(i)
        if seg.market != market:
            raise MalformedChain("segmentation over a different market", i)
        if len(assignment) != len(chain.cells):
            raise MalformedChain("assignment length differs from the cell count", i)
        masses = [[ZERO] * market.n for _ in seg.segments]
        for c, cell in enumerate(chain.cells):
            if not 0 <= assignment[c] < len(seg):
                raise MalformedChain(f"cell {c} assigned to a missing segment", i)
            masses[assignment[c]][cell.value_index] += cell.mass
        for a, s in enumerate(seg.segments):
            if tuple(masses[a]) != s.coalition.masses:
                raise MalformedChain(f"segment {a} does not match its cells", i)
        if i > 0 and not 0 <= chain.steps[i - 1].moving < len(seg):
            raise MalformedChain("moving segment index out of range", i)


def _members(assignment: Sequence[int]) -> dict[int, frozenset[int]]:
    out: dict[int, set[int]] = {}
    for c, a in enumerate(assignment):
        out.setdefault(a, set()).add(c)
    return {a: frozenset(ids) for a, ids in out.items()}


def check_chain(
    chain: BlockingChain,
    variant: ChainVariant = ChainVariant.WEAK,
    rv: bool = True,
) -> bool:
    """Is ``chain`` a valid (RV if ``rv``) blocking chain of the given variant?

    Raises :class:`MalformedChain` for structural defects; returns False when
    the persistence or payoff conditions fail.
    """
    _validate_structure(chain)
    values = chain.start.market.values
    terminal, final = chain.stage(len(chain.steps))
    gains = []
    for i in range(1, len(chain.steps) + 1):
        before, a_before = chain.stage(i - 1)
        after, a_after = chain.stage(i)
        moving = chain.steps[i - 1].moving
        movers = _members(a_after)[moving]

        if rv:
            now = {(ids, after[a].price) for a, ids in _members(a_after).items()}
            for a, ids in _members(a_before).items():
                if not ids & movers and (ids, before[a].price) not in now:
                    return False

        strict = False
        for c in movers:
            v = values[chain.cells[c].value_index]
            was = consumer_surplus(v, before[a_before[c]].price)
            end = consumer_surplus(v, terminal[final[c]].price)
            if was > end:
                return False
            if was < end:
                strict = True
        gains.append(strict)

    if variant is ChainVariant.STRONG:
        return all(gains)
    return any(gains)


def terminal_matches(chain: BlockingChain, blocker: Segmentation, plan: TransportPlan) -> bool:
    """Every consumer gets the same surplus at the chain's end as in ``blocker``.

    ``plan`` is the blocked-to-blocker plan the chain was built from; cells are
    matched to blocker segments by replaying the construction's cell order.
    """
    terminal, final = chain.stage(len(chain.steps))
    per_value_end: dict[int, dict[Fraction, Fraction]] = {}
    for c, cell in enumerate(chain.cells):
        v = terminal.market.values[cell.value_index]
        s = consumer_surplus(v, terminal[final[c]].price)
        d = per_value_end.setdefault(cell.value_index, {})
        d[s] = d.get(s, ZERO) + cell.mass
    per_value_blocker: dict[int, dict[Fraction, Fraction]] = {}
    for _, b, i, mass in plan.cells():
        s = consumer_surplus(blocker.market.values[i], blocker[b].price)
        d = per_value_blocker.setdefault(i, {})
        d[s] = d.get(s, ZERO) + mass
    return per_value_end == per_value_blocker
