"""Text formats for markets, segmentations and transport plans.

Market file::

    # value mass
    1 1/3
    3 2/3

Segmentation file (parsed against a market)::

    segment 1
    1 1/3
    segment 3
    3 2/3

Plan lines ``flow <source segment> <target segment> <value> <mass>`` follow a
segmentation block when a witness is written out.  Numbers are integers or
``p/q`` fractions; ``#`` starts a comment.
"""

from __future__ import annotations

import re
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import ParseError, ValidationError
from .market import Coalition, Market
from .segmentation import Segment, Segmentation, TransportPlan

_NUMBER = re.compile(r"^-?\d+(?:/\d+)?$")


def format_number(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _tokens(text: str) -> Iterator[tuple[int, list[tuple[int, str]]]]:
    """Yield (line number, [(column, token)]) for every non-blank line."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]
        if toks:
            yield lineno, toks


def parse_number(token: str, line: int | None = None, column: int | None = None) -> Fraction:
    if not _NUMBER.match(token):
        raise ParseError(f"not a number: {token!r}", line, column)
    try:
        return Fraction(token)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {token!r}", line, column) from None


def _pair(lineno: int, toks: list[tuple[int, str]]) -> tuple[Fraction, Fraction]:
    if len(toks) != 2:
        col = toks[2][0] if len(toks) > 2 else toks[-1][0]
        raise ParseError("expected '<value> <mass>'", lineno, col)
    (cv, v), (cm, m) = toks
    return parse_number(v, lineno, cv), parse_number(m, lineno, cm)


def parse_market(text: str) -> Market:
    pairs = []
    seen: dict[Fraction, int] = {}
    for lineno, toks in _tokens(text):
        value, mass = _pair(lineno, toks)
        if value in seen:
            raise ValidationError(f"line {lineno}: duplicate value {value} (first on line {seen[value]})")
        seen[value] = lineno
        pairs.append((value, mass))
    if not pairs:
        raise ValidationError("market file has no values")
    return Market.from_pairs(pairs)


def _segment_blocks(text: str) -> Iterator[tuple[int, Fraction, list[tuple[int, Fraction, Fraction]]]]:
    current = None
    for lineno, toks in _tokens(text):
        head = toks[0][1]
        if head == "segment":
            if len(toks) != 2:
                raise ParseError("expected 'segment <price>'", lineno, toks[0][0])
            if current is not None:
                yield current
            current = (lineno, parse_number(toks[1][1], lineno, toks[1][0]), [])
        elif head == "flow":
            continue
        else:
            if current is None:
                raise ParseError("mass line before any 'segment' header", lineno, toks[0][0])
            value, mass = _pair(lineno, toks)
            current[2].append((lineno, value, mass))
    if current is not None:
        yield current


def parse_segmentation(text: str, market: Market) -> Segmentation:
    segments = []
    for lineno, price, rows in _segment_blocks(text):
        masses = [Fraction(0)] * market.n
        for row_line, value, mass in rows:
            if value not in market.values:
                raise ValidationError(f"line {row_line}: value {value} is not in the market")
            masses[market.index_of(value)] += mass
        try:
            segments.append(Segment(Coalition(market, tuple(masses)), price))
        except ValidationError as exc:
            raise type(exc)(f"segment on line {lineno}: {exc}") from None
    if not segments:
        raise ValidationError("segmentation file has no segments")
    return Segmentation(tuple(segments))


def parse_flows(text: str) -> dict[tuple[int, int, Fraction], Fraction]:
    flows = {}
    for lineno, toks in _tokens(text):
        if toks[0][1] != "flow":
            continue
        if len(toks) != 5:
            raise ParseError("expected 'flow <a> <b> <value> <mass>'", lineno, toks[0][0])
        nums = [parse_number(t, lineno, c) for c, t in toks[1:]]
        for (c, t), x in zip(toks[1:3], nums[:2]):
            if x.denominator != 1 or x < 0:
                raise ParseError(f"segment index must be a non-negative integer: {t}", lineno, c)
        flows[int(nums[0]), int(nums[1]), nums[2]] = nums[3]
    return flows


def parse_plan(text: str, source: Segmentation, target: Segmentation) -> TransportPlan:
    market = source.market
    cells = {}
    for (a, b, value), mass in parse_flows(text).items():
        if value not in market.values:
            raise ValidationError(f"flow value {value} is not in the market")
        cells[a, b, market.index_of(value)] = mass
    return TransportPlan.from_cells(source, target, cells)


def format_market(market: Market) -> str:
    return "".join(f"{format_number(v)} {format_number(m)}\n"
                   for v, m in zip(market.values, market.masses))


def format_segmentation(s: Segmentation) -> str:
    lines = []
    for seg in s.segments:
        lines.append(f"segment {format_number(seg.price)}")
        for v, m in zip(seg.coalition.market.values, seg.coalition.masses):
            if m:
                lines.append(f"{format_number(v)} {format_number(m)}")
    return "\n".join(lines) + "\n"


def format_flows(plan: TransportPlan) -> str:
    values = plan.source.market.values
    return "".join(
        f"flow {a} {b} {format_number(values[i])} {format_number(m)}\n"
        for a, b, i, m in plan.cells()
    )


def read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None


def load_market(path: str | Path) -> Market:
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        return parse_market(read_text(path))


def load_segmentation(path: str | Path, market: Market) -> Segmentation:
    return parse_segmentation(read_text(path), market)


def report_lines(pairs: Iterable[tuple[str, object]], fmt: str = "human") -> str:
    """Render key/value pairs; machine format is ``key=value`` with no spaces in keys."""
    out = []
    for key, value in pairs:
        text = _render(value)
        if fmt == "machine":
            out.append(f"{key.replace(' ', '_')}={text}")
        else:
            out.append(f"{key}: {text}")
    return "\n".join(out) + "\n"


def _render(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return format_number(value)
    if isinstance(value, (frozenset, set)):
        return "{" + ",".join(_render(x) for x in sorted(value)) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_render(x) for x in value) + "]"
    if value is None:
        return "none"
    return str(value)


def format_values(values: Sequence[Fraction]) -> str:
    return ",".join(format_number(v) for v in values)
