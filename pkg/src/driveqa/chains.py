"""Reasoning-chain wire format: step segmentation and the element token grammar.

The canonical grammar embeds geometry in otherwise free text:

    <LOC>(x1,y1,x2,y2)            an image-plane bounding box
    <MOT>[(x1,y1),(x2,y2),...]    a trajectory of two or more points

Strict form uses `.` decimals and no spaces.  Coordinates are canonicalized
to two fraction digits at parse time, which makes serialize/parse an exact
round trip.  Lenient extraction additionally accepts bare numeric tuples in
plain text, for models that answer without the special tokens.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import EmptyInput, MalformedToken


class ElementKind(str, Enum):
    LOC = "loc"
    MOT = "mot"


@dataclass(frozen=True)
class VisualElement:
    """A parsed geometry token: a box (loc) or a point sequence (mot)."""

    kind: ElementKind
    payload: tuple[float, ...] | tuple[tuple[float, float], ...]

    @staticmethod
    def loc(x1: float, y1: float, x2: float, y2: float) -> "VisualElement":
        return VisualElement(ElementKind.LOC, (x1, y1, x2, y2))

    @staticmethod
    def mot(points) -> "VisualElement":
        return VisualElement(ElementKind.MOT, tuple((float(x), float(y)) for x, y in points))


@dataclass(frozen=True)
class Step:
    """One reasoning step: trimmed text with its geometry tokens in text order."""

    text: str
    elements: tuple[VisualElement, ...] = ()

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("step text must be non-empty after trimming")


@dataclass(frozen=True)
class ReasoningChain:
    steps: tuple[Step, ...]

    def __post_init__(self):
        if not self.steps:
            raise ValueError("reasoning chain needs at least one step")


_NUM = r"-?\d+(?:\.\d+)?"
_STRICT_LOC = re.compile(rf"<LOC>\(({_NUM}),({_NUM}),({_NUM}),({_NUM})\)")
_STRICT_MOT = re.compile(rf"<MOT>\[\(({_NUM}),({_NUM})\)(?:,\(({_NUM}),({_NUM})\))+\]")
_STRICT_MOT_POINT = re.compile(rf"\(({_NUM}),({_NUM})\)")
_NUM_SP = rf"\s*({_NUM})\s*"
_BARE_LOC = re.compile(rf"\({_NUM_SP},{_NUM_SP},{_NUM_SP},{_NUM_SP}\)")
_BARE_MOT = re.compile(rf"\[\s*\({_NUM_SP},{_NUM_SP}\)\s*(?:,\s*\({_NUM_SP},{_NUM_SP}\)\s*)+\]")
_BARE_MOT_POINT = re.compile(rf"\({_NUM_SP},{_NUM_SP}\)")
_TOKEN_MARK = re.compile(r"<(LOC|MOT)>")


def _canon(value: float) -> float:
    """Canonical coordinate: the double nearest to its 2-decimal rendering."""
    return float(f"{value:.2f}")


def format_loc(box) -> str:
    x1, y1, x2, y2 = box if not hasattr(box, "as_tuple") else box.as_tuple()
    return f"<LOC>({x1:.2f},{y1:.2f},{x2:.2f},{y2:.2f})"


def format_mot(points) -> str:
    body = ",".join(f"({x:.2f},{y:.2f})" for x, y in points)
    return f"<MOT>[{body}]"


def _valid_loc(coords: tuple[float, float, float, float]) -> bool:
    x1, y1, x2, y2 = coords
    return x1 < x2 and y1 < y2 and min(coords) >= 0


def _payload_spans(text: str) -> list[tuple[int, int]]:
    """Spans of canonical token payloads, used to protect them from splitting."""
    spans = []
    for pattern in (_STRICT_LOC, _STRICT_MOT):
        spans.extend(m.span() for m in pattern.finditer(text))
    return spans


def split_steps(text: str) -> list[str]:
    """Cut chain text into step fragments.

    Separators are `.` or `;` followed by whitespace or end of text, and
    newlines; separators inside canonical token payloads do not split.
    Fragments are trimmed and empties dropped.  Raises EmptyInput when
    nothing remains.
    """
    if not text or not text.strip():
        raise EmptyInput("chain text is empty")
    protected = _payload_spans(text)

    def in_payload(i: int) -> bool:
        return any(a <= i < b for a, b in protected)

    fragments: list[str] = []
    start = 0
    n = len(text)
    for i, ch in enumerate(text):
        if in_payload(i):
            continue
        if ch == "\n" or (ch in ".;" and (i + 1 == n or text[i + 1].isspace())):
            fragments.append(text[start:i])
            start = i + 1
    fragments.append(text[start:])
    steps = [f.strip() for f in fragments if f.strip()]
    if not steps:
        raise EmptyInput("chain text contains no steps")
    return steps


def _strict_match_at(text: str, pos: int, kind: str):
    pattern = _STRICT_LOC if kind == "LOC" else _STRICT_MOT
    return pattern.match(text, pos)


def extract_visual_elements(step_text: str, lenient: bool = False) -> list[VisualElement]:
    """Parse geometry tokens out of one step's text, in text order.

    Strict mode accepts only the canonical grammar and raises
    MalformedToken on a `<LOC>`/`<MOT>` marker whose payload does not parse
    (including geometrically impossible boxes).  Lenient mode skips bad
    candidates and additionally picks up bare `(a,b,c,d)` tuples as boxes
    and `[(a,b),(c,d),...]` sequences as trajectories.
    """
    found: list[tuple[int, VisualElement]] = []
    claimed: list[tuple[int, int]] = []

    for mark in _TOKEN_MARK.finditer(step_text):
        kind = mark.group(1)
        match = _strict_match_at(step_text, mark.start(), kind)
        if match is None:
            if lenient:
                continue
            raise MalformedToken(f"bad <{kind}> token at offset {mark.start()}: {step_text[mark.start():mark.start() + 40]!r}")
        if kind == "LOC":
            coords = tuple(_canon(float(g)) for g in match.groups())
            if not _valid_loc(coords):
                if lenient:
                    continue
                raise MalformedToken(f"<LOC> payload violates box invariants at offset {mark.start()}")
            element = VisualElement(ElementKind.LOC, coords)
        else:
            points = tuple(
                (_canon(float(a)), _canon(float(b)))
                for a, b in _STRICT_MOT_POINT.findall(match.group(0))
            )
            element = VisualElement(ElementKind.MOT, points)
        found.append((mark.start(), element))
        claimed.append(match.span())

    if lenient:
        def overlaps(span: tuple[int, int]) -> bool:
            return any(a < span[1] and span[0] < b for a, b in claimed)

        for match in _BARE_MOT.finditer(step_text):
            if overlaps(match.span()):
                continue
            points = tuple(
                (_canon(float(a)), _canon(float(b)))
                for a, b in _BARE_MOT_POINT.findall(match.group(0))
            )
            found.append((match.start(), VisualElement(ElementKind.MOT, points)))
            claimed.append(match.span())
        for match in _BARE_LOC.finditer(step_text):
            if overlaps(match.span()):
                continue
            coords = tuple(_canon(float(g)) for g in match.groups())
            if _valid_loc(coords):
                found.append((match.start(), VisualElement(ElementKind.LOC, coords)))
                claimed.append(match.span())

    found.sort(key=lambda item: item[0])
    return [element for _, element in found]


def _canonicalize_tokens(step_text: str) -> str:
    """Rewrite canonical tokens in place with 2-decimal coordinates."""

    def redo_loc(match: re.Match) -> str:
        return format_loc(tuple(float(g) for g in match.groups()))

    def redo_mot(match: re.Match) -> str:
        points = [(float(a), float(b)) for a, b in _STRICT_MOT_POINT.findall(match.group(0))]
        return format_mot(points)

    return _STRICT_MOT.sub(redo_mot, _STRICT_LOC.sub(redo_loc, step_text))


def parse_chain(text: str, lenient: bool = False) -> ReasoningChain:
    """Parse chain text into steps with their elements.

    Step texts keep the token substrings inline (canonicalized to two
    decimals), so `parse_chain(serialize(chain)) == chain` holds exactly
    for any valid chain.
    """
    steps = []
    for fragment in split_steps(text):
        canonical = _canonicalize_tokens(fragment)
        elements = extract_visual_elements(canonical, lenient=lenient)
        steps.append(Step(text=canonical, elements=tuple(elements)))
    return ReasoningChain(steps=tuple(steps))


def serialize(chain: ReasoningChain) -> str:
    """Render a chain as canonical text: steps terminated by `.`, joined by spaces."""
    parts = []
    for step in chain.steps:
        text = _canonicalize_tokens(step.text.strip())
        parts.append(text + ".")
    return " ".join(parts)


def make_step(text: str, elements=()) -> Step:
    """Build a step from builder-produced text, parsing its tokens.

    The supplied elements are a cross-check: builders pass the geometry
    they embedded and this asserts the text parses back to the same thing.
    """
    canonical = _canonicalize_tokens(text.strip())
    parsed = tuple(extract_visual_elements(canonical))
    if elements and parsed != tuple(elements):
        raise MalformedToken("step text does not reproduce its declared elements")
    return Step(text=canonical, elements=parsed)
