"""Exact arithmetic for the lamplighter group acting on a doubled integer line.

The space consists of two copies ("hat" and "check") of ``Z + {infinity}``,
each carrying the one-point-compactification topology.  The group is
generated by the transposition ``f`` of the two origins and the shift
``sigma``; every element is kept in the canonical form

    (shift a, flip support b_1 < ... < b_k)

meaning ``sigma^a . f_{b_k} . ... . f_{b_1}`` where ``f_b`` swaps the two
copies of position ``b``.  All operations are pure and exact: positions are
integers (with ``math.inf`` as the point at infinity) and distances are
``fractions.Fraction`` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import WordParseError

INF = math.inf
HAT = "hat"
CHECK = "check"

#: Scale of the intra-component metric; cross-component distance is exactly 1.
METRIC_SCALE = Fraction(1, 4)


@dataclass(frozen=True)
class Point:
    """A point (component, position) with position an integer or infinity."""

    component: str
    pos: int | float

    def __post_init__(self):
        if self.component not in (HAT, CHECK):
            raise ValueError(f"unknown component {self.component!r}")
        if not (isinstance(self.pos, int) or self.pos == INF):
            raise ValueError(f"position must be an integer or infinity, got {self.pos!r}")

    def is_infinite(self) -> bool:
        return self.pos == INF

    def to_dict(self) -> dict:
        return {"component": self.component, "pos": "inf" if self.is_infinite() else self.pos}

    @staticmethod
    def from_dict(raw: dict) -> "Point":
        pos = raw["pos"]
        if pos == "inf":
            pos = INF
        elif not isinstance(pos, int):
            raise ValueError(f"position must be an integer or 'inf', got {pos!r}")
        return Point(raw["component"], pos)


def hat(pos: int | float) -> Point:
    return Point(HAT, pos)


def check(pos: int | float) -> Point:
    return Point(CHECK, pos)


INF_HAT = hat(INF)
INF_CHECK = check(INF)


def point_key(x: Point) -> tuple:
    """Deterministic sort key: hats before checks, finite before infinite."""
    return (x.component != HAT, x.is_infinite(), 0 if x.is_infinite() else x.pos)


@dataclass(frozen=True)
class GroupElement:
    """Canonical pair (shift, strictly increasing flip support)."""

    shift: int
    flips: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.shift, int):
            raise ValueError("shift must be an integer")
        if any(not isinstance(b, int) for b in self.flips):
            raise ValueError("flips must be integers")
        if any(self.flips[i] >= self.flips[i + 1] for i in range(len(self.flips) - 1)):
            raise ValueError("flips must be strictly increasing")

    def to_dict(self) -> dict:
        return {"shift": self.shift, "flips": list(self.flips)}

    @staticmethod
    def from_dict(raw: dict) -> "GroupElement":
        return GroupElement(raw["shift"], tuple(raw["flips"]))


IDENTITY = GroupElement(0, ())
FLIP = GroupElement(0, (0,))       # the transposition of the two origins
SIGMA = GroupElement(1, ())        # the coordinate shift
SIGMA_INV = GroupElement(-1, ())


def shift_by(a: int) -> GroupElement:
    return GroupElement(a, ())


def flip_at(b: int) -> GroupElement:
    """The transposition of the two copies of position b."""
    return GroupElement(0, (b,))


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """Canonical form of g . h (h acts first).

    The flip supports combine by symmetric difference after translating
    g's support by h's shift; this encodes ``f_b . sigma^a = sigma^a . f_{a+b}``
    together with every flip being an involution.
    """
    translated = {b + h.shift for b in g.flips}
    return GroupElement(g.shift + h.shift, tuple(sorted(translated.symmetric_difference(h.flips))))


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(-g.shift, tuple(b - g.shift for b in g.flips))


def act(g: GroupElement, x: Point) -> Point:
    """Apply g to x: infinity is fixed within its component; a finite
    position toggles component iff it lies in g's flip support, then shifts."""
    if x.is_infinite():
        return x
    toggled = x.pos in g.flips
    component = x.component if not toggled else (CHECK if x.component == HAT else HAT)
    return Point(component, x.pos - g.shift)


def embedding(pos: int | float) -> tuple[Fraction, Fraction]:
    """Planar embedding of Z + {infinity}: both tails converge to the origin."""
    if pos == INF:
        return (Fraction(0), Fraction(0))
    sign = (pos > 0) - (pos < 0)
    return (Fraction(1, 1 + abs(pos)), Fraction(sign, 1 + abs(pos)))


def metric(x: Point, y: Point) -> Fraction:
    """Distance on the doubled line: exactly 1 across components, a scaled
    l1 distance of the planar embeddings within a component."""
    if x.component != y.component:
        return Fraction(1)
    px, py = embedding(x.pos), embedding(y.pos)
    return METRIC_SCALE * (abs(px[0] - py[0]) + abs(px[1] - py[1]))


_TOKENS = {"f": FLIP, "s": SIGMA, "S": SIGMA_INV}


def parse_word(word: str) -> GroupElement:
    """Fold a whitespace-separated generator word into canonical form.

    Tokens are listed in the order they are applied: ``"s f"`` means
    shift first, then flip, i.e. the element f . sigma = (1, {0}).
    """
    out = IDENTITY
    for token in word.split():
        if token not in _TOKENS:
            raise WordParseError(f"unknown token {token!r}; expected one of f, s, S")
        out = compose(_TOKENS[token], out)
    return out


def word_of(g: GroupElement) -> str:
    """A generator word (in application order) that parses back to g."""
    tokens: list[str] = []
    for b in g.flips:
        conj = ["s"] * b if b >= 0 else ["S"] * (-b)
        tokens += conj + ["f"] + (["S"] * b if b >= 0 else ["s"] * (-b))
    tokens += ["s"] * g.shift if g.shift >= 0 else ["S"] * (-g.shift)
    return " ".join(tokens)
