"""Folner averaging on the doubled lamplighter line and its limit operator.

For the rate and box families the orbit averages of a point mass have a
closed form: a finite point spreads uniformly over the shift range, with
the component toggled on the exact fraction of supports containing its
position.  As n grows these empirical measures converge to a two-atom
measure on the pair of infinities whose weights are read off the rate
sequence; the resulting limit operator S is a positive contractive
projection and satisfies Seever's identity, while its averaging defect
factors exactly as r(1-r) * (gap of f at the ends) * (gap of h).
All quantities here are exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import InvariantViolation
from .folner import FolnerSet, RateSequence, enumerate_elements, flip_balance, shift_range
from .functions import TestFunction, canonical_family
from .lamplighter import (
    CHECK,
    FLIP,
    HAT,
    INF_CHECK,
    INF_HAT,
    SIGMA,
    SIGMA_INV,
    GroupElement,
    Point,
    act,
    check,
    hat,
    metric,
)
from .transport import DiscreteMeasure, wasserstein

GENERATORS = (SIGMA, SIGMA_INV, FLIP)


@dataclass(frozen=True)
class LimitProfile:
    """The data determining the limit of the rate-family averages."""

    rate: RateSequence


def _other(component: str) -> str:
    return CHECK if component == HAT else HAT


def empirical_measure(folner: FolnerSet, x: Point) -> DiscreteMeasure:
    """The uniform average of point masses over the orbit piece F.x.

    Counting path for the rate/box kinds: for every shift a the averaged
    point sits at position pos - a, toggled with the exact support-balance
    fraction.  Infinite points are fixed by the whole group.
    """
    if x.is_infinite():
        return DiscreteMeasure.point_mass(x)
    if folner.kind in ("rate", "box"):
        shifts = shift_range(folner)
        toggled = flip_balance(folner, x.pos)
        weight = Fraction(1, len(shifts))
        pairs = []
        for a in shifts:
            if toggled < 1:
                pairs.append((Point(x.component, x.pos - a), (1 - toggled) * weight))
            if toggled > 0:
                pairs.append((Point(_other(x.component), x.pos - a), toggled * weight))
        return DiscreteMeasure.from_pairs(pairs)
    elements = enumerate_elements(folner)
    weight = Fraction(1, len(elements))
    return DiscreteMeasure.from_pairs((act(g, x), weight) for g in elements)


def folner_average(folner: FolnerSet, f: Callable, x: Point) -> Fraction:
    """(S_n f)(x): the empirical measure integrated against f."""
    return empirical_measure(folner, x).integrate(f)


def limit_measure(profile: LimitProfile, x: Point) -> DiscreteMeasure:
    """Two-atom limit on the infinities: from a hat point of position b the
    check end receives weight r_b, from a check point the hat end does."""
    if x.is_infinite():
        return DiscreteMeasure.point_mass(x)
    r = profile.rate.value(x.pos)
    hat_mass = 1 - r if x.component == HAT else r
    return DiscreteMeasure.from_pairs(((INF_HAT, hat_mass), (INF_CHECK, 1 - hat_mass)))


def limit_apply(profile: LimitProfile, f: Callable) -> Callable[[Point], Fraction]:
    """(S f)(x) = integral of f against the limit measure at x."""

    def apply(x: Point) -> Fraction:
        return limit_measure(profile, x).integrate(f)

    return apply


def default_sample(radius: int = 10) -> list[Point]:
    pts = [INF_HAT, INF_CHECK]
    for s in range(-radius, radius + 1):
        pts += [hat(s), check(s)]
    return pts


def tau_bound(n: int) -> Fraction:
    """Artifact tolerance for the distance of the n-th empirical measure to
    its limit (position within [-n, n]): selection-ratio error 2^(-2n), plus
    the near-window mass at intra-component diameter 1/4, plus the far tail."""
    m = math.isqrt(2**n)
    if m * m < 2**n:
        m += 1
    shifts = 2 ** (n + 1) + 1
    return Fraction(1, 4**n) + Fraction(2 * m + 1, 4 * shifts) + Fraction(1, 2 * (1 + m))


@dataclass(frozen=True)
class GenericityRow:
    n: int
    distance: Fraction
    bound: Fraction


def genericity_table(
    sets: Sequence[FolnerSet], x: Point, profile: LimitProfile
) -> tuple[list[GenericityRow], list[str]]:
    """Per-set transport distance of the empirical measure to the limit;
    flags any failure of monotone decrease along the list."""
    rows = []
    for index, folner in enumerate(sets, start=1):
        n = folner.n if folner.n is not None else index
        value, _ = wasserstein(empirical_measure(folner, x), limit_measure(profile, x), metric)
        rows.append(GenericityRow(n, value, tau_bound(n)))
    violations = [
        f"distance increased from n={a.n} ({a.distance}) to n={b.n} ({b.distance})"
        for a, b in zip(rows, rows[1:])
        if b.distance > a.distance
    ]
    return rows, violations


def right_box_averages(
    boxes: Sequence[Iterable[int]], x: Point, f: Callable
) -> list[Fraction]:
    """Averages of f over the box family at x, one value per box."""
    from .folner import box_folner

    return [folner_average(box_folner(box), f, x) for box in boxes]


def box_average_tail_bound(box: Iterable[int], x: Point, f: TestFunction) -> Fraction:
    """Exact bound for |average - (f(hat inf) + f(check inf))/2| on a box
    containing x's position: Lipschitz constant times the mean distance
    of the shifted copies to the end."""
    positions = sorted(set(box))
    total = sum(metric(hat(x.pos - a), INF_HAT) for a in positions)
    return f.lipschitz * Fraction(total, len(positions))


def wf_estimate(sets: Sequence[FolnerSet], x: Point, y: Point) -> list[Fraction]:
    """The finite prefix W(S_n* delta_x, S_n* delta_y); no limit is claimed,
    callers inspect stabilization themselves."""
    return [
        wasserstein(empirical_measure(folner, x), empirical_measure(folner, y), metric)[0]
        for folner in sets
    ]


def seever_residual(
    profile: LimitProfile, f: Callable, h: Callable, sample: Iterable[Point]
) -> Fraction:
    """max over the sample of |S(f * Sh)(x) - S(Sf * Sh)(x)|."""
    sf = limit_apply(profile, f)
    sh = limit_apply(profile, h)
    lhs = limit_apply(profile, lambda p: Fraction(f(p)) * sh(p))
    rhs = limit_apply(profile, lambda p: sf(p) * sh(p))
    return max((abs(lhs(x) - rhs(x)) for x in sample), default=Fraction(0))


def averaging_residual(profile: LimitProfile, f: Callable, h: Callable, x: Point) -> Fraction:
    """S(f * Sh)(x) - (Sf * Sh)(x) at a finite point, which factors as
    r (1 - r) * (f(hat inf) - f(check inf)) * (h(hat inf) - h(check inf));
    the closed form is checked against direct evaluation."""
    if x.is_infinite():
        raise ValueError("averaging residual is defined at finite points")
    sh = limit_apply(profile, h)
    sf = limit_apply(profile, f)
    direct = limit_apply(profile, lambda p: Fraction(f(p)) * sh(p))(x) - sf(x) * sh(x)
    r = profile.rate.value(x.pos)
    gap_f = Fraction(f(INF_HAT)) - Fraction(f(INF_CHECK))
    gap_h = Fraction(h(INF_HAT)) - Fraction(h(INF_CHECK))
    predicted = r * (1 - r) * gap_f * gap_h
    if direct != predicted:
        raise InvariantViolation(
            f"averaging residual mismatch at {x}: direct {direct} vs closed form {predicted}"
        )
    return direct


def translation_gap(
    profile: LimitProfile, f: Callable, g: GroupElement, sample: Iterable[Point]
) -> Fraction:
    """max over the sample of |(Sf)(gx) - (Sf)(x)|; nonzero gaps witness an
    orbit closure carrying more than one invariant measure."""
    sf = limit_apply(profile, f)
    return max((abs(sf(act(g, x)) - sf(x)) for x in sample), default=Fraction(0))


def average_invariance_defect(
    folner: FolnerSet, g: GroupElement, f: Callable, sample: Iterable[Point]
) -> Fraction:
    """max over the sample of |S_n(g.f - f)(x)| where (g.f)(x) = f(gx)."""
    worst = Fraction(0)
    for x in sample:
        shifted = folner_average(folner, lambda p: f(act(g, p)), x)
        plain = folner_average(folner, f, x)
        worst = max(worst, abs(shifted - plain))
    return worst


def invariance_gap(
    mu: DiscreteMeasure,
    generators: Sequence[GroupElement] = GENERATORS,
    functions: Sequence[Callable] | None = None,
) -> Fraction:
    """max over generators g and test functions of |(g_* mu)(f) - mu(f)|."""
    functions = list(functions) if functions is not None else canonical_family()
    worst = Fraction(0)
    for g in generators:
        pushed = DiscreteMeasure.from_pairs((act(g, p), m) for p, m in mu.atoms)
        for f in functions:
            worst = max(worst, abs(pushed.integrate(f) - mu.integrate(f)))
    return worst


@dataclass(frozen=True)
class CaseBundle:
    """One of the four behaviours of the rate-family averages, with the
    profile realizing it and the expected verdicts."""

    case: str
    profile: LimitProfile
    continuous: bool
    finite_ergodic: str  # "none" | "some" | "all"


_CASES = {
    "a": (RateSequence.constant(Fraction(1, 2)), False, "none"),
    "b": (RateSequence.decay(), True, "none"),
    "c": (RateSequence.split(), True, "some"),
    "d": (RateSequence.constant(0), True, "all"),
}


def example_case(case: str) -> CaseBundle:
    if case not in _CASES:
        raise ValueError(f"case must be one of {sorted(_CASES)}, got {case!r}")
    rate, continuous, pattern = _CASES[case]
    return CaseBundle(case, LimitProfile(rate), continuous, pattern)


def is_ergodic(profile: LimitProfile, position: int) -> bool:
    """The limit at a finite point is ergodic iff it is a point mass."""
    return profile.rate.value(position) in (Fraction(0), Fraction(1))


def verdicts(profile: LimitProfile, position_bound: int = 64) -> tuple[bool, str]:
    """(continuity of x -> limit measure, ergodicity pattern over finite
    points with |position| <= bound).  Continuity holds iff the rate tends
    to 0 along both tails, i.e. iff the window default is 0."""
    continuous = profile.rate.default == 0
    flags = [is_ergodic(profile, b) for b in range(-position_bound, position_bound + 1)]
    pattern = "all" if all(flags) else ("none" if not any(flags) else "some")
    return continuous, pattern
