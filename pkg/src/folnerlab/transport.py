"""Finitely supported measures and exact optimal transport.

The Wasserstein distance between two finitely supported probability
measures is computed as an exact minimum-cost transportation plan
(simplex on the transportation polytope with Bland pivoting, all
arithmetic in ``Fraction``).  The permutation form over a finite group
set is solved by an exact shortest-augmenting-path assignment; at every
finite size the two agree (Birkhoff), which the test suite checks
against both a factorial brute force and a basis-enumeration oracle.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

from .errors import GuardViolation, LipschitzViolation, MetricOracleError
from . import lamplighter
from .folner import FolnerSet, enumerate_elements

#: Largest group set accepted by the assignment solver.
ASSIGNMENT_GUARD = 4096

MASS_TOLERANCE = Fraction(1, 10**12)


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if value != value:
            raise MetricOracleError("NaN value")
        return Fraction(value)
    return Fraction(value)


def _checked_cost(dist, x, y) -> Fraction:
    value = dist(x, y)
    if isinstance(value, float) and value != value:
        raise MetricOracleError(f"metric returned NaN at ({x!r}, {y!r})")
    cost = _to_fraction(value)
    if cost < 0:
        raise MetricOracleError(f"metric returned negative value {value!r}")
    return cost


@dataclass(frozen=True)
class DiscreteMeasure:
    """A probability measure with finitely many atoms (duplicates merged)."""

    atoms: tuple[tuple[Hashable, Fraction], ...]

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[Hashable, object]]) -> "DiscreteMeasure":
        merged: dict[Hashable, Fraction] = {}
        for point, mass in pairs:
            m = _to_fraction(mass)
            if m < 0:
                raise ValueError(f"negative mass {mass!r}")
            if m > 0:
                merged[point] = merged.get(point, Fraction(0)) + m
        if not merged:
            raise ValueError("a measure needs at least one atom of positive mass")
        total = sum(merged.values())
        if abs(total - 1) > MASS_TOLERANCE:
            raise ValueError(f"masses sum to {total}, not 1")
        return DiscreteMeasure(tuple(merged.items()))

    @staticmethod
    def point_mass(point: Hashable) -> "DiscreteMeasure":
        return DiscreteMeasure(((point, Fraction(1)),))

    @staticmethod
    def uniform(points: Sequence[Hashable]) -> "DiscreteMeasure":
        n = len(points)
        return DiscreteMeasure.from_pairs((p, Fraction(1, n)) for p in points)

    def integrate(self, f: Callable) -> Fraction:
        return sum((mass * _to_fraction(f(point)) for point, mass in self.atoms), Fraction(0))

    def support(self) -> tuple[Hashable, ...]:
        return tuple(point for point, _ in self.atoms)

    def mass_where(self, predicate: Callable[[Hashable], bool]) -> Fraction:
        return sum((mass for point, mass in self.atoms if predicate(point)), Fraction(0))


@dataclass(frozen=True)
class TransportPlan:
    """Flows (source index, target index, mass) between two atom lists."""

    flows: tuple[tuple[int, int, Fraction], ...]

    def validate(self, mu: DiscreteMeasure, nu: DiscreteMeasure) -> None:
        row = defaultdict(Fraction)
        col = defaultdict(Fraction)
        for i, j, mass in self.flows:
            if mass < 0:
                raise ValueError("negative flow")
            row[i] += mass
            col[j] += mass
        for i, (_, mass) in enumerate(mu.atoms):
            if abs(row[i] - mass) > MASS_TOLERANCE:
                raise ValueError(f"row marginal {i} is {row[i]}, expected {mass}")
        for j, (_, mass) in enumerate(nu.atoms):
            if abs(col[j] - mass) > MASS_TOLERANCE:
                raise ValueError(f"column marginal {j} is {col[j]}, expected {mass}")

    def cost(self, costs: Sequence[Sequence[Fraction]]) -> Fraction:
        return sum((mass * costs[i][j] for i, j, mass in self.flows), Fraction(0))


def _northwest_corner(supplies, demands):
    m, n = len(supplies), len(demands)
    rs, rd = list(supplies), list(demands)
    basis, flow = [], {}
    i = j = 0
    while True:
        q = min(rs[i], rd[j])
        basis.append((i, j))
        flow[(i, j)] = q
        rs[i] -= q
        rd[j] -= q
        if i == m - 1 and j == n - 1:
            break
        if rs[i] == 0 and i < m - 1:
            i += 1
        else:
            j += 1
    return basis, flow


def _tree_potentials(basis, costs, m, n):
    rows_adj = defaultdict(list)
    cols_adj = defaultdict(list)
    for i, j in basis:
        rows_adj[i].append(j)
        cols_adj[j].append(i)
    u = [None] * m
    v = [None] * n
    u[0] = Fraction(0)
    stack = [("r", 0)]
    while stack:
        side, idx = stack.pop()
        if side == "r":
            for j in rows_adj[idx]:
                if v[j] is None:
                    v[j] = costs[idx][j] - u[idx]
                    stack.append(("c", j))
        else:
            for i in cols_adj[idx]:
                if u[i] is None:
                    u[i] = costs[i][idx] - v[idx]
                    stack.append(("r", i))
    if any(x is None for x in u) or any(x is None for x in v):
        raise AssertionError("transportation basis is not a spanning tree")
    return u, v


def _basis_cycle(basis, entering):
    """Path through the basis tree closing the entering cell into a cycle;
    returns the path cells in order starting at the entering row."""
    ie, je = entering
    rows_adj = defaultdict(list)
    cols_adj = defaultdict(list)
    for i, j in basis:
        rows_adj[i].append(j)
        cols_adj[j].append(i)
    start, goal = ("r", ie), ("c", je)
    parent = {start: None}
    stack = [start]
    while stack:
        node = stack.pop()
        if node == goal:
            break
        side, idx = node
        neighbours = (
            (("c", j) for j in rows_adj[idx]) if side == "r" else (("r", i) for i in cols_adj[idx])
        )
        for nxt in neighbours:
            if nxt not in parent:
                parent[nxt] = node
                stack.append(nxt)
    node = goal
    nodes = []
    while node is not None:
        nodes.append(node)
        node = parent[node]
    nodes.reverse()  # r_ie ... c_je
    cells = []
    for a, b in zip(nodes, nodes[1:]):
        (sa, ia), (sb, ib) = a, b
        cells.append((ia, ib) if sa == "r" else (ib, ia))
    return cells


def transportation_plan(supplies, demands, costs):
    """Exact minimum-cost transportation: NW-corner start, then simplex
    pivots with Bland's rule (first negative reduced cost enters, smallest
    tied minus-cell leaves).  Returns (value, flows dict)."""
    m, n = len(supplies), len(demands)
    basis, flow = _northwest_corner(supplies, demands)
    cap = 200 + 30 * m * n
    for _ in range(cap):
        u, v = _tree_potentials(basis, costs, m, n)
        in_basis = set(basis)
        entering = None
        for i in range(m):
            for j in range(n):
                if (i, j) not in in_basis and costs[i][j] - u[i] - v[j] < 0:
                    entering = (i, j)
                    break
            if entering:
                break
        if entering is None:
            break
        path = _basis_cycle(basis, entering)
        minus = path[0::2]  # path cells alternate -, +, -, ... after the entering +
        theta = min(flow[c] for c in minus)
        leaving = min(c for c in minus if flow[c] == theta)
        flow[entering] = Fraction(0)
        sign = 1
        for cell in [entering] + path:
            flow[cell] += theta if sign > 0 else -theta
            sign = -sign
        del flow[leaving]
        basis = sorted(flow.keys())
    else:
        raise AssertionError("transportation simplex failed to terminate")
    value = sum((q * costs[i][j] for (i, j), q in flow.items()), Fraction(0))
    return value, {cell: q for cell, q in flow.items() if q > 0}


def wasserstein(
    mu: DiscreteMeasure, nu: DiscreteMeasure, dist: Callable
) -> tuple[Fraction, TransportPlan]:
    """Exact optimal-transport distance and an optimal plan."""
    costs = [[_checked_cost(dist, p, q) for q, _ in nu.atoms] for p, _ in mu.atoms]
    supplies = [mass for _, mass in mu.atoms]
    demands = [mass for _, mass in nu.atoms]
    value, flow = transportation_plan(supplies, demands, costs)
    plan = TransportPlan(tuple(sorted((i, j, q) for (i, j), q in flow.items())))
    plan.validate(mu, nu)
    return value, plan


def dual_lower_bound(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    witnesses: Iterable[Callable],
    dist: Callable,
) -> Fraction:
    """max over witnesses of |mu(f) - nu(f)|, after verifying each witness
    is 1-Lipschitz on every pair of support points.  Always a lower bound
    for the transport distance."""
    points = list(dict.fromkeys(mu.support() + nu.support()))
    best = Fraction(0)
    for f in witnesses:
        declared = getattr(f, "lipschitz", Fraction(1))
        if declared > 1:
            raise LipschitzViolation(f"witness declares Lipschitz constant {declared} > 1")
        values = {p: _to_fraction(f(p)) for p in points}
        for a in range(len(points)):
            for b in range(a + 1, len(points)):
                p, q = points[a], points[b]
                if abs(values[p] - values[q]) > _checked_cost(dist, p, q):
                    raise LipschitzViolation(
                        f"witness violates the 1-Lipschitz bound on ({p!r}, {q!r})"
                    )
        best = max(best, abs(mu.integrate(f) - nu.integrate(f)))
    return best


def solve_assignment(costs: Sequence[Sequence[Fraction]]) -> tuple[Fraction, list[int]]:
    """Exact square assignment via shortest augmenting paths with dual
    potentials; returns (total cost, column assigned to each row)."""
    n = len(costs)
    INF = float("inf")
    u = [Fraction(0)] * (n + 1)
    v = [Fraction(0)] * (n + 1)
    match = [0] * (n + 1)  # match[j] = row occupying column j (1-based, 0 = free)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        way = [0] * (n + 1)
        while True:
            used[j0] = True
            i0, delta, j1 = match[j0], INF, 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = costs[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    assignment = [0] * n
    for j in range(1, n + 1):
        assignment[match[j] - 1] = j - 1
    total = sum((costs[i][assignment[i]] for i in range(n)), Fraction(0))
    return total, assignment


def assignment_distance(
    folner: FolnerSet,
    x: "lamplighter.Point",
    y: "lamplighter.Point",
    act: Callable = lamplighter.act,
    dist: Callable = lamplighter.metric,
) -> Fraction:
    """min over permutations p of F of the average of d(gx, p(g)y)."""
    elements = enumerate_elements(folner)
    if len(elements) > ASSIGNMENT_GUARD:
        raise GuardViolation(
            f"assignment guard: |F| = {len(elements)} exceeds {ASSIGNMENT_GUARD}"
        )
    xs = [act(g, x) for g in elements]
    ys = [act(g, y) for g in elements]
    costs = [[_checked_cost(dist, p, q) for q in ys] for p in xs]
    total, _ = solve_assignment(costs)
    return total / len(elements)
