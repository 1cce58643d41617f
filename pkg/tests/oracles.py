"""Independent brute-force oracles used by the tests.

These deliberately avoid the library's solver code paths: assignment by
factorial enumeration, transportation by enumerating spanning bases of
the bipartite support graph, matching by trying every injection, and
defects by materializing both sets.
"""

from fractions import Fraction
from itertools import combinations, permutations

from folnerlab.folner import FolnerSet, enumerate_elements
from folnerlab.lamplighter import GroupElement, act, compose, metric


def brute_assignment(costs) -> Fraction:
    """Minimum total cost over all permutations (n <= 8 or so)."""
    n = len(costs)
    best = None
    for perm in permutations(range(n)):
        total = sum((costs[i][perm[i]] for i in range(n)), Fraction(0))
        if best is None or total < best:
            best = total
    return best


def brute_assignment_distance(folner: FolnerSet, x, y) -> Fraction:
    elements = enumerate_elements(folner)
    xs = [act(g, x) for g in elements]
    ys = [act(g, y) for g in elements]
    costs = [[metric(p, q) for q in ys] for p in xs]
    return brute_assignment(costs) / len(elements)


def _solve_tree_flows(cells, supplies, demands):
    """Unique flow on a spanning tree of the transportation graph, or None
    if the tree equations force a negative flow."""
    flows = {}
    remaining_s = list(supplies)
    remaining_d = list(demands)
    cells = set(cells)
    while cells:
        # peel a leaf: a row or column meeting exactly one remaining cell
        progress = False
        for i, j in sorted(cells):
            row_cells = [c for c in cells if c[0] == i]
            col_cells = [c for c in cells if c[1] == j]
            if len(row_cells) == 1:
                q = remaining_s[i]
            elif len(col_cells) == 1:
                q = remaining_d[j]
            else:
                continue
            if q < 0:
                return None
            flows[(i, j)] = q
            remaining_s[i] -= q
            remaining_d[j] -= q
            cells.remove((i, j))
            progress = True
            break
        if not progress:
            return None
    if any(remaining_s) or any(remaining_d):
        return None
    if any(q < 0 for q in flows.values()):
        return None
    return flows


def vertex_enumeration_transport(supplies, demands, costs) -> Fraction:
    """Optimal transportation value by enumerating all spanning bases
    (m + n - 1 cells whose tree equations give a nonnegative flow)."""
    m, n = len(supplies), len(demands)
    all_cells = [(i, j) for i in range(m) for j in range(n)]
    best = None
    for cells in combinations(all_cells, m + n - 1):
        flows = _solve_tree_flows(cells, supplies, demands)
        if flows is None:
            continue
        total = sum((q * costs[i][j] for (i, j), q in flows.items()), Fraction(0))
        if best is None or total < best:
            best = total
    assert best is not None, "no feasible basis found"
    return best


def brute_matching(adjacency, size_left, size_right) -> int:
    """Maximum matching by trying every injection of every subset."""
    best = 0
    for k in range(min(size_left, size_right), best, -1):
        for rows in combinations(range(size_left), k):
            for image in permutations(range(size_right), k):
                if all(image[t] in adjacency[rows[t]] for t in range(k)):
                    return k
    return best


def brute_defect(folner: FolnerSet, g: GroupElement, side: str) -> Fraction:
    """|gF Δ F| / |F| (or right-sided) from materialized elements."""
    elements = set(enumerate_elements(folner))
    moved = {compose(g, h) if side == "left" else compose(h, g) for h in elements}
    return Fraction(len(elements ^ moved), len(elements))
