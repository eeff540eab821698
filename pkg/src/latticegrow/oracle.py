"""Brute-force passage times on tiny instances, the ground truth for solvers.

These routines enumerate paths directly and are deliberately independent of
the production solvers.  They are only meant for boxes of radius a few sites
(FPP) or rectangles with at most a few thousand oriented paths (LPP).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .fpp import LatticeBox
from .weights import WeightField

__all__ = [
    "EnumerationBudget",
    "BudgetExceeded",
    "brute_force_fpp",
    "brute_force_lpp",
    "oriented_path_count",
]


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class EnumerationBudget:
    """Hard limits for exhaustive search; enumeration refuses rather than truncates."""

    max_vertices: int = 200
    max_paths: int = 2_000_000

    def __post_init__(self):
        if self.max_vertices <= 0 or self.max_paths <= 0:
            raise ValueError("enumeration budgets must be positive")


DEFAULT_BUDGET = EnumerationBudget()


def brute_force_fpp(
    field: WeightField,
    box: LatticeBox,
    source,
    target,
    budget: EnumerationBudget = DEFAULT_BUDGET,
) -> float:
    """Exact FPP passage time by exhaustive self-avoiding search with pruning.

    Requires strictly positive edge weights inside the box: positivity makes
    loop-erasure domination valid (restricting to self-avoiding paths is then
    lossless) and makes branch-and-bound pruning sound.  Partial paths are
    also discarded once current weight plus a per-step lower bound times the
    remaining l1 distance cannot beat the incumbent.
    """
    if field.attachment != "edge":
        raise ValueError("FPP enumeration needs an edge field")
    source = tuple(int(c) for c in source)
    target = tuple(int(c) for c in target)
    if not box.contains(source) or not box.contains(target):
        raise ValueError("source and target must lie inside the box")
    if box.vertex_count() > budget.max_vertices:
        raise BudgetExceeded(
            f"box has {box.vertex_count()} vertices, budget allows {budget.max_vertices}"
        )

    d = field.dimension
    steps = [tuple(s * int(i == j) for i in range(d)) for j in range(d) for s in (1, -1)]

    # cache the box's edge weights once and reject zero weights up front
    wcache: dict[tuple, float] = {}

    def w(u, v):
        key = (u, v) if u < v else (v, u)
        val = wcache.get(key)
        if val is None:
            val = field.edge_weight(u, v)
            if val <= 0.0:
                raise ValueError("zero or negative edge weight; pruning would be unsound")
            wcache[key] = val
        return val

    per_step_floor = field.spec.support_min()

    def l1(u, v):
        return sum(abs(a - b) for a, b in zip(u, v))

    # seed the incumbent with one explicit staircase path so pruning can bite
    best = 0.0
    cur = source
    for j in range(d):
        step = 1 if target[j] >= cur[j] else -1
        while cur[j] != target[j]:
            nxt = cur[:j] + (cur[j] + step,) + cur[j + 1 :]
            best += w(cur, nxt)
            cur = nxt

    paths_tried = 0
    on_path = {source}

    def search(u, acc):
        nonlocal best, paths_tried
        if u == target:
            if acc < best:
                best = acc
            return
        paths_tried += 1
        if paths_tried > budget.max_paths:
            raise BudgetExceeded(f"path budget {budget.max_paths} exceeded")
        for s in steps:
            v = tuple(a + b for a, b in zip(u, s))
            if v in on_path or not box.contains(v):
                continue
            nacc = acc + w(u, v)
            if nacc + per_step_floor * l1(v, target) >= best:
                continue
            on_path.add(v)
            search(v, nacc)
            on_path.discard(v)

    if source == target:
        return 0.0
    search(source, 0.0)
    return best


def oriented_path_count(target) -> int:
    """Number of oriented lattice paths from the origin to target >= 0 (d = 2)."""
    x1, x2 = (int(c) for c in target)
    if x1 < 0 or x2 < 0:
        raise ValueError("target must have nonnegative coordinates")
    return math.comb(x1 + x2, x1)


def brute_force_lpp(
    field: WeightField,
    target,
    budget: EnumerationBudget = DEFAULT_BUDGET,
    count_out: list | None = None,
) -> float:
    """Exact LPP passage time by full enumeration of oriented paths (d = 2).

    Weights are read through the vector route so that values are bit-exact
    against the dynamic-programming table built from the same field.  Each
    path sum accumulates left to right (cumulative sums), matching the order
    the recursion uses.  The initial vertex is excluded from every sum.
    """
    if field.attachment != "vertex":
        raise ValueError("LPP enumeration needs a vertex field")
    if field.dimension != 2:
        raise ValueError("LPP enumeration is implemented for d = 2")
    x1, x2 = (int(c) for c in target)
    if x1 < 0 or x2 < 0:
        raise ValueError("target must have nonnegative coordinates")
    npaths = oriented_path_count((x1, x2))
    if npaths > budget.max_paths:
        raise BudgetExceeded(f"{npaths} oriented paths exceed budget {budget.max_paths}")
    if count_out is not None:
        count_out.append(npaths)
    if x1 == 0 and x2 == 0:
        return 0.0

    grid = np.stack(np.meshgrid(np.arange(x1 + 1), np.arange(x2 + 1), indexing="ij"), axis=-1)
    wgrid = field.vertex_weights(grid)

    nsteps = x1 + x2
    # a path is the choice of which of the x1+x2 steps move along the first axis
    combos = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(nsteps), x1)),
        dtype=np.int64,
        count=npaths * x1,
    ).reshape(npaths, x1)
    moves_x = np.zeros((npaths, nsteps), dtype=np.int64)
    if x1 > 0:
        np.put_along_axis(moves_x, combos, 1, axis=1)
    ii = np.cumsum(moves_x, axis=1)
    jj = np.arange(1, nsteps + 1, dtype=np.int64)[None, :] - ii
    path_weights = wgrid[ii, jj]
    # cumulative sums accumulate each path left to right, same order as the
    # recursion, so the maximum below is bit-exact against it
    totals = np.cumsum(path_weights, axis=1)[:, -1]
    return float(totals.max())
