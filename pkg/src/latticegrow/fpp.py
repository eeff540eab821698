"""Exact finite-volume first-passage percolation.

``fpp_dijkstra`` realizes the passage-time infimum exactly on a truncated
box of Z^d: for every settled vertex the reported value is the minimum total
edge weight over all paths staying inside the box.  Boxes do not auto-grow;
instead a boundary-hit flag reports whether truncation could have biased any
value at or below the solve's horizon, which callers use either to certify
exactness (flag off means enlarging the box cannot change anything) or to
propagate a warning.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .weights import WeightField

__all__ = [
    "LatticeBox",
    "PassageTimeMap",
    "Geodesic",
    "GreedyPath",
    "fpp_dijkstra",
    "fpp_ball",
    "fpp_geodesic",
    "wandering_deviation",
    "greedy_forward_path",
    "lattice_point",
]

Vertex = tuple


def lattice_point(x) -> Vertex:
    """Map a real point to its lattice representative by componentwise floor."""
    return tuple(int(math.floor(c)) for c in x)


@dataclass(frozen=True)
class LatticeBox:
    """The box center + [-radius, radius]^d intersected with Z^d."""

    dimension: int
    radius: int
    center: Vertex | None = None

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError(f"box radius must be >= 1, got {self.radius}")
        if self.dimension < 1:
            raise ValueError(f"box dimension must be >= 1, got {self.dimension}")
        if self.center is not None and len(self.center) != self.dimension:
            raise ValueError("box center does not match dimension")

    def _center(self) -> Vertex:
        return self.center if self.center is not None else (0,) * self.dimension

    def contains(self, v) -> bool:
        c = self._center()
        return all(abs(int(vi) - ci) <= self.radius for vi, ci in zip(v, c))

    def on_face(self, v) -> bool:
        c = self._center()
        return any(abs(int(vi) - ci) == self.radius for vi, ci in zip(v, c))

    def vertex_count(self) -> int:
        return (2 * self.radius + 1) ** self.dimension


@dataclass
class PassageTimeMap:
    """Finite table of passage times T(source, .) from one Dijkstra solve.

    times maps each settled vertex to its exact in-box passage time; order
    records the settling sequence (used by the infection-order coupling).
    horizon is the largest t for which the ball B(t) is fully settled, and
    boundary_hit reports whether any vertex on the box face settled with
    time at or below that horizon.
    """

    source: Vertex
    box: LatticeBox
    times: dict = dc_field(default_factory=dict)
    order: list = dc_field(default_factory=list)
    horizon: float = math.inf
    boundary_hit: bool = False
    frontier_exhausted: bool = False

    def settled(self, v) -> bool:
        return tuple(v) in self.times

    def time_to(self, v) -> float:
        v = tuple(v)
        if v not in self.times:
            raise KeyError(f"vertex {v} was not settled")
        return self.times[v]

    def to_csv(self, path) -> None:
        d = self.box.dimension
        with open(path, "w", newline="") as fh:
            fh.write(",".join(f"x{i + 1}" for i in range(d)) + ",T\n")
            for v in self.order:
                coords = ",".join(str(c) for c in v)
                fh.write(f"{coords},{format(self.times[v], '.17g')}\n")


def _neighbor_steps(d: int):
    steps = []
    for j in range(d):
        for s in (1, -1):
            steps.append(tuple(s * int(i == j) for i in range(d)))
    return steps


def fpp_dijkstra(
    field: WeightField,
    source,
    box: LatticeBox,
    *,
    time_budget: float | None = None,
    target=None,
    max_settled: int | None = None,
) -> PassageTimeMap:
    """Single-source shortest passage times on the box, with optional stops.

    Stop criteria (any combination): settle everything with T <= time_budget,
    stop once target settles, or stop after max_settled vertices.  With no
    criterion the whole box is settled.
    """
    if field.attachment != "edge":
        raise ValueError("FPP needs an edge weight field")
    if field.dimension != box.dimension:
        raise ValueError("field and box dimensions differ")
    source = tuple(int(c) for c in source)
    if not box.contains(source):
        raise ValueError(f"source {source} lies outside the box")
    if target is not None:
        target = tuple(int(c) for c in target)
        if not box.contains(target):
            raise ValueError(f"target {target} lies outside the box")
    if time_budget is not None and time_budget < 0:
        raise ValueError(f"time budget must be nonnegative, got {time_budget}")

    # steps annotated with (axis, moves-positive) so relaxations can use the
    # canonical edge lookup directly instead of re-validating endpoints
    step_info = []
    for j, s in enumerate(_neighbor_steps(box.dimension)):
        step_info.append((s, j // 2, j % 2 == 0))
    canon_w = field._edge_weight_canonical
    times: dict = {}
    order: list = []
    heap = [(0.0, source)]
    best_seen = {source: 0.0}
    face_hit_time = math.inf
    stopped_at = None

    while heap:
        t, u = heapq.heappop(heap)
        if u in times:
            continue
        if time_budget is not None and t > time_budget:
            stopped_at = t
            break
        times[u] = t
        order.append(u)
        if box.on_face(u) and t < face_hit_time:
            face_hit_time = t
        if target is not None and u == target:
            stopped_at = t
            break
        if max_settled is not None and len(times) >= max_settled:
            stopped_at = t
            break
        for s, axis, positive in step_info:
            v = tuple(a + b for a, b in zip(u, s))
            if v in times or not box.contains(v):
                continue
            nt = t + canon_w(u if positive else v, axis)
            prev = best_seen.get(v)
            if prev is None or nt < prev:
                best_seen[v] = nt
                heapq.heappush(heap, (nt, v))

    exhausted = not heap and stopped_at is None
    horizons = []
    flag_cut = math.inf
    if time_budget is not None:
        # everything with T <= budget settled before the first over-budget pop
        horizons.append(float(time_budget))
        flag_cut = min(flag_cut, float(time_budget))
    if target is not None and target in times:
        # unsettled vertices tied exactly at T(target) may remain in the heap
        horizons.append(math.nextafter(times[target], -math.inf))
        flag_cut = min(flag_cut, times[target])
    if max_settled is not None and len(times) >= max_settled and order:
        horizons.append(math.nextafter(times[order[-1]], -math.inf))
        flag_cut = min(flag_cut, times[order[-1]])
    horizon = min(horizons) if horizons else math.inf

    return PassageTimeMap(
        source=source,
        box=box,
        times=times,
        order=order,
        horizon=horizon,
        boundary_hit=face_hit_time <= flag_cut,
        frontier_exhausted=exhausted,
    )


def fpp_ball(pmap: PassageTimeMap, t: float) -> set:
    """The infected set B(t) = settled vertices with passage time <= t.

    Refuses when t exceeds the map's settled horizon, since the result would
    then silently under-report.
    """
    if t > pmap.horizon:
        raise ValueError(f"t={t} exceeds the settled horizon {pmap.horizon}")
    return {v for v, tau in pmap.times.items() if tau <= t}


def ball_to_csv(ball, d: int, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(f"x{i + 1}" for i in range(d)) + "\n")
        for v in sorted(ball):
            fh.write(",".join(str(c) for c in v) + "\n")


@dataclass(frozen=True)
class Geodesic:
    """A minimizing path with its passage time; ties broken canonically."""

    vertices: tuple
    total_time: float
    tie_break: str = "lexicographic-predecessor"


def fpp_geodesic(field: WeightField, pmap: PassageTimeMap, target) -> Geodesic:
    """Recover a minimizing path to a settled target by backtracking.

    At each vertex the predecessor is the lexicographically smallest settled
    neighbor u with T(u) + w(u, v) == T(v) exactly, which pins a canonical
    geodesic even when atomic weights make the minimizer non-unique.  The
    equality test is exact because Dijkstra assigned T(v) as exactly such a
    sum.  Vertices already on the partial path are skipped so that plateaus
    of zero-weight edges cannot cycle.
    """
    target = tuple(int(c) for c in target)
    if target not in pmap.times:
        raise KeyError(f"target {target} was not settled")
    steps = _neighbor_steps(pmap.box.dimension)
    path = [target]
    seen = {target}
    v = target
    while v != pmap.source:
        tv = pmap.times[v]
        pred = None
        for s in steps:
            u = tuple(a + b for a, b in zip(v, s))
            if u in seen or u not in pmap.times:
                continue
            if pmap.times[u] + field.edge_weight(u, v) == tv:
                if pred is None or u < pred:
                    pred = u
        if pred is None:
            raise RuntimeError(f"backtracking from {target} stalled at {v}")
        path.append(pred)
        seen.add(pred)
        v = pred
    path.reverse()
    return Geodesic(vertices=tuple(path), total_time=pmap.times[target])


def wandering_deviation(geo: Geodesic, x, y) -> float:
    """Maximal Euclidean distance from the geodesic's vertices to segment [x, y]."""
    if not geo.vertices:
        raise ValueError("empty path")
    if geo.vertices[0] != tuple(x) or geo.vertices[-1] != tuple(y):
        raise ValueError("geodesic endpoints do not match the segment")
    pts = np.asarray(geo.vertices, dtype=np.float64)
    return float(max_distance_to_segment(pts, np.asarray(x, float), np.asarray(y, float)))


def max_distance_to_segment(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    seg = b - a
    denom = float(seg @ seg)
    rel = pts - a
    if denom == 0.0:
        return float(np.sqrt((rel * rel).sum(axis=1)).max())
    s = np.clip(rel @ seg / denom, 0.0, 1.0)
    foot = a + s[:, None] * seg
    diff = pts - foot
    return float(np.sqrt((diff * diff).sum(axis=1)).max())


@dataclass(frozen=True)
class GreedyPath:
    vertices: tuple
    step_weights: tuple
    total_weight: float


def greedy_forward_path(field: WeightField, steps: int) -> GreedyPath:
    """Follow the cheapest forward edge for the given number of steps.

    From each vertex, examine the d edges in the positive coordinate
    directions and cross the one of minimal weight (smallest axis on ties).
    Each step uses d fresh edge weights since the coordinate sum strictly
    increases.  Every step's weight is therefore a minimum of d independent
    draws; for rate-1 exponential weights that minimum has mean 1/d.
    """
    d = field.dimension
    if field.attachment != "edge":
        raise ValueError("greedy path needs an edge field")
    if d < 2:
        raise ValueError("greedy forward path needs dimension >= 2")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    cur = (0,) * d
    verts = [cur]
    wts = []
    total = 0.0
    canon = field._edge_weight_canonical
    for _ in range(steps):
        wbest = math.inf
        jbest = 0
        for j in range(d):
            w = canon(cur, j)
            if w < wbest:
                wbest = w
                jbest = j
        cur = cur[:jbest] + (cur[jbest] + 1,) + cur[jbest + 1 :]
        verts.append(cur)
        wts.append(wbest)
        total += wbest
    return GreedyPath(vertices=tuple(verts), step_weights=tuple(wts), total_weight=total)
