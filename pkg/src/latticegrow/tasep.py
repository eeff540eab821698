"""Totally asymmetric simple exclusion process with step initial condition.

Particles are numbered 1, 2, ... from the origin leftward: particle k starts
at site -(k-1), and every site to the right of the origin starts empty.  The
particle at the origin moves to site 1 immediately at time zero; after that,
a particle's next hop needs an exponential clock AND the site to its right
to be free.  Writing s(k, n) for the time of particle k's n-th step, the
dynamics collapse to the recursion

    s(k, n) = max(s(k-1, n), s(k, n-1)) + w(k, n),      s(1, 1) = 0,

with missing arguments dropped and one fresh mean-one exponential w(k, n)
per step (none is consumed by the immediate first step of particle 1).

The index map to oriented last-passage percolation is pinned by two
identities and nothing else: along the axis, particle 1 reaches site n + 1
exactly when the passage time to (n, 0) elapses, so s(1, n) = T(0, (n-1, 0));
and on the diagonal, T(0, (n, n)) <= t if and only if at least n particles
have passed through the origin by time t.  Both force

    s(k, n) = T(0, (n-1) e1 + (k-1) e2),

with step (k, n) consuming the weight at site (n-1, k-1), and force the
current c_t to count particles that started strictly left of the origin and
have reached site 1 (the particle born at the origin never passes *through*
it).  In coupled mode the weights are read from an LPP vertex field in the
same order and combined by the same recursion, so the step-time table equals
the last-passage table bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lpp import LppTimeMap
from .weights import WeightField

__all__ = [
    "StepTimeTable",
    "CurrentUndetermined",
    "tasep_run",
    "current_at",
    "current_series",
    "coupling_equivalence",
    "particle_position",
]


class CurrentUndetermined(ValueError):
    """The table is too small to determine the current at the asked time."""


@dataclass
class StepTimeTable:
    """s[k-1, n-1] = time at which particle k makes its n-th step."""

    s: np.ndarray
    coupling: str  # 'independent' or 'lpp'
    field: WeightField | None = None
    seed: int | None = None

    @property
    def particles(self) -> int:
        return self.s.shape[0]

    @property
    def steps(self) -> int:
        return self.s.shape[1]

    def step_time(self, k: int, n: int) -> float:
        if not (1 <= k <= self.particles and 1 <= n <= self.steps):
            raise KeyError(f"(k={k}, n={n}) outside table {self.s.shape}")
        return float(self.s[k - 1, n - 1])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("k,n,s\n")
            for k in range(self.particles):
                for n in range(self.steps):
                    fh.write(f"{k + 1},{n + 1},{format(float(self.s[k, n]), '.17g')}\n")


def _clock_matrix(particles: int, steps: int, *, seed=None, field=None, clocks=None):
    if sum(x is not None for x in (seed, field, clocks)) != 1:
        raise ValueError("provide exactly one of seed, field, clocks")
    if clocks is not None:
        clocks = np.asarray(clocks, dtype=np.float64)
        if clocks.shape != (particles, steps):
            raise ValueError(f"clocks must have shape {(particles, steps)}")
        return clocks, "independent"
    if field is not None:
        if field.attachment != "vertex":
            raise ValueError("coupled mode needs a vertex weight field")
        if field.spec.kind != "exponential" or field.spec.params[0] != 1.0:
            raise ValueError("coupled mode requires rate-1 exponential vertex weights")
        if field.dimension != 2:
            raise ValueError("coupled mode is two-dimensional")
        # step (k, n) consumes the weight at site (n-1, k-1)
        k0 = np.arange(particles, dtype=np.int64)[:, None]
        n0 = np.arange(steps, dtype=np.int64)[None, :]
        coords = np.stack(np.broadcast_arrays(n0, k0), axis=-1)
        return field.vertex_weights(coords), "lpp"
    rng = np.random.default_rng(seed)
    return rng.standard_exponential((particles, steps)), "independent"


def tasep_run(
    particles: int,
    steps: int,
    *,
    clock_seed: int | None = None,
    field: WeightField | None = None,
    clocks=None,
) -> StepTimeTable:
    """Step-time table for K particles making N steps each.

    Exactly one source of randomness must be given: clock_seed draws fresh
    independent exponential clocks, field couples the run to an LPP weight
    environment, and clocks supplies an explicit (K, N) matrix (the entry for
    step (1, 1) is ignored; that step happens at time zero).
    """
    if particles < 1 or steps < 1:
        raise ValueError("particles and steps must both be >= 1")
    w, coupling = _clock_matrix(
        particles, steps, seed=clock_seed, field=field, clocks=clocks
    )

    s = np.empty((particles, steps), dtype=np.float64)
    for k in range(particles):
        for n in range(steps):
            if k == 0 and n == 0:
                s[0, 0] = 0.0
                continue
            up = s[k - 1, n] if k > 0 else -math.inf
            left = s[k, n - 1] if n > 0 else -math.inf
            s[k, n] = max(up, left) + w[k, n]
    return StepTimeTable(s=s, coupling=coupling, field=field, seed=clock_seed)


def _diag_length(table: StepTimeTable) -> int:
    return min(table.particles, table.steps)


def current_at(table: StepTimeTable, t: float) -> int:
    """Number of particles that have passed through the origin by time t.

    Counted are particles that started at sites <= -1 and have reached site 1,
    i.e. particle k >= 2 after its k-th step.  Refuses when even the last
    tabulated passer has passed by t, because the true current could then
    exceed what the table shows.
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    diag = np.diagonal(table.s)
    m = _diag_length(table)
    if diag[m - 1] <= t:
        raise CurrentUndetermined(
            f"current at t={t} is not determined by a {table.particles} x "
            f"{table.steps} table; every tabulated particle has already passed"
        )
    return int(np.count_nonzero(diag[1:m] <= t))


def current_series(table: StepTimeTable, t_grid) -> list:
    return [(float(t), current_at(table, t)) for t in t_grid]


def current_series_to_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("t,c_t\n")
        for t, c in rows:
            fh.write(f"{format(t, '.17g')},{c}\n")


def particle_position(table: StepTimeTable, k: int, t: float) -> int:
    """Position of particle k at time t, recovered from its step times."""
    if not 1 <= k <= table.particles:
        raise KeyError(f"no particle {k} in the table")
    made = int(np.count_nonzero(table.s[k - 1] <= t))
    return -(k - 1) + made


def coupling_equivalence(table: StepTimeTable, lmap: LppTimeMap, n: int, t: float) -> bool:
    """Check T(0,(n,n)) <= t  iff  c_t >= n on a coupled run.

    Returns True when the two sides agree; a False return means the coupling
    is broken and is always a bug, never a valid outcome.
    """
    if table.coupling != "lpp" or table.field is None:
        raise ValueError("equivalence check needs an LPP-coupled table")
    if table.field != lmap.field:
        raise ValueError("table and map were built from different fields")
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > min(lmap.corner):
        raise ValueError(f"map corner {lmap.corner} does not cover (n, n) = ({n}, {n})")
    lhs = lmap.time_to((n, n)) <= t
    rhs = current_at(table, t) >= n
    return lhs == rhs
