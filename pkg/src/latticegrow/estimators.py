"""Monte Carlo estimation of time constants, shapes, and scaling exponents.

Every trial draws its own weight field from a child seed derived as
mix(master seed, statistic tag, n, trial index), so estimates are
reproducible and independent of aggregation order and worker scheduling.
Passage-time samples come from the exact finite-volume solvers; first-passage
solves carry a truncation flag that propagates into per-point warnings.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass, field as dc_field

import numpy as np

from .fpp import (
    LatticeBox,
    fpp_ball,
    fpp_dijkstra,
    fpp_geodesic,
    lattice_point,
    max_distance_to_segment,
)
from .lpp import exact_g, exact_shape_for, lpp_dp, lpp_geodesic
from .weights import DistributionSpec, WeightField, derive_seed

__all__ = [
    "SubadditiveSequence",
    "RadialShapeEstimate",
    "ExponentFit",
    "FeketeReport",
    "FlatEdgeReport",
    "VarianceSeries",
    "MeanSeries",
    "estimate_radial_g",
    "fekete_envelope",
    "shape_boundary_estimate",
    "flat_edge_probe",
    "variance_series",
    "wandering_series",
    "shape_gap_series",
    "fit_exponent",
    "chi_from_variance_fit",
    "kpz_residual",
]


# ---------------------------------------------------------------------------
# result containers


@dataclass
class SubadditiveSequence:
    """Per-n sample means of T(0, [n x]) / n with standard errors."""

    model: str
    direction: tuple
    ns: np.ndarray
    means: np.ndarray
    stderrs: np.ndarray
    trials: int
    truncation_warnings: dict = dc_field(default_factory=dict)

    def to_csv(self, path) -> None:
        _series_to_csv(path, self.ns, self.means, self.stderrs, self.trials)


@dataclass
class MeanSeries:
    """Generic (n, value, stderr) series with a statistic tag."""

    statistic: str
    ns: np.ndarray
    values: np.ndarray
    stderrs: np.ndarray
    trials: int
    truncation_warnings: dict = dc_field(default_factory=dict)

    def to_csv(self, path) -> None:
        _series_to_csv(path, self.ns, self.values, self.stderrs, self.trials)


@dataclass
class VarianceSeries:
    """Unbiased sample variances of T(0, [n x]) with bootstrap uncertainty."""

    ns: np.ndarray
    variances: np.ndarray
    boot_se: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    trials: int
    truncation_warnings: dict = dc_field(default_factory=dict)

    def to_csv(self, path) -> None:
        _series_to_csv(path, self.ns, self.variances, self.boot_se, self.trials)


@dataclass
class RadialShapeEstimate:
    """Per-direction radial reach of B(t)/t with a convexity diagnostic."""

    model: str
    t: float
    angles: np.ndarray
    radii: np.ndarray
    stderrs: np.ndarray
    trials: int
    convexity_violation_fraction: float
    truncated_trials: int = 0

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("angle,radius,stderr,trials\n")
            for a, r, s in zip(self.angles, self.radii, self.stderrs):
                fh.write(
                    f"{format(a, '.17g')},{format(r, '.17g')},"
                    f"{format(s, '.17g')},{self.trials}\n"
                )


@dataclass
class FeketeReport:
    ns: np.ndarray
    envelope: np.ndarray
    violations: list  # (m, n, excess, allowed) beyond noise


@dataclass
class FlatEdgeReport:
    p: float
    n: int
    trials: int
    mean_ratio: float
    stderr: float
    ci95: tuple


@dataclass(frozen=True)
class ExponentFit:
    """Inverse-variance weighted log-log slope with its standard error."""

    statistic: str
    slope: float
    intercept: float
    slope_stderr: float
    n_range: tuple

    def as_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "slope": self.slope,
            "intercept": self.intercept,
            "slope_stderr": self.slope_stderr,
            "n_range": list(self.n_range),
        }


def _series_to_csv(path, ns, values, stderrs, trials) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("n,value,stderr,trials\n")
        for n, v, s in zip(ns, values, stderrs):
            fh.write(f"{int(n)},{format(v, '.17g')},{format(s, '.17g')},{trials}\n")


# ---------------------------------------------------------------------------
# sampling machinery


def _map_trials(fn, tasks, workers: int):
    if workers and workers > 1:
        with multiprocessing.Pool(processes=workers) as pool:
            return pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers)))
    return [fn(t) for t in tasks]


def _check_fpp_spec(spec: DistributionSpec) -> None:
    # surrogate for "not too many zero weights": continuous, or bounded away from 0
    if not (spec.is_continuous() or spec.support_min() > 0):
        raise ValueError(
            f"FPP estimation needs a continuous distribution or one with "
            f"strictly positive support, got {spec.token()}"
        )


def _fpp_target_solve(field: WeightField, target, *, want_geodesic: bool):
    """Exact point passage time on an adaptively enlarged box.

    Exactness is certified by the boundary flag: when no face vertex settles
    at or below T(target), enlarging the box cannot change any value.
    """
    l1 = sum(abs(c) for c in target)
    base = int(math.ceil(1.3 * l1)) + 10
    for attempt in range(3):
        box = LatticeBox(field.dimension, base << attempt)
        pmap = fpp_dijkstra(field, (0,) * field.dimension, box, target=target)
        if not pmap.boundary_hit:
            break
    t = pmap.time_to(target)
    dev = None
    if want_geodesic:
        geo = fpp_geodesic(field, pmap, target)
        pts = np.asarray(geo.vertices, dtype=np.float64)
        dev = max_distance_to_segment(
            pts, np.zeros(field.dimension), np.asarray(target, float)
        )
    return t, dev, pmap.boundary_hit


def _passage_trial(args):
    model, spec, target, child_seed, want_geodesic = args
    d = len(target)
    if model == "fpp":
        fld = WeightField(spec, child_seed, "edge", d)
        return _fpp_target_solve(fld, target, want_geodesic=want_geodesic)
    fld = WeightField(spec, child_seed, "vertex", d)
    lmap = lpp_dp(fld, target)
    t = lmap.time_to(target)
    dev = None
    if want_geodesic:
        path = lpp_geodesic(lmap, fld, target)
        pts = np.asarray((path.start,) + path.vertices, dtype=np.float64)
        dev = max_distance_to_segment(pts, np.zeros(d), np.asarray(target, float))
    return t, dev, False


def _sample_times(model, spec, direction, n_grid, trials, seed, tag, workers,
                  want_geodesic=False):
    """Passage-time (and optionally wandering) samples on an n-grid.

    Returns (ns, targets, times[n_index, trial], devs or None, trunc counts).
    """
    if model not in ("fpp", "lpp"):
        raise ValueError(f"model must be 'fpp' or 'lpp', got {model!r}")
    if model == "fpp":
        _check_fpp_spec(spec)
    direction = tuple(float(c) for c in direction)
    if model == "lpp" and any(c < 0 for c in direction):
        raise ValueError("LPP directions must be componentwise nonnegative")
    ns = sorted(int(n) for n in n_grid)
    if len(set(ns)) != len(ns):
        raise ValueError("n-grid entries must be distinct")
    targets = []
    for n in ns:
        tgt = lattice_point(tuple(n * c for c in direction))
        if all(c == 0 for c in tgt):
            raise ValueError(f"n={n} in direction {direction} floors to the origin")
        targets.append(tgt)

    full_tag = f"{tag}:{model}:{spec.token()}:{direction}"
    tasks = [
        (model, spec, targets[j], derive_seed(seed, full_tag, ns[j], i), want_geodesic)
        for j in range(len(ns))
        for i in range(trials)
    ]
    results = _map_trials(_passage_trial, tasks, workers)

    times = np.empty((len(ns), trials))
    devs = np.empty((len(ns), trials)) if want_geodesic else None
    trunc: dict = {}
    for j in range(len(ns)):
        for i in range(trials):
            t, dev, hit = results[j * trials + i]
            times[j, i] = t
            if want_geodesic:
                devs[j, i] = dev
            if hit:
                trunc[ns[j]] = trunc.get(ns[j], 0) + 1
    return np.array(ns), targets, times, devs, trunc


def _mean_se(x: np.ndarray):
    mean = float(x.mean())
    se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return mean, se


# ---------------------------------------------------------------------------
# estimators


def estimate_radial_g(
    model: str,
    spec: DistributionSpec,
    direction,
    n_grid,
    trials: int,
    seed: int,
    workers: int = 1,
) -> SubadditiveSequence:
    """Monte Carlo sequence of T(0, [n x]) / n along one direction."""
    if trials < 2:
        raise ValueError("need at least 2 trials per grid point")
    ns, _targets, times, _devs, trunc = _sample_times(
        model, spec, direction, n_grid, trials, seed, "radial-g", workers
    )
    scaled = times / ns[:, None]
    means = scaled.mean(axis=1)
    stderrs = scaled.std(axis=1, ddof=1) / math.sqrt(trials)
    return SubadditiveSequence(
        model=model,
        direction=tuple(direction),
        ns=ns,
        means=means,
        stderrs=stderrs,
        trials=trials,
        truncation_warnings=trunc,
    )


def fekete_envelope(seq: SubadditiveSequence) -> FeketeReport:
    """Running infimum of a_k / k plus approximate-subadditivity violations.

    The running envelope converges to the sequence's limit when (a_n) is
    subadditive.  A pair (m, n) with m + n also on the grid is flagged when
    a_{m+n} exceeds a_m + a_n by more than three combined standard errors.
    """
    ns = seq.ns
    means = seq.means
    envelope = np.minimum.accumulate(means)
    idx = {int(n): j for j, n in enumerate(ns)}
    a = means * ns  # estimate of a_n itself
    a_se = seq.stderrs * ns
    violations = []
    for j, m in enumerate(ns):
        for k in range(j, len(ns)):
            n = int(ns[k])
            tot = int(m) + n
            if tot not in idx:
                continue
            jt = idx[tot]
            excess = a[jt] - a[j] - a[k]
            allowed = 3.0 * math.sqrt(a_se[jt] ** 2 + a_se[j] ** 2 + a_se[k] ** 2)
            if excess > allowed + 1e-9 * max(1.0, abs(a[jt])):
                violations.append((int(m), n, float(excess), float(allowed)))
    return FeketeReport(ns=ns, envelope=envelope, violations=violations)


def _fpp_ball_trial(args):
    spec, t, child_seed, d = args
    fld = WeightField(spec, child_seed, "edge", d)
    base = int(math.ceil(4.0 * t / spec.mean())) + 10
    for attempt in range(3):
        box = LatticeBox(d, base << attempt)
        pmap = fpp_dijkstra(fld, (0,) * d, box, time_budget=t)
        if not pmap.boundary_hit:
            break
    return fpp_ball(pmap, t), pmap.boundary_hit


def _lpp_ball_trial(args):
    spec, t, child_seed, d = args
    fld = WeightField(spec, child_seed, "vertex", d)
    side = int(math.ceil(2.5 * t / spec.mean())) + 8
    for attempt in range(3):
        s = side << attempt
        lmap = lpp_dp(fld, (s,) * d)
        tab = lmap.table
        hit = bool((tab[-1, :] <= t).any() or (tab[:, -1] <= t).any())
        if not hit:
            break
    ball = set(zip(*np.nonzero(tab <= t)))
    return {tuple(int(c) for c in v) for v in ball}, hit


def _radial_reach(ball: set, theta, step: float = 0.25, patience: int = 8):
    """Largest rho with [rho * theta] in the ball, scanned outward."""
    cx, cy = math.cos(theta), math.sin(theta)
    rho = 0.0
    last_hit = 0.0
    misses = 0
    while misses <= patience:
        rho += step
        v = (math.floor(rho * cx), math.floor(rho * cy))
        if v in ball:
            last_hit = rho
            misses = 0
        else:
            misses += 1
    return last_hit


def shape_boundary_estimate(
    model: str,
    spec: DistributionSpec,
    t: float,
    angles,
    trials: int,
    seed: int,
    workers: int = 1,
) -> RadialShapeEstimate:
    """Per-direction radial reach of the rescaled infected region B(t)/t."""
    if model not in ("fpp", "lpp"):
        raise ValueError(f"model must be 'fpp' or 'lpp', got {model!r}")
    if model == "fpp":
        _check_fpp_spec(spec)
    angles = np.asarray(angles, dtype=np.float64)
    if model == "lpp" and (np.any(angles < 0) or np.any(angles > math.pi / 2)):
        raise ValueError("LPP shape angles must lie in [0, pi/2]")
    tag = f"shape:{model}:{spec.token()}:{t}"
    tasks = [(spec, float(t), derive_seed(seed, tag, 0, i), 2) for i in range(trials)]
    trial_fn = _fpp_ball_trial if model == "fpp" else _lpp_ball_trial
    results = _map_trials(trial_fn, tasks, workers)

    reaches = np.empty((trials, angles.size))
    truncated = 0
    for i, (ball, hit) in enumerate(results):
        truncated += bool(hit)
        for j, th in enumerate(angles):
            reaches[i, j] = _radial_reach(ball, th) / t

    radii = reaches.mean(axis=0)
    stderrs = reaches.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros(angles.size)
    # radial resolution is limited by the lattice cell and the scan step
    quantization = 1.5 / t
    sigmas = np.hypot(stderrs, quantization)
    frac = _convexity_violation_fraction(angles, radii, sigmas, circular=(model == "fpp"))
    return RadialShapeEstimate(
        model=model,
        t=float(t),
        angles=angles,
        radii=radii,
        stderrs=stderrs,
        trials=trials,
        convexity_violation_fraction=frac,
        truncated_trials=truncated,
    )


def _convexity_violation_fraction(angles, radii, stderrs, circular: bool) -> float:
    """Fraction of angular triples that turn the wrong way beyond noise."""
    k = angles.size
    if k < 3:
        return 0.0
    pts = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)
    units = np.stack([np.cos(angles), np.sin(angles)], axis=1)

    def cross_of(p0, p1, p2):
        a = p1 - p0
        b = p2 - p1
        return a[0] * b[1] - a[1] * b[0]

    idx_triples = range(k) if circular else range(1, k - 1)
    bad = 0
    total = 0
    for j in idx_triples:
        i0, i1, i2 = (j - 1) % k, j, (j + 1) % k
        c = cross_of(pts[i0], pts[i1], pts[i2])
        # first-order noise: bump each radius by its stderr
        var = 0.0
        for ii in (i0, i1, i2):
            bumped = pts.copy()
            bumped[ii] = bumped[ii] + stderrs[ii] * units[ii]
            var += (cross_of(bumped[i0], bumped[i1], bumped[i2]) - c) ** 2
        tol = 3.0 * math.sqrt(var) + 1e-12
        total += 1
        if c < -tol:
            bad += 1
    return bad / total if total else 0.0


# -- flat edge ---------------------------------------------------------------


def _corridor_graph(field: WeightField, lo: int, hi: int):
    """CSR adjacency of the [lo, hi]^2 grid with weights from the field."""
    from scipy.sparse import csr_matrix

    side = hi - lo + 1
    xs = np.arange(lo, hi + 1, dtype=np.int64)
    # horizontal edges: lower endpoint (x, y), x < hi
    hx, hy = np.meshgrid(xs[:-1], xs, indexing="ij")
    h_lower = np.stack([hx, hy], axis=-1).reshape(-1, 2)
    h_w = field.edge_weights(h_lower, np.zeros(h_lower.shape[0], dtype=np.int64))
    # vertical edges: lower endpoint (x, y), y < hi
    vx, vy = np.meshgrid(xs, xs[:-1], indexing="ij")
    v_lower = np.stack([vx, vy], axis=-1).reshape(-1, 2)
    v_w = field.edge_weights(v_lower, np.ones(v_lower.shape[0], dtype=np.int64))

    def vid(pts):
        return (pts[:, 0] - lo) * side + (pts[:, 1] - lo)

    rows = np.concatenate([vid(h_lower), vid(v_lower)])
    cols = np.concatenate([vid(h_lower) + side, vid(v_lower) + 1])
    data = np.concatenate([h_w, v_w])
    nv = side * side
    return csr_matrix((data, (rows, cols)), shape=(nv, nv))


def _twopoint_diag_time(field: WeightField, n: int, margin: int = 32) -> float:
    """Exact full-lattice T(0, (n, n)) for weights bounded below by 1.

    Solved on the window [-m, n+m]^2 and certified: any path leaving the
    window takes at least 2n + 2m unit-or-larger steps, so a window optimum
    below that bound is the true lattice optimum.  The margin doubles until
    the certificate holds.
    """
    from scipy.sparse.csgraph import dijkstra as _sp_dijkstra

    if field.spec.support_min() < 1.0:
        raise ValueError("window certificate needs weights >= 1")
    m = margin
    while True:
        lo, hi = -m, n + m
        side = hi - lo + 1
        graph = _corridor_graph(field, lo, hi)
        src = (0 - lo) * side + (0 - lo)
        tgt = (n - lo) * side + (n - lo)
        dist = _sp_dijkstra(graph, directed=False, indices=src)
        t = float(dist[tgt])
        if t < 2 * n + 2 * m:
            return t
        if m > 4 * n + 64:
            raise RuntimeError("window certificate failed to close; weights suspect")
        m *= 2


def _flat_edge_trial(args):
    p, n, child_seed = args
    fld = WeightField(DistributionSpec("twopoint", (p,)), child_seed, "edge", 2)
    margin = 32 if p >= 0.75 else 96
    return _twopoint_diag_time(fld, n, margin)


def flat_edge_probe(p: float, n: int, trials: int, seed: int, workers: int = 1) -> FlatEdgeReport:
    """Diagonal passage-time ratio T(0,(n,n)) / (2n) for two-point weights.

    The ratio is always >= 1 (weights are >= 1 and every path has at least
    2n edges).  Ratios near 1 indicate the diagonal lies on the flat edge of
    the limit shape; ratios bounded away from 1 indicate strict interiority.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if n < 50:
        raise ValueError(f"n must be >= 50, got {n}")
    tag = f"flat-edge:{p}"
    tasks = [(float(p), int(n), derive_seed(seed, tag, n, i)) for i in range(trials)]
    times = np.array(_map_trials(_flat_edge_trial, tasks, workers))
    ratios = times / (2.0 * n)
    mean, se = _mean_se(ratios)
    return FlatEdgeReport(
        p=float(p),
        n=int(n),
        trials=trials,
        mean_ratio=mean,
        stderr=se,
        ci95=(mean - 1.96 * se, mean + 1.96 * se),
    )


# -- fluctuation series -------------------------------------------------------


def variance_series(
    model: str,
    spec: DistributionSpec,
    direction,
    n_grid,
    trials: int,
    seed: int,
    workers: int = 1,
    bootstrap: int = 1000,
) -> VarianceSeries:
    """Sample variance of T(0, [n x]) per n, with bootstrap confidence bands."""
    if trials < 200:
        raise ValueError("variance estimation needs at least 200 trials per point")
    ns, _targets, times, _devs, trunc = _sample_times(
        model, spec, direction, n_grid, trials, seed, "variance", workers
    )
    variances = times.var(axis=1, ddof=1)
    boot_se = np.empty(len(ns))
    ci_low = np.empty(len(ns))
    ci_high = np.empty(len(ns))
    for j, n in enumerate(ns):
        rng = np.random.default_rng(derive_seed(seed, "variance-bootstrap", int(n)))
        idx = rng.integers(0, trials, size=(bootstrap, trials))
        bvars = times[j][idx].var(axis=1, ddof=1)
        boot_se[j] = bvars.std(ddof=1)
        ci_low[j], ci_high[j] = np.percentile(bvars, [2.5, 97.5])
    return VarianceSeries(
        ns=ns,
        variances=variances,
        boot_se=boot_se,
        ci_low=ci_low,
        ci_high=ci_high,
        trials=trials,
        truncation_warnings=trunc,
    )


def wandering_series(
    model: str,
    spec: DistributionSpec,
    direction,
    n_grid,
    trials: int,
    seed: int,
    workers: int = 1,
) -> MeanSeries:
    """Mean geodesic wandering D(0, [n x]) per n."""
    ns, _targets, _times, devs, trunc = _sample_times(
        model, spec, direction, n_grid, trials, seed, "wandering", workers,
        want_geodesic=True,
    )
    means = devs.mean(axis=1)
    stderrs = devs.std(axis=1, ddof=1) / math.sqrt(trials)
    return MeanSeries(
        statistic="wandering",
        ns=ns,
        values=means,
        stderrs=stderrs,
        trials=trials,
        truncation_warnings=trunc,
    )


def shape_gap_series(
    spec: DistributionSpec,
    direction,
    n_grid,
    trials: int,
    seed: int,
    workers: int = 1,
) -> MeanSeries:
    """Nonrandom fluctuation g([n x]) - E T(0, [n x]) for exactly solvable LPP.

    Only distributions with a closed-form shape qualify; superadditivity
    forces the gap to be nonnegative up to noise.
    """
    shape = exact_shape_for(spec)  # raises for models without an exact g
    ns, targets, times, _devs, trunc = _sample_times(
        "lpp", spec, direction, n_grid, trials, seed, "shape-gap", workers
    )
    gaps = np.empty(len(ns))
    stderrs = np.empty(len(ns))
    for j, tgt in enumerate(targets):
        mean, se = _mean_se(times[j])
        gaps[j] = exact_g(shape, tgt) - mean
        stderrs[j] = se
    return MeanSeries(
        statistic="shape-gap",
        ns=ns,
        values=gaps,
        stderrs=stderrs,
        trials=trials,
        truncation_warnings=trunc,
    )


# -- exponent fits ------------------------------------------------------------


def fit_exponent(ns, values, errors=None, statistic: str = "generic") -> ExponentFit:
    """Weighted least-squares slope of log(value) against log(n).

    Weights are inverse variances of log(value) via the delta method; with
    no (or zero) errors the fit is ordinary least squares and the slope
    error comes from the residuals, so exact power laws report zero error.
    """
    ns = np.asarray(ns, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if ns.size < 4:
        raise ValueError("exponent fits need at least 4 points")
    if np.any(values <= 0):
        raise ValueError("exponent fits need strictly positive values")
    if ns.max() / ns.min() < 8:
        raise ValueError("n-grid must span at least a factor of 8")
    x = np.log(ns)
    y = np.log(values)
    if errors is not None:
        errors = np.asarray(errors, dtype=np.float64)
        sig = errors / values
    else:
        sig = np.zeros_like(values)
    weighted = np.any(sig > 0)
    if weighted:
        sig = np.where(sig > 0, sig, sig[sig > 0].min())
        w = 1.0 / sig**2
    else:
        w = np.ones_like(x)
    wsum = w.sum()
    xbar = (w * x).sum() / wsum
    ybar = (w * y).sum() / wsum
    sxx = (w * (x - xbar) ** 2).sum()
    slope = (w * (x - xbar) * (y - ybar)).sum() / sxx
    intercept = ybar - slope * xbar
    if weighted:
        slope_se = math.sqrt(1.0 / sxx)
    else:
        resid = y - (intercept + slope * x)
        dof = ns.size - 2
        slope_se = math.sqrt((resid @ resid) / dof / sxx) if dof > 0 else 0.0
    return ExponentFit(
        statistic=statistic,
        slope=float(slope),
        intercept=float(intercept),
        slope_stderr=float(slope_se),
        n_range=(int(ns.min()), int(ns.max())),
    )


def chi_from_variance_fit(fit: ExponentFit) -> ExponentFit:
    """Halve a variance-series slope: Var T ~ n^(2 chi)."""
    if fit.statistic not in ("variance", "generic"):
        raise ValueError(f"expected a variance fit, got statistic {fit.statistic!r}")
    return ExponentFit(
        statistic="chi",
        slope=fit.slope / 2.0,
        intercept=fit.intercept / 2.0,
        slope_stderr=fit.slope_stderr / 2.0,
        n_range=fit.n_range,
    )


def kpz_residual(chi_fit: ExponentFit, xi_fit: ExponentFit):
    """chi - (2 xi - 1) with first-order error propagation.

    The scaling relation predicts zero; the pair (1/3, 2/3) satisfies it
    exactly, as does the bound pair (1/2, 3/4).
    """
    chi = chi_from_variance_fit(chi_fit) if chi_fit.statistic == "variance" else chi_fit
    if chi.statistic not in ("chi", "generic"):
        raise ValueError(f"unexpected statistic {chi.statistic!r} for chi")
    residual = chi.slope - (2.0 * xi_fit.slope - 1.0)
    stderr = math.sqrt(chi.slope_stderr**2 + 4.0 * xi_fit.slope_stderr**2)
    return float(residual), float(stderr)
