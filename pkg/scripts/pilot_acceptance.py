"""One-off pilot for the acceptance-suite constants.

Runs the heavy Monte Carlo pieces at full acceptance size and prints the
numbers the frozen tolerances rest on.  Not part of the test suite.
"""

import math
import time

from latticegrow import (
    estimate_radial_g,
    exponential,
    fit_exponent,
    flat_edge_probe,
    geometric,
    idla_grow,
    kpz_residual,
    roundness,
    variance_series,
    wandering_series,
)
from latticegrow.estimators import chi_from_variance_fit

WORKERS = 4


def timed(label, fn):
    t0 = time.time()
    out = fn()
    print(f"[{time.time() - t0:7.1f}s] {label}")
    return out


def pilot_flat_edge():
    for p in (0.8, 0.55):
        rep = timed(
            f"flat edge p={p}",
            lambda: flat_edge_probe(p, 300, trials=200, seed=20250810, workers=WORKERS),
        )
        print(f"  p={p}: mean ratio {rep.mean_ratio:.5f} +- {rep.stderr:.5f}  ci {rep.ci95}")


def pilot_idla():
    ratios = []
    for seed in range(10):
        trace = timed(f"idla seed {seed}", lambda: idla_grow(1000 + seed, 2, 20_000))
        rin, rout = roundness(trace, 20_000)
        ratios.append(rout / rin)
        print(f"  seed {seed}: in {rin:.2f} out {rout:.2f} ratio {rout / rin:.4f}")
    print(f"  max ratio {max(ratios):.4f}")


def pilot_rost_and_geometric():
    for spec, label, g in ((exponential(1.0), "exp", 4.0),
                           (geometric(0.5), "geom", 4.0 + 2.0 * math.sqrt(2.0))):
        seq = timed(
            f"radial {label} n=64,256 x500",
            lambda: estimate_radial_g("lpp", spec, (1, 1), [64, 256], 500,
                                      20250810, workers=WORKERS),
        )
        for n, m, s in zip(seq.ns, seq.means, seq.stderrs):
            print(f"  {label} n={n}: {m:.5f} +- {s:.5f}  (limit {g:.5f})")
        gap_sig = (seq.means[1] - seq.means[0]) / math.hypot(seq.stderrs[0], seq.stderrs[1])
        print(f"  monotone separation: {gap_sig:.1f} combined SEs")


def pilot_exponents():
    grid = [64, 128, 256, 512, 1024]
    vs = timed(
        "variance series x500",
        lambda: variance_series("lpp", exponential(1.0), (1, 1), grid, 500,
                                20250810, workers=WORKERS),
    )
    ws = timed(
        "wandering series x500",
        lambda: wandering_series("lpp", exponential(1.0), (1, 1), grid, 500,
                                 20250810, workers=WORKERS),
    )
    var_fit = fit_exponent(vs.ns, vs.variances, vs.boot_se, statistic="variance")
    chi = chi_from_variance_fit(var_fit)
    xi = fit_exponent(ws.ns, ws.values, ws.stderrs, statistic="wandering")
    res, res_se = kpz_residual(chi, xi)
    print(f"  chi = {chi.slope:.4f} +- {chi.slope_stderr:.4f}")
    print(f"  xi  = {xi.slope:.4f} +- {xi.slope_stderr:.4f}")
    print(f"  kpz residual = {res:.4f} +- {res_se:.4f}")
    for n, v, d in zip(grid, vs.variances, ws.values):
        print(f"  n={n}: var {v:.3f} meanD {d:.3f}")


if __name__ == "__main__":
    t0 = time.time()
    pilot_flat_edge()
    pilot_idla()
    pilot_rost_and_geometric()
    pilot_exponents()
    print(f"total {time.time() - t0:.1f}s")
