"""Configuration-driven experiment runner.

Configs are flat key=value text files with CLI-flag overrides.  Every run
emits raw series CSVs, a machine-readable summary.json (estimates, fits,
residuals, warnings), and a reproducibility stanza echoing the config and
the package version.  Identical configs produce byte-identical CSVs; the
only timestamp lives in the JSON summary.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, fields as dc_fields
from pathlib import Path

import numpy as np

from . import __version__
from .estimators import (
    chi_from_variance_fit,
    estimate_radial_g,
    fit_exponent,
    flat_edge_probe,
    kpz_residual,
    shape_boundary_estimate,
    variance_series,
    wandering_series,
)
from .fpp import LatticeBox, fpp_dijkstra
from .growth import eden_grow, idla_grow, roundness, roundness_series_to_csv
from .lpp import exact_g, exact_shape_for, lpp_dp
from .oracle import brute_force_fpp, brute_force_lpp
from .tasep import coupling_equivalence, current_at, tasep_run
from .weights import WeightField, derive_seed, parse_dist_token

__all__ = ["ExperimentConfig", "ConfigError", "HardFailure", "run_experiment", "KINDS"]

KINDS = (
    "fpp-shape",
    "lpp-shape",
    "radial-g",
    "exponents",
    "flat-edge",
    "eden",
    "idla",
    "tasep-coupling",
    "oracle-check",
)


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the offending field."""


class HardFailure(RuntimeError):
    """Budget exceeded, truncation unresolved, or verification mismatch."""


@dataclass
class ExperimentConfig:
    kind: str = ""
    dist: str = "exp:1.0"
    dim: int = 2
    model: str = ""          # fpp | lpp, for kinds that need it
    direction: str = "1,1"
    n_grid: str = ""         # comma-separated
    t: float = 0.0
    trials: int = 0
    steps: int = 0           # eden steps / idla particles / tasep K=N
    seed: int = 1
    workers: int = 1
    out: str = "out"

    def n_grid_list(self) -> list:
        if not self.n_grid:
            return []
        try:
            return [int(x) for x in self.n_grid.split(",") if x.strip()]
        except ValueError as e:
            raise ConfigError(f"n_grid: {e}") from None

    def direction_tuple(self) -> tuple:
        try:
            return tuple(float(x) for x in self.direction.split(","))
        except ValueError as e:
            raise ConfigError(f"direction: {e}") from None

    def to_text(self) -> str:
        lines = []
        for f in dc_fields(self):
            lines.append(f"{f.name} = {getattr(self, f.name)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        cfg = cls()
        known = {f.name: f.type for f in dc_fields(cls)}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in known:
                raise ConfigError(f"{key}: unknown config key")
            current = getattr(cfg, key)
            try:
                if isinstance(current, bool):
                    setattr(cfg, key, val.lower() in ("1", "true", "yes"))
                elif isinstance(current, int):
                    setattr(cfg, key, int(val))
                elif isinstance(current, float):
                    setattr(cfg, key, float(val))
                else:
                    setattr(cfg, key, val)
            except ValueError:
                raise ConfigError(f"{key}: cannot parse {val!r}") from None
        return cfg

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"kind: must be one of {', '.join(KINDS)}; got {self.kind!r}")
        try:
            parse_dist_token(self.dist)
        except ValueError as e:
            raise ConfigError(f"dist: {e}") from None
        if self.dim < 1:
            raise ConfigError(f"dim: must be >= 1, got {self.dim}")
        if self.workers < 1:
            raise ConfigError(f"workers: must be >= 1, got {self.workers}")
        if self.seed < 0:
            raise ConfigError(f"seed: must be nonnegative, got {self.seed}")
        needs_trials = self.kind in (
            "fpp-shape", "lpp-shape", "radial-g", "exponents", "flat-edge",
            "tasep-coupling", "oracle-check",
        )
        if needs_trials and self.trials <= 0:
            raise ConfigError(f"trials: must be positive for kind {self.kind}, got {self.trials}")
        if self.kind in ("radial-g", "exponents", "flat-edge") and not self.n_grid_list():
            raise ConfigError(f"n_grid: required for kind {self.kind}")
        if self.kind == "radial-g" and self.model not in ("fpp", "lpp"):
            raise ConfigError(f"model: radial-g needs 'fpp' or 'lpp', got {self.model!r}")
        if self.kind in ("fpp-shape", "lpp-shape") and self.t <= 0:
            raise ConfigError(f"t: must be positive for kind {self.kind}, got {self.t}")
        if self.kind in ("eden", "idla", "tasep-coupling") and self.steps <= 0:
            raise ConfigError(f"steps: must be positive for kind {self.kind}, got {self.steps}")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def run_experiment(config: ExperimentConfig) -> dict:
    """Run one experiment, write its artifacts, return the summary dict."""
    config.validate()
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    spec = parse_dist_token(config.dist)
    summary: dict = {
        "kind": config.kind,
        "estimates": {},
        "fits": {},
        "warnings": [],
        "files": [],
    }

    runner = _RUNNERS[config.kind]
    runner(config, spec, out, summary)

    summary["reproducibility"] = {
        "config": {f.name: getattr(config, f.name) for f in dc_fields(config)},
        "package_version": __version__,
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def _record(summary: dict, out: Path, name: str) -> Path:
    summary["files"].append(name)
    return out / name


def _run_radial_g(config, spec, out, summary):
    seq = estimate_radial_g(
        config.model, spec, config.direction_tuple(), config.n_grid_list(),
        config.trials, config.seed, workers=config.workers,
    )
    seq.to_csv(_record(summary, out, "radial_g.csv"))
    summary["estimates"]["radial_g_last"] = float(seq.means[-1])
    summary["estimates"]["radial_g_last_stderr"] = float(seq.stderrs[-1])
    if config.model == "lpp":
        try:
            shape = exact_shape_for(spec)
            tgt = seq.ns[-1] * np.asarray(config.direction_tuple())
            summary["estimates"]["exact_g_reference"] = float(
                exact_g(shape, tgt) / seq.ns[-1]
            )
        except ValueError:
            pass
    for n, count in seq.truncation_warnings.items():
        summary["warnings"].append(f"truncation flagged in {count} trials at n={n}")


def _run_shape(config, spec, out, summary):
    model = "fpp" if config.kind == "fpp-shape" else "lpp"
    if model == "fpp":
        angles = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    else:
        angles = np.linspace(0.0, math.pi / 2.0, 33)
    est = shape_boundary_estimate(
        model, spec, config.t, angles, config.trials, config.seed,
        workers=config.workers,
    )
    est.to_csv(_record(summary, out, f"{model}_shape.csv"))
    summary["estimates"]["convexity_violation_fraction"] = est.convexity_violation_fraction
    if est.truncated_trials:
        summary["warnings"].append(
            f"truncation flagged in {est.truncated_trials} trials"
        )


def _run_exponents(config, spec, out, summary):
    direction = config.direction_tuple()
    grid = config.n_grid_list()
    vs = variance_series("lpp", spec, direction, grid, config.trials,
                         config.seed, workers=config.workers)
    vs.to_csv(_record(summary, out, "variance_series.csv"))
    ws = wandering_series("lpp", spec, direction, grid, config.trials,
                          config.seed, workers=config.workers)
    ws.to_csv(_record(summary, out, "wandering_series.csv"))
    var_fit = fit_exponent(vs.ns, vs.variances, vs.boot_se, statistic="variance")
    chi_fit = chi_from_variance_fit(var_fit)
    xi_fit = fit_exponent(ws.ns, ws.values, ws.stderrs, statistic="wandering")
    residual, res_se = kpz_residual(chi_fit, xi_fit)
    summary["fits"] = {
        "variance": var_fit.as_dict(),
        "chi": chi_fit.as_dict(),
        "xi": xi_fit.as_dict(),
        "kpz_residual": residual,
        "kpz_residual_stderr": res_se,
    }
    with open(_record(summary, out, "fits.json"), "w") as fh:
        json.dump(summary["fits"], fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run_flat_edge(config, spec, out, summary):
    if spec.kind != "twopoint":
        raise ConfigError(f"dist: flat-edge needs a twopoint distribution, got {config.dist}")
    rows = []
    for n in config.n_grid_list():
        rep = flat_edge_probe(spec.params[0], n, config.trials, config.seed,
                              workers=config.workers)
        rows.append(rep)
    with open(_record(summary, out, "flat_edge.csv"), "w", newline="") as fh:
        fh.write("n,value,stderr,trials\n")
        for rep in rows:
            fh.write(f"{rep.n},{_fmt(rep.mean_ratio)},{_fmt(rep.stderr)},{rep.trials}\n")
    summary["estimates"]["mean_ratio_last"] = rows[-1].mean_ratio
    summary["estimates"]["stderr_last"] = rows[-1].stderr


def _run_eden(config, spec, out, summary):
    trace = eden_grow(config.seed, config.dim, config.steps)
    trace.to_csv(_record(summary, out, "eden_trace.csv"))
    rin, rout = roundness(trace, config.steps)
    summary["estimates"]["inradius"] = rin
    summary["estimates"]["outradius"] = rout


def _run_idla(config, spec, out, summary):
    trace = idla_grow(config.seed, config.dim, config.steps)
    trace.to_csv(_record(summary, out, "idla_trace.csv"))
    checkpoints = sorted({max(1, config.steps // 16), config.steps // 4, config.steps})
    rows = [(n, *roundness(trace, n)) for n in checkpoints if n >= 1]
    roundness_series_to_csv(rows, _record(summary, out, "idla_roundness.csv"))
    rin, rout = rows[-1][1], rows[-1][2]
    summary["estimates"]["inradius"] = rin
    summary["estimates"]["outradius"] = rout
    summary["estimates"]["roundness_ratio"] = rout / rin if rin > 0 else math.inf


def _run_tasep(config, spec, out, summary):
    if spec.kind != "exponential" or spec.params[0] != 1.0:
        raise ConfigError("dist: tasep-coupling requires exp:1.0 vertex weights")
    k = config.steps
    mismatches = 0
    probe_failures = 0
    rng_master = config.seed
    table = None
    for trial in range(config.trials):
        fld = WeightField(spec, derive_seed(rng_master, "tasep", trial), "vertex", 2)
        table = tasep_run(k, k, field=fld)
        lmap = lpp_dp(fld, (k - 1, k - 1))
        if not np.array_equal(table.s, lmap.table.T):
            mismatches += 1
        if k >= 3:
            rng = np.random.default_rng(derive_seed(rng_master, "tasep-probes", trial))
            tmax = float(table.s[k - 1, k - 1])
            for _ in range(100):
                n = int(rng.integers(1, k - 1))
                t = float(rng.uniform(0.0, tmax))
                if not coupling_equivalence(table, lmap, n, t):
                    probe_failures += 1
    if table is not None:
        table.to_csv(_record(summary, out, "tasep_table.csv"))
    summary["estimates"]["table_mismatches"] = mismatches
    summary["estimates"]["probe_failures"] = probe_failures
    summary["estimates"]["current_at_half_horizon"] = current_at(
        table, float(table.s[k - 1, k - 1]) / 2.0
    )
    if mismatches or probe_failures:
        raise HardFailure(
            f"coupling verification failed: {mismatches} table mismatches, "
            f"{probe_failures} probe failures"
        )


def _run_oracle_check(config, spec, out, summary):
    mismatches = []
    r = 3
    for trial in range(config.trials):
        child = derive_seed(config.seed, "oracle-fpp", trial)
        fld = WeightField(spec, child, "edge", 2)
        box = LatticeBox(2, r)
        pmap = fpp_dijkstra(fld, (0, 0), box)
        for v in sorted(pmap.times):
            exact = brute_force_fpp(fld, box, (0, 0), v)
            if exact != pmap.times[v]:
                mismatches.append({"trial": trial, "target": list(v), "kind": "fpp"})
        vchild = derive_seed(config.seed, "oracle-lpp", trial)
        vfld = WeightField(spec, vchild, "vertex", 2)
        lmap = lpp_dp(vfld, (4, 4))
        for idx in np.ndindex(lmap.table.shape):
            if brute_force_lpp(vfld, idx) != lmap.table[idx]:
                mismatches.append({"trial": trial, "target": list(idx), "kind": "lpp"})
    summary["estimates"]["seeds_checked"] = config.trials
    summary["estimates"]["mismatches"] = len(mismatches)
    with open(_record(summary, out, "oracle_check.csv"), "w", newline="") as fh:
        fh.write("trial,kind,target\n")
        for m in mismatches:
            fh.write(f"{m['trial']},{m['kind']},\"{m['target']}\"\n")
    if mismatches:
        raise HardFailure(f"oracle disagreement on {len(mismatches)} targets")


_RUNNERS = {
    "radial-g": _run_radial_g,
    "fpp-shape": _run_shape,
    "lpp-shape": _run_shape,
    "exponents": _run_exponents,
    "flat-edge": _run_flat_edge,
    "eden": _run_eden,
    "idla": _run_idla,
    "tasep-coupling": _run_tasep,
    "oracle-check": _run_oracle_check,
}
