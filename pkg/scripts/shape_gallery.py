"""Produce shape-boundary and exponent data files for a few environments.

Writes plot-ready CSVs under runs/ using the same machinery as the CLI.
Sizes are chosen to finish in a few minutes on a laptop.
"""

from pathlib import Path

from latticegrow.experiments import ExperimentConfig, run_experiment

RUNS = Path("runs")

CONFIGS = [
    dict(kind="fpp-shape", dist="unif:0.5:1.5", t=16.0, trials=40, seed=1,
         out=str(RUNS / "fpp-unif")),
    dict(kind="fpp-shape", dist="twopoint:0.8", t=24.0, trials=40, seed=1,
         out=str(RUNS / "fpp-flat-edge")),
    dict(kind="lpp-shape", dist="exp:1.0", t=32.0, trials=40, seed=1,
         out=str(RUNS / "lpp-exp")),
    dict(kind="radial-g", model="lpp", dist="geom:0.5", direction="1,1",
         n_grid="16,32,64,128,256", trials=200, seed=1,
         out=str(RUNS / "radial-geom")),
    dict(kind="exponents", dist="exp:1.0", direction="1,1",
         n_grid="32,64,128,256", trials=250, seed=1,
         out=str(RUNS / "exponents-small")),
]


def main() -> None:
    for kw in CONFIGS:
        cfg = ExperimentConfig()
        for k, v in kw.items():
            setattr(cfg, k, v)
        cfg.workers = 2
        summary = run_experiment(cfg)
        print(f"{cfg.kind:12s} -> {cfg.out}  files: {', '.join(summary['files'])}")


if __name__ == "__main__":
    main()
