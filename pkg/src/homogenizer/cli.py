"""Command-line driver: ``homogenizer {converge,gap-curve,crossing,regimes}``.

Exit status is 0 on success, 2 for configuration errors and 3 when a
simulation produces an invalid state.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from functools import partial
from pathlib import Path

import numpy as np

from .config import EXPERIMENTS, SEED_MAX, ConfigError, ExperimentConfig, from_dict, parse_config
from .dynamics import evolve_composite, fmt, homogenize, interpolation_sweep, regimes_csv, reservoir_target
from .errors import NumericalError, PreconditionError
from .states import bloch_state
from .witness import default_grid, find_crossing, gap_curve

log = logging.getLogger("homogenizer")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


@contextmanager
def _mapper(jobs: int):
    if jobs <= 1:
        yield map
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield partial(pool.map, chunksize=1)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _converge_task(cfg: ExperimentConfig, index: int):
    etas = cfg.schedule.sample(cfg.n_steps, stream=index)
    rho_s = bloch_state(cfg.system)
    xi = reservoir_target(cfg.init)
    markov = homogenize(rho_s, xi, cfg.n_steps, etas)
    composite = evolve_composite(rho_s, cfg.init, cfg.n_steps, etas)
    return markov, composite


def run_converge(cfg: ExperimentConfig, out: Path, jobs: int) -> dict:
    with _mapper(jobs) as m:
        results = list(m(partial(_converge_task, cfg), range(cfg.n_trajectories)))
    for i, (markov, composite) in enumerate(results):
        _write(out / "trajectories" / f"markov_{i:04d}.csv", markov.to_csv())
        _write(out / "trajectories" / f"composite_{i:04d}.csv", composite.to_csv())
    dm = np.median([mk.distances for mk, _ in results], axis=0)
    dc = np.median([c.distances for _, c in results], axis=0)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "median_dist_markov", "median_dist_composite", "difference"])
    for k, (a, b) in enumerate(zip(dm, dc), start=1):
        w.writerow([k, fmt(a), fmt(b), fmt(b - a)])
    _write(out / "converge_median.csv", buf.getvalue())
    return {"final_median_markov": float(dm[-1]), "final_median_composite": float(dc[-1])}


def _grid(cfg: ExperimentConfig):
    return cfg.grid if cfg.grid is not None else default_grid(cfg.grid_points)


def run_gap_curve(cfg: ExperimentConfig, out: Path, jobs: int, write_csv: bool = True) -> dict:
    fid = bloch_state(cfg.fiducial)
    with _mapper(jobs) as m:
        curve = gap_curve(cfg.init, _grid(cfg), fid, map_fn=m)
    name = f"{'gap_curve' if write_csv else 'crossing'}_{cfg.init.label}"
    if write_csv:
        _write(out / f"{name}.csv", curve.to_csv())
    _write(out / f"{name}.json", curve.summary_json())
    return curve.summary()


def run_regimes(cfg: ExperimentConfig, out: Path, jobs: int) -> dict:
    grid = cfg.grid if cfg.grid is not None else [0.0, 0.25, 0.5, 0.75, 1.0]
    trajectories = interpolation_sweep(grid, cfg.n_steps, bloch_state(cfg.system),
                                       bloch_state(cfg.init.xi))
    _write(out / "regimes.csv", regimes_csv(grid, trajectories))
    return {"p_grid": list(grid), "n_steps": cfg.n_steps}


def run(cfg: ExperimentConfig, jobs: int = 1) -> dict:
    """Execute an experiment and write its artifacts under ``cfg.out_dir``."""
    out = Path(cfg.out_dir)
    _write(out / "config.json", cfg.to_json())
    if cfg.experiment == "converge":
        return run_converge(cfg, out, jobs)
    if cfg.experiment == "gap-curve":
        return run_gap_curve(cfg, out, jobs)
    if cfg.experiment == "crossing":
        return run_gap_curve(cfg, out, jobs, write_csv=False)
    return run_regimes(cfg, out, jobs)


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value <= SEED_MAX:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2^64 - 1], got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="homogenizer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON experiment config")
        p.add_argument("--seed", type=_seed, help="root seed (overrides the config)")
        p.add_argument("--out", help="output directory (overrides the config)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def load_config(args) -> ExperimentConfig:
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        raw = json.loads(parse_config(text, args.experiment).to_json())
    else:
        raw = {"experiment": args.experiment}
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out is not None:
        raw["out_dir"] = args.out
    return from_dict(raw, args.experiment)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.jobs < 1:
            raise ConfigError("must be >= 1", "--jobs")
        cfg = load_config(args)
        summary = run(cfg, jobs=args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PreconditionError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    log.info("%s done: %s", cfg.experiment, summary)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
