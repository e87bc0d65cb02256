"""Benchmark harness: run resolution sweeps and write CSV results.

Usage::

    glc-bench --config run.yaml [--benchmark NAME] [--resolutions 4,5,6]
              [--no-heuristic] [--h-override N] [--output DIR]
              [--emit-trajectory] [--jobs N] [--max-expansions N]

A run config is a YAML mapping::

    benchmark: pendulum          # built-in name, or an inline definition mapping
    resolutions: [4, 5, 6]       # defaults to the benchmark's own sweep
    overrides:                   # all optional
      c: 6
      eta: {coefficient: 0.0625, exponent: 2.5}
      horizon: {coefficient: 100, exponent: 1, log: true}
      delta_max: 0.1
      heuristic: false
      h_override: 40
    output_dir: out
    emit_trajectory: true

Files written to the output directory:

* ``results.csv``: ``R,cost,solved,nodes_expanded,nodes_pruned_glc,labels``.
  Costs carry 9 significant digits and infinity is ``inf``. Nothing
  machine-dependent goes in here, so reruns are byte-identical.
* ``timing.csv``: ``R,wall_ms``.
* ``trajectory_<R>.csv`` for each solved R when trajectories are requested,
  with header ``t,x1..xn,u1..um`` at the integrator sample rate.

Exit status is 0 on completion, 2 for config or I/O errors and 3 when a
rollout produced non-finite numbers.
"""

from __future__ import annotations

import argparse
import copy
import csv
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import yaml

from .domains import BUILTIN, ConfigError, benchmark_from_dict, builtin_definition
from .dynamics import NumericalFailure
from .planner import plan

RESULT_COLUMNS = ("R", "cost", "solved", "nodes_expanded", "nodes_pruned_glc", "labels")
OVERRIDE_KEYS = {"c", "eta", "horizon", "delta_max", "heuristic", "h_override"}


@dataclass(frozen=True)
class RunConfig:
    benchmark: Union[str, dict]
    resolutions: tuple = ()
    overrides: Dict = field(default_factory=dict)
    output_dir: str = "results"
    emit_trajectory: bool = False
    jobs: int = 1
    max_expansions: Optional[int] = None

    def validate(self) -> None:
        if not self.resolutions:
            raise ConfigError("resolutions must be non-empty")
        if any(not isinstance(r, int) or r < 1 for r in self.resolutions):
            raise ConfigError(f"resolutions must be positive integers: {self.resolutions}")
        if any(b <= a for a, b in zip(self.resolutions, self.resolutions[1:])):
            raise ConfigError(f"resolutions must be strictly increasing: {self.resolutions}")
        unknown = set(self.overrides) - OVERRIDE_KEYS
        if unknown:
            raise ConfigError(f"unknown overrides {sorted(unknown)}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")


@dataclass(frozen=True)
class ResultRow:
    """One sweep entry. ``cost`` is already rounded to what the CSV stores."""

    R: int
    cost: float
    solved: bool
    nodes_expanded: int
    nodes_pruned_glc: int
    labels: int
    wall_ms: float = field(default=0.0, compare=False)
    budget_exhausted: bool = field(default=False, compare=False)


def format_cost(cost: float) -> str:
    return "inf" if math.isinf(cost) else f"{cost:.9g}"


def round_cost(cost: float) -> float:
    return float(format_cost(cost))


def best_so_far(costs: Sequence) -> List[float]:
    """Running minimum of the costs (or of ``row.cost`` for result rows)."""
    if len(costs) == 0:
        raise ValueError("empty results table")
    out, best = [], math.inf
    for c in costs:
        best = min(best, c.cost if isinstance(c, ResultRow) else float(c))
        out.append(best)
    return out


# -- config handling ---------------------------------------------------------------


def _definition(benchmark) -> tuple:
    if isinstance(benchmark, str):
        return builtin_definition(benchmark), benchmark
    if isinstance(benchmark, dict):
        d = copy.deepcopy(benchmark)
        return d, d.get("name") or d.get("family", "custom")
    raise ConfigError("benchmark must be a name or a definition mapping")


def resolved_definition(config: RunConfig) -> tuple:
    """The benchmark definition with overrides applied, and its name."""
    d, name = _definition(config.benchmark)
    planner = dict(d.get("planner") or {})
    for key in ("c", "eta", "horizon", "delta_max", "heuristic"):
        if key in config.overrides:
            planner[key] = config.overrides[key]
    d["planner"] = planner
    return d, name


def load_run_config(path, args: Optional[argparse.Namespace] = None) -> RunConfig:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"malformed config {path}: {e}") from None
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigError("run config must be a mapping")
    unknown = set(raw) - {"benchmark", "resolutions", "overrides", "output_dir", "emit_trajectory", "jobs", "max_expansions"}
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")

    benchmark = raw.get("benchmark")
    overrides = dict(raw.get("overrides") or {})
    resolutions = raw.get("resolutions")
    output_dir = raw.get("output_dir", "results")
    emit = bool(raw.get("emit_trajectory", False))
    jobs = raw.get("jobs", 1)
    max_expansions = raw.get("max_expansions")
    if args is not None:
        if args.benchmark:
            benchmark = args.benchmark
        if args.resolutions:
            resolutions = args.resolutions
        if args.no_heuristic:
            overrides["heuristic"] = False
        if args.h_override is not None:
            overrides["h_override"] = args.h_override
        if args.output:
            output_dir = args.output
        if args.emit_trajectory:
            emit = True
        if args.jobs is not None:
            jobs = args.jobs
        if args.max_expansions is not None:
            max_expansions = args.max_expansions
    if benchmark is None:
        raise ConfigError(f"no benchmark given; built-in names: {', '.join(BUILTIN)}")
    if resolutions is None:
        d, _ = _definition(benchmark)
        resolutions = d.get("resolutions") or ()
    try:
        resolutions = tuple(int(r) for r in resolutions)
        jobs = int(jobs)
    except (TypeError, ValueError):
        raise ConfigError("resolutions and jobs must be integers") from None
    config = RunConfig(benchmark, resolutions, overrides, str(output_dir), emit, jobs, max_expansions)
    config.validate()
    return config


# -- running -----------------------------------------------------------------------


def _run_one(definition: dict, name: str, R: int, overrides: dict, max_expansions, want_trajectory: bool):
    bench = benchmark_from_dict(definition, name)
    params = bench.params_for(R, h_override=overrides.get("h_override"), max_expansions=max_expansions)
    outcome = plan(bench.problem, params)
    s = outcome.stats
    row = ResultRow(
        R=R,
        cost=round_cost(outcome.cost),
        solved=outcome.solved,
        nodes_expanded=s.nodes_expanded,
        nodes_pruned_glc=s.nodes_pruned_glc,
        labels=len(outcome.labels),
        wall_ms=1000.0 * s.wall_time,
        budget_exhausted=s.budget_exhausted,
    )
    traj = None
    if want_trajectory and outcome.trajectory is not None:
        t = outcome.trajectory
        traj = (t.times, t.states, t.controls)
    return row, traj


def run_sweep(config: RunConfig, output_dir: Optional[Path] = None) -> List[ResultRow]:
    """Plan at every resolution; write CSV files when ``output_dir`` is given."""
    config.validate()
    definition, name = resolved_definition(config)
    benchmark_from_dict(definition, name)  # fail fast on a bad definition
    want = config.emit_trajectory and output_dir is not None
    task = (definition, name)
    if config.jobs > 1 and len(config.resolutions) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            futures = [
                pool.submit(_run_one, *task, R, config.overrides, config.max_expansions, want)
                for R in config.resolutions
            ]
            results = [f.result() for f in futures]
    else:
        results = [_run_one(*task, R, config.overrides, config.max_expansions, want) for R in config.resolutions]
    rows = [r for r, _ in results]
    if output_dir is not None:
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        write_results(rows, output_dir / "results.csv")
        write_timing(rows, output_dir / "timing.csv")
        for row, traj in results:
            if traj is not None:
                write_trajectory(*traj, output_dir / f"trajectory_{row.R}.csv")
    return rows


# -- CSV I/O ------------------------------------------------------------------------


def write_results(rows: Sequence[ResultRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in rows:
            w.writerow([r.R, format_cost(r.cost), str(r.solved).lower(), r.nodes_expanded, r.nodes_pruned_glc, r.labels])


def read_results(path) -> List[ResultRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RESULT_COLUMNS:
            raise ValueError(f"unexpected header {reader.fieldnames}")
        return [
            ResultRow(
                R=int(d["R"]),
                cost=float(d["cost"]),
                solved=d["solved"] == "true",
                nodes_expanded=int(d["nodes_expanded"]),
                nodes_pruned_glc=int(d["nodes_pruned_glc"]),
                labels=int(d["labels"]),
            )
            for d in reader
        ]


def write_timing(rows: Sequence[ResultRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("R", "wall_ms"))
        for r in rows:
            w.writerow([r.R, f"{r.wall_ms:.3f}"])


def write_trajectory(times, states, controls, path) -> None:
    states = np.asarray(states)
    controls = np.asarray(controls)
    header = ["t"] + [f"x{i + 1}" for i in range(states.shape[1])] + [f"u{i + 1}" for i in range(controls.shape[1])]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for t, x, u in zip(np.asarray(times).tolist(), states.tolist(), controls.tolist()):
            w.writerow([repr(v) for v in [t, *x, *u]])


def read_trajectory(path):
    """``(times, states, controls)`` arrays from a trajectory file."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader])
    n = sum(1 for h in header if h.startswith("x"))
    return data[:, 0], data[:, 1 : 1 + n], data[:, 1 + n :]


# -- entry point ------------------------------------------------------------------------


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="glc-bench", description="Run GLC planner resolution sweeps.")
    p.add_argument("--config", required=True, help="YAML run config")
    p.add_argument("--benchmark", help=f"benchmark name, overrides the config ({', '.join(BUILTIN)})")
    p.add_argument("--resolutions", type=_int_list, help="comma-separated resolutions, e.g. 4,5,6")
    p.add_argument("--no-heuristic", action="store_true", help="disable the A*-style heuristic")
    p.add_argument("--h-override", type=int, help="replace the depth limit h(R) with a constant")
    p.add_argument("--output", help="output directory (overrides output_dir)")
    p.add_argument("--emit-trajectory", action="store_true", help="write trajectory_<R>.csv per solved R")
    p.add_argument("--jobs", type=int, help="resolutions planned concurrently (default 1)")
    p.add_argument("--max-expansions", type=int, help="stop a run after this many expansions")
    return p


def _print_summary(rows: Sequence[ResultRow], out) -> None:
    best = best_so_far(rows)
    print(f"{'R':>4} {'cost':>14} {'best':>14} {'solved':>6} {'expanded':>10} {'pruned':>10} {'labels':>9} {'ms':>10}", file=out)
    for r, b in zip(rows, best):
        flag = " (budget)" if r.budget_exhausted else ""
        print(
            f"{r.R:>4} {format_cost(r.cost):>14} {format_cost(b):>14} {str(r.solved).lower():>6} "
            f"{r.nodes_expanded:>10} {r.nodes_pruned_glc:>10} {r.labels:>9} {r.wall_ms:>10.1f}{flag}",
            file=out,
        )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_run_config(args.config, args)
        rows = run_sweep(config, Path(config.output_dir))
    except NumericalFailure as e:
        print(f"glc-bench: numerical failure: {e}", file=sys.stderr)
        return 3
    except (ConfigError, OSError) as e:
        print(f"glc-bench: {e}", file=sys.stderr)
        return 2
    _print_summary(rows, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
