"""Experiment orchestration: scenario loading, runs, sweeps, verification.

Exit codes: 0 success, 2 config error, 3 infeasible scenario, 4 verification
failure. All numeric outputs are fully determined by (config, seed); wall
clock is reported separately so the rest of a summary is reproducible byte
for byte.
"""
from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import click

from . import baselines, reporting
from .baselines import ALGORITHMS, run_algorithm
from .channel import sample_realization
from .convexity import run_lemma_verification
from .scenario import (ConfigError, InfeasibilityError, Scenario,
                       check_mobility)
from .sca import SCAOptions

EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_VERIFICATION = 4


@dataclass(frozen=True)
class ExperimentResult:
    """One algorithm run: reported rate plus artifact references."""

    algorithm: str
    seed: int
    scenario_hash: str
    avg_rate_bps_hz: float
    stderr: float
    trajectory: "Trajectory"
    iteration_log_path: str | None
    wall_clock_s: float

    def __post_init__(self):
        if not self.avg_rate_bps_hz >= 0:
            raise ValueError("average rate must be nonnegative")


def _load_config_dict(config_path) -> dict:
    try:
        with open(config_path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {config_path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {config_path}: {exc}") from None


def _emit_trajectory(traj, scenario, path):
    violations = check_mobility(traj, scenario)
    if violations:
        raise RuntimeError(f"refusing to write infeasible trajectory: {violations}")
    reporting.write_trajectory_csv(traj, path)


def _summary_entry(result: ExperimentResult, extra=None) -> dict:
    entry = {
        "algorithm": result.algorithm,
        "seed": result.seed,
        "scenario_hash": result.scenario_hash,
        "avg_rate_bps_hz": result.avg_rate_bps_hz,
        "stderr": result.stderr,
        "wall_clock_s": result.wall_clock_s,
    }
    if extra:
        entry.update(extra)
    return entry


def cmd_optimize(config_path, seed: int, out_dir,
                 epsilon: float = 1e-4, max_iter: int = 100) -> ExperimentResult:
    """Joint trajectory + phase optimization; writes the full artifact set."""
    scenario = Scenario.from_config(_load_config_dict(config_path))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    realization = sample_realization(scenario, seed)
    options = SCAOptions(epsilon=epsilon, max_iter=max_iter)
    run = run_algorithm("jtpb", scenario, realization, seed=seed,
                        options=options)
    wall = time.perf_counter() - t0

    _emit_trajectory(run.trajectory, scenario, out / "trajectory.csv")
    reporting.write_phases_csv(run.schedule, out / "phases.csv")
    reporting.write_iterations_csv(run.outcome.history, out / "iterations.csv")

    result = ExperimentResult(
        algorithm="jtpb", seed=seed, scenario_hash=scenario.config_hash(),
        avg_rate_bps_hz=run.avg_rate_bps_hz, stderr=run.stderr,
        trajectory=run.trajectory,
        iteration_log_path=str(out / "iterations.csv"), wall_clock_s=wall)
    summary = _summary_entry(result, {
        "iterations": run.outcome.iterations,
        "converged": run.outcome.converged,
        "epsilon": epsilon,
        "files": {"trajectory": "trajectory.csv", "phases": "phases.csv",
                  "iterations": "iterations.csv"},
    })
    reporting.write_json(summary, out / "summary.json")
    return result


def cmd_benchmark(config_path, seed: int, algorithms, out_dir,
                  npb_mode: str = "random", epsilon: float = 1e-4,
                  max_iter: int = 100) -> list[ExperimentResult]:
    """Run a subset of the four algorithms on one shared realization."""
    scenario = Scenario.from_config(_load_config_dict(config_path))
    for algo in algorithms:
        if algo not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {algo!r}; choose from {ALGORITHMS}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    realization = sample_realization(scenario, seed)
    options = SCAOptions(epsilon=epsilon, max_iter=max_iter)
    results = []
    entries = []
    for algo in algorithms:
        t0 = time.perf_counter()
        run = run_algorithm(algo, scenario, realization, seed=seed,
                            npb_mode=npb_mode, options=options)
        wall = time.perf_counter() - t0
        _emit_trajectory(run.trajectory, scenario, out / f"{algo}_trajectory.csv")
        if run.schedule is not None:
            reporting.write_phases_csv(run.schedule, out / f"{algo}_phases.csv")
        log_path = None
        if run.outcome is not None:
            log_path = out / f"{algo}_iterations.csv"
            reporting.write_iterations_csv(run.outcome.history, log_path)
        result = ExperimentResult(
            algorithm=algo, seed=seed, scenario_hash=scenario.config_hash(),
            avg_rate_bps_hz=run.avg_rate_bps_hz, stderr=run.stderr,
            trajectory=run.trajectory,
            iteration_log_path=str(log_path) if log_path else None,
            wall_clock_s=wall)
        results.append(result)
        entries.append(_summary_entry(result, {"npb_mode": npb_mode}))

    reporting.write_comparison_csv(
        [(r.algorithm, r.avg_rate_bps_hz, r.stderr) for r in results],
        out / "comparison.csv")
    reporting.write_json({"runs": entries}, out / "benchmark_summary.json")
    return results


def cmd_sweep_t(config_path, t_values, seed: int, out_dir,
                npb_mode: str = "random", epsilon: float = 1e-4,
                max_iter: int = 100):
    """Rate-versus-flight-time sweep over all four algorithms."""
    cfg = _load_config_dict(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    for T in t_values:
        cfg_t = dict(cfg)
        cfg_t["T"] = float(T)
        scenario = Scenario.from_config(cfg_t)
        realization = sample_realization(scenario, seed)
        options = SCAOptions(epsilon=epsilon, max_iter=max_iter)
        for algo in ALGORITHMS:
            run = run_algorithm(algo, scenario, realization, seed=seed,
                                npb_mode=npb_mode, options=options)
            rows.append((float(T), algo, run.avg_rate_bps_hz, run.stderr))
    path = out / "sweep.csv"
    reporting.write_sweep_csv(rows, path)
    return rows, path


def cmd_verify_lemma(points: int = 10_000, fd_points: int = 1_000,
                     seed: int = 0, out_dir=None):
    """Convexity-certificate sweep; returns (report, ok)."""
    report, ok = run_lemma_verification(n_pd=points, n_fd=fd_points, seed=seed)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        reporting.write_json(report, out / "verify_lemma.json")
    return report, ok


# --- click wiring -----------------------------------------------------------

def _fail(code: int, message: str):
    click.echo(message, err=True)
    sys.exit(code)


def _guarded(fn):
    try:
        return fn()
    except ConfigError as exc:
        _fail(EXIT_CONFIG, f"config error: {exc}")
    except InfeasibilityError as exc:
        _fail(EXIT_INFEASIBLE, f"infeasible scenario: {exc}")


_config_opt = click.option("--config", "config_path", required=True,
                           type=click.Path(), help="scenario JSON file")
_seed_opt = click.option("--seed", type=int, default=0, show_default=True)
_out_opt = click.option("--out", "out_dir", required=True,
                        type=click.Path(), help="output directory")
_npb_opt = click.option("--npb-mode", type=click.Choice(["zero", "random", "no-ris"]),
                        default="random", show_default=True)
_eps_opt = click.option("--epsilon", type=float, default=1e-4, show_default=True)
_iter_opt = click.option("--max-iter", type=int, default=100, show_default=True)


@click.group()
def main():
    """Joint UAV trajectory and RIS phase optimization experiments."""


@main.command()
@_config_opt
@_seed_opt
@_out_opt
@_eps_opt
@_iter_opt
def optimize(config_path, seed, out_dir, epsilon, max_iter):
    """Run the joint optimizer and write trajectory/phases/log/summary."""
    result = _guarded(lambda: cmd_optimize(config_path, seed, out_dir,
                                           epsilon=epsilon, max_iter=max_iter))
    click.echo(f"jtpb avg rate: {result.avg_rate_bps_hz:.6f} bps/Hz "
               f"({result.iteration_log_path})")


@main.command()
@_config_opt
@_seed_opt
@_out_opt
@click.option("--algorithms", default=",".join(ALGORITHMS), show_default=True,
              help="comma-separated subset of " + ",".join(ALGORITHMS))
@_npb_opt
@_eps_opt
@_iter_opt
def benchmark(config_path, seed, out_dir, algorithms, npb_mode, epsilon, max_iter):
    """Compare algorithms on one shared channel realization."""
    algos = [a.strip() for a in algorithms.split(",") if a.strip()]
    results = _guarded(lambda: cmd_benchmark(
        config_path, seed, algos, out_dir,
        npb_mode=npb_mode.replace("-", "_"), epsilon=epsilon, max_iter=max_iter))
    for r in results:
        click.echo(f"{r.algorithm}: {r.avg_rate_bps_hz:.6f} bps/Hz")


@main.command("sweep-t")
@_config_opt
@_seed_opt
@_out_opt
@click.option("--t-values", default="200,300,500,740", show_default=True,
              help="comma-separated flight times in seconds")
@_npb_opt
@_eps_opt
@_iter_opt
def sweep_t(config_path, seed, out_dir, t_values, npb_mode, epsilon, max_iter):
    """Sweep the flight time and tabulate all four algorithms."""
    values = [float(v) for v in t_values.split(",") if v.strip()]
    if not values:
        _fail(EXIT_CONFIG, "config error: empty --t-values list")
    _, path = _guarded(lambda: cmd_sweep_t(
        config_path, values, seed, out_dir,
        npb_mode=npb_mode.replace("-", "_"), epsilon=epsilon, max_iter=max_iter))
    click.echo(f"wrote {path}")


@main.command("verify-lemma")
@click.option("--points", type=int, default=10_000, show_default=True)
@click.option("--fd-points", type=int, default=1_000, show_default=True)
@_seed_opt
@click.option("--out", "out_dir", default=None, type=click.Path())
def verify_lemma(points, fd_points, seed, out_dir):
    """Numerically certify convexity of the rate kernel."""
    report, ok = cmd_verify_lemma(points=points, fd_points=fd_points,
                                  seed=seed, out_dir=out_dir)
    click.echo(json.dumps(report, sort_keys=True, indent=2))
    if not ok:
        _fail(EXIT_VERIFICATION, "verification failed")


if __name__ == "__main__":
    main()
