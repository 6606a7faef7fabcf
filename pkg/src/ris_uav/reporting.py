"""CSV/JSON emission with deterministic formatting.

Floats are written with repr (shortest round-trip), so identical inputs give
byte-identical files. Slots and elements are 1-based in all file outputs.
"""
from __future__ import annotations

import json
from pathlib import Path

from .beamforming import PhaseSchedule
from .scenario import Trajectory


def _f(x) -> str:
    return repr(float(x))


def write_trajectory_csv(traj: Trajectory, path) -> None:
    lines = ["slot,x_m,y_m"]
    for n, (x, y) in enumerate(traj.q, start=1):
        lines.append(f"{n},{_f(x)},{_f(y)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_phases_csv(schedule: PhaseSchedule, path) -> None:
    lines = ["slot,element,theta_rad"]
    for n in range(schedule.n_slots):
        for i in range(schedule.n_elements):
            lines.append(f"{n + 1},{i + 1},{_f(schedule.theta[n, i])}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_iterations_csv(history, path) -> None:
    lines = ["iter,avg_rate_bps_hz,surrogate_obj,max_step_m,subproblem_sweeps"]
    for rec in history:
        lines.append(f"{rec.iteration},{_f(rec.avg_rate_bps_hz)},"
                     f"{_f(rec.surrogate_obj)},{_f(rec.max_step_m)},{rec.sweeps}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_sweep_csv(rows, path) -> None:
    """rows: iterable of (T_s, algorithm, avg_rate, stderr)."""
    lines = ["T_s,algorithm,avg_rate_bps_hz,stderr"]
    for t, algo, rate, err in rows:
        lines.append(f"{_f(t)},{algo},{_f(rate)},{_f(err)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_comparison_csv(rows, path) -> None:
    """rows: iterable of (algorithm, avg_rate, stderr)."""
    lines = ["algorithm,avg_rate_bps_hz,stderr"]
    for algo, rate, err in rows:
        lines.append(f"{algo},{_f(rate)},{_f(err)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(data: dict, path) -> None:
    Path(path).write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")
