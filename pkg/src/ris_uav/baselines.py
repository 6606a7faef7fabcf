"""Benchmark algorithms: heuristic trajectories and no-beamforming policies.

The heuristic trajectory flies straight to the user at full speed, hovers
there as long as the time budget allows, and leaves just in time to reach the
terminal region. "No passive beamforming" is underdetermined, so three modes
are provided: all-zero phases, uniformly random phases (averaged over draws),
and no RIS at all (direct link only).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beamforming import (LN2, PhaseSchedule, average_rate, optimal_phases)
from .channel import (ChannelRealization, NPB_RANDOM_TAG, derived_rng)
from .scenario import (InfeasibilityError, Scenario, Trajectory, check_mobility,
                       d_ug)
from .sca import SCAOptions, SCAOutcome, run_sca

NPB_MODES = ("zero", "random", "no_ris")
NPB_DRAWS_DEFAULT = 100


def heuristic_trajectory(scenario: Scenario) -> Trajectory:
    """Fly to the user at vmax, hover, leave in time to reach the endpoint.

    Raises InfeasibilityError (reporting the minimum flight time) when the
    slot budget cannot cover the two transits.
    """
    q0, qF, wG = scenario.q0, scenario.qF, scenario.wG
    N, D = scenario.N, scenario.D
    l_in = float(np.linalg.norm(wG - q0))
    l_out = float(np.linalg.norm(qF - wG))
    n_in = int(math.ceil(l_in / D - 1e-12))
    # leave as late as possible: after n_out full steps the endpoint is
    # within one slot's reach
    n_out = max(0, int(math.ceil(l_out / D - 1.0 - 1e-12)))
    if n_in + n_out > N - 1:
        t_min = (n_in + n_out + 1) * scenario.delta_t
        raise InfeasibilityError(
            f"flight time too short for the heuristic path; need T >= {t_min} s")

    q = np.tile(wG, (N, 1)).astype(float)
    if l_in > 0:
        unit = (wG - q0) / l_in
        for k in range(n_in + 1):
            q[k] = q0 + min(k * D, l_in) * unit
    else:
        q[0] = q0
    if l_out > 0 and n_out > 0:
        unit = (qF - wG) / l_out
        for j in range(1, n_out + 1):
            q[N - 1 - n_out + j] = wG + j * D * unit
    traj = Trajectory(q)
    assert not check_mobility(traj, scenario)
    return traj


def npb_schedule(mode: str, scenario: Scenario,
                 seed: int = 0) -> PhaseSchedule | None:
    """Phase schedule for an uncontrolled RIS; None marks the no-RIS mode."""
    if mode == "zero":
        return PhaseSchedule(np.zeros((scenario.N, scenario.M)))
    if mode == "random":
        rng = derived_rng(seed, NPB_RANDOM_TAG)
        theta = rng.uniform(0.0, 2.0 * math.pi, size=(scenario.N, scenario.M))
        return PhaseSchedule(theta)
    if mode == "no_ris":
        return None
    raise ValueError(f"unknown npb mode {mode!r}; expected one of {NPB_MODES}")


def direct_only_rate(traj: Trajectory, realization: ChannelRealization,
                     scenario: Scenario) -> float:
    """Average rate with the reflected term dropped entirely."""
    du = d_ug(traj.q, scenario)
    gains2 = scenario.rho * du ** (-scenario.kappa) * abs(realization.h_tilde) ** 2
    return float(np.mean(np.log1p(scenario.P * gains2 / scenario.sigma2) / LN2))


def npb_average_rate(traj: Trajectory, mode: str,
                     realization: ChannelRealization, scenario: Scenario,
                     seed: int = 0,
                     n_draws: int = NPB_DRAWS_DEFAULT) -> tuple[float, float]:
    """(mean rate, standard error) under the chosen no-beamforming mode.

    The random mode averages over `n_draws` i.i.d. uniform phase schedules
    drawn from the seed-derived stream; the other modes are deterministic
    (stderr 0).
    """
    if mode == "zero":
        sched = npb_schedule("zero", scenario)
        return average_rate(traj, sched, realization, scenario), 0.0
    if mode == "no_ris":
        return direct_only_rate(traj, realization, scenario), 0.0
    if mode != "random":
        raise ValueError(f"unknown npb mode {mode!r}; expected one of {NPB_MODES}")
    rng = derived_rng(seed, NPB_RANDOM_TAG)
    rates = np.empty(n_draws)
    for k in range(n_draws):
        theta = rng.uniform(0.0, 2.0 * math.pi, size=(scenario.N, scenario.M))
        rates[k] = average_rate(traj, PhaseSchedule(theta), realization, scenario)
    stderr = float(rates.std(ddof=1) / math.sqrt(n_draws)) if n_draws > 1 else 0.0
    return float(rates.mean()), stderr


def t_npb_optimize(scenario: Scenario, realization: ChannelRealization,
                   options: SCAOptions | None = None) -> SCAOutcome:
    """Trajectory-only planning: run the optimizer with the RIS term zeroed.

    The returned outcome's objective log is the direct-link planning
    objective; callers re-evaluate the final trajectory under their chosen
    no-beamforming mode for reporting.
    """
    opts = options or SCAOptions()
    if opts.ab_override is None:
        opts = SCAOptions(epsilon=opts.epsilon, max_iter=opts.max_iter,
                          init=opts.init, ab_override=(realization.A, 0.0),
                          inner_tol=opts.inner_tol, max_sweeps=opts.max_sweeps,
                          subproblem_method=opts.subproblem_method)
    return run_sca(scenario, realization, opts)


ALGORITHMS = ("jtpb", "t_npb", "ht_pb", "ht_npb")


@dataclass(frozen=True)
class BenchmarkRun:
    """Result of one algorithm on one (scenario, realization) pair."""

    algorithm: str
    avg_rate_bps_hz: float
    stderr: float
    trajectory: Trajectory
    schedule: PhaseSchedule | None
    outcome: SCAOutcome | None  # set for the optimizing algorithms


def run_algorithm(algorithm: str, scenario: Scenario,
                  realization: ChannelRealization, seed: int = 0,
                  npb_mode: str = "random",
                  options: SCAOptions | None = None,
                  n_draws: int = NPB_DRAWS_DEFAULT) -> BenchmarkRun:
    """Dispatch one of the four algorithms on a shared realization."""
    if algorithm == "jtpb":
        outcome = run_sca(scenario, realization, options)
        rate = average_rate(outcome.trajectory, outcome.schedule, realization,
                            scenario)
        return BenchmarkRun("jtpb", rate, 0.0, outcome.trajectory,
                            outcome.schedule, outcome)
    if algorithm == "t_npb":
        outcome = t_npb_optimize(scenario, realization, options)
        rate, err = npb_average_rate(outcome.trajectory, npb_mode, realization,
                                     scenario, seed=seed, n_draws=n_draws)
        return BenchmarkRun("t_npb", rate, err, outcome.trajectory, None, outcome)
    if algorithm == "ht_pb":
        traj = heuristic_trajectory(scenario)
        sched = optimal_phases(traj, realization, scenario)
        rate = average_rate(traj, sched, realization, scenario)
        return BenchmarkRun("ht_pb", rate, 0.0, traj, sched, None)
    if algorithm == "ht_npb":
        traj = heuristic_trajectory(scenario)
        rate, err = npb_average_rate(traj, npb_mode, realization, scenario,
                                     seed=seed, n_draws=n_draws)
        return BenchmarkRun("ht_npb", rate, err, traj, None, None)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
