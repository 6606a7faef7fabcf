"""Closed-form RIS phase control and the resulting SNR / achievable rate.

Aligning every reflected path with the direct path's phase maximizes the
received power for any UAV position, which collapses the per-slot phase
search to one closed-form expression and the rate to a two-term function of
the two UAV distances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, gain_ug, gain_ur, wrap_two_pi
from .scenario import (Scenario, TWO_PI, Trajectory, cos_aoa_ur, d_ug, d_ur)

LN2 = math.log(2.0)


@dataclass(frozen=True)
class PhaseSchedule:
    """Per-slot, per-element RIS phase shifts in [0, 2*pi)."""

    theta: np.ndarray  # (N, M), radians

    def __post_init__(self):
        arr = np.array(self.theta, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"theta must be (N, M), got shape {arr.shape}")
        if np.any(arr < 0.0) or np.any(arr >= TWO_PI):
            raise ValueError("phase shifts must lie in [0, 2*pi)")
        arr.setflags(write=False)
        object.__setattr__(self, "theta", arr)

    @property
    def n_slots(self) -> int:
        return self.theta.shape[0]

    @property
    def n_elements(self) -> int:
        return self.theta.shape[1]


def optimal_phases(traj: Trajectory, realization: ChannelRealization,
                   scenario: Scenario) -> PhaseSchedule:
    """Phase-aligning schedule: theta_i[n] = arg(h~) + omega_i + progression.

    The per-element progression 2*pi*(d/lambda)*(i-1)*cos_aoa cancels the ULA
    phase ramp so all reflected terms land on the direct path's phase.
    arg(0) is taken as 0 for the measure-zero h_tilde = 0 draw.
    """
    cos_aoa = np.atleast_1d(cos_aoa_ur(traj.q, scenario))
    prog = TWO_PI * scenario.d_over_lambda * np.arange(scenario.M)
    theta = (np.angle(realization.h_tilde)
             + realization.h_rg_phase[None, :]
             + prog[None, :] * cos_aoa[:, None])
    return PhaseSchedule(wrap_two_pi(theta))


def combined_gain(q_n, theta_n, realization: ChannelRealization,
                  scenario: Scenario) -> complex:
    """Direct-plus-reflected received gain for one slot.

    Uses the expanded sum-over-elements form; `combined_gain_matrix` is the
    equivalent matrix product, kept for cross-checks.
    """
    theta_n = np.asarray(theta_n, dtype=float)
    cos_aoa = cos_aoa_ur(q_n, scenario)
    prog = TWO_PI * scenario.d_over_lambda * np.arange(scenario.M)
    phases = theta_n - realization.h_rg_phase - prog * cos_aoa
    reflected = (math.sqrt(scenario.rho) / d_ur(q_n, scenario)
                 * np.sum(realization.h_rg_mag * np.exp(1j * phases)))
    return complex(gain_ug(q_n, realization, scenario) + reflected)


def combined_gain_matrix(q_n, theta_n, realization: ChannelRealization,
                         scenario: Scenario) -> complex:
    """Same gain via h_RG^H diag(e^{j theta}) h_UR; cross-check path."""
    theta_n = np.asarray(theta_n, dtype=float)
    reflected = np.vdot(realization.h_rg,
                        np.exp(1j * theta_n) * gain_ur(q_n, scenario))
    return complex(gain_ug(q_n, realization, scenario) + reflected)


def snr(q_n, theta_n, realization: ChannelRealization,
        scenario: Scenario) -> float:
    """Received SNR P*|combined gain|^2 / sigma^2 (linear)."""
    g = combined_gain(q_n, theta_n, realization, scenario)
    return scenario.P * abs(g) ** 2 / scenario.sigma2


def rate_slot(snr_value: float) -> float:
    """Achievable rate log2(1 + SNR) in bps/Hz."""
    return float(np.log1p(snr_value) / LN2)


def _combined_gains(traj: Trajectory, schedule: PhaseSchedule,
                    realization: ChannelRealization,
                    scenario: Scenario) -> np.ndarray:
    """(N,) complex combined gains, vectorized over slots."""
    q = traj.q
    cos_aoa = cos_aoa_ur(q, scenario)
    prog = TWO_PI * scenario.d_over_lambda * np.arange(scenario.M)
    phases = (schedule.theta - realization.h_rg_phase[None, :]
              - prog[None, :] * cos_aoa[:, None])
    reflected = (math.sqrt(scenario.rho) / d_ur(q, scenario)
                 * (realization.h_rg_mag[None, :] * np.exp(1j * phases)).sum(axis=1))
    direct = (math.sqrt(scenario.rho) * d_ug(q, scenario) ** (-scenario.kappa / 2.0)
              * realization.h_tilde)
    return direct + reflected


def average_rate(traj: Trajectory, schedule: PhaseSchedule,
                 realization: ChannelRealization, scenario: Scenario) -> float:
    """Mean per-slot achievable rate over the flight (bps/Hz)."""
    if schedule.n_slots != traj.n_slots:
        raise ValueError("schedule and trajectory slot counts differ")
    gains = _combined_gains(traj, schedule, realization, scenario)
    snrs = scenario.P * np.abs(gains) ** 2 / scenario.sigma2
    return float(np.mean(np.log1p(snrs) / LN2))


def reduced_rate(traj: Trajectory, realization: ChannelRealization,
                 scenario: Scenario, A: float | None = None,
                 B: float | None = None) -> float:
    """Average rate under phase alignment, in the two-term reduced form.

    Equals `average_rate` with `optimal_phases` up to floating error. A and B
    may be overridden (used by the no-beamforming planning baseline).
    """
    A = realization.A if A is None else A
    B = realization.B if B is None else B
    du = d_ug(traj.q, scenario)
    dv = d_ur(traj.q, scenario)
    amp = A * du ** (-scenario.kappa / 2.0) + B / dv
    return float(np.mean(np.log1p(scenario.gamma0 * amp ** 2) / LN2))
