"""Fading realizations and the three link gains (user, RIS uplink, RIS downlink).

One realization is drawn per flight: the scattering coefficient of the direct
link and the RIS-user vector carry no slot index, so they stay fixed while the
UAV moves. Randomness comes from named substreams derived from (seed, tag), so
each random quantity is independently reproducible.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

from .scenario import (Scenario, TWO_PI, cos_aoa_ur, cos_aod_rg, d_rg, d_ug,
                       d_ur)

# Substream tags; streams are SeedSequence((seed, crc32(tag))).
UG_SCATTER_TAG = "ug-scatter"
RG_NLOS_TAG = "rg-nlos"
NPB_RANDOM_TAG = "npb-random"


def derived_rng(seed: int, tag: str) -> np.random.Generator:
    """Independent, reproducible substream for one named random quantity."""
    return np.random.default_rng(
        np.random.SeedSequence((int(seed), zlib.crc32(tag.encode()))))


def wrap_two_pi(theta):
    """Map angles to [0, 2*pi); guards the mod-rounding edge at 2*pi."""
    wrapped = np.mod(theta, TWO_PI)
    return np.where(wrapped >= TWO_PI, 0.0, wrapped)


def _cscg(rng: np.random.Generator, size=None):
    # zero-mean unit-variance circularly symmetric complex Gaussian:
    # real and imaginary parts i.i.d. Normal(0, 1/2)
    scale = math.sqrt(0.5)
    return rng.normal(0.0, scale, size=size) + 1j * rng.normal(0.0, scale, size=size)


def steering_vector(cos_angle: float, m: int, d_over_lambda: float) -> np.ndarray:
    """ULA array response [1, e^{-j*2pi*(d/lambda)*cos}, ...] of length m."""
    return np.exp(-1j * TWO_PI * d_over_lambda * np.arange(m) * cos_angle)


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of all random fading quantities, plus derived constants.

    `A = sqrt(rho)*|h_tilde|` and `B = sqrt(rho)*sum_i |h_rg[i]|` are the two
    link-strength constants of the phase-aligned received gain.
    """

    h_tilde: complex
    h_rg: np.ndarray        # (M,) complex, includes path loss
    h_rg_mag: np.ndarray    # (M,) |h_rg|
    h_rg_phase: np.ndarray  # (M,) arg(h_rg) in [0, 2*pi)
    A: float
    B: float
    seed: int

    def __post_init__(self):
        for name in ("h_rg", "h_rg_mag", "h_rg_phase"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def M(self) -> int:
        return self.h_rg.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "seed": int(self.seed),
            "h_tilde": [self.h_tilde.real, self.h_tilde.imag],
            "h_rg": [[z.real, z.imag] for z in self.h_rg],
            "A": self.A,
            "B": self.B,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ChannelRealization":
        h_tilde = complex(data["h_tilde"][0], data["h_tilde"][1])
        h_rg = np.array([complex(re, im) for re, im in data["h_rg"]])
        return cls(
            h_tilde=h_tilde,
            h_rg=h_rg,
            h_rg_mag=np.abs(h_rg),
            h_rg_phase=wrap_two_pi(np.angle(h_rg)),
            A=float(data["A"]),
            B=float(data["B"]),
            seed=int(data["seed"]),
        )


def sample_realization(scenario: Scenario, seed: int) -> ChannelRealization:
    """Draw the flight's fading state; deterministic given (scenario, seed).

    The direct link scattering coefficient is CSCG(0,1). The RIS-user vector
    is sqrt(rho*d_RG^-alpha) times a Rician mix of the deterministic ULA
    steering component and an i.i.d. CSCG vector.
    """
    h_tilde = complex(_cscg(derived_rng(seed, UG_SCATTER_TAG)))

    g = _cscg(derived_rng(seed, RG_NLOS_TAG), size=scenario.M)
    los = steering_vector(cos_aod_rg(scenario), scenario.M, scenario.d_over_lambda)
    beta = scenario.beta
    path = math.sqrt(scenario.rho * d_rg(scenario) ** (-scenario.alpha))
    h_rg = path * (math.sqrt(beta / (1.0 + beta)) * los
                   + math.sqrt(1.0 / (1.0 + beta)) * g)

    mag = np.abs(h_rg)
    sqrt_rho = math.sqrt(scenario.rho)
    return ChannelRealization(
        h_tilde=h_tilde,
        h_rg=h_rg,
        h_rg_mag=mag,
        h_rg_phase=wrap_two_pi(np.angle(h_rg)),
        A=sqrt_rho * abs(h_tilde),
        B=sqrt_rho * float(mag.sum()),
        seed=int(seed),
    )


def gain_ug(q_n, realization: ChannelRealization, scenario: Scenario) -> complex:
    """Direct-link gain sqrt(rho) * d_UG^(-kappa/2) * h_tilde."""
    dist = d_ug(q_n, scenario)
    return math.sqrt(scenario.rho) * dist ** (-scenario.kappa / 2.0) * realization.h_tilde


def gain_ur(q_n, scenario: Scenario) -> np.ndarray:
    """LoS UAV-to-RIS gain vector; free-space exponent 2, ULA response."""
    dist = d_ur(q_n, scenario)
    steer = steering_vector(cos_aoa_ur(q_n, scenario), scenario.M,
                            scenario.d_over_lambda)
    return math.sqrt(scenario.rho) / dist * steer


def gain_rg(realization: ChannelRealization) -> np.ndarray:
    """RIS-to-user gain vector; drawn once per flight."""
    return realization.h_rg
