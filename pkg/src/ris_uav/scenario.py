"""Static geometry, RF constants, and mobility feasibility for the UAV/RIS downlink.

Positions are horizontal 2-vectors in meters; altitudes are separate scalars.
All internal quantities are linear (watts, linear path loss, linear Rician
factor). dB/dBm config inputs are converted once at load time.

Slot numbering is 1-based in file outputs and documentation; arrays are
0-indexed internally.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import InitVar, dataclass, field
from pathlib import Path

import numpy as np

TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    """Malformed or inconsistent configuration input."""


class InfeasibilityError(ValueError):
    """No trajectory can satisfy the mobility constraints."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def _vec2(value, name: str) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.shape != (2,):
        raise ConfigError(f"{name} must be a 2-vector, got shape {arr.shape}")
    return arr


# JSON config schema: exactly these keys, with either P_dBm or P_W for power.
_CONFIG_KEYS = {
    "q0", "qF", "wG", "wR", "zU", "zR", "T", "delta_t", "vmax", "M",
    "sigma2_dBm", "rho_dB", "kappa", "alpha", "beta_dB", "d_over_lambda",
}
_POWER_KEYS = {"P_dBm", "P_W"}


@dataclass(frozen=True)
class Scenario:
    """Physical and RF configuration of one flight.

    Fields
    ------
    q0, qF : UAV initial/final horizontal positions (m)
    wG, wR : ground-user / RIS-reference-element horizontal positions (m)
    zU, zR : UAV and RIS altitudes (m), zU > zR > 0
    T, N, delta_t : flight time (s), slot count, slot length (s); T = N*delta_t
    vmax : maximum horizontal UAV speed (m/s)
    M : number of RIS elements
    P, sigma2 : transmit power and noise power (W)
    rho : path loss at 1 m reference distance (linear)
    kappa, alpha : path loss exponents of the UAV-user and RIS-user links
    beta : Rician factor of the RIS-user link (linear)
    d_over_lambda : RIS element separation over carrier wavelength
    """

    q0: np.ndarray
    qF: np.ndarray
    wG: np.ndarray
    wR: np.ndarray
    zU: float
    zR: float
    T: float
    N: int
    delta_t: float
    vmax: float
    M: int
    P: float
    sigma2: float
    rho: float
    kappa: float
    alpha: float
    beta: float
    d_over_lambda: float = 0.5
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool):
        for name in ("q0", "qF", "wG", "wR"):
            arr = _vec2(getattr(self, name), name)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if validate:
            self._check()

    def _check(self):
        if int(self.N) != self.N or self.N < 2:
            raise ConfigError(f"N must be an integer >= 2, got {self.N}")
        if int(self.M) != self.M or self.M < 1:
            raise ConfigError(f"M must be an integer >= 1, got {self.M}")
        for name in ("delta_t", "T", "vmax", "P", "sigma2", "rho", "kappa",
                     "alpha", "beta", "d_over_lambda"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be strictly positive")
        if abs(self.T - self.N * self.delta_t) > 1e-9 * max(1.0, self.T):
            raise ConfigError(
                f"T = N*delta_t violated: T={self.T}, N*delta_t={self.N * self.delta_t}")
        if not (self.zU > self.zR > 0):
            raise ConfigError(
                f"altitudes must satisfy zU > zR > 0, got zU={self.zU}, zR={self.zR}")
        reach = self.N * self.D
        gap = float(np.linalg.norm(self.qF - self.q0))
        if gap > reach + 1e-9:
            raise InfeasibilityError(
                f"endpoints {gap:.3f} m apart exceed maximum reach N*vmax*delta_t"
                f" = {reach:.3f} m; no feasible trajectory exists")

    @property
    def D(self) -> float:
        """Maximum horizontal displacement per slot (m)."""
        return self.vmax * self.delta_t

    @property
    def gamma0(self) -> float:
        """Transmit-power-to-noise ratio P/sigma^2."""
        return self.P / self.sigma2

    @classmethod
    def from_config(cls, cfg: dict) -> "Scenario":
        """Build a scenario from a JSON-style config dict (dB fields converted)."""
        if not isinstance(cfg, dict):
            raise ConfigError("config root must be a JSON object")
        keys = set(cfg)
        missing = _CONFIG_KEYS - keys
        if missing:
            raise ConfigError(f"missing required config key(s): {sorted(missing)}")
        power = keys & _POWER_KEYS
        if len(power) != 1:
            raise ConfigError("config must contain exactly one of 'P_dBm' or 'P_W'")
        unknown = keys - _CONFIG_KEYS - _POWER_KEYS
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")

        try:
            T = float(cfg["T"])
            delta_t = float(cfg["delta_t"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"T and delta_t must be numeric: {exc}") from None
        if delta_t <= 0:
            raise ConfigError("delta_t must be strictly positive")
        n_float = T / delta_t
        N = round(n_float)
        if abs(n_float - N) > 1e-9 * max(1.0, abs(n_float)):
            raise ConfigError(
                f"T/delta_t = {n_float} is not an integer slot count")

        P = dbm_to_watts(float(cfg["P_dBm"])) if "P_dBm" in cfg else float(cfg["P_W"])
        try:
            return cls(
                q0=cfg["q0"], qF=cfg["qF"], wG=cfg["wG"], wR=cfg["wR"],
                zU=float(cfg["zU"]), zR=float(cfg["zR"]),
                T=T, N=N, delta_t=delta_t,
                vmax=float(cfg["vmax"]), M=int(cfg["M"]),
                P=P,
                sigma2=dbm_to_watts(float(cfg["sigma2_dBm"])),
                rho=db_to_linear(float(cfg["rho_dB"])),
                kappa=float(cfg["kappa"]), alpha=float(cfg["alpha"]),
                beta=db_to_linear(float(cfg["beta_dB"])),
                d_over_lambda=float(cfg["d_over_lambda"]),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, (ConfigError, InfeasibilityError)):
                raise
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, path) -> "Scenario":
        try:
            with open(path) as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from None
        return cls.from_config(cfg)

    def canonical_dict(self) -> dict:
        """Resolved (all-linear) parameter set with a stable key order."""
        return {
            "q0": list(self.q0), "qF": list(self.qF),
            "wG": list(self.wG), "wR": list(self.wR),
            "zU": self.zU, "zR": self.zR,
            "T": self.T, "N": int(self.N), "delta_t": self.delta_t,
            "vmax": self.vmax, "M": int(self.M),
            "P_W": self.P, "sigma2_W": self.sigma2,
            "rho": self.rho, "kappa": self.kappa, "alpha": self.alpha,
            "beta": self.beta, "d_over_lambda": self.d_over_lambda,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True,
                          separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class Trajectory:
    """Sequence of N horizontal UAV waypoints (fixed altitude)."""

    q: np.ndarray  # (N, 2), meters

    def __post_init__(self):
        arr = np.array(self.q, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError(f"trajectory must have shape (N, 2), got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "q", arr)

    @property
    def n_slots(self) -> int:
        return self.q.shape[0]

    def step_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.q, axis=0), axis=1)


def d_ug(q_n, scenario: Scenario) -> float | np.ndarray:
    """UAV-to-user distance sqrt(zU^2 + ||q - wG||^2); broadcasts over (..., 2)."""
    q_n = np.asarray(q_n, dtype=float)
    return np.sqrt(scenario.zU ** 2 + np.sum((q_n - scenario.wG) ** 2, axis=-1))


def d_ur(q_n, scenario: Scenario) -> float | np.ndarray:
    """UAV-to-RIS distance sqrt((zU - zR)^2 + ||q - wR||^2)."""
    q_n = np.asarray(q_n, dtype=float)
    return np.sqrt((scenario.zU - scenario.zR) ** 2
                   + np.sum((q_n - scenario.wR) ** 2, axis=-1))


def d_rg(scenario: Scenario) -> float:
    """RIS-to-user distance; constant over the flight."""
    return float(np.sqrt(scenario.zR ** 2
                         + np.sum((scenario.wR - scenario.wG) ** 2)))


def cos_aoa_ur(q_n, scenario: Scenario) -> float | np.ndarray:
    """Cosine of the arrival angle at the RIS array, (x_R - x)/d_UR."""
    q_n = np.asarray(q_n, dtype=float)
    dist = d_ur(q_n, scenario)
    if np.any(dist == 0.0):
        raise ValueError("UAV coincides with the RIS reference element")
    return (scenario.wR[0] - q_n[..., 0]) / dist


def cos_aod_rg(scenario: Scenario) -> float:
    """Cosine of the departure angle from the RIS toward the user."""
    dist = d_rg(scenario)
    if dist == 0.0:
        raise ValueError("RIS reference element coincides with the user")
    return float((scenario.wG[0] - scenario.wR[0]) / dist)


@dataclass(frozen=True)
class MobilityViolation:
    """One violated mobility constraint; `slot` is 1-based."""
    kind: str  # "start" | "step" | "terminal"
    slot: int
    excess_m: float


MOBILITY_TOL = 1e-9  # meters, absolute


def check_mobility(traj: Trajectory, scenario: Scenario,
                   tol: float = MOBILITY_TOL) -> list[MobilityViolation]:
    """Report all mobility-constraint violations (empty list = feasible).

    Checks q[1] = q0, per-slot steps <= D, and the terminal condition
    ||q[N] - qF|| <= D, each within `tol` meters absolute.
    """
    out: list[MobilityViolation] = []
    q = traj.q
    D = scenario.D
    start_err = float(np.linalg.norm(q[0] - scenario.q0))
    if start_err > tol:
        out.append(MobilityViolation("start", 1, start_err))
    steps = traj.step_lengths()
    for i in np.nonzero(steps > D + tol)[0]:
        out.append(MobilityViolation("step", int(i) + 1, float(steps[i] - D)))
    term_err = float(np.linalg.norm(q[-1] - scenario.qF)) - D
    if term_err > tol:
        out.append(MobilityViolation("terminal", traj.n_slots, term_err))
    return out


def straight_line_trajectory(scenario: Scenario) -> Trajectory:
    """Deterministic feasible initial path from q0 toward qF.

    Uniformly spaced straight line ending at qF when (N-1) steps suffice;
    otherwise a full-speed march that stops within D of qF.
    """
    q0, qF, N, D = scenario.q0, scenario.qF, scenario.N, scenario.D
    gap = float(np.linalg.norm(qF - q0))
    if gap <= (N - 1) * D:
        frac = np.linspace(0.0, 1.0, N)[:, None]
        q = q0[None, :] + frac * (qF - q0)[None, :]
    else:
        unit = (qF - q0) / gap
        dist = np.minimum(np.arange(N) * D, gap)
        q = q0[None, :] + dist[:, None] * unit[None, :]
    return Trajectory(q)
