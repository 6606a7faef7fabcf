"""Trajectory optimizer: surrogate construction and the outer ascent loop.

The per-slot rate under phase alignment is convex in the two slack distances
(u, v), so its first-order Taylor expansion at the current iterate is a global
under-estimator. Maximizing that surrogate subject to the mobility constraints
is, after eliminating the slacks through their tight quadratic bounds, a
concave per-slot isotropic quadratic in the waypoints. The subproblem is
solved by cyclic block-coordinate ascent: with neighbors fixed, each waypoint
moves to the Euclidean projection of a fixed attractor point onto the
intersection of the two mobility discs. A projected-gradient path is kept
behind a flag for cross-validation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .beamforming import (LN2, PhaseSchedule, average_rate, optimal_phases,
                          reduced_rate)
from .channel import ChannelRealization
from .scenario import (InfeasibilityError, Scenario, Trajectory,
                       check_mobility, d_ug, d_ur, straight_line_trajectory)


@dataclass(frozen=True)
class SurrogateCoeffs:
    """Per-slot Taylor coefficients of the rate surrogate.

    A0 >= 1 (one plus nonnegative link terms); B0 and C0 are nonpositive
    whenever the link constants are nonnegative.
    """

    A0: np.ndarray
    B0: np.ndarray
    C0: np.ndarray
    gamma0: float

    def __post_init__(self):
        for name in ("A0", "B0", "C0"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def slack_from_trajectory(traj: Trajectory, scenario: Scenario):
    """Tight slack values: u[n], v[n] equal to the two per-slot distances."""
    return d_ug(traj.q, scenario), d_ur(traj.q, scenario)


def taylor_coeffs(u0, v0, A: float, B: float, gamma0: float,
                  kappa: float) -> SurrogateCoeffs:
    """Surrogate coefficients at the expansion point (u0, v0) > 0."""
    u0 = np.asarray(u0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if np.any(u0 <= 0) or np.any(v0 <= 0):
        raise ValueError("expansion points u0, v0 must be strictly positive")
    uk = u0 ** -kappa
    uk2 = u0 ** (-kappa / 2.0)
    A0 = 1.0 + gamma0 * (A * A * uk + B * B / v0 ** 2
                         + 2.0 * A * B * uk2 / v0)
    B0 = -gamma0 * (kappa * A * A * uk / u0
                    + kappa * A * B * uk2 / (v0 * u0))
    C0 = -gamma0 * (2.0 * B * B / v0 ** 3
                    + 2.0 * A * B * uk2 / v0 ** 2)
    return SurrogateCoeffs(A0=A0, B0=B0, C0=C0, gamma0=gamma0)


def surrogate_lower_bound(u, v, u0, v0, coeffs: SurrogateCoeffs) -> float:
    """Summed linear under-estimator of the slack rate at (u, v)."""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    u0, v0 = np.asarray(u0, dtype=float), np.asarray(v0, dtype=float)
    terms = (np.log2(coeffs.A0)
             + coeffs.B0 * (u - u0) / (coeffs.A0 * LN2)
             + coeffs.C0 * (v - v0) / (coeffs.A0 * LN2))
    return float(terms.sum())


def slack_rate_sum(u, v, A: float, B: float, gamma0: float,
                   kappa: float) -> float:
    """Summed true slack rate sum_n log2(1 + g0*(A/u^(k/2) + B/v)^2)."""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    amp = A * u ** (-kappa / 2.0) + B / v
    return float(np.sum(np.log1p(gamma0 * amp ** 2) / LN2))


# --- projection onto the intersection of two equal-radius discs -----------

def _project_two_discs(px, py, ax, ay, bx, by, radius):
    """Closest point to (px, py) within distance `radius` of both centers.

    Exact two-circle case analysis; assumes the intersection is nonempty
    (always true for centers at most 2*radius apart).
    """
    eps = 1e-12 * max(1.0, radius)
    dax, day = px - ax, py - ay
    da = math.hypot(dax, day)
    dbx, dby = px - bx, py - by
    db = math.hypot(dbx, dby)
    if da <= radius and db <= radius:
        return px, py
    if da > radius:
        sc = radius / da
        cx, cy = ax + dax * sc, ay + day * sc
        if math.hypot(cx - bx, cy - by) <= radius + eps:
            return cx, cy
    if db > radius:
        sc = radius / db
        cx, cy = bx + dbx * sc, by + dby * sc
        if math.hypot(cx - ax, cy - ay) <= radius + eps:
            return cx, cy
    # both constraints active: intersection points of the two circles
    dabx, daby = bx - ax, by - ay
    d = math.hypot(dabx, daby)
    if d <= eps:
        sc = radius / da
        return ax + dax * sc, ay + day * sc
    if d > 2.0 * radius + 1e-9:
        return _dykstra_two_discs(px, py, ax, ay, bx, by, radius)
    h = math.sqrt(max(radius * radius - 0.25 * d * d, 0.0))
    mx, my = 0.5 * (ax + bx), 0.5 * (ay + by)
    ux, uy = dabx / d, daby / d
    c1x, c1y = mx - h * uy, my + h * ux
    c2x, c2y = mx + h * uy, my - h * ux
    if ((c1x - px) ** 2 + (c1y - py) ** 2
            <= (c2x - px) ** 2 + (c2y - py) ** 2):
        return c1x, c1y
    return c2x, c2y


def _dykstra_two_discs(px, py, ax, ay, bx, by, radius, iters=500):
    """Dykstra fallback for numerically pathological disc pairs."""
    def proj(cx, cy, x, y):
        dx, dy = x - cx, y - cy
        d = math.hypot(dx, dy)
        if d <= radius or d == 0.0:
            return x, y
        sc = radius / d
        return cx + dx * sc, cy + dy * sc

    x, y = px, py
    p1x = p1y = p2x = p2y = 0.0
    for _ in range(iters):
        tx, ty = x + p1x, y + p1y
        nx, ny = proj(ax, ay, tx, ty)
        p1x, p1y = tx - nx, ty - ny
        tx, ty = nx + p2x, ny + p2y
        mx, my = proj(bx, by, tx, ty)
        p2x, p2y = tx - mx, ty - my
        if abs(mx - x) + abs(my - y) < 1e-14 * max(1.0, radius):
            x, y = mx, my
            break
        x, y = mx, my
    return x, y


# --- block-coordinate subproblem solver ------------------------------------

def _eliminated_objective(q: np.ndarray, c1: np.ndarray, c2: np.ndarray,
                          wG: np.ndarray, wR: np.ndarray) -> float:
    return float(np.sum(c1 * np.sum((q - wG) ** 2, axis=1)
                        + c2 * np.sum((q - wR) ** 2, axis=1)))


def _bca_sweeps(q: np.ndarray, c1: np.ndarray, c2: np.ndarray,
                scenario: Scenario, tol: float, max_sweeps: int) -> int:
    """Cyclic block updates over slots 2..N, in place; returns sweep count."""
    n = q.shape[0]
    D = scenario.D
    gx, gy = float(scenario.wG[0]), float(scenario.wG[1])
    rx, ry = float(scenario.wR[0]), float(scenario.wR[1])
    fx, fy = float(scenario.qF[0]), float(scenario.qF[1])
    qx = [float(v) for v in q[:, 0]]
    qy = [float(v) for v in q[:, 1]]
    c1l = [float(v) for v in c1]
    c2l = [float(v) for v in c2]

    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        gain = 0.0
        for i in range(1, n):
            a1, a2 = c1l[i], c2l[i]
            s = a1 + a2
            if s == 0.0:
                continue
            tx = (a1 * gx + a2 * rx) / s
            ty = (a1 * gy + a2 * ry) / s
            ax, ay = qx[i - 1], qy[i - 1]
            if i + 1 < n:
                bx, by = qx[i + 1], qy[i + 1]
            else:
                bx, by = fx, fy
            nx, ny = _project_two_discs(tx, ty, ax, ay, bx, by, D)
            ox, oy = qx[i], qy[i]
            delta = (a1 * ((nx - gx) ** 2 + (ny - gy) ** 2
                           - (ox - gx) ** 2 - (oy - gy) ** 2)
                     + a2 * ((nx - rx) ** 2 + (ny - ry) ** 2
                             - (ox - rx) ** 2 - (oy - ry) ** 2))
            if delta > 0.0:
                qx[i], qy[i] = nx, ny
                gain += delta
        if gain < tol:
            break
    q[:, 0] = qx
    q[:, 1] = qy
    return sweeps


# --- projected-gradient cross-validation path ------------------------------

def _project_chain(q: np.ndarray, scenario: Scenario, iters: int = 200):
    """Dykstra projection onto the chained mobility constraints, in place."""
    n = q.shape[0]
    D = scenario.D
    # one correction buffer per constraint: start pin, n-1 steps, terminal disc
    corr = np.zeros((n + 1, 2, 2))
    for _ in range(iters):
        moved = 0.0
        # start pin
        z = q[0] + corr[0, 0]
        corr[0, 0] = z - scenario.q0
        moved += float(np.abs(q[0] - scenario.q0).sum())
        q[0] = scenario.q0
        for i in range(n - 1):
            za = q[i] + corr[i + 1, 0]
            zb = q[i + 1] + corr[i + 1, 1]
            gap = zb - za
            dist = float(np.hypot(gap[0], gap[1]))
            if dist > D and dist > 0:
                shift = 0.5 * (dist - D) / dist * gap
                na, nb = za + shift, zb - shift
            else:
                na, nb = za, zb
            corr[i + 1, 0] = za - na
            corr[i + 1, 1] = zb - nb
            moved += float(np.abs(na - q[i]).sum() + np.abs(nb - q[i + 1]).sum())
            q[i], q[i + 1] = na, nb
        z = q[-1] + corr[n, 0]
        gap = z - scenario.qF
        dist = float(np.hypot(gap[0], gap[1]))
        if dist > D:
            nz = scenario.qF + gap * (D / dist)
        else:
            nz = z
        corr[n, 0] = z - nz
        moved += float(np.abs(nz - q[-1]).sum())
        q[-1] = nz
        if moved < 1e-12:
            break
    return q


def _pgd_solve(q: np.ndarray, c1: np.ndarray, c2: np.ndarray,
               scenario: Scenario, tol: float, max_iters: int = 5000):
    """Projected gradient ascent on the eliminated objective (validation path)."""
    wG, wR = scenario.wG, scenario.wR
    lip = 2.0 * float(np.max(np.abs(c1 + c2)))
    if lip == 0.0:
        return q, 0
    step = 1.0 / lip
    best = _eliminated_objective(q, c1, c2, wG, wR)
    iters = 0
    for iters in range(1, max_iters + 1):
        grad = 2.0 * (c1[:, None] * (q - wG) + c2[:, None] * (q - wR))
        grad[0] = 0.0
        cand = _project_chain(q + step * grad, scenario)
        val = _eliminated_objective(cand, c1, c2, wG, wR)
        q = cand
        if abs(val - best) < tol:
            best = val
            break
        best = val
    return q, iters


def _subproblem_coeffs(traj0: Trajectory, realization: ChannelRealization,
                       scenario: Scenario, ab=None):
    u0, v0 = slack_from_trajectory(traj0, scenario)
    A, B = (realization.A, realization.B) if ab is None else ab
    coeffs = taylor_coeffs(u0, v0, A, B, scenario.gamma0, scenario.kappa)
    c1 = coeffs.B0 / (2.0 * u0 * coeffs.A0 * LN2)
    c2 = coeffs.C0 / (2.0 * v0 * coeffs.A0 * LN2)
    if not (np.all(np.isfinite(c1)) and np.all(np.isfinite(c2))):
        raise ValueError("non-finite surrogate coefficients")
    return coeffs, u0, v0, c1, c2


def eliminated_slacks(traj: Trajectory, u0, v0, scenario: Scenario):
    """Slack values implied by the tight quadratic bounds at a new trajectory."""
    du2 = scenario.zU ** 2 + np.sum((traj.q - scenario.wG) ** 2, axis=1)
    dv2 = (scenario.zU - scenario.zR) ** 2 + np.sum((traj.q - scenario.wR) ** 2, axis=1)
    return (du2 + u0 ** 2) / (2.0 * u0), (dv2 + v0 ** 2) / (2.0 * v0)


def solve_subproblem(traj0: Trajectory, realization: ChannelRealization,
                     scenario: Scenario, tol: float = 1e-8, *,
                     ab: tuple[float, float] | None = None,
                     method: str = "bca",
                     max_sweeps: int = 200) -> Trajectory:
    """Maximize the linearized surrogate around traj0 under mobility limits.

    Returns a feasible trajectory whose surrogate value is no worse than at
    traj0. `method="pgd"` switches to the projected-gradient validation path.
    """
    traj, _, _ = _solve_subproblem_stats(traj0, realization, scenario, tol,
                                         ab=ab, method=method,
                                         max_sweeps=max_sweeps)
    return traj


def _solve_subproblem_stats(traj0, realization, scenario, tol, *, ab=None,
                            method="bca", max_sweeps=200):
    if tol <= 0:
        raise ValueError("tol must be strictly positive")
    if check_mobility(traj0, scenario):
        raise InfeasibilityError("subproblem starting trajectory is infeasible")
    coeffs, u0, v0, c1, c2 = _subproblem_coeffs(traj0, realization, scenario, ab)

    q = np.array(traj0.q, dtype=float)
    before = _eliminated_objective(q, c1, c2, scenario.wG, scenario.wR)
    if method == "bca":
        sweeps = _bca_sweeps(q, c1, c2, scenario, tol, max_sweeps)
    elif method == "pgd":
        q, sweeps = _pgd_solve(q, c1, c2, scenario, tol)
    else:
        raise ValueError(f"unknown subproblem method {method!r}")
    after = _eliminated_objective(q, c1, c2, scenario.wG, scenario.wR)

    traj = Trajectory(q)
    if check_mobility(traj, scenario):
        raise RuntimeError("subproblem produced an infeasible trajectory")
    if after < before - 1e-9 * max(1.0, abs(before)):
        raise RuntimeError("subproblem decreased the surrogate objective")

    u_new, v_new = eliminated_slacks(traj, u0, v0, scenario)
    surrogate = surrogate_lower_bound(u_new, v_new, u0, v0, coeffs)
    return traj, sweeps, surrogate


# --- outer loop -------------------------------------------------------------

@dataclass(frozen=True)
class SCAOptions:
    epsilon: float = 1e-4
    max_iter: int = 100
    init: str | Trajectory = "straight"
    # (A, B) override for planning variants, e.g. B = 0 drops the RIS term
    ab_override: tuple[float, float] | None = None
    inner_tol: float = 1e-8
    max_sweeps: int = 200
    subproblem_method: str = "bca"


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    avg_rate_bps_hz: float
    surrogate_obj: float       # per-slot average of the surrogate bound
    max_step_m: float
    sweeps: int
    trajectory: Trajectory
    u: np.ndarray              # accepted slacks (tight at the iterate)
    v: np.ndarray


@dataclass
class SCAOutcome:
    trajectory: Trajectory
    schedule: PhaseSchedule
    objective_log: list[float]
    iterations: int
    converged: bool
    history: list[IterationRecord] = field(default_factory=list)


def run_sca(scenario: Scenario, realization: ChannelRealization,
            options: SCAOptions | None = None) -> SCAOutcome:
    """Alternate surrogate trajectory steps with closed-form phase updates.

    The convergence objective is the true average rate under phase alignment,
    re-evaluated after every trajectory update; the log of those values is
    non-decreasing. Stops when the relative improvement drops below epsilon
    or after max_iter iterations.
    """
    opts = options or SCAOptions()
    if opts.epsilon <= 0:
        raise ValueError("epsilon must be strictly positive")
    if opts.max_iter < 1:
        raise ValueError("max_iter must be at least 1")

    if isinstance(opts.init, Trajectory):
        traj = opts.init
        if check_mobility(traj, scenario):
            raise InfeasibilityError("initial trajectory is infeasible")
    elif opts.init == "straight":
        traj = straight_line_trajectory(scenario)
    else:
        raise ValueError(f"unknown init {opts.init!r}")

    ab = opts.ab_override

    def objective(t: Trajectory) -> float:
        if ab is not None:
            return reduced_rate(t, realization, scenario, A=ab[0], B=ab[1])
        return average_rate(t, optimal_phases(t, realization, scenario),
                            realization, scenario)

    rate = objective(traj)
    u, v = slack_from_trajectory(traj, scenario)
    log = [rate]
    history = [IterationRecord(0, rate, rate, 0.0, 0, traj, u, v)]

    converged = False
    iterations = 0
    for k in range(1, opts.max_iter + 1):
        new_traj, sweeps, surrogate_total = _solve_subproblem_stats(
            traj, realization, scenario, opts.inner_tol, ab=ab,
            method=opts.subproblem_method, max_sweeps=opts.max_sweeps)
        new_rate = objective(new_traj)
        assert new_rate >= rate - 1e-9, (
            f"objective decreased at iteration {k}: {rate} -> {new_rate}")
        max_step = float(np.max(np.linalg.norm(new_traj.q - traj.q, axis=1)))
        u, v = slack_from_trajectory(new_traj, scenario)
        history.append(IterationRecord(
            k, new_rate, surrogate_total / scenario.N, max_step, sweeps,
            new_traj, u, v))
        log.append(new_rate)
        iterations = k
        rel = (new_rate - rate) / new_rate if new_rate > 0 else 0.0
        traj, rate = new_traj, new_rate
        if rel < opts.epsilon:
            converged = True
            break

    schedule = optimal_phases(traj, realization, scenario)
    return SCAOutcome(trajectory=traj, schedule=schedule, objective_log=log,
                      iterations=iterations, converged=converged,
                      history=history)
