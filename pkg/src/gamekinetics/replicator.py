"""Replicator ODE integration and orbit analysis.

dp_i/dt = rate_scale * p_i ((Ap)_i - p^T A p).  For the antisymmetric
games treated here p^T A p vanishes identically; it is still computed
and asserted small in debug mode.  rate_scale 1 gives the standard
replicator; 2c gives the mean-strategy dynamic of ensembles confined to
the plateau {prod p_i >= c}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .games import PayoffMatrix

CLAMP_BAND = 1e-12


class StateLeftSimplex(RuntimeError):
    """A coordinate went below -1e-12: the step size is too large."""


class RangeOutOfSpan(ValueError):
    pass


@dataclass
class ReplicatorTrajectory:
    times: np.ndarray  # strictly increasing, (n+1,)
    states: np.ndarray  # (n+1, d), each row on the simplex
    rate_scale: float = 1.0


def replicator_rhs(p, matrix: PayoffMatrix, rate_scale: float = 1.0) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    ap = matrix.a @ p
    quad = float(p @ ap)
    # scale-relative so off-simplex RK4 stage states do not trip the check
    assert abs(quad) <= 1e-12 * (1.0 + float(p @ p)), \
        f"p^T A p = {quad} for an antisymmetric matrix"
    return rate_scale * p * (ap - quad)


def _clamp_to_simplex(p: np.ndarray, where: str) -> np.ndarray:
    low = p.min()
    if low < -CLAMP_BAND:
        raise StateLeftSimplex(f"coordinate {low} at {where}; reduce dt")
    if low < 0.0:
        p = np.clip(p, 0.0, None)
        p = p / p.sum()
    return p


def integrate_rk4(p0, matrix: PayoffMatrix, t_end: float, dt: float,
                  rate_scale: float = 1.0) -> ReplicatorTrajectory:
    """Classical RK4 integration, recording every step.

    Coordinates in [-1e-12, 0) after a step are float dust and get
    clamped to 0 with the state renormalized; anything lower raises
    StateLeftSimplex instead of silently projecting back.
    """
    if dt <= 0 or t_end <= 0:
        raise ValueError("dt and t_end must be > 0")
    p = np.asarray(p0, dtype=float).copy()
    n_steps = int(np.ceil(t_end / dt - 1e-9))
    times = [0.0]
    states = [p.copy()]
    t = 0.0
    for k in range(n_steps):
        # times by multiplication, not accumulation, so they end exactly at t_end
        t_next = min((k + 1) * dt, t_end)
        h = t_next - t
        k1 = replicator_rhs(p, matrix, rate_scale)
        k2 = replicator_rhs(p + 0.5 * h * k1, matrix, rate_scale)
        k3 = replicator_rhs(p + 0.5 * h * k2, matrix, rate_scale)
        k4 = replicator_rhs(p + h * k3, matrix, rate_scale)
        p = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        p = _clamp_to_simplex(p, where=f"t={t_next:.6g}")
        t = t_next
        times.append(t)
        states.append(p.copy())
    return ReplicatorTrajectory(times=np.array(times), states=np.array(states),
                                rate_scale=rate_scale)


def rest_point_residual(p, matrix: PayoffMatrix) -> float:
    return float(np.max(np.abs(replicator_rhs(p, matrix, 1.0))))


def temporal_mean(traj: ReplicatorTrajectory, t0: float, t1: float) -> np.ndarray:
    """Trapezoidal time average of the states over [t0, t1].

    Endpoints inside a step are handled by linear interpolation.  The
    average is renormalized to the simplex; the residue is float dust
    (trapezoid weights are a convex combination).
    """
    times = traj.times
    slack = 1e-9 * (1.0 + abs(t1))
    if t0 < times[0] - slack or t1 > times[-1] + slack or t1 <= t0:
        raise RangeOutOfSpan(f"[{t0}, {t1}] not inside [{times[0]}, {times[-1]}]")
    t1 = min(t1, times[-1])
    t0 = max(t0, times[0])

    def interp_state(t):
        i = np.searchsorted(times, t, side="right") - 1
        i = min(max(i, 0), len(times) - 2)
        w = (t - times[i]) / (times[i + 1] - times[i])
        return (1 - w) * traj.states[i] + w * traj.states[i + 1]

    inner = (times > t0) & (times < t1)
    ts = np.concatenate(([t0], times[inner], [t1]))
    xs = np.vstack([interp_state(t0), traj.states[inner], interp_state(t1)])
    integral = np.trapezoid(xs, ts, axis=0)
    mean = integral / (t1 - t0)
    return mean / mean.sum()


def estimate_period(traj: ReplicatorTrajectory) -> float | None:
    """Orbit period from Poincare-section crossings of the first coordinate.

    Takes successive upward crossings of the level {p_1 = time-mean of
    p_1}, refines each crossing by linear interpolation, and returns the
    mean interval.  None when there are fewer than 3 crossings or the
    intervals vary by more than 5% relative (not a periodic orbit).
    """
    x = traj.states[:, 0]
    level = x.mean()
    prev = x[:-1]
    cur = x[1:]
    up = (prev < level) & (cur >= level)
    idx = np.nonzero(up)[0]
    if idx.size < 3:
        return None
    frac = (level - prev[idx]) / (cur[idx] - prev[idx])
    t_cross = traj.times[idx] + frac * (traj.times[idx + 1] - traj.times[idx])
    intervals = np.diff(t_cross)
    mean_int = intervals.mean()
    if mean_int <= 0:
        return None
    if (intervals.max() - intervals.min()) / mean_int > 0.05:
        return None
    return float(mean_int)
