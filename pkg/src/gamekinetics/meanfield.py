"""Particle solver for the nonlocal mean-field transport equation.

The strategy distribution is advected by the field

    F_i[v](p) = h(p) * (p_i (A pbar)_i + pbar_i (A p)_i),

where pbar is the current mean strategy of the distribution.  A weighted
particle ensemble pushed along the characteristics of F is an exact weak
solution, so integrating all particles as one coupled ODE system (the
mean recomputed from the stage states inside every RK4 stage) solves the
equation to RK4 accuracy.  An Euler-Maruyama step is provided for the
diffusive regime where the grazing limit keeps a noise term.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .games import PayoffMatrix, StepFunctionParams
from .metrics import sliced_w1
from .replicator import CLAMP_BAND, StateLeftSimplex


class ConfigInvalid(ValueError):
    pass


class DegenerateInitialDistance(ValueError):
    pass


class SupportLeftPlateau(RuntimeError):
    """The ensemble support exited {prod p_i >= c}; carries the exit time."""

    def __init__(self, exit_time: float):
        super().__init__(f"support left the step-function plateau at t={exit_time:.6g}")
        self.exit_time = exit_time


@dataclass
class ParticleEnsemble:
    """Weighted particle approximation of a strategy distribution."""

    points: np.ndarray  # (M, d)
    weights: np.ndarray  # (M,), nonnegative, sums to 1
    time: float = 0.0

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.points.ndim != 2:
            raise ConfigInvalid(f"points must be (M, d), got shape {self.points.shape}")
        if self.weights.shape != (self.points.shape[0],):
            raise ConfigInvalid("one weight per particle required")
        if np.min(self.weights) < 0:
            raise ConfigInvalid("weights must be nonnegative")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ConfigInvalid(f"weights sum to {self.weights.sum()}, not 1")

    @classmethod
    def uniform(cls, points, time: float = 0.0) -> "ParticleEnsemble":
        points = np.asarray(points, dtype=float)
        m = points.shape[0]
        return cls(points=points, weights=np.full(m, 1.0 / m), time=time)

    def copy(self) -> "ParticleEnsemble":
        return ParticleEnsemble(points=self.points.copy(), weights=self.weights.copy(),
                                time=self.time)


@dataclass(frozen=True)
class FieldParams:
    """Transport-field parameters; lambda_ > 0 enables the diffusive mode."""

    matrix: PayoffMatrix
    step: StepFunctionParams
    lambda_: float = 0.0
    noise_cov: np.ndarray | None = None  # required when lambda_ > 0

    def __post_init__(self):
        if self.lambda_ < 0:
            raise ConfigInvalid(f"lambda must be >= 0, got {self.lambda_}")
        if self.lambda_ > 0:
            q = self.noise_cov
            if q is None:
                raise ConfigInvalid("noise_cov is required when lambda > 0")
            if np.max(np.abs(q - q.T)) > 1e-12:
                raise ConfigInvalid("noise covariance must be symmetric")
            if np.max(np.abs(q.sum(axis=1))) > 1e-12:
                raise ConfigInvalid("noise covariance rows must sum to 0")
            if np.min(np.linalg.eigvalsh(q)) < -1e-12:
                raise ConfigInvalid("noise covariance must be positive semidefinite")


def _field_batch(points: np.ndarray, pbar: np.ndarray, a: np.ndarray, c: float) -> np.ndarray:
    h = np.minimum(np.prod(points, axis=1), c)
    a_pbar = a @ pbar
    a_points = points @ a.T
    return h[:, None] * (points * a_pbar[None, :] + pbar[None, :] * a_points)


def field_F(p, pbar, params: FieldParams) -> np.ndarray:
    """Transport field at strategy p given population mean pbar.

    Components sum to zero (flow tangent to the simplex hyperplane) and
    the field vanishes on the boundary where h does.
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    out = _field_batch(p, np.asarray(pbar, dtype=float), params.matrix.a, params.step.c)
    return out[0] if out.shape[0] == 1 else out


@dataclass
class TransportRun:
    snapshots: list = field(default_factory=list)  # [(time, ParticleEnsemble)]
    mean_times: np.ndarray | None = None
    means: np.ndarray | None = None


def _clamp_points(x: np.ndarray, t: float) -> np.ndarray:
    low = x.min()
    if low < -CLAMP_BAND:
        raise StateLeftSimplex(f"coordinate {low} at t={t:.6g}; reduce dt")
    if low < 0.0:
        x = np.clip(x, 0.0, None)
        x /= x.sum(axis=1, keepdims=True)
    return x


def integrate_transport(ens0: ParticleEnsemble, params: FieldParams, t_end: float, dt: float,
                        snapshot_every: float | None = None,
                        snapshot_times=None,
                        record_means: bool = False,
                        self_consistent: bool = True,
                        require_prod_at_least: float | None = None) -> TransportRun:
    """Advance all particles as one coupled RK4 system (pure transport).

    The weighted mean is recomputed from the stage states inside every
    stage, which keeps 4th order for the coupled system; passing
    self_consistent=False freezes the mean over each step (faster, drops
    to lower order).  Weights never change.  Snapshots are taken at the
    requested cadence and/or at explicit times (quantized to step
    boundaries); require_prod_at_least monitors the plateau condition
    and raises SupportLeftPlateau when the support exits it.
    """
    if params.lambda_ != 0.0:
        raise ConfigInvalid("pure transport requires lambda = 0; use diffusion_step")
    if dt <= 0:
        raise ConfigInvalid("dt must be > 0")
    a = params.matrix.a
    c = params.step.c
    w = ens0.weights
    x = ens0.points.copy()
    n_steps = int(np.ceil(t_end / dt - 1e-9)) if t_end > 0 else 0

    sched = []
    if snapshot_every is not None:
        sched.extend(np.arange(0.0, t_end + 0.5 * dt, snapshot_every))
    if snapshot_times is not None:
        sched.extend(snapshot_times)
    # quantize the schedule to step indices
    snap_steps = sorted({min(int(round(t / dt)), n_steps) for t in sched})

    run = TransportRun()
    means = [] if record_means else None

    def maybe_snapshot(step_idx, t):
        if snap_steps and snap_steps[0] == step_idx:
            snap_steps.pop(0)
            run.snapshots.append((t, ParticleEnsemble(points=x.copy(), weights=w.copy(), time=t)))

    def check_plateau(t):
        if require_prod_at_least is not None:
            if np.min(np.prod(x, axis=1)) < require_prod_at_least:
                raise SupportLeftPlateau(t)

    t = 0.0
    check_plateau(t)
    maybe_snapshot(0, 0.0)
    if record_means:
        means.append(w @ x)
    for k in range(n_steps):
        t_next = min((k + 1) * dt, t_end)
        h = t_next - t
        if self_consistent:
            k1 = _field_batch(x, w @ x, a, c)
            x2 = x + 0.5 * h * k1
            k2 = _field_batch(x2, w @ x2, a, c)
            x3 = x + 0.5 * h * k2
            k3 = _field_batch(x3, w @ x3, a, c)
            x4 = x + h * k3
            k4 = _field_batch(x4, w @ x4, a, c)
        else:
            pbar = w @ x
            k1 = _field_batch(x, pbar, a, c)
            k2 = _field_batch(x + 0.5 * h * k1, pbar, a, c)
            k3 = _field_batch(x + 0.5 * h * k2, pbar, a, c)
            k4 = _field_batch(x + h * k3, pbar, a, c)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t_next
        x = _clamp_points(x, t)
        check_plateau(t)
        maybe_snapshot(k + 1, t)
        if record_means:
            means.append(w @ x)
    if record_means:
        run.mean_times = np.array([min(k * dt, t_end) for k in range(n_steps + 1)]) \
            if n_steps else np.zeros(1)
        run.means = np.array(means)
    return run


def two_strategy_rhs(p1, p1bar, c: float):
    """Scalar field of the reduced two-strategies system.

    min(p1 (1 - p1), c) * (p1 + p1bar - 2 p1 p1bar); the payoff weight b
    enters as a rate scale at the integrator level.  Nonnegative for all
    arguments in [0, 1], which is what drives every particle rightward.
    """
    p1 = np.asarray(p1, dtype=float)
    return np.minimum(p1 * (1.0 - p1), c) * (p1 + p1bar - 2.0 * p1 * p1bar)


def integrate_two_strategy(p1_0, c: float, b: float, t_end: float, dt: float,
                           snapshot_every: float | None = None):
    """RK4 for the reduced system; returns (times, snapshots (n_snap, N)).

    The mean is recomputed at every stage from the stage states, exactly
    as in the full transport integrator.
    """
    x = np.asarray(p1_0, dtype=float).copy()
    n_steps = int(np.ceil(t_end / dt - 1e-9)) if t_end > 0 else 0
    every = max(int(round(snapshot_every / dt)), 1) if snapshot_every else max(n_steps, 1)

    def rhs(v):
        return b * two_strategy_rhs(v, v.mean(), c)

    times = [0.0]
    snaps = [x.copy()]
    t = 0.0
    for k in range(n_steps):
        h = min(dt, t_end - t)
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h * k2)
        k4 = rhs(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
        if (k + 1) % every == 0 or k == n_steps - 1:
            times.append(t)
            snaps.append(x.copy())
    return np.array(times), np.array(snaps)


@dataclass
class DiffusionStats:
    redraws: int = 0
    truncations: int = 0


def _sym_sqrt(q: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(q)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def diffusion_step(ens: ParticleEnsemble, params: FieldParams, dt: float,
                   rng: np.random.Generator,
                   stats: DiffusionStats | None = None) -> ParticleEnsemble:
    """One Euler-Maruyama step of the drift-diffusion dynamic.

    Drift is the transport field; the noise increment is
    sqrt(lambda * dt) * G(p) * L xi with L the symmetric square root of
    the noise covariance, whose null direction along the all-ones vector
    keeps increments inside the simplex hyperplane.  Steps that would
    exit the simplex are redrawn up to 8 times, then scaled down to the
    distance to the boundary; both counts are reported via `stats`.
    """
    if params.lambda_ <= 0:
        raise ConfigInvalid("diffusion_step requires lambda > 0")
    x = ens.points
    m, d = x.shape
    c = params.step.c
    pbar = ens.weights @ x
    drift = _field_batch(x, pbar, params.matrix.a, c) * dt
    g = np.minimum(np.prod(x, axis=1), c)
    amp = np.sqrt(params.lambda_ * dt) * g
    L = _sym_sqrt(params.noise_cov)

    new = np.empty_like(x)
    for i in range(m):
        base = x[i] + drift[i]
        accepted = False
        for _ in range(8):
            noise = amp[i] * (L @ rng.standard_normal(d))
            cand = base + noise
            if cand.min() >= 0.0 and cand.max() <= 1.0:
                new[i] = cand
                accepted = True
                break
            if stats is not None:
                stats.redraws += 1
        if not accepted:
            # scale the last draw down to the largest feasible fraction
            alpha = 1.0
            for k in range(d):
                if noise[k] < 0:
                    alpha = min(alpha, -base[k] / noise[k] if base[k] + noise[k] < 0 else 1.0)
                elif noise[k] > 0:
                    alpha = min(alpha, (1.0 - base[k]) / noise[k] if base[k] + noise[k] > 1 else 1.0)
            alpha = max(alpha, 0.0)
            new[i] = np.clip(base + alpha * noise, 0.0, 1.0)
            if stats is not None:
                stats.truncations += 1
    new /= new.sum(axis=1, keepdims=True)
    return ParticleEnsemble(points=new, weights=ens.weights.copy(), time=ens.time + dt)


@dataclass(frozen=True)
class QuadraticTestFn:
    """Test function phi(p) = const + lin . p + p^T quad p (degree <= 2)."""

    const: float = 0.0
    lin: np.ndarray | None = None
    quad: np.ndarray | None = None

    def value(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        out = np.full(points.shape[0], self.const)
        if self.lin is not None:
            out = out + points @ self.lin
        if self.quad is not None:
            out = out + np.einsum("ki,ij,kj->k", points, self.quad, points)
        return out

    def grad(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        out = np.zeros_like(points)
        if self.lin is not None:
            out = out + self.lin[None, :]
        if self.quad is not None:
            out = out + points @ (self.quad + self.quad.T)
        return out


def weak_residual(snapshots, params: FieldParams, test_fn: QuadraticTestFn) -> float:
    """Defect of the weak formulation over a snapshot sequence.

    |<phi, v_T> - <phi, v_0> - int <grad phi . F[v_s], v_s> ds| with the
    time integral evaluated by the trapezoid rule on the snapshot times.
    Zero (up to quadrature error) for any true solution.
    """
    if params.lambda_ != 0.0:
        raise ConfigInvalid("weak residual is defined for the pure transport equation")
    if len(snapshots) < 3:
        raise ConfigInvalid("need at least 3 snapshots")
    times = np.array([t for t, _ in snapshots])
    fluxes = np.empty(len(snapshots))
    for k, (_, ens) in enumerate(snapshots):
        pbar = ens.weights @ ens.points
        f = _field_batch(ens.points, pbar, params.matrix.a, params.step.c)
        fluxes[k] = ens.weights @ np.sum(test_fn.grad(ens.points) * f, axis=1)
    first = snapshots[0][1]
    last = snapshots[-1][1]
    lhs = float(last.weights @ test_fn.value(last.points)
                - first.weights @ test_fn.value(first.points))
    rhs = float(np.trapezoid(fluxes, times))
    return abs(lhs - rhs)


def stability_factor(ens_a0: ParticleEnsemble, ens_b0: ParticleEnsemble, params: FieldParams,
                     t_end: float, dt: float, n_proj: int = 32, seed=0) -> float:
    """Growth factor of the sliced W1 distance between two solutions."""
    w0 = sliced_w1(ens_a0, ens_b0, n_proj=n_proj, seed=seed)
    if w0 <= 1e-14:
        raise DegenerateInitialDistance("initial ensembles coincide")
    run_a = integrate_transport(ens_a0, params, t_end, dt, snapshot_times=[t_end])
    run_b = integrate_transport(ens_b0, params, t_end, dt, snapshot_times=[t_end])
    w1 = sliced_w1(run_a.snapshots[-1][1], run_b.snapshots[-1][1], n_proj=n_proj, seed=seed)
    return w1 / w0
