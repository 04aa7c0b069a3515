"""The named experiments binding all modules together.

Every command takes an ExperimentConfig, runs one experiment, writes its
artifacts (summary.json, timeseries_*.csv, hist_*.csv, snapshots/*.csv)
into the configured output directory and returns a RunArtifacts record.
The summary is written even when a run fails, with the error cause; all
pass/fail thresholds live in the config so they stay visible.
"""

from __future__ import annotations

import json
import time as _time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from scipy.linalg import expm

from . import games, metrics
from .config import ExperimentConfig, build_init
from .meanfield import (FieldParams, ParticleEnsemble, integrate_transport,
                        integrate_two_strategy)
from .micro import AgentPopulation, ConfigInvalid, MicroConfig, make_generator, run_micro
from .replicator import ReplicatorTrajectory, estimate_period, integrate_rk4, temporal_mean


class MeanAtNash(RuntimeError):
    """Initial mean at the center equilibrium: the orbit period is undefined."""


class NoInteriorEquilibrium(RuntimeError):
    pass


@dataclass
class RunArtifacts:
    summary: dict
    out_dir: Path
    files: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.summary.get("passed"))


# ---------------------------------------------------------------------------
# artifact writers

def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def write_timeseries(path: Path, times, states) -> None:
    states = np.asarray(states)
    d = states.shape[1]
    header = "time," + ",".join(f"p_{i + 1}" for i in range(d))
    _write_csv(path, header, ([float(t)] + [float(x) for x in row]
                              for t, row in zip(times, states)))


def write_ensemble(path: Path, points, weights) -> None:
    d = np.asarray(points).shape[1]
    header = "weight," + ",".join(f"p_{i + 1}" for i in range(d))
    _write_csv(path, header, ([float(w)] + [float(x) for x in row]
                              for w, row in zip(weights, points)))


def write_hist_series(path: Path, entries) -> None:
    """entries: iterable of (time, Histogram); long format for heatmaps."""
    def rows():
        for t, hist in entries:
            for lo, hi, mass in zip(hist.edges[:-1], hist.edges[1:], hist.masses):
                yield [float(t), float(lo), float(hi), float(mass)]
    _write_csv(path, "time,edge_lo,edge_hi,mass", rows())


def _snapshot_dir(out: Path) -> Path:
    snap = out / "snapshots"
    snap.mkdir(parents=True, exist_ok=True)
    return snap


def write_snapshots(out: Path, snaps, cfg_hash: str) -> list[str]:
    """One CSV per snapshot plus an index JSON with times and config hash."""
    snap_dir = _snapshot_dir(out)
    filenames = []
    times = []
    for k, (t, ens) in enumerate(snaps):
        name = f"snap_{k:06d}.csv"
        points, weights = metrics._points_weights(ens)
        write_ensemble(snap_dir / name, points, weights)
        filenames.append(name)
        times.append(float(t))
    (snap_dir / "index.json").write_text(json.dumps(
        {"times": times, "files": filenames, "config_hash": cfg_hash}, indent=1))
    return filenames


# ---------------------------------------------------------------------------
# summary plumbing

def _check(value: float, threshold: float, op: str = "<="):
    ok = value <= threshold if op == "<=" else value >= threshold
    return {"passed": bool(ok), "value": float(value), "threshold": float(threshold), "op": op}


def _summarize(cfg: ExperimentConfig, checks: dict, scalars: dict, files: dict,
               status: str = "ok", error: dict | None = None) -> dict:
    return {
        "schema_version": 1,
        "experiment": cfg.experiment,
        "config": cfg.raw,
        "config_hash": cfg.hash,
        "status": status,
        "error": error,
        "checks": checks,
        "passed": status == "ok" and all(c["passed"] for c in checks.values()),
        "scalars": scalars,
        "artifacts": files,
        "metadata": {"created_at": datetime.now(timezone.utc).isoformat()},
    }


def _finish(cfg: ExperimentConfig, checks: dict, scalars: dict, files: dict) -> RunArtifacts:
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    summary = _summarize(cfg, checks, scalars, files)
    (out / "summary.json").write_text(json.dumps(summary, indent=1))
    return RunArtifacts(summary=summary, out_dir=out, files=files)


def write_failure_summary(cfg: ExperimentConfig, exc: Exception) -> None:
    try:
        out = cfg.out_dir
        out.mkdir(parents=True, exist_ok=True)
        summary = _summarize(cfg, {}, {}, {}, status="error",
                             error={"type": type(exc).__name__, "message": str(exc)})
        (out / "summary.json").write_text(json.dumps(summary, indent=1))
    except OSError:
        pass  # never mask the original failure


# ---------------------------------------------------------------------------
# two strategies: absorption into (1-a) delta_0 + a delta_1

def cmd_two_strategies(cfg: ExperimentConfig) -> RunArtifacts:
    matrix = cfg.game
    if matrix.dim != 2:
        raise ConfigInvalid("two_strategies needs a 2-strategy game")
    b = float(matrix.a[0, 1])
    c = cfg.dyn("c", 0.1)
    dt = cfg.dyn("dt", 0.1)
    t_end = cfg.dyn("t_end", 400.0)
    n = cfg.dyn("n_particles", 1000)
    every = cfg.dyn("snapshot_every", 1.0)
    bins = cfg.par("bins", 60)

    init_spec = cfg.init_spec or {"mixture": [
        {"fraction": 0.3, "init": "dirac:0,1"},
        {"fraction": 0.7, "init": "uniform-box:0,0.3@0"},
    ]}
    rng = make_generator(cfg.seed)
    strategies = build_init(init_spec, n, 2, rng)
    p1 = strategies[:, 0].copy()

    times, snaps = integrate_two_strategy(p1, c=c, b=b, t_end=t_end, dt=dt,
                                          snapshot_every=every)

    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    means = snaps.mean(axis=1)
    write_timeseries(out / "timeseries_mean.csv", times, np.column_stack([means, 1.0 - means]))
    hists = ((t, metrics.marginal_histogram(np.column_stack([x, 1.0 - x]), 0, bins))
             for t, x in zip(times, snaps))
    write_hist_series(out / "hist_p1.csv", hists)
    final = np.column_stack([snaps[-1], 1.0 - snaps[-1]])
    first = np.column_stack([snaps[0], 1.0 - snaps[0]])
    snap_files = write_snapshots(out, [
        (times[0], ParticleEnsemble.uniform(first, time=times[0])),
        (times[-1], ParticleEnsemble.uniform(final, time=times[-1])),
    ], cfg.hash)

    eps0 = cfg.thr("zero_window", 1e-3)
    eps1 = cfg.thr("one_window", 1e-2)
    mass0 = float(np.mean(np.abs(snaps[-1]) <= eps0))
    mass1 = float(np.mean(np.abs(snaps[-1] - 1.0) <= eps1))
    mean1 = float(means[-1])
    checks = {
        "mass_at_zero_exact": _check(abs(mass0 - cfg.thr("mass_at_zero", 0.3)), 0.0),
        "mass_near_one": _check(mass1, cfg.thr("mass_near_one_min", 0.69), op=">="),
        "final_mean_low": _check(mean1, cfg.thr("final_mean_min", 0.69), op=">="),
        "final_mean_high": _check(mean1, cfg.thr("final_mean_max", 0.70)),
    }
    scalars = {"mass_at_zero": mass0, "mass_near_one": mass1, "final_mean_p1": mean1,
               "b": b, "n_particles": n}
    files = {"timeseries": ["timeseries_mean.csv"], "histograms": ["hist_p1.csv"],
             "snapshots": snap_files}
    return _finish(cfg, checks, scalars, files)


# ---------------------------------------------------------------------------
# grazing limit: micro-to-meanfield distance shrinks with delta

def _grazing_job(args) -> tuple[float, int, list]:
    (matrix_rows, delta, r, c, n_agents, base_seed, stream, init_spec, tau_end,
     tau_every, mf_points, mf_weights, mf_times, n_proj, sliced_seed) = args
    matrix = games.validate_payoff(matrix_rows)
    d = matrix.dim
    rng = make_generator(base_seed, stream)
    strategies = build_init(init_spec, n_agents, d, rng)
    mcfg = MicroConfig(delta=delta, r=r, c=c, n_agents=n_agents, seed=base_seed)
    run = run_micro(AgentPopulation(strategies=strategies), tau_end, mcfg, matrix,
                    snapshot_every=tau_every, rescale_time=True, rng=rng)
    rows = []
    for (tau, pop) in run.snapshots:
        if tau <= 0.0:
            continue
        k = int(np.argmin(np.abs(mf_times - tau)))
        ref = ParticleEnsemble(points=mf_points[k], weights=mf_weights)
        dist = metrics.sliced_w1(pop, ref, n_proj=n_proj, seed=sliced_seed)
        rows.append((float(tau), float(dist)))
    return delta, stream, rows


def _diffusive_reference(ens0, matrix, c, lam, tau_end, dt, snapshot_taus, seed):
    from .meanfield import diffusion_step
    fp = FieldParams(matrix=matrix, step=games.StepFunctionParams(c), lambda_=lam,
                     noise_cov=metrics.uniform_simplex_covariance(matrix.dim))
    rng = make_generator(seed, 888_888)
    ens = ens0
    snaps = [(0.0, ens0)] if 0.0 in snapshot_taus else []
    n_steps = int(round(tau_end / dt))
    marks = {int(round(t / dt)): t for t in snapshot_taus}
    for k in range(1, n_steps + 1):
        ens = diffusion_step(ens, fp, dt, rng)
        if k in marks:
            snaps.append((marks[k], ens))
    return snaps


def cmd_grazing(cfg: ExperimentConfig) -> RunArtifacts:
    matrix = cfg.game
    d = matrix.dim
    deltas = sorted(cfg.par("deltas", [0.2, 0.1, 0.05]), reverse=True)
    if any(dd <= 0 for dd in deltas):
        raise ConfigInvalid("grazing deltas must be positive")
    n_seeds = cfg.par("n_seeds", 8)
    n_agents = cfg.dyn("n_agents", 5000)
    lam = cfg.dyn("lambda", 0.0)
    if cfg.dyn("r", 0.0) > 0.0:
        raise ConfigInvalid("grazing noise is set through dynamics.lambda "
                            "(r is derived per delta as sqrt(lambda * delta)); "
                            "a fixed r would diverge as delta shrinks")
    c = cfg.dyn("c", 0.1)
    tau_end = cfg.dyn("t_end", 5.0)
    tau_every = cfg.dyn("snapshot_every", 0.5)
    mf_dt = cfg.par("mf_dt", 1e-3)
    mf_particles = cfg.par("mf_particles", n_agents)
    n_proj = cfg.par("n_proj", 16)
    sliced_seed = cfg.par("sliced_seed", 7)
    workers = cfg.par("workers", 1)
    init_spec = cfg.init_spec or "uniform-box:0.3,0.5@0"

    # one reference serves every delta: the limit equation is delta-free
    # once time is rescaled to tau (lambda fixes the diffusive part)
    ref_rng = make_generator(cfg.seed, 999_999)
    ref_init = build_init(init_spec, mf_particles, d, ref_rng, stratified=True)
    ref_taus = list(np.arange(0.0, tau_end + 0.5 * mf_dt, tau_every))
    if lam > 0.0:
        mf_snaps = _diffusive_reference(ParticleEnsemble.uniform(ref_init), matrix, c,
                                        lam, tau_end, mf_dt, ref_taus, cfg.seed)
    else:
        fp = FieldParams(matrix=matrix, step=games.StepFunctionParams(c))
        mf_snaps = integrate_transport(ParticleEnsemble.uniform(ref_init), fp, tau_end,
                                       mf_dt, snapshot_every=tau_every).snapshots
    mf_times = np.array([t for t, _ in mf_snaps])
    mf_points = np.array([e.points for _, e in mf_snaps])
    mf_weights = mf_snaps[0][1].weights

    jobs = []
    for di, delta in enumerate(deltas):
        r_delta = float(np.sqrt(lam * delta)) if lam > 0.0 else 0.0
        if delta + r_delta >= 1.0:
            raise ConfigInvalid(f"delta + sqrt(lambda*delta) = {delta + r_delta} >= 1")
        for s in range(n_seeds):
            jobs.append((matrix.a.tolist(), delta, r_delta, c, n_agents, cfg.seed,
                         di * 1000 + s, init_spec, tau_end, tau_every,
                         mf_points, mf_weights, mf_times, n_proj, sliced_seed))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_grazing_job, jobs))
    else:
        results = [_grazing_job(j) for j in jobs]

    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    dist_rows = []
    per_delta: dict[float, list] = {dd: [] for dd in deltas}
    for delta, stream, rows in results:
        seed_idx = stream % 1000
        per_delta[delta].append(np.mean([w for _, w in rows]))
        for tau, w in rows:
            dist_rows.append([float(delta), seed_idx, tau, w])
    _write_csv(out / "timeseries_distance.csv", "delta,seed,tau,w1", dist_rows)

    table = []
    for delta in deltas:
        vals = np.array(per_delta[delta])
        table.append((delta, len(vals), float(vals.mean()),
                      float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0))
    _write_csv(out / "conv_table.csv", "delta,n_seeds,mean_w1,stderr_w1",
               [list(row) for row in table])

    # non-increasing distance as delta shrinks, within 2 combined stderr
    checks = {}
    slack = cfg.thr("stderr_slack", 2.0)
    for (d_hi, _, m_hi, se_hi), (d_lo, _, m_lo, se_lo) in zip(table, table[1:]):
        margin = slack * float(np.hypot(se_hi, se_lo))
        checks[f"monotone_{d_hi:g}_to_{d_lo:g}"] = _check(m_lo - m_hi, margin)
    scalars = {f"mean_w1_delta_{dd:g}": m for dd, _, m, _ in table}
    scalars.update({f"stderr_w1_delta_{dd:g}": se for dd, _, _, se in table})
    files = {"timeseries": ["timeseries_distance.csv"], "tables": ["conv_table.csv"]}
    return _finish(cfg, checks, scalars, files)


# ---------------------------------------------------------------------------
# periodic orbits for cyclic games

def cmd_rps_periodic(cfg: ExperimentConfig) -> RunArtifacts:
    matrix = cfg.game
    d = matrix.dim
    c = cfg.dyn("c", 0.02)
    dt = cfg.dyn("dt", 0.05)
    m_particles = cfg.dyn("n_particles", 200)
    n_proj = cfg.par("n_proj", 32)
    sliced_seed = cfg.par("sliced_seed", 11)
    center = np.full(d, 1.0 / d)

    if cfg.init_spec is not None:
        rng = make_generator(cfg.seed)
        points = build_init(cfg.init_spec, m_particles, d, rng)
    else:
        shift = np.asarray(cfg.par("mean_shift", [0.02, -0.01, -0.01]), dtype=float)
        radius = cfg.par("radius", 0.015)
        if shift.size != d or abs(shift.sum()) > 1e-12:
            raise ConfigInvalid("mean_shift must have zero sum and match the game dimension")
        spec = "ball:" + f"{radius}" + "@" + ",".join(f"{v:.17g}" for v in center + shift)
        rng = make_generator(cfg.seed)
        points = build_init(spec, m_particles, d, rng)
    ens0 = ParticleEnsemble.uniform(points)
    if np.min(np.prod(points, axis=1)) < c:
        raise ConfigInvalid("initial ensemble must lie inside the plateau {prod p_i >= c}")

    m0 = metrics.mean_strategy(ens0)
    if float(np.max(np.abs(m0 - center))) <= cfg.thr("mean_at_nash_tol", 1e-9):
        raise MeanAtNash("initial mean strategy equals the center equilibrium")

    fp = FieldParams(matrix=matrix, step=games.StepFunctionParams(c))

    # pass 1: track the mean long enough for 3 same-direction crossings
    # whatever the phase (first crossing <= one period in)
    omega = float(np.max(np.abs(np.imag(np.linalg.eigvals(matrix.a)))))
    t_mean_lin = 2.0 * np.pi * d / (2.0 * c * omega)
    probe = integrate_transport(ens0, fp, 3.5 * t_mean_lin, dt, record_means=True,
                                require_prod_at_least=c)
    mean_traj = ReplicatorTrajectory(times=probe.mean_times, states=probe.means,
                                     rate_scale=2.0 * c)
    t_mean = estimate_period(mean_traj)
    if t_mean is None:
        raise RuntimeError("mean trajectory shows no stable period")
    # particle deviations rotate at half the mean's angular speed, so the
    # distribution (and every characteristic) closes after two mean periods
    period = 2.0 * t_mean

    # pass 2: capture states at 0, T/2, T, 3T/2, 2T
    marks = [0.0, 0.5 * period, period, 1.5 * period, 2.0 * period]
    run = integrate_transport(ens0, fp, 2.0 * period + dt, dt, snapshot_times=marks,
                              record_means=True, require_prod_at_least=c)
    snaps = dict()
    for t, ens in run.snapshots:
        snaps[min(range(len(marks)), key=lambda i: abs(marks[i] - t))] = ens

    tol_w1 = cfg.thr("w1_tol", 1e-3)
    checks = {}
    scalars = {"t_mean": float(t_mean), "period": float(period)}
    for label, i0, i1 in (("t0", 0, 2), ("t_half", 1, 3), ("t_full", 2, 4)):
        w = metrics.sliced_w1(snaps[i1], snaps[i0], n_proj=n_proj, seed=sliced_seed)
        checks[f"w1_return_{label}"] = _check(w, tol_w1)
        scalars[f"w1_return_{label}"] = float(w)

    rotation = expm((c * period / d) * matrix.a)
    predicted = snaps[0].points @ rotation.T
    rot_err = float(np.max(np.abs(snaps[2].points - predicted)))
    checks["rotation_map"] = _check(rot_err, cfg.thr("rotation_tol", 1e-3))
    scalars["rotation_error"] = rot_err

    tmean = temporal_mean(ReplicatorTrajectory(times=run.mean_times, states=run.means,
                                               rate_scale=2.0 * c), 0.0, t_mean)
    tmean_err = float(np.max(np.abs(tmean - center)))
    checks["temporal_mean"] = _check(tmean_err, cfg.thr("temporal_mean_tol", 1e-3))
    scalars["temporal_mean_error"] = tmean_err

    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    thin = max(1, int(round(0.1 / dt)))
    write_timeseries(out / "timeseries_mean.csv", run.mean_times[::thin], run.means[::thin])
    snap_files = write_snapshots(out, [(marks[i], snaps[i]) for i in range(len(marks))],
                                 cfg.hash)
    files = {"timeseries": ["timeseries_mean.csv"], "snapshots": snap_files}
    return _finish(cfg, checks, scalars, files)


# ---------------------------------------------------------------------------
# four-way equilibrium equivalence

def _folk_residuals(matrix, q, fp, t_end, dt, m_particles, n_proj, sliced_seed):
    """The four equivalence residuals at an interior point q.

    The transport-side metrics (field norm and integrated drift) carry a
    factor h(q) that shrinks rapidly with dimension, so both are
    normalized by h(q) to keep all four residuals on the ||Aq|| scale.
    """
    from .games import h_eval
    from .meanfield import field_F
    from .replicator import rest_point_residual

    aq = float(np.max(np.abs(matrix.a @ q)))
    rhs = rest_point_residual(q, matrix)
    hq = h_eval(q, fp.step)
    ens0 = ParticleEnsemble.uniform(np.tile(q, (m_particles, 1)))
    fnorm = float(np.max(np.abs(field_F(q, q, fp)))) / hq
    run = integrate_transport(ens0, fp, t_end, dt, snapshot_times=[t_end])
    drift = metrics.sliced_w1(run.snapshots[-1][1], ens0, n_proj=n_proj, seed=sliced_seed) / hq
    return {"aq_inf": aq, "replicator_residual": rhs, "field_inf": fnorm,
            "transport_drift_w1": float(drift)}


def cmd_folk_check(cfg: ExperimentConfig) -> RunArtifacts:
    matrix = cfg.game
    tol = cfg.thr("tol", 1e-8)
    neg_margin = cfg.thr("neg_margin", 1e-4)
    t_end = cfg.dyn("t_end", 5.0)
    dt = cfg.dyn("dt", 0.01)
    m_particles = cfg.dyn("n_particles", 8)
    n_proj = cfg.par("n_proj", 16)
    sliced_seed = cfg.par("sliced_seed", 3)
    n_random = cfg.par("n_random", 0)
    random_dims = cfg.par("random_dims", [3, 5])

    cases = [("main", matrix, None)]
    rng = make_generator(cfg.seed, 77)
    for k in range(n_random):
        dim = random_dims[k % len(random_dims)]
        rnd, q = games.random_interior_null_game(dim, rng)
        cases.append((f"random_{k:03d}", rnd, q))

    checks = {}
    rows = []
    for name, game, known_q in cases:
        result = games.interior_nash(game)
        if result.point is None:
            raise NoInteriorEquilibrium(
                f"game {name!r} has no interior null vector (null dim {result.null_dim})")
        q = result.point
        fp = FieldParams(matrix=game, step=games.StepFunctionParams(cfg.dyn("c", 0.1)))
        res = _folk_residuals(game, q, fp, t_end, dt, m_particles, n_proj, sliced_seed)
        nash_ok = games.is_nash(q, game, tol)
        worst = max(res.values())
        checks[f"{name}_equilibrium"] = _check(worst if nash_ok else np.inf, tol)

        # negative control: a deliberately perturbed interior point must
        # fail all four criteria at once
        pattern = np.full(game.dim, 0.75)
        pattern[0] = 1.5
        q_neg = q * pattern
        q_neg /= q_neg.sum()
        res_neg = _folk_residuals(game, q_neg, fp, t_end, dt, m_particles, n_proj, sliced_seed)
        nash_neg = games.is_nash(q_neg, game, tol)
        weakest = min(res_neg.values())
        checks[f"{name}_control"] = _check(np.inf if nash_neg else weakest, neg_margin, op=">=")
        rows.append([name, game.dim] + [res[k] for k in sorted(res)]
                    + [res_neg[k] for k in sorted(res_neg)])

    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    keys = sorted(("aq_inf", "replicator_residual", "field_inf", "transport_drift_w1"))
    header = "case,dim," + ",".join(keys) + "," + ",".join(f"neg_{k}" for k in keys)
    _write_csv(out / "folk_table.csv", header, rows)
    scalars = {"n_cases": len(cases)}
    files = {"tables": ["folk_table.csv"]}
    return _finish(cfg, checks, scalars, files)


# ---------------------------------------------------------------------------
# ensemble mean vs rate-2c replicator

def cmd_meanfield_vs_replicator(cfg: ExperimentConfig) -> RunArtifacts:
    matrix = cfg.game
    d = matrix.dim
    c = cfg.dyn("c", 0.01)
    dt = cfg.dyn("dt", 1e-3)
    t_end = cfg.dyn("t_end", 10.0)
    m_particles = cfg.dyn("n_particles", 200)
    center = np.full(d, 1.0 / d)

    init_spec = cfg.init_spec
    if init_spec is None:
        shift = np.asarray(cfg.par("mean_shift", [0.05, -0.025, -0.025]), dtype=float)
        radius = cfg.par("radius", 0.05)
        init_spec = "ball:" + f"{radius}" + "@" + ",".join(f"{v:.17g}" for v in center + shift)
    rng = make_generator(cfg.seed)
    points = build_init(init_spec, m_particles, d, rng)
    if np.min(np.prod(points, axis=1)) < c:
        # support must start inside the plateau; report it as the exit at t=0
        from .meanfield import SupportLeftPlateau
        raise SupportLeftPlateau(0.0)
    ens0 = ParticleEnsemble.uniform(points)

    fp = FieldParams(matrix=matrix, step=games.StepFunctionParams(c))
    run = integrate_transport(ens0, fp, t_end, dt, record_means=True,
                              require_prod_at_least=c)
    ref = integrate_rk4(metrics.mean_strategy(ens0), matrix, t_end, dt, rate_scale=2.0 * c)
    n = min(len(ref.times), len(run.mean_times))
    gap = float(np.max(np.abs(run.means[:n] - ref.states[:n])))

    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    thin = max(1, int(round(0.05 / dt)))
    write_timeseries(out / "timeseries_mean.csv", run.mean_times[::thin], run.means[::thin])
    write_timeseries(out / "timeseries_replicator.csv", ref.times[::thin], ref.states[::thin])
    checks = {"mean_matches_replicator": _check(gap, cfg.thr("gap_tol", 1e-4))}
    scalars = {"sup_gap": gap, "n_particles": m_particles}
    files = {"timeseries": ["timeseries_mean.csv", "timeseries_replicator.csv"]}
    return _finish(cfg, checks, scalars, files)


# ---------------------------------------------------------------------------
# plain micro simulation

def cmd_micro_free_run(cfg: ExperimentConfig) -> RunArtifacts:
    matrix = cfg.game
    d = matrix.dim
    mcfg = MicroConfig(delta=cfg.dyn("delta", 0.01), r=cfg.dyn("r", 0.0),
                       c=cfg.dyn("c", 0.1), n_agents=cfg.dyn("n_agents", 100),
                       seed=cfg.seed)
    t_end = cfg.dyn("t_end", 10.0)
    every = cfg.dyn("snapshot_every", 1.0)
    init_spec = cfg.init_spec or "uniform-simplex"
    rng = make_generator(cfg.seed)
    strategies = build_init(init_spec, mcfg.n_agents, d, rng)
    run = run_micro(AgentPopulation(strategies=strategies), t_end, mcfg, matrix,
                    snapshot_every=every, rng=rng)

    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    times = [t for t, _ in run.snapshots]
    means = [metrics.mean_strategy(pop) for _, pop in run.snapshots]
    write_timeseries(out / "timeseries_mean.csv", times, means)
    snap_files = write_snapshots(out, run.snapshots, cfg.hash)
    bins = cfg.par("bins", 60)
    write_hist_series(out / "hist_p1.csv",
                      ((t, metrics.marginal_histogram(pop, 0, bins))
                       for t, pop in run.snapshots))
    scalars = {"n_events": run.stats.n_events, "renorm_count": run.stats.renorm_count,
               "final_mean_p1": float(means[-1][0])}
    files = {"timeseries": ["timeseries_mean.csv"], "histograms": ["hist_p1.csv"],
             "snapshots": snap_files}
    return _finish(cfg, {}, scalars, files)


COMMANDS = {
    "two_strategies": cmd_two_strategies,
    "grazing": cmd_grazing,
    "rps_periodic": cmd_rps_periodic,
    "folk_check": cmd_folk_check,
    "meanfield_vs_replicator": cmd_meanfield_vs_replicator,
    "micro_free_run": cmd_micro_free_run,
}


def run_experiment(cfg: ExperimentConfig) -> RunArtifacts:
    """Dispatch to the experiment command, always leaving a summary behind."""
    t0 = _time.perf_counter()
    try:
        artifacts = COMMANDS[cfg.experiment](cfg)
    except Exception as exc:
        write_failure_summary(cfg, exc)
        raise
    artifacts.summary["metadata"]["duration_s"] = round(_time.perf_counter() - t0, 3)
    (artifacts.out_dir / "summary.json").write_text(json.dumps(artifacts.summary, indent=1))
    return artifacts
