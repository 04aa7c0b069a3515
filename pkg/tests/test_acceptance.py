"""Acceptance suite: every top-level criterion at its stated tolerance.

Each test prints one pass/fail line.  All randomness is seeded, so the
statistical criteria are reproducible run to run.
"""

import numpy as np

from gamekinetics import games, metrics
from gamekinetics.config import ExperimentConfig
from gamekinetics.experiments import (cmd_folk_check, cmd_grazing,
                                      cmd_meanfield_vs_replicator, cmd_rps_periodic,
                                      cmd_two_strategies)
from gamekinetics.micro import MicroConfig, expected_drift, interact_batch, make_generator, sample_simplex_uniform
from gamekinetics.replicator import integrate_rk4


def _report(name: str, ok: bool, detail: str):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def _cfg(tmp_path, experiment, **extra):
    raw = {"schema_version": 1, "experiment": experiment,
           "out": str(tmp_path / experiment)}
    raw.update(extra)
    return ExperimentConfig(raw=raw)


def test_two_strategies_absorption(tmp_path):
    """b=1, c=0.1, N=1000, T=400, RK4 step 0.1; 300 atoms at 0 + 700 uniform
    on [0, 0.3] end as masses 0.300 at 0 and at least 0.69 near 1."""
    cfg = _cfg(tmp_path, "two_strategies", seed=2024,
               game={"constructor": "two-strategy", "b": 1.0},
               dynamics={"c": 0.1, "dt": 0.1, "t_end": 400.0, "n_particles": 1000,
                         "snapshot_every": 1.0})
    art = cmd_two_strategies(cfg)
    s = art.summary["scalars"]
    ok = (s["mass_at_zero"] == 0.300
          and s["mass_near_one"] >= 0.69
          and 0.69 <= s["final_mean_p1"] <= 0.70)
    _report("two-strategies absorption", ok,
            f"mass0={s['mass_at_zero']:.3f} mass1={s['mass_near_one']:.3f} "
            f"mean={s['final_mean_p1']:.6f}")


def test_equilibrium_equivalence(tmp_path):
    """Cyclic d=3, d=5 and 50 random interior-null games: all four
    operational checks pass at tol=1e-8 and the control fails all four."""
    cfg3 = _cfg(tmp_path, "folk_check", seed=5, out=str(tmp_path / "folk3"),
                game={"constructor": "cyclic", "d": 3},
                dynamics={"c": 0.1, "t_end": 5.0, "dt": 0.01, "n_particles": 8},
                params={"n_random": 50, "random_dims": [3, 5]},
                thresholds={"tol": 1e-8, "neg_margin": 1e-4})
    art3 = cmd_folk_check(cfg3)
    cfg5 = _cfg(tmp_path, "folk_check", seed=6, out=str(tmp_path / "folk5"),
                game={"constructor": "cyclic", "d": 5},
                dynamics={"c": 0.1, "t_end": 5.0, "dt": 0.01, "n_particles": 8},
                thresholds={"tol": 1e-8, "neg_margin": 1e-4})
    art5 = cmd_folk_check(cfg5)
    n_checks = len(art3.summary["checks"]) + len(art5.summary["checks"])
    ok = art3.passed and art5.passed and n_checks == 104
    _report("equilibrium equivalence", ok,
            f"{n_checks} checks over cyclic d=3, d=5 and 50 random games")


def test_mean_strategy_theorem(tmp_path):
    """Ensemble inside {prod p_i >= c}, c=0.01, dt=1e-3, t_end=10: mean
    tracks the 2c-replicator within 1e-4 sup-norm."""
    cfg = _cfg(tmp_path, "meanfield_vs_replicator", seed=3,
               game={"constructor": "cyclic", "d": 3},
               dynamics={"c": 0.01, "dt": 1e-3, "t_end": 10.0, "n_particles": 200},
               thresholds={"gap_tol": 1e-4})
    art = cmd_meanfield_vs_replicator(cfg)
    gap = art.summary["scalars"]["sup_gap"]
    _report("mean-strategy theorem", art.passed, f"sup gap = {gap:.3e} <= 1e-4")


def test_rps_periodicity(tmp_path):
    """Estimated period closes the distribution (sliced W1 <= 1e-3 at
    t in {0, T/2, T}), matches the rotation map within 1e-3 per particle,
    and the one-period temporal mean is the center within 1e-3."""
    cfg = _cfg(tmp_path, "rps_periodic", seed=11,
               game={"constructor": "cyclic", "d": 3},
               dynamics={"c": 0.02, "dt": 0.05, "n_particles": 200},
               params={"radius": 0.015, "mean_shift": [0.02, -0.01, -0.01],
                       "n_proj": 32},
               thresholds={"w1_tol": 1e-3, "rotation_tol": 1e-3,
                           "temporal_mean_tol": 1e-3})
    art = cmd_rps_periodic(cfg)
    s = art.summary["scalars"]
    _report("rps periodicity", art.passed,
            f"T={s['period']:.2f} w1<=({s['w1_return_t0']:.1e},"
            f"{s['w1_return_t_half']:.1e},{s['w1_return_t_full']:.1e}) "
            f"rot={s['rotation_error']:.1e} tmean={s['temporal_mean_error']:.1e}")


def test_grazing_limit_trend(tmp_path):
    """Micro-to-meanfield sliced W1 averaged over 8 seeds is non-increasing
    across delta in {0.2, 0.1, 0.05} at N=5000, tau_end=5 (2 stderr slack)."""
    cfg = _cfg(tmp_path, "grazing", seed=42,
               game={"constructor": "two-strategy", "b": 1.0},
               dynamics={"r": 0.0, "c": 0.1, "t_end": 5.0, "snapshot_every": 0.5,
                         "n_agents": 5000},
               init="uniform-box:0.3,0.5@0",
               params={"deltas": [0.2, 0.1, 0.05], "n_seeds": 8, "n_proj": 8,
                       "mf_dt": 1e-3})
    art = cmd_grazing(cfg)
    s = art.summary["scalars"]
    means = [s["mean_w1_delta_0.2"], s["mean_w1_delta_0.1"], s["mean_w1_delta_0.05"]]
    _report("grazing-limit trend", art.passed,
            "w1 means " + " -> ".join(f"{m:.4f}" for m in means))


def test_interaction_rule_invariants():
    """1e6 fuzzed interactions stay on the simplex (unit sum within 1e-12,
    coordinates in [0,1]) and the empirical drift matches the analytic
    expectation within 4 standard errors."""
    rng = make_generator(123)
    n_configs, chunk = 100, 10_000
    worst_sum = 0.0
    worst_coord = 0.0
    for k in range(n_configs):
        d = int(rng.integers(2, 6))
        delta = float(rng.uniform(0.05, 0.6))
        r = float(rng.uniform(0.0, 0.99 - delta))
        c = float(rng.uniform(0.05, 0.9))
        cfg = MicroConfig(delta=delta, r=r, c=c)
        m, _ = games.random_interior_null_game(d, rng) if d % 2 else \
            (games.validate_payoff(_random_antisym(d, rng)), None)
        p = sample_simplex_uniform(rng, chunk, d)
        pt = sample_simplex_uniform(rng, chunk, d)
        qs = sample_simplex_uniform(rng, chunk, d)
        qts = sample_simplex_uniform(rng, chunk, d)
        ps, pts = interact_batch(p, pt, rng.random(chunk), rng.random(chunk),
                                 cfg, m, qs, qts)
        for out in (ps, pts):
            worst_sum = max(worst_sum, float(np.max(np.abs(out.sum(axis=1) - 1.0))))
            worst_coord = max(worst_coord, float(np.max(out - 1.0)), float(np.max(-out)))
    ok_simplex = worst_sum <= 1e-12 and worst_coord <= 0.0

    cfg = MicroConfig(delta=0.01, r=0.0, c=0.1)
    matrix = games.cyclic_matrix(3)
    p = np.array([0.5, 0.3, 0.2])
    pt = np.array([0.2, 0.5, 0.3])
    n = 1_000_000
    ps, _ = interact_batch(p, pt, rng.random(n), rng.random(n), cfg, matrix)
    inc = ps - p
    emp = inc.mean(axis=0)
    se = inc.std(axis=0, ddof=1) / np.sqrt(n)
    dev = np.abs(emp - expected_drift(p, pt, cfg, matrix)) / se
    ok_drift = bool(np.all(dev <= 4.0))
    _report("interaction-rule invariants", ok_simplex and ok_drift,
            f"sum drift {worst_sum:.1e}, coord excess {worst_coord:.1e}, "
            f"drift max {dev.max():.2f} se")


def _random_antisym(d, rng):
    k = rng.standard_normal((d, d))
    k = 0.5 * (k - k.T)
    return k / np.max(np.abs(k))


def test_noise_covariance():
    """Analytic uniform-simplex covariance matches the 1e6-sample empirical
    covariance of the sampler within 3 standard errors for d in {2,3,5}."""
    n = 1_000_000
    worst = 0.0
    for d in (2, 3, 5):
        qs = sample_simplex_uniform(make_generator(1000 + d), n, d)
        centered = qs - qs.mean(axis=0)
        emp = centered.T @ centered / (n - 1)
        analytic = metrics.uniform_simplex_covariance(d)
        prods = centered[:, :, None] * centered[:, None, :]
        se = prods.std(axis=0, ddof=1) / np.sqrt(n)
        worst = max(worst, float(np.max(np.abs(emp - analytic) / se)))
    _report("noise covariance", worst <= 3.0, f"worst deviation {worst:.2f} se")


def test_rk4_order():
    """Global error on the d=3 cyclic orbit scales as dt^4 within a factor
    of 2 between dt=0.02 and dt=0.01 against a dt=1e-4 reference."""
    matrix = games.cyclic_matrix(3)
    p0 = [0.5, 0.25, 0.25]
    t_end = 5.0
    ref = integrate_rk4(p0, matrix, t_end=t_end, dt=1e-4).states[-1]
    errs = {dt: float(np.max(np.abs(integrate_rk4(p0, matrix, t_end=t_end,
                                                  dt=dt).states[-1] - ref)))
            for dt in (0.02, 0.01)}
    ratio = errs[0.02] / errs[0.01]
    _report("rk4 order", 8.0 <= ratio <= 32.0,
            f"err(0.02)/err(0.01) = {ratio:.2f}, expected 16 within factor 2")
