import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from gamekinetics import metrics
from gamekinetics.meanfield import ParticleEnsemble
from gamekinetics.micro import make_generator, sample_simplex_uniform


def exact_w1_assignment(points_a, points_b):
    """Exact W1 between equal-size uniform ensembles via the assignment problem."""
    diff = points_a[:, None, :] - points_b[None, :, :]
    cost = np.linalg.norm(diff, axis=2)
    rows, cols = linear_sum_assignment(cost)
    return cost[rows, cols].mean()


# -- 1-D Wasserstein ---------------------------------------------------------

def test_w1_identical_sets():
    assert metrics.w1_1d([0.3, 0.1, 0.7], None, [0.1, 0.7, 0.3], None) == 0.0


def test_w1_unit_transport():
    assert metrics.w1_1d([0.0], None, [1.0], None) == 1.0


def test_w1_rigid_shift():
    assert metrics.w1_1d([0.1, 0.2], None, [0.3, 0.4], None) == pytest.approx(0.2)


def test_w1_weighted_atoms():
    # 0.75 mass at 0 + 0.25 at 1 vs Dirac at 0: move 0.25 mass by 1
    assert metrics.w1_1d([0.0, 1.0], [0.75, 0.25], [0.0], [1.0]) == pytest.approx(0.25)


def test_w1_metric_properties():
    rng = np.random.default_rng(5)
    for _ in range(30):
        xs = [rng.random(rng.integers(2, 9)) for _ in range(3)]
        ws = []
        for x in xs:
            w = rng.random(x.size)
            ws.append(w / w.sum())
        dab = metrics.w1_1d(xs[0], ws[0], xs[1], ws[1])
        dba = metrics.w1_1d(xs[1], ws[1], xs[0], ws[0])
        dac = metrics.w1_1d(xs[0], ws[0], xs[2], ws[2])
        dcb = metrics.w1_1d(xs[2], ws[2], xs[1], ws[1])
        assert dab == pytest.approx(dba, abs=1e-12)
        assert dab <= dac + dcb + 1e-12
        assert metrics.w1_1d(xs[0], ws[0], xs[0], ws[0]) <= 1e-15


def test_w1_requires_normalized_weights():
    with pytest.raises(ValueError):
        metrics.w1_1d([0.0, 1.0], [0.5, 0.2], [0.0], [1.0])


# -- sliced Wasserstein -------------------------------------------------------

def _random_ensemble(rng, m, d):
    return ParticleEnsemble.uniform(sample_simplex_uniform(rng, m, d))


def test_sliced_w1_identical_zero():
    ens = _random_ensemble(make_generator(0), 40, 3)
    assert metrics.sliced_w1(ens, ens, n_proj=8, seed=1) == 0.0


def test_sliced_w1_translation_exact_d2():
    # in d=2 every hyperplane direction sees the full shift
    rng = make_generator(1)
    x = rng.uniform(0.3, 0.5, size=40)
    base = np.column_stack([x, 1.0 - x])
    u = np.array([1.0, -1.0]) / np.sqrt(2.0)
    t = 1e-2
    ens_a = ParticleEnsemble.uniform(base)
    ens_b = ParticleEnsemble.uniform(base + t * u)
    for seed in (0, 1, 2):
        assert metrics.sliced_w1(ens_a, ens_b, n_proj=8, seed=seed) == pytest.approx(t, rel=1e-9)


def test_sliced_w1_translation_bounds_d3():
    # each direction sees t * |cos|, so the average sits strictly below t
    # but well above zero
    rng = make_generator(1)
    base = 0.25 + 0.5 * sample_simplex_uniform(rng, 50, 3)
    base /= base.sum(axis=1, keepdims=True)
    u = np.array([1.0, -0.5, -0.5])
    u /= np.linalg.norm(u)
    t = 1e-2
    got = metrics.sliced_w1(ParticleEnsemble.uniform(base),
                            ParticleEnsemble.uniform(base + t * u), n_proj=64, seed=0)
    assert 0.4 * t < got <= t + 1e-12


def test_sliced_w1_lower_bounds_exact_w1():
    rng = make_generator(2)
    for d in (2, 3, 4):
        pa = sample_simplex_uniform(rng, 48, d)
        pb = sample_simplex_uniform(rng, 48, d)
        exact = exact_w1_assignment(pa, pb)
        sliced = metrics.sliced_w1(ParticleEnsemble.uniform(pa),
                                   ParticleEnsemble.uniform(pb), n_proj=64, seed=3)
        assert sliced <= exact + 1e-12


def test_sliced_w1_dimension_mismatch():
    rng = make_generator(3)
    with pytest.raises(metrics.DimensionMismatch):
        metrics.sliced_w1(_random_ensemble(rng, 10, 2), _random_ensemble(rng, 10, 3))


def test_sliced_w1_deterministic_given_seed():
    rng = make_generator(4)
    a, b = _random_ensemble(rng, 30, 3), _random_ensemble(rng, 30, 3)
    assert metrics.sliced_w1(a, b, 16, seed=9) == metrics.sliced_w1(a, b, 16, seed=9)


# -- histograms ---------------------------------------------------------------

def test_histogram_all_mass_at_zero():
    ens = ParticleEnsemble.uniform(np.tile([0.0, 1.0], (20, 1)))
    hist = metrics.marginal_histogram(ens, 0, 10)
    assert hist.masses[0] == pytest.approx(1.0, abs=1e-12)
    assert hist.masses[1:].sum() == 0.0


def test_histogram_two_diracs():
    pts = np.vstack([np.tile([0.0, 1.0], (3, 1)), np.tile([1.0, 0.0], (7, 1))])
    hist = metrics.marginal_histogram(ParticleEnsemble.uniform(pts), 0, 10)
    assert hist.masses[0] == pytest.approx(0.3)
    assert hist.masses[-1] == pytest.approx(0.7)


def test_histogram_uniform_low_interval():
    rng = make_generator(5)
    x = rng.uniform(0.0, 0.3, size=200_000)
    pts = np.column_stack([x, 1.0 - x])
    hist = metrics.marginal_histogram(ParticleEnsemble.uniform(pts), 0, 10)
    np.testing.assert_allclose(hist.masses[:3], 1 / 3, atol=5e-3)
    assert hist.masses[3:].sum() == 0.0


def test_histogram_edge_atoms_go_right():
    pts = np.tile([0.5, 0.5], (4, 1))
    hist = metrics.marginal_histogram(ParticleEnsemble.uniform(pts), 0, 2)
    assert hist.masses[1] == 1.0


def test_histogram_weighted_population_input():
    # raw arrays are treated as uniform-weight ensembles
    hist = metrics.marginal_histogram(np.array([[0.0, 1.0], [1.0, 0.0]]), 0, 4)
    assert hist.masses[0] == 0.5 and hist.masses[-1] == 0.5


# -- mean strategy --------------------------------------------------------------

def test_mean_strategy_dirac():
    q = np.array([0.2, 0.3, 0.5])
    ens = ParticleEnsemble.uniform(np.tile(q, (9, 1)))
    np.testing.assert_allclose(metrics.mean_strategy(ens), q, atol=1e-15)


def test_mean_strategy_convexity():
    ens = ParticleEnsemble.uniform(np.array([[1.0, 0.0], [0.0, 1.0]]))
    np.testing.assert_allclose(metrics.mean_strategy(ens), [0.5, 0.5])


def test_mean_strategy_absorption_initial_condition():
    # 0.3 mass at 0 plus 0.7 mass uniform on [0, 0.3]: mean near 0.7 * 0.15
    rng = make_generator(6)
    x = np.concatenate([np.zeros(30_000), rng.uniform(0, 0.3, 70_000)])
    pts = np.column_stack([x, 1.0 - x])
    mean = metrics.mean_strategy(ParticleEnsemble.uniform(pts))
    assert mean[0] == pytest.approx(0.105, abs=2e-3)


def test_mean_strategy_empty():
    with pytest.raises(metrics.Empty):
        metrics.mean_strategy(np.empty((0, 3)))


# -- uniform simplex covariance -------------------------------------------------

def test_covariance_d2_exact():
    np.testing.assert_allclose(metrics.uniform_simplex_covariance(2),
                               [[1 / 12, -1 / 12], [-1 / 12, 1 / 12]], atol=1e-15)


def test_covariance_rows_sum_to_zero():
    for d in range(2, 9):
        q = metrics.uniform_simplex_covariance(d)
        np.testing.assert_allclose(q.sum(axis=1), 0.0, atol=1e-15)
        np.testing.assert_allclose(q, q.T, atol=1e-16)


def test_covariance_matches_sampler_monte_carlo():
    # ties the analytic matrix to the simplex sampler the noise model uses
    d, n = 3, 200_000
    samples = sample_simplex_uniform(make_generator(11), n, d)
    centered = samples - samples.mean(axis=0)
    emp = centered.T @ centered / (n - 1)
    analytic = metrics.uniform_simplex_covariance(d)
    prods = centered[:, :, None] * centered[:, None, :]
    se = prods.std(axis=0, ddof=1) / np.sqrt(n)
    assert np.all(np.abs(emp - analytic) <= 3.0 * se)
