import numpy as np
import pytest

from gamekinetics import games


def test_validate_payoff_canonical_two_strategy():
    m = games.validate_payoff([[0, 1], [-1, 0]])
    assert m.dim == 2
    assert m.antisymmetric


def test_validate_payoff_rejects_symmetric():
    with pytest.raises(games.NotAntisymmetric):
        games.validate_payoff([[0, 1], [1, 0]])


def test_validate_payoff_rejects_large_entries():
    with pytest.raises(games.EntryOutOfRange):
        games.validate_payoff([[0, 2], [-2, 0]])


def test_validate_payoff_rejects_small_dimension():
    with pytest.raises(games.BadDimension):
        games.validate_payoff([[0.0]])


def test_validate_payoff_accepts_rps():
    m = games.validate_payoff([[0, -1, 1], [1, 0, -1], [-1, 1, 0]])
    assert m.dim == 3


def test_rps_matrix_unit_weights():
    m = games.rps_matrix(1, 1)
    np.testing.assert_array_equal(m.a, [[0, -1, 1], [1, 0, -1], [-1, 1, 0]])


def test_rps_matrix_scaled():
    m = games.rps_matrix(0.5, 0.5)
    np.testing.assert_allclose(np.abs(m.a) + np.eye(3) * 0.5, 0.5)
    assert np.max(np.abs(m.a + m.a.T)) == 0


def test_rps_matrix_strict_rejects_asymmetric_weights():
    with pytest.raises(games.NotAntisymmetric):
        games.rps_matrix(1.0, 0.5)
    m = games.rps_matrix(1.0, 0.5, strict=False)
    assert not m.antisymmetric


def test_cyclic_matrix_d3():
    m = games.cyclic_matrix(3)
    np.testing.assert_array_equal(m.a, [[0, 1, -1], [-1, 0, 1], [1, -1, 0]])


def test_cyclic_matrix_d5_against_direct_construction():
    # independent oracle: build the circulant row by row from the printed rule
    d = 5
    signs = [0.0] + [(-1.0) ** (k - 1) for k in range(1, d)]
    expected = np.array([[signs[(j - i) % d] for j in range(d)] for i in range(d)])
    m = games.cyclic_matrix(d)
    np.testing.assert_array_equal(m.a, expected)
    np.testing.assert_array_equal(m.a[0], [0, 1, -1, 1, -1])
    assert np.max(np.abs(m.a + m.a.T)) == 0


def test_cyclic_matrix_rejects_even_dimension():
    with pytest.raises(games.EvenDimension):
        games.cyclic_matrix(4)


def test_h_eval_interior():
    params = games.StepFunctionParams(0.1)
    assert games.h_eval([1 / 3, 1 / 3, 1 / 3], params) == pytest.approx(1 / 27)


def test_h_eval_cap_active():
    assert games.h_eval([0.5, 0.5], games.StepFunctionParams(0.1)) == 0.1


def test_h_eval_boundary_zero():
    for c in (0.01, 0.5, 0.99):
        assert games.h_eval([1.0, 0.0], games.StepFunctionParams(c)) == 0.0


def test_h_eval_bounds_and_vanishing():
    rng = np.random.default_rng(0)
    params = games.StepFunctionParams(0.2)
    for _ in range(200):
        p = rng.dirichlet(np.ones(4))
        h = games.h_eval(p, params)
        assert 0.0 <= h <= 0.2
        assert (h == 0.0) == (np.min(p) == 0.0)


def test_step_params_validation():
    with pytest.raises(ValueError):
        games.StepFunctionParams(0.0)
    with pytest.raises(ValueError):
        games.StepFunctionParams(1.0)


def test_sample_pure_intervals():
    p = [0.2, 0.5, 0.3]
    assert games.sample_pure(p, 0.65) == 1  # 0.2 <= 0.65 < 0.7
    assert games.sample_pure(p, 0.0) == 0
    assert games.sample_pure(p, 0.2) == 1  # left endpoint belongs to the next interval
    assert games.sample_pure([1.0, 0.0, 0.0], 0.999) == 0


def test_sample_pure_skips_zero_probability_strategy():
    assert games.sample_pure([0.2, 0.0, 0.8], 0.2) == 2


def test_sample_pure_rounding_residue_goes_last():
    p = np.array([0.1] * 3 + [0.7])
    p = p / p.sum()
    assert games.sample_pure(p, 1.0 - 1e-16) == 3


def test_sample_pure_frequencies_match_probabilities():
    # binomial tolerance on 1e5 draws at a fixed strategy
    p = np.array([0.2, 0.5, 0.3])
    n = 100_000
    rng = np.random.default_rng(42)
    zetas = rng.random(n)
    cum = np.cumsum(p)
    hits = np.minimum(np.searchsorted(cum, zetas, side="right"), 2)
    for i in range(3):
        freq = np.mean(hits == i)
        tol = 4.0 * np.sqrt(p[i] * (1 - p[i]) / n)
        assert abs(freq - p[i]) <= tol
    # the vectorized draw agrees with sample_pure itself
    for z in zetas[:200]:
        assert games.sample_pure(p, z) == np.minimum(np.searchsorted(cum, z, "right"), 2)


def test_payoff_self_play_zero():
    rng = np.random.default_rng(1)
    m, _ = games.random_interior_null_game(5, rng)
    for _ in range(20):
        p = rng.dirichlet(np.ones(5))
        assert abs(games.payoff(p, p, m)) <= 1e-12


def test_payoff_paper_pure_strategies():
    m = games.rps_matrix(1, 1)
    # Paper beats Rock: the second strategy earns b against the first
    assert games.payoff([0, 1, 0], [1, 0, 0], m) == 1.0


def test_payoff_center_vs_center_cyclic():
    m = games.cyclic_matrix(3)
    n = np.full(3, 1 / 3)
    assert games.payoff(n, n, m) == pytest.approx(0.0, abs=1e-15)


def test_payoff_dimension_mismatch():
    with pytest.raises(games.DimensionMismatch):
        games.payoff([0.5, 0.5], [1, 0, 0], games.rps_matrix(1, 1))


def test_interior_nash_cyclic_d3():
    res = games.interior_nash(games.cyclic_matrix(3))
    np.testing.assert_allclose(res.point, [1 / 3, 1 / 3, 1 / 3], atol=1e-12)
    assert res.null_dim == 1


def test_interior_nash_two_strategy_none():
    res = games.interior_nash(games.two_strategy_matrix(0.7))
    assert res.point is None
    assert res.null_dim == 0


def test_interior_nash_cyclic_d5_null_vector_oracle():
    m = games.cyclic_matrix(5)
    res = games.interior_nash(m)
    np.testing.assert_allclose(res.point, np.full(5, 0.2), atol=1e-12)
    # direct multiplication oracle
    np.testing.assert_allclose(m.a @ np.full(5, 0.2), 0.0, atol=1e-15)


def test_interior_nash_degenerate_null_space_reports_multiplicity():
    a = np.zeros((4, 4))
    a[0, 1], a[1, 0] = 1.0, -1.0
    res = games.interior_nash(games.validate_payoff(a))
    assert res.null_dim == 2
    assert res.point is None


def test_random_interior_null_game_recovers_target():
    rng = np.random.default_rng(7)
    for d in (3, 5, 7):
        m, q = games.random_interior_null_game(d, rng)
        assert np.max(np.abs(m.a @ q)) < 1e-14
        res = games.interior_nash(m)
        assert res.null_dim == 1
        np.testing.assert_allclose(res.point, q, atol=1e-10)


def test_is_nash_center_cyclic():
    assert games.is_nash([1 / 3, 1 / 3, 1 / 3], games.cyclic_matrix(3))


def test_is_nash_off_center_false():
    # Aq = (0, -0.25, 0.25) by hand
    m = games.cyclic_matrix(3)
    np.testing.assert_allclose(m.a @ [0.5, 0.25, 0.25], [0, -0.25, 0.25], atol=1e-15)
    assert not games.is_nash([0.5, 0.25, 0.25], m)


def test_is_nash_boundary_guard():
    with pytest.raises(games.NotInterior):
        games.is_nash([1.0, 0.0, 0.0], games.cyclic_matrix(3))


def test_interior_nash_implies_is_nash():
    rng = np.random.default_rng(3)
    for _ in range(25):
        m, _ = games.random_interior_null_game(5, rng)
        res = games.interior_nash(m)
        assert res.point is not None
        assert games.is_nash(res.point, m)
