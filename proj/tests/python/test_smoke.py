import math

import brwlab


def test_analytic_constants():
    params = brwlab.ModelParams(1.0, 1.0, 0.0)
    theta = brwlab.solve_theta_hat(params)
    assert math.isclose(brwlab.g(theta), 1.0, abs_tol=1e-10)
    assert math.isclose(
        brwlab.rightmost_speed(params), 1.0 * (theta - 1.0 / theta), rel_tol=1e-12
    )
    pred = brwlab.classify(brwlab.ModelParams(1.0, 1.0, 0.5))
    assert pred.regime == brwlab.Regime.P_IN_0_1
    assert math.isclose(pred.c_hat, 0.25)


def test_rate_function_round_trip():
    y = brwlab.rate_function(3.0, 1.0)
    assert math.isclose(brwlab.rate_function_inverse(y, 1.0), 3.0, rel_tol=1e-8)


def test_simulation_is_deterministic():
    cfg = brwlab.SimConfig(brwlab.ModelParams(1.0, 1.0, 0.5))
    cfg.t_max = 3.0
    cfg.sample_grid = [1.0, 2.0, 3.0]
    cfg.seed = 5
    a = brwlab.simulate(cfg)
    b = brwlab.simulate(cfg)
    assert a.population == b.population
    assert a.rightmost == b.rightmost
    assert a.population[-1] >= 1


def test_many_to_one_matches_yule_mean():
    est = brwlab.expected_population(brwlab.ModelParams(1.0, 0.5, 0.0), 2.0, 100, 1)
    assert math.isclose(est.mean, math.exp(1.0), rel_tol=1e-12)


def test_tilted_tree_and_martingale():
    params = brwlab.ModelParams(1.0, 0.5, 0.0)
    theta = brwlab.ThetaSchedule.case_a(1.4)
    tree = brwlab.simulate_tilted(params, theta, 2.0, 100000, 10_000_000, 3)
    assert tree.population_at(2.0) >= 1
    m = brwlab.additive_martingale(tree, theta, params, 2.0)
    assert m > 0.0
    dec = brwlab.spine_decomposition(tree.spine, theta, params, 2.0)
    assert dec.spine_term > 0.0
