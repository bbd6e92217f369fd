import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from transwass import (BarycenterConfig, DiscreteMeasure, InputError,
                       TransportPlan, bar_wp, distance_from_cost, init_support,
                       solve_exact)
from transwass.barycenter import (update_positions_irls,
                                  update_positions_median,
                                  update_positions_newton, update_positions_p2,
                                  weighted_median_lower)

from conftest import random_measure


def golden_minimize(values, weights, p):
    """1-d oracle: minimize sum_i w_i |v_i - z|^p over the sample hull."""
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        return lo
    res = minimize_scalar(
        lambda z: np.dot(weights, np.abs(values - z) ** p),
        bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-12})
    return float(res.x)


def exhaustive_median_oracle(values, weights):
    """p=1 oracle: some sample point is optimal; scan them all."""
    objs = [np.dot(weights, np.abs(values - v)) for v in values]
    return float(np.min(objs))


def single_column_plans(x_vals, x_w, y_vals, y_w):
    px = TransportPlan((len(x_vals), 1), np.arange(len(x_vals)),
                       np.zeros(len(x_vals), dtype=int), x_w)
    py = TransportPlan((len(y_vals), 1), np.arange(len(y_vals)),
                       np.zeros(len(y_vals), dtype=int), y_w)
    return (px, py, np.asarray(x_vals, dtype=float)[:, None],
            np.asarray(y_vals, dtype=float)[:, None])


class TestInitSupport:
    def test_full_pool(self, rng):
        mu_x = random_measure(rng, 5)
        mu_y = random_measure(rng, 4)
        z = init_support(mu_x, mu_y, 9, seed=0)
        pooled = np.vstack([mu_x.positions, mu_y.positions])
        assert sorted(map(tuple, z)) == sorted(map(tuple, pooled))

    def test_single_point_deterministic(self, rng):
        mu_x = random_measure(rng, 5)
        mu_y = random_measure(rng, 4)
        z1 = init_support(mu_x, mu_y, 1, seed=7)
        z2 = init_support(mu_x, mu_y, 1, seed=7)
        assert np.array_equal(z1, z2)
        pooled = np.vstack([mu_x.positions, mu_y.positions])
        assert any(np.array_equal(z1[0], q) for q in pooled)

    def test_rejects_oversized_kappa(self, rng):
        mu = random_measure(rng, 3)
        with pytest.raises(InputError):
            init_support(mu, mu, 7, seed=0)

    def test_kmeans_init_deterministic(self, rng):
        from transwass import init_support_kmeans
        mu_x = random_measure(rng, 40)
        mu_y = random_measure(rng, 40)
        z1 = init_support_kmeans(mu_x, mu_y, 5, seed=3)
        z2 = init_support_kmeans(mu_x, mu_y, 5, seed=3)
        assert z1.shape == (5, 2)
        assert np.array_equal(z1, z2)
        with pytest.raises(InputError):
            init_support_kmeans(mu_x, mu_y, 81, seed=0)

    def test_kmeans_init_full_pool(self, rng):
        from transwass import init_support_kmeans
        mu_x = random_measure(rng, 3)
        mu_y = random_measure(rng, 4)
        z = init_support_kmeans(mu_x, mu_y, 7, seed=0)
        pooled = np.vstack([mu_x.positions, mu_y.positions])
        assert sorted(map(tuple, z)) == sorted(map(tuple, pooled))

    def test_rejects_unknown_init(self):
        with pytest.raises(InputError):
            BarycenterConfig(kappa=2, init="grid")

    def test_bar_wp_kmeans_init(self, rng):
        mu_x = random_measure(rng, 60)
        mu_y = random_measure(rng, 60)
        ref, _ = solve_exact(mu_x, mu_y, 2.0)
        cost, state = bar_wp(mu_x, mu_y,
                             BarycenterConfig(kappa=6, init="kmeans"))
        # still a distance-scale upper bound
        assert distance_from_cost(cost, 2.0) >= \
            distance_from_cost(ref, 2.0) - 1e-9
        assert state.support.shape[1] == 2

    def test_seed_stability_of_objective(self):
        # different seeds, same converged objective within a small band
        rng = np.random.default_rng(0)
        from transwass import generate_synthetic
        mu_x = generate_synthetic("smooth", 100, 2, 11)
        mu_y = generate_synthetic("smooth", 100, 2, 22)
        costs = [bar_wp(mu_x, mu_y, BarycenterConfig(kappa=4, rng_seed=s))[0]
                 for s in (1, 2)]
        assert abs(costs[0] - costs[1]) <= 0.02 * max(costs)


class TestQuadraticUpdate:
    def test_midpoint(self):
        px, py, x, y = single_column_plans([0.0], [1.0], [2.0], [1.0])
        z = update_positions_p2(px, py, x, y)
        assert z[0, 0] == pytest.approx(1.0)

    def test_one_sided_mass(self):
        # y column empty: the weighted mean degenerates onto the x atom
        px = TransportPlan((1, 1), [0], [0], [1.0])
        py = TransportPlan((1, 1), [], [], [])
        z = update_positions_p2(px, py, np.array([[5.0]]), np.array([[9.0]]))
        assert z[0, 0] == pytest.approx(5.0)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_golden_section(self, seed):
        rng = np.random.default_rng(seed)
        nx, ny = rng.integers(1, 8, size=2)
        px, py, x, y = single_column_plans(
            rng.normal(size=nx), rng.uniform(0.1, 1, nx),
            rng.normal(size=ny), rng.uniform(0.1, 1, ny))
        z = update_positions_p2(px, py, x, y)
        vals = np.concatenate([x[:, 0], y[:, 0]])
        weights = np.concatenate([px.vals, py.vals])
        assert z[0, 0] == pytest.approx(golden_minimize(vals, weights, 2.0),
                                        abs=1e-8)


class TestNewtonUpdate:
    def test_symmetric_masses(self):
        px, py, x, y = single_column_plans([-1.0], [0.5], [1.0], [0.5])
        z = update_positions_newton(px, py, x, y, 4.0, np.array([[0.3]]))
        assert z[0, 0] == pytest.approx(0.0, abs=1e-8)

    def test_single_source(self):
        px, py, x, y = single_column_plans([3.0], [1.0], [], [])
        z = update_positions_newton(px, py, x, y, 3.0, np.array([[0.0]]))
        assert z[0, 0] == pytest.approx(3.0)

    def test_two_point_p4(self):
        px, py, x, y = single_column_plans([0.0], [0.5], [1.0], [0.5])
        z = update_positions_newton(px, py, x, y, 4.0, np.array([[0.2]]))
        vals = np.array([0.0, 1.0])
        weights = np.array([0.5, 0.5])
        assert z[0, 0] == pytest.approx(0.5, abs=1e-6)
        assert z[0, 0] == pytest.approx(golden_minimize(vals, weights, 4.0),
                                        abs=1e-6)

    def test_rejects_small_p(self):
        px, py, x, y = single_column_plans([0.0], [1.0], [1.0], [1.0])
        with pytest.raises(InputError):
            update_positions_newton(px, py, x, y, 2.0, np.zeros((1, 1)))


class TestMedianUpdate:
    def test_majority_mass(self):
        px, py, x, y = single_column_plans([0.0], [0.3], [2.0], [0.7])
        z = update_positions_median(px, py, x, y)
        assert z[0, 0] == 2.0

    def test_tie_takes_lower(self):
        px, py, x, y = single_column_plans([0.0], [0.5], [2.0], [0.5])
        z = update_positions_median(px, py, x, y)
        assert z[0, 0] == 0.0

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_exhaustive_scan(self, seed):
        rng = np.random.default_rng(seed)
        vals = rng.normal(size=10)
        weights = rng.uniform(0.1, 1.0, size=10)
        z = weighted_median_lower(vals, weights)
        obj = np.dot(weights, np.abs(vals - z))
        assert obj <= exhaustive_median_oracle(vals, weights) + 1e-12


class TestIrlsUpdate:
    def test_point_mass_single_step(self):
        px, py, x, y = single_column_plans([1.7], [1.0], [1.7], [1.0])
        z = update_positions_irls(px, py, x, y, 1.5, np.array([[0.2]]))
        assert z[0, 0] == pytest.approx(1.7)

    def test_symmetric_two_points(self):
        px, py, x, y = single_column_plans([0.0], [0.5], [2.0], [0.5])
        z = update_positions_irls(px, py, x, y, 1.5, np.array([[0.7]]))
        assert 0.0 <= z[0, 0] <= 2.0
        vals = np.array([0.0, 2.0])
        weights = np.array([0.5, 0.5])
        obj = np.dot(weights, np.abs(vals - z[0, 0]) ** 1.5)
        ends = [np.dot(weights, np.abs(vals - e) ** 1.5) for e in (0.0, 2.0)]
        assert obj <= min(ends) + 1e-12

    @pytest.mark.parametrize("seed", range(10))
    def test_objective_close_to_golden_section(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 12))
        vals = rng.normal(size=n)
        weights = rng.uniform(0.1, 1.0, size=n)
        px, py, x, y = single_column_plans(vals, weights, [], [])
        z = update_positions_irls(px, py, x, y, 1.5,
                                  np.array([[float(vals[0])]]), iters=200)
        obj = np.dot(weights, np.abs(vals - z[0, 0]) ** 1.5)
        zg = golden_minimize(vals, weights, 1.5)
        ref = np.dot(weights, np.abs(vals - zg) ** 1.5)
        assert obj <= ref * (1 + 1e-4) + 1e-12


class TestBarWp:
    def test_identical_diracs(self):
        mu = DiscreteMeasure([[0.3, 0.4]], [1.0])
        cost, state = bar_wp(mu, mu, BarycenterConfig(kappa=1))
        assert cost == pytest.approx(0.0, abs=1e-12)

    def test_two_atom_exact_recovery(self):
        # kappa covers the exact mid-interpolation support, so the relay
        # decomposition W(x,y) = W(x,z) + W(z,y) is attainable
        mu_x = DiscreteMeasure([[0.0, 0.0], [4.0, 0.0]], [0.5, 0.5])
        mu_y = DiscreteMeasure([[0.0, 2.0], [4.0, 2.0]], [0.5, 0.5])
        exact_cost, _ = solve_exact(mu_x, mu_y, 2.0)
        best = min(bar_wp(mu_x, mu_y,
                          BarycenterConfig(kappa=2, rng_seed=s))[0]
                   for s in range(3))
        assert best == pytest.approx(exact_cost, rel=1e-6)

    def test_upper_bounds_exact_distance(self, rng):
        mu_x = random_measure(rng, 60)
        mu_y = random_measure(rng, 60)
        exact_cost, _ = solve_exact(mu_x, mu_y, 2.0)
        cost_tilde, _ = bar_wp(mu_x, mu_y, BarycenterConfig(kappa=5))
        assert distance_from_cost(cost_tilde, 2.0) >= \
            distance_from_cost(exact_cost, 2.0) - 1e-9

    def test_trace_monotone(self, rng):
        # the alternating minimization never increases the relay objective
        mu_x = random_measure(rng, 80)
        mu_y = random_measure(rng, 80)
        trace = []
        bar_wp(mu_x, mu_y, BarycenterConfig(kappa=6), trace=trace)
        diffs = np.diff(trace)
        assert np.all(diffs <= 1e-9)

    def test_deterministic(self, rng):
        mu_x = random_measure(rng, 50)
        mu_y = random_measure(rng, 50)
        c1, s1 = bar_wp(mu_x, mu_y, BarycenterConfig(kappa=4, rng_seed=3))
        c2, s2 = bar_wp(mu_x, mu_y, BarycenterConfig(kappa=4, rng_seed=3))
        assert c1 == c2
        assert np.array_equal(s1.support, s2.support)
        assert np.array_equal(s1.weights, s2.weights)

    def test_state_consistency(self, rng):
        mu_x = random_measure(rng, 40)
        mu_y = random_measure(rng, 45)
        for p in (1.0, 1.5, 2.0, 3.0):
            _, state = bar_wp(mu_x, mu_y, BarycenterConfig(kappa=4, p=p))
            assert np.all(state.weights > 0)  # dead hubs pruned
            state.plan_x.check_marginals(mu_x.weights, state.weights)
            state.plan_y.check_marginals(mu_y.weights, state.weights)

    def test_kappa_one_is_pooled_point_objective(self, rng):
        mu_x = random_measure(rng, 10)
        mu_y = random_measure(rng, 10)
        cost, state = bar_wp(mu_x, mu_y, BarycenterConfig(kappa=1, p=2.0))
        z = state.support[0]
        side_x = np.dot(mu_x.weights,
                        ((mu_x.positions - z) ** 2).sum(axis=1))
        side_y = np.dot(mu_y.weights,
                        ((mu_y.positions - z) ** 2).sum(axis=1))
        assert cost == pytest.approx(
            (np.sqrt(side_x) + np.sqrt(side_y)) ** 2, rel=1e-9)
