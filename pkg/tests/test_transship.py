import numpy as np
import pytest
from scipy.optimize import linprog

from transwass import (DiscreteMeasure, InputError, TransshipmentProblem,
                       pairwise_cost, solve_exact, solve_transshipment)

from conftest import random_measure


def transship_lp_oracle(mu_x, mu_y, z, p):
    """Dense LP over (gamma_x, gamma_y) at fixed hub positions."""
    m, n, kappa = mu_x.size, mu_y.size, z.shape[0]
    cxz = pairwise_cost(mu_x.positions, z, p).ravel()
    cyz = pairwise_cost(mu_y.positions, z, p).ravel()
    nvar = (m + n) * kappa
    rows = []
    rhs = []
    for i in range(m):          # x-marginal
        row = np.zeros(nvar)
        row[i * kappa:(i + 1) * kappa] = 1.0
        rows.append(row)
        rhs.append(mu_x.weights[i])
    for j in range(n):          # y-marginal
        row = np.zeros(nvar)
        row[m * kappa + j * kappa:m * kappa + (j + 1) * kappa] = 1.0
        rows.append(row)
        rhs.append(mu_y.weights[j])
    for k in range(kappa - 1):  # hub conservation (last one is redundant)
        row = np.zeros(nvar)
        row[k:m * kappa:kappa] = 1.0
        row[m * kappa + k::kappa] = -1.0
        rows.append(row)
        rhs.append(0.0)
    res = linprog(np.concatenate([cxz, cyz]), A_eq=np.array(rows),
                  b_eq=np.array(rhs), bounds=(0, None), method="highs")
    assert res.success, res.message
    return float(res.fun)


class TestValidation:
    def test_rejects_dim_mismatch(self, rng):
        mu = random_measure(rng, 3, d=2)
        with pytest.raises(InputError):
            TransshipmentProblem(mu, mu, np.zeros((2, 3)))

    def test_rejects_empty_support(self, rng):
        mu = random_measure(rng, 3, d=2)
        with pytest.raises(InputError):
            TransshipmentProblem(mu, mu, np.zeros((0, 2)))

    def test_1d_support_promoted(self, rng):
        mu = random_measure(rng, 3, d=1)
        prob = TransshipmentProblem(mu, mu, np.array([0.5, 0.7]))
        assert prob.kappa == 2 and prob.support.shape == (2, 1)


class TestSingleHub:
    @pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
    def test_forced_coupling(self, rng, p):
        mu_x = random_measure(rng, 6)
        mu_y = random_measure(rng, 5)
        z = rng.random((1, 2))
        res = solve_transshipment(TransshipmentProblem(mu_x, mu_y, z, p))
        assert np.allclose(res.plan_x.to_dense().ravel(), mu_x.weights,
                           atol=1e-9)
        assert np.allclose(res.plan_y.to_dense().ravel(), mu_y.weights,
                           atol=1e-9)
        expected = (np.dot(mu_x.weights,
                           (np.abs(mu_x.positions - z[0]) ** p).sum(axis=1))
                    + np.dot(mu_y.weights,
                             (np.abs(mu_y.positions - z[0]) ** p).sum(axis=1)))
        assert res.objective == pytest.approx(expected, rel=1e-9)
        assert res.hub_weights[0] == pytest.approx(1.0, abs=1e-12)


class TestOracles:
    @pytest.mark.parametrize("seed", range(10))
    def test_support_on_source_atoms_recovers_exact(self, seed):
        # p=1 makes the ground cost a metric: with hubs exactly on the x
        # atoms the x side rides for free and the y side must realize the
        # full optimal transport cost.  (For p>1 relaying can undercut the
        # direct cost, since (d1+d2)^p > d1^p + d2^p.)
        rng = np.random.default_rng(seed)
        m = int(rng.integers(2, 8))
        n = int(rng.integers(2, 8))
        mu_x = random_measure(rng, m)
        mu_y = random_measure(rng, n)
        res = solve_transshipment(
            TransshipmentProblem(mu_x, mu_y, mu_x.positions, 1.0))
        exact_cost, _ = solve_exact(mu_x, mu_y, 1.0)
        assert res.objective == pytest.approx(exact_cost, rel=1e-9)

    @pytest.mark.parametrize("seed", range(15))
    def test_matches_dense_lp(self, seed):
        rng = np.random.default_rng(1000 + seed)
        m = int(rng.integers(2, 7))
        n = int(rng.integers(2, 7))
        kappa = int(rng.integers(1, 4))
        p = float(rng.choice([1.0, 1.5, 2.0, 3.0]))
        mu_x = random_measure(rng, m)
        mu_y = random_measure(rng, n)
        z = rng.random((kappa, 2))
        res = solve_transshipment(TransshipmentProblem(mu_x, mu_y, z, p))
        ref = transship_lp_oracle(mu_x, mu_y, z, p)
        assert res.objective == pytest.approx(ref, rel=1e-9, abs=1e-12)


class TestInvariants:
    def test_hub_conservation_exact(self, rng):
        mu_x = random_measure(rng, 40)
        mu_y = random_measure(rng, 35)
        z = rng.random((6, 2))
        res = solve_transshipment(TransshipmentProblem(mu_x, mu_y, z, 2.0))
        # conservation is exact on the integer mass grid; after the float
        # rescale only summation order can differ
        assert np.abs(res.plan_x.col_sums() - res.hub_weights).max() < 1e-12
        assert np.abs(res.plan_y.col_sums() - res.hub_weights).max() < 1e-12
        res.plan_x.check_marginals(mu_x.weights, res.hub_weights, atol=1e-12)
        res.plan_y.check_marginals(mu_y.weights, res.hub_weights, atol=1e-12)

    def test_zero_hubs_reported(self, rng):
        # one hub sits far away from all the mass and must stay unused
        mu_x = random_measure(rng, 10)
        mu_y = random_measure(rng, 10)
        z = np.vstack([rng.random((3, 2)), [[50.0, 50.0]]])
        res = solve_transshipment(TransshipmentProblem(mu_x, mu_y, z, 2.0))
        assert 3 in res.zero_hubs

    def test_triangle_bound_on_distance_scale(self, rng):
        # W(x,y) <= W(x,z) + W(z,y): holds on the distance scale, where the
        # two sides of the relay are the optimal couplings to the hub measure
        from transwass import plan_cost

        mu_x = random_measure(rng, 20)
        mu_y = random_measure(rng, 20)
        z = rng.random((4, 2))
        res = solve_transshipment(TransshipmentProblem(mu_x, mu_y, z, 2.0))
        side_x = plan_cost(res.plan_x, mu_x.positions, z, 2.0)
        side_y = plan_cost(res.plan_y, mu_y.positions, z, 2.0)
        exact_cost, _ = solve_exact(mu_x, mu_y, 2.0)
        assert np.sqrt(side_x) + np.sqrt(side_y) >= np.sqrt(exact_cost) - 1e-9
