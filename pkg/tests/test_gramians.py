import numpy as np
import pytest
import scipy.linalg

import ltpmor as lm
from _oracles import (dense_stable_system, min_norm_steering_energy,
                      wce_direct, woe_direct)


def scalar_lti(a, b, c):
    return lm.PeriodicSystem(np.array([[[a]]]), np.array([[[b]]]), np.array([[[c]]]))


class TestSmithSolver:
    def test_scalar_geometric_series(self):
        a = np.array([[0.8]])
        q = np.array([[0.36]])
        x = lm.solve_lyapunov_smith(a, q)
        assert x[0, 0] == pytest.approx(0.36 / (1 - 0.64), rel=1e-14)

    def test_matches_scipy(self, rng):
        a = rng.standard_normal((8, 8))
        a *= 0.7 / np.max(np.abs(np.linalg.eigvals(a)))
        q = rng.standard_normal((8, 8))
        q = q @ q.T
        x = lm.solve_lyapunov_smith(a, q)
        want = scipy.linalg.solve_discrete_lyapunov(a, q)
        assert np.allclose(x, want, rtol=1e-11)

    def test_iteration_cap(self):
        a = np.array([[0.99]])
        with pytest.raises(lm.ConvergenceError):
            lm.solve_lyapunov_smith(a, np.array([[1.0]]), max_iter=2)


class TestExactGramians:
    def test_zero_input_and_output_maps(self, rng):
        sys = dense_stable_system(rng, T=3)
        no_b = lm.PeriodicSystem(sys.A, np.zeros_like(sys.B), sys.C)
        assert not lm.exact_gramians(no_b, 0).W_c.any()
        no_c = lm.PeriodicSystem(sys.A, sys.B, np.zeros_like(sys.C))
        assert not lm.exact_gramians(no_c, 0).W_o.any()

    def test_scalar_geometric(self):
        sys = scalar_lti(0.6, 0.5, 1.0)
        pair = lm.exact_gramians(sys, 0)
        assert pair.W_c[0, 0] == pytest.approx(0.25 / (1 - 0.36), rel=1e-13)
        assert pair.provenance == "exact"

    def test_matches_truncated_series(self):
        sys = lm.random_system(4)
        pair = lm.exact_gramians(sys, 1)
        m = 60 * sys.T
        assert (np.linalg.norm(pair.W_c - wce_direct(sys, 1, m))
                <= 1e-10 * np.linalg.norm(pair.W_c))
        assert (np.linalg.norm(pair.W_o - woe_direct(sys, 1, m))
                <= 1e-10 * np.linalg.norm(pair.W_o))

    def test_periodic_in_base_time(self, rng):
        sys = dense_stable_system(rng, T=3)
        a = lm.exact_gramians(sys, 1)
        b = lm.exact_gramians(sys, 1 + sys.T)
        assert np.linalg.norm(a.W_c - b.W_c) <= 1e-10 * np.linalg.norm(a.W_c)
        assert np.linalg.norm(a.W_o - b.W_o) <= 1e-10 * np.linalg.norm(a.W_o)

    def test_periodic_lyapunov_recursions(self, rng):
        sys = dense_stable_system(rng, T=4)
        pairs = [lm.exact_gramians(sys, j) for j in range(sys.T + 1)]
        for j in range(sys.T):
            wc, wc1 = pairs[j].W_c, pairs[j + 1].W_c
            res = sys.A_at(j) @ wc @ sys.A_at(j).T - wc1 + sys.B_at(j) @ sys.B_at(j).T
            assert np.linalg.norm(res) <= 1e-10 * np.linalg.norm(wc1)
            wo, wo1 = pairs[j].W_o, pairs[j + 1].W_o
            res = sys.A_at(j).T @ wo1 @ sys.A_at(j) - wo + sys.C_at(j).T @ sys.C_at(j)
            assert np.linalg.norm(res) <= 1e-10 * np.linalg.norm(wo)

    def test_eigenvalues_nonnegative(self, rng):
        sys = dense_stable_system(rng)
        pair = lm.exact_gramians(sys, 0)
        for w in (pair.W_c, pair.W_o):
            assert np.linalg.eigvalsh(w)[0] >= -1e-10 * np.linalg.norm(w)

    def test_unstable_system_rejected(self):
        sys = scalar_lti(1.05, 1.0, 1.0)
        with pytest.raises(lm.StabilityError):
            lm.exact_gramians(sys, 0)
        with pytest.raises(lm.StabilityError):
            lm.controllability_factor(sys, 0, 4)
        with pytest.raises(lm.StabilityError):
            lm.observability_factor(sys, 0, 4)


class TestControllabilityFactor:
    def test_single_step_is_input_column(self, rng):
        sys = dense_stable_system(rng, T=3)
        x = lm.controllability_factor(sys, 1, 1)
        assert np.allclose(x.matrix, sys.B_at(0))
        assert x.n_simulations == sys.p

    def test_scalar_hand_products(self):
        # p=1, T=2, m_c=4: columns F(j,j-3)B(j-4) ... B(j-1), oldest first
        a1, a2, b1, b2 = 0.5, 0.4, 1.5, -0.7
        sys = lm.PeriodicSystem(np.array([a2, a1]).reshape(2, 1, 1),
                                np.array([b2, b1]).reshape(2, 1, 1),
                                np.ones((2, 1, 1)))
        j = 1
        x = lm.controllability_factor(sys, j, 4)
        want = [a2 * a1 * a2 * b1, a1 * a2 * b2, a2 * b1, b2]
        assert np.allclose(x.matrix[0], want, rtol=1e-14)
        assert list(x.offsets) == [-4, -3, -2, -1]

    def test_outer_product_equals_direct_sum(self):
        sys = lm.random_system(7)
        x = lm.controllability_factor(sys, 1, 10)
        want = wce_direct(sys, 1, 10)
        assert np.linalg.norm(x.gramian() - want) <= 1e-12 * np.linalg.norm(want)

    def test_non_multiple_horizon(self, rng):
        sys = dense_stable_system(rng, T=3, p=2)
        x = lm.controllability_factor(sys, 2, 7)
        want = wce_direct(sys, 2, 7)
        assert np.linalg.norm(x.gramian() - want) <= 1e-12 * np.linalg.norm(want)
        assert x.matrix.shape == (sys.n, 7 * sys.p)

    def test_simulation_count_uses_periodicity(self):
        sys = lm.random_system(2)
        x = lm.controllability_factor(sys, 1, 10)
        assert x.n_simulations == sys.T * sys.p

    def test_column_metadata(self, rng):
        sys = dense_stable_system(rng, T=2, p=2)
        x = lm.controllability_factor(sys, 0, 4)
        assert list(x.channels) == [0] * 4 + [1] * 4
        assert list(x.offsets) == [-4, -3, -2, -1] * 2


class TestObservabilityFactor:
    def test_single_step_is_output_row(self, rng):
        sys = dense_stable_system(rng, T=3)
        y = lm.observability_factor(sys, 1, 1)
        assert np.allclose(y.matrix, sys.C_at(1).T)

    def test_identity_projection_is_bit_identical(self, rng):
        sys = dense_stable_system(rng, T=3)
        plain = lm.observability_factor(sys, 1, 6)
        ident = lm.PodProjection.identity(sys.q, sys.T, base_time=1)
        proj = lm.observability_factor(sys, 1, 6, ident)
        assert np.array_equal(plain.matrix, proj.matrix)

    def test_outer_product_equals_direct_sum(self):
        sys = lm.random_system(7)
        y = lm.observability_factor(sys, 1, 10)
        want = woe_direct(sys, 1, 10)
        assert np.linalg.norm(y.gramian() - want) <= 1e-12 * np.linalg.norm(want)

    def test_projected_outer_product(self, rng):
        sys = dense_stable_system(rng, n=8, q=5, T=3, p=2)
        blocks = lm.lifted_impulse_response(sys, 1, 2)
        proj = lm.pod_output_projection(blocks, 2)
        y = lm.observability_factor(sys, 1, 9, proj)
        want = woe_direct(sys, 1, 9, proj)
        assert np.linalg.norm(y.gramian() - want) <= 1e-12 * np.linalg.norm(want)
        assert y.projection_rank == 2
        assert y.n_simulations == sys.T * 2

    def test_non_multiple_horizon(self, rng):
        sys = dense_stable_system(rng, T=4, q=2)
        y = lm.observability_factor(sys, 3, 6)
        want = woe_direct(sys, 3, 6)
        assert np.linalg.norm(y.gramian() - want) <= 1e-12 * np.linalg.norm(want)

    def test_column_metadata(self, rng):
        sys = dense_stable_system(rng, T=2, q=2)
        y = lm.observability_factor(sys, 0, 3)
        assert list(y.channels) == [0, 0, 0, 1, 1, 1]
        assert list(y.offsets) == [2, 1, 0, 2, 1, 0]


class TestLemma1Bound:
    def test_zero_power_is_one(self, rng):
        sys = dense_stable_system(rng)
        assert lm.lemma1_bound(sys, 0, 0) == pytest.approx(1.0)

    def test_scalar_power(self):
        sys = scalar_lti(0.5, 1.0, 1.0)
        assert lm.lemma1_bound(sys, 0, 3) == pytest.approx(0.015625, rel=1e-14)

    def test_bounds_measured_truncation_error(self):
        sys = lm.random_system(5)
        wc = lm.exact_gramians(sys, 1).W_c
        nwc = np.linalg.norm(wc, 2)
        prev = np.inf
        for l in (1, 2, 3, 4):
            x = lm.controllability_factor(sys, 1, l * sys.T)
            err = np.linalg.norm(wc - x.gramian(), 2) / nwc
            assert err <= lm.lemma1_bound(sys, 1, l)
            assert err <= prev
            prev = err


class TestEnergies:
    def test_zero_state_energies(self):
        sys = lm.random_system(1, n=6, p=6, q=6, T=2)
        assert lm.output_energy(sys, 0, np.zeros(6)) == 0.0
        assert lm.min_input_energy(sys, 0, np.zeros(6)) == 0.0

    def test_output_energy_matches_long_simulation(self, rng):
        sys = lm.random_system(3, n=10, p=1, q=4, T=3)
        x = rng.standard_normal(sys.n)
        horizon = 200 * sys.T
        traj = lm.simulate(sys, 1, x, np.zeros((horizon, sys.p)))
        simulated = float(np.sum(traj.outputs[:horizon] ** 2))
        assert lm.output_energy(sys, 1, x) == pytest.approx(simulated, rel=1e-8)

    def test_min_input_energy_matches_least_squares(self, rng):
        sys = lm.random_system(3, n=8, p=8, q=4, T=3)
        x = rng.standard_normal(sys.n)
        want = min_norm_steering_energy(sys, 1, x, 40 * sys.T)
        assert lm.min_input_energy(sys, 1, x) == pytest.approx(want, rel=1e-6)

    def test_singular_gramian_raises_with_diagnostic(self):
        sys = lm.random_system(0)  # single input, n=30: numerically unreachable
        with pytest.raises(lm.ReachabilityError, match="condition number"):
            lm.min_input_energy(sys, 1, np.ones(sys.n))


class TestEmpiricalPair:
    def test_provenance_and_mismatch(self):
        sys = lm.random_system(6, n=5, p=2, q=3, T=2)
        x = lm.controllability_factor(sys, 1, 4)
        y = lm.observability_factor(sys, 1, 6)
        pair = lm.empirical_gramians(x, y)
        assert pair.provenance == "empirical(m_c=4, m_o=6)"
        y2 = lm.observability_factor(sys, 2, 6)
        with pytest.raises(ValueError):
            lm.empirical_gramians(x, y2)
