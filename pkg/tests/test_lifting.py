import numpy as np
import pytest

import ltpmor as lm
from _oracles import dense_stable_system


class TestLift:
    def test_single_period_degenerates_to_lti(self, rng):
        sys = dense_stable_system(rng, T=1)
        lifted = lm.lift(sys, 0)
        assert np.allclose(lifted.A, sys.A[0])
        assert np.array_equal(lifted.B, sys.B[0])
        assert np.array_equal(lifted.C, sys.C[0])
        assert not lifted.D.any()

    def test_scalar_two_periodic_hand_expansion(self):
        a1, a2 = 0.5, 0.4
        b1, b2 = 1.5, -0.7
        c1, c2 = 2.0, 3.0
        # base time j=1: index 1 holds the phase-1 matrices, index 0 phase-2
        sys = lm.PeriodicSystem(np.array([a2, a1]).reshape(2, 1, 1),
                                np.array([b2, b1]).reshape(2, 1, 1),
                                np.array([c2, c1]).reshape(2, 1, 1))
        lifted = lm.lift(sys, 1)
        assert lifted.A[0, 0] == pytest.approx(a2 * a1)
        assert np.allclose(lifted.B, [[a2 * b1, b2]])
        assert np.allclose(lifted.C, [[c1], [c2 * a1]])
        assert np.allclose(lifted.D, [[0.0, 0.0], [c2 * b1, 0.0]])

    def test_lifted_simulation_matches_periodic(self, rng):
        sys = dense_stable_system(rng, n=7, p=2, q=3, T=4)
        j = 2
        lifted = lm.lift(sys, j)
        x0 = rng.standard_normal(sys.n)
        u = rng.standard_normal((3 * sys.T, sys.p))
        traj = lm.simulate(sys, j, x0, u)
        states, outputs = lifted.simulate(x0, u.reshape(3, sys.T * sys.p))
        for t in range(4):
            assert np.allclose(states[t], traj.states[t * sys.T], atol=1e-12)
        for t in range(3):
            want = traj.outputs[t * sys.T:(t + 1) * sys.T].reshape(-1)
            assert np.allclose(outputs[t], want, atol=1e-12)

    def test_feedthrough_is_strictly_block_lower(self, rng):
        sys = dense_stable_system(rng, T=3)
        lifted = lm.lift(sys, 1)
        q, p = sys.q, sys.p
        for i in range(sys.T):
            for k in range(i, sys.T):
                assert not lifted.D[i * q:(i + 1) * q, k * p:(k + 1) * p].any()

    def test_markov_matches_transfer_expansion(self, rng):
        sys = dense_stable_system(rng, T=2)
        lifted = lm.lift(sys, 0)
        assert np.array_equal(lifted.markov(0), lifted.D)
        assert np.allclose(lifted.markov(2), lifted.C @ lifted.A @ lifted.B)


class TestImpulseResponseBlocks:
    def test_zero_input_matrices_give_zero_blocks(self, rng):
        sys = dense_stable_system(rng, T=3)
        quiet = lm.PeriodicSystem(sys.A, np.zeros_like(sys.B), sys.C)
        blocks = lm.lifted_impulse_response(quiet, 0, 2)
        assert not blocks.blocks.any()

    def test_single_period_markov_parameters(self, rng):
        sys = dense_stable_system(rng, T=1, n=5, p=2, q=3)
        blocks = lm.lifted_impulse_response(sys, 0, 3)
        a, b, c = sys.A[0], sys.B[0], sys.C[0]
        assert not blocks.blocks[0].any()  # no feedthrough
        for t in range(1, 4):
            want = c @ np.linalg.matrix_power(a, t - 1) @ b
            assert np.allclose(blocks.blocks[t, 0], want, atol=1e-13)

    def test_blocks_match_explicit_lifted_matrices(self, rng):
        sys = dense_stable_system(rng, n=6, p=2, q=3, T=5)
        j = 1
        blocks = lm.lifted_impulse_response(sys, j, 4)
        lifted = lm.lift(sys, j)
        for t in range(5):
            assert np.max(np.abs(blocks.stacked(t) - lifted.markov(t))) <= 1e-11

    def test_first_block_row_of_t0_is_zero(self, rng):
        sys = dense_stable_system(rng, T=4)
        blocks = lm.lifted_impulse_response(sys, 0, 1)
        assert not blocks.blocks[0, 0].any()

    def test_horizon_zero_and_validation(self, rng):
        sys = dense_stable_system(rng, T=2)
        blocks = lm.lifted_impulse_response(sys, 0, 0)
        assert np.allclose(blocks.stacked(0), lm.lift(sys, 0).D, atol=1e-13)
        with pytest.raises(ValueError):
            lm.lifted_impulse_response(sys, 0, -1)

    def test_csv_rows_schema(self, rng, tmp_path):
        sys = dense_stable_system(rng, n=3, p=1, q=2, T=2)
        blocks = lm.lifted_impulse_response(sys, 0, 1)
        path = tmp_path / "blocks.csv"
        from ltpmor.serialization import blocks_to_csv
        blocks_to_csv(blocks, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,i,output_index,input_index,value"
        assert len(lines) == 1 + 2 * 2 * 2 * 2
        t, i, r, c, v = lines[1].split(",")
        float(v)
