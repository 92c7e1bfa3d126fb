import numpy as np
import pytest

import ltpmor as lm
from _oracles import dense_stable_system

SMALL = dict(seed=3, n=6, p=2, q=3, T=3, m_c=6, m_o=6, output_ranks=(1, 3),
             max_order=6, hinf_grid=128)


class TestRandomSystem:
    def test_default_family_shape(self):
        sys = lm.random_system(0)
        assert (sys.T, sys.n, sys.p, sys.q) == (5, 30, 1, 30)
        for k in range(sys.T):
            a = sys.A[k]
            d = np.diag(a)
            assert np.all((d >= 0.16) & (d <= 0.96))
            assert not (a - np.diag(d)).any()
        assert np.all((sys.B >= 0.0) & (sys.B <= 1.0))
        assert np.all((sys.C >= 0.0) & (sys.C <= 1.0))

    def test_degenerate_bounds_give_scaled_identity(self):
        sys = lm.random_system(1, n=4, T=2, a_bounds=(0.3, 0.3))
        for k in range(2):
            assert np.allclose(sys.A[k], 0.3 * np.eye(4))

    def test_seed_determinism(self):
        a = lm.random_system(123)
        b = lm.random_system(123)
        assert np.array_equal(a.A, b.A)
        assert np.array_equal(a.B, b.B)
        assert np.array_equal(a.C, b.C)

    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            lm.random_system(0, a_bounds=(0.0, 0.5))
        with pytest.raises(ValueError):
            lm.random_system(0, a_bounds=(0.5, 1.0))
        with pytest.raises(ValueError):
            lm.random_system(0, bc_bounds=(1.0, 0.0))
        with pytest.raises(ValueError):
            lm.random_system(0, n=0)


class TestHinfNorm:
    def test_static_system_is_largest_singular_value(self, rng):
        d = rng.standard_normal((4, 3))
        ev = lambda z: np.broadcast_to(d, (z.size, 4, 3))
        assert lm.hinf_norm(ev, grid=64) == pytest.approx(
            np.linalg.svd(d, compute_uv=False)[0], rel=1e-12)

    def test_scalar_chain_peaks_at_dc(self):
        lifted = lm.LiftedSystem(j=0, A=np.array([[0.5]]), B=np.array([[1.0]]),
                                 C=np.array([[1.0]]), D=np.array([[0.0]]),
                                 T=1, p=1, q=1)
        assert lm.hinf_norm(lifted.transfer, grid=256) == pytest.approx(2.0, rel=1e-12)

    def test_grid_refinement_self_consistency(self):
        lifted = lm.lift(lm.random_system(0), 1)
        coarse = lm.hinf_norm(lifted.transfer, grid=1024)
        fine = lm.hinf_norm(lifted.transfer, grid=4096)
        assert abs(coarse - fine) / fine < 1e-3

    def test_grid_floor(self):
        with pytest.raises(ValueError):
            lm.hinf_norm(lambda z: np.zeros((z.size, 1, 1)), grid=32)


class TestExperimentConfig:
    def test_defaults_follow_benchmark_family(self):
        cfg = lm.ExperimentConfig()
        assert (cfg.T, cfg.n, cfg.q, cfg.p, cfg.base_time) == (5, 30, 30, 1, 1)
        assert cfg.m_c == cfg.m_o == 10
        assert cfg.output_ranks == (1, 2, 6, 10)
        assert cfg.validate() == []

    def test_doc_round_trip(self):
        cfg = lm.ExperimentConfig(**SMALL)
        again = lm.ExperimentConfig.from_doc(cfg.to_doc())
        assert again == lm.ExperimentConfig(**SMALL)

    def test_unknown_doc_field_rejected(self):
        with pytest.raises(ValueError):
            lm.ExperimentConfig.from_doc({"seeds": [1, 2]})

    def test_invalid_settings_rejected(self):
        with pytest.raises(ValueError):
            lm.ExperimentConfig(modes=("exact", "magic")).validate()
        with pytest.raises(ValueError):
            lm.ExperimentConfig(output_ranks=(0,)).validate()
        with pytest.raises(ValueError):
            lm.ExperimentConfig(output_ranks=(31,)).validate()
        with pytest.raises(ValueError):
            lm.ExperimentConfig(m_c=3).validate()  # below one period with bpod
        with pytest.raises(ValueError):
            lm.ExperimentConfig(variants=("single",)).validate()
        with pytest.raises(ValueError):
            lm.ExperimentConfig(hinf_grid=16).validate()
        with pytest.raises(ValueError):
            lm.ExperimentConfig(modes=()).validate()

    def test_non_multiple_horizon_warns(self):
        cfg = lm.ExperimentConfig(m_c=11, m_o=10)
        assert any("multiples" in w for w in cfg.validate())

    def test_override(self):
        cfg = lm.ExperimentConfig().override(seed=9, out_dir=None, m_c=None)
        assert cfg.seed == 9
        assert cfg.m_c == 10


class TestRunExperiment:
    @pytest.fixture(scope="class")
    def report(self):
        return lm.run_experiment(lm.ExperimentConfig(**SMALL))

    def test_curves_share_the_order_grid(self, report):
        assert report.orders == list(range(1, report.orders[-1] + 1))
        for label, errs in report.curves.items():
            assert len(errs) == len(report.orders)
            assert all(np.isfinite(errs))
        assert len(report.lower_bound) == len(report.orders)

    def test_expected_mode_labels(self, report):
        labels = set(report.curves)
        assert "exact" in labels
        assert "snapshot-no-projection" in labels
        assert "bpod-periodic-rop1" in labels
        assert "bpod-single-rop3" in labels

    def test_full_order_exact_error_tiny(self, report):
        rank, err = report.full_order["exact"]
        assert err <= 1e-9

    def test_curves_dominate_lower_bound(self, report):
        lb = np.array(report.lower_bound)
        for errs in report.curves.values():
            assert np.all(np.array(errs) >= 0.99 * lb)

    def test_simulation_counts(self, report):
        cfg = report.config
        assert report.simulation_counts["primal"] == cfg.T * cfg.p
        adj = report.simulation_counts["adjoint"]
        assert adj["snapshot-no-projection"] == cfg.T * cfg.q
        assert adj["bpod-periodic-rop1"] == cfg.T * 1

    def test_written_files(self, tmp_path):
        cfg = lm.ExperimentConfig(**SMALL).override(out_dir=str(tmp_path))
        lm.run_experiment(cfg)
        assert (tmp_path / "hankel.csv").exists()
        assert (tmp_path / "error_curves.csv").exists()
        assert (tmp_path / "report.json").exists()
        assert (tmp_path / "hankel_singular_values.png").exists()
        assert (tmp_path / "error_curves.png").exists()
        assert (tmp_path / "projection_variants.png").exists()
        header = (tmp_path / "error_curves.csv").read_text().splitlines()[0]
        assert header == "r,quantity,mode"

    def test_csv_determinism(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            cfg = lm.ExperimentConfig(**SMALL).override(out_dir=str(out),
                                                        figures=False)
            lm.run_experiment(cfg)
        for name in ("hankel.csv", "error_curves.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_error_context_names_the_step(self):
        cfg = lm.ExperimentConfig(**SMALL).override(
            a_bounds=(0.999999999, 0.9999999999))
        with pytest.raises(lm.StabilityError, match=r"\[exact-balancing\]"):
            lm.run_experiment(cfg)


class TestBaseTimeSweep:
    def test_single_period_has_one_entry(self, rng):
        sys = dense_stable_system(rng, T=1)
        result = lm.base_time_sweep(sys, 4, 4, orders=[1])
        assert result.base_times == (0,)
        assert len(result.spectra) == 1

    def test_spectra_and_best_base_time(self):
        sys = lm.random_system(6, n=8, p=1, q=4, T=3)
        result = lm.base_time_sweep(sys, 6, 6, orders=[1, 2])
        assert len(result.spectra) == sys.T
        for r, j in result.best.items():
            neglected = [s[r] if r < s.size else 0.0 for s in result.spectra]
            assert neglected[j] == min(neglected)

    def test_snapshot_sweep_tracks_exact_sweep(self):
        sys = lm.random_system(2, n=10, p=1, q=5, T=3)
        m = 20 * sys.T
        result = lm.base_time_sweep(sys, m, m, orders=[1])
        for j in range(sys.T):
            oracle = lm.exact_balancing_basis(lm.lift(sys, j))
            k = min(5, result.spectra[j].size, oracle.rank)
            assert np.allclose(result.spectra[j][:k], oracle.sigma[:k], rtol=1e-5)

    def test_written_files(self, tmp_path, rng):
        sys = dense_stable_system(rng, T=2)
        result = lm.base_time_sweep(sys, 4, 4, orders=[1])
        lm.bench.write_sweep_files(result, tmp_path)
        lines = (tmp_path / "sweep.csv").read_text().splitlines()
        assert lines[0] == "r,quantity,mode"
        assert (tmp_path / "sweep.json").exists()
