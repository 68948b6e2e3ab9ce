import numpy as np
import pytest

from havqds import RunConfig, run_avqds_only, run_havqds, sample_sk
from havqds.driver import dump_statevector, load_statevector


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig(n_qubits=4, total_time=1.0)
        assert cfg.dt == 0.01 and cfg.dtau == 0.05
        assert cfg.delta_cut == 0.05 and cfg.eps_var == 0.05
        assert cfg.k_max == 11

    def test_validation(self):
        with pytest.raises(ValueError):
            RunConfig(n_qubits=4, total_time=0.0)
        with pytest.raises(ValueError):
            RunConfig(n_qubits=4, total_time=1.0, dt=-0.01)
        with pytest.raises(ValueError):
            RunConfig(n_qubits=4, total_time=1.0, k_max=-1)
        with pytest.raises(ValueError):
            RunConfig(n_qubits=1, total_time=1.0)

    def test_instance_mismatch(self):
        with pytest.raises(ValueError):
            run_havqds(sample_sk(3, 0), RunConfig(n_qubits=4, total_time=1.0))


class TestTrajectory:
    def test_record_shape_and_monotonicity(self):
        inst = sample_sk(3, 0)
        cfg = RunConfig(n_qubits=3, total_time=0.5, dt=0.01)
        res = run_havqds(inst, cfg)
        assert len(res.records) == 51
        assert res.records[0].t == 0.0 and res.records[-1].t == pytest.approx(0.5)
        sizes = [r.ansatz_size for r in res.records]
        cnots = [r.cnot_total for r in res.records]
        assert sizes == sorted(sizes)
        assert cnots == sorted(cnots)
        for r in res.records:
            assert 0 <= r.imag_steps <= cfg.k_max
            assert -1e-10 <= r.ratio <= 1.0 + 1e-10
            assert r.variance >= 0.0

    def test_initial_record_is_driver_ground_state(self):
        # |+>^n is the s=0 eigenstate: energy -n, zero variance, ratio 1.
        inst = sample_sk(3, 1)
        res = run_havqds(inst, RunConfig(n_qubits=3, total_time=0.2, dt=0.01))
        first = res.records[0]
        assert first.energy == pytest.approx(-3.0, abs=1e-12)
        assert first.variance == pytest.approx(0.0, abs=1e-12)
        assert first.ratio == pytest.approx(1.0, abs=1e-12)
        assert first.ansatz_size == 0

    def test_bit_reproducible(self):
        inst = sample_sk(3, 2)
        cfg = RunConfig(n_qubits=3, total_time=0.3, dt=0.01)
        a = run_havqds(inst, cfg)
        b = run_havqds(inst, cfg)
        np.testing.assert_array_equal(a.ansatz.angles, b.ansatz.angles)
        assert a.ansatz.generators == b.ansatz.generators
        assert [r.energy for r in a.records] == [r.energy for r in b.records]

    def test_large_variance_gate_disables_filtering(self):
        inst = sample_sk(3, 3)
        cfg = RunConfig(n_qubits=3, total_time=0.3, dt=0.01, eps_var=1e6)
        gated = run_havqds(inst, cfg)
        ablated = run_avqds_only(inst, cfg)
        assert all(r.imag_steps == 0 for r in gated.records)
        np.testing.assert_array_equal(gated.ansatz.angles, ablated.ansatz.angles)

    def test_filtering_engages_with_tight_gate(self):
        inst = sample_sk(3, 0)
        cfg = RunConfig(n_qubits=3, total_time=1.0, dt=0.01, eps_var=1e-4)
        res = run_havqds(inst, cfg)
        assert any(r.imag_steps > 0 for r in res.records)

    def test_filtering_adds_no_gates(self):
        # Imaginary-time steps only move angles; records taken right after a
        # filtering block must show the same gate count as the growth left.
        inst = sample_sk(3, 0)
        cfg = RunConfig(n_qubits=3, total_time=1.0, dt=0.01, eps_var=1e-4)
        hybrid = run_havqds(inst, cfg)
        assert any(r.imag_steps > 0 for r in hybrid.records)
        assert hybrid.ansatz.cnot_total() == hybrid.records[-1].cnot_total

    def test_filter_steps_descend_under_redundant_ansatz(self):
        # Tight variance gate on longer anneals grows a redundant ansatz
        # whose A_R is near singular; the backtracked substep must keep
        # every filter step non-increasing in energy.
        for seed in (0, 1, 2):
            inst = sample_sk(4, seed)
            cfg = RunConfig(n_qubits=4, total_time=2.0, dt=0.01, eps_var=1e-3)
            res = run_havqds(inst, cfg)
            assert any(r.imag_steps > 0 for r in res.records)
            assert res.max_filter_energy_increase <= 1e-10

    def test_avqds_ablation_never_filters(self):
        inst = sample_sk(3, 4)
        cfg = RunConfig(n_qubits=3, total_time=0.3, dt=0.01, eps_var=1e-6)
        res = run_avqds_only(inst, cfg)
        assert all(r.imag_steps == 0 for r in res.records)

    def test_compute_ratio_off(self):
        import math

        inst = sample_sk(3, 5)
        cfg = RunConfig(n_qubits=3, total_time=0.1, dt=0.01, compute_ratio=False)
        res = run_havqds(inst, cfg)
        assert all(math.isnan(r.ratio) for r in res.records)
        assert all(math.isfinite(r.energy) for r in res.records)


class TestStateDump:
    def test_round_trip(self, tmp_path, np_rng):
        psi = np_rng.standard_normal(8) + 1j * np_rng.standard_normal(8)
        psi /= np.linalg.norm(psi)
        path = tmp_path / "state.bin"
        dump_statevector(path, psi, 3)
        again, n = load_statevector(path)
        assert n == 3
        np.testing.assert_array_equal(again, psi)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"XXXX" + b"\x00" * 16)
        with pytest.raises(ValueError):
            load_statevector(path)

    def test_truncated(self, tmp_path, np_rng):
        psi = np_rng.standard_normal(4) + 0j
        path = tmp_path / "state.bin"
        dump_statevector(path, psi, 2)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ValueError):
            load_statevector(path)
