"""End-to-end acceptance suite.

Fast checks (kernels, geometry, filtering law, gate accounting, Trotter
convergence) run live.  The benchmark-level checks read the cached sweep
outputs under results/acceptance/ and regenerate them through the CLI if
they are missing; regeneration takes hours at the largest sizes, so the
cache is committed alongside the code.
"""

import csv
import math
import random
from pathlib import Path

import numpy as np
import pytest

from havqds import (
    Ansatz,
    PauliString,
    RunConfig,
    WeightedPauliSum,
    apply_pauli,
    apply_rotation,
    apply_sum,
    build_h_ad,
    evolve_exact,
    ground_state_probability,
    imaginary_filter_exact,
    imaginary_time_step,
    plus_state,
    realtime_geometry,
    run_havqds,
    run_trotter,
    sample_sk,
    schedule_s,
    solve_regularized,
)
from havqds.cli import main as cli_main
from havqds.variational import geometry_snapshot

from conftest import dense_pauli, dense_sum, random_pauli, random_state, random_sum

ACCEPTANCE_DIR = Path(__file__).resolve().parent.parent / "results" / "acceptance"

SWEEPS = {
    "c6": [
        ["trotter", "--n", "8", "--T", "1,10", "--seeds", "10"],
    ],
    "c7": [
        ["havqds", "--n", "8", "--T", "1,5", "--seeds", "10",
         "--method", "havqds,avqds"],
        ["trotter", "--n", "8", "--T", "1,5", "--seeds", "10",
         "--protocol", "CD"],
    ],
    "c8": [
        ["havqds", "--n", "10", "--T", "2,10", "--seeds", "10"],
        ["trotter", "--n", "10", "--T", "10", "--seeds", "10",
         "--protocol", "CD"],
    ],
    "c9": [
        ["havqds", "--n", "6,8,10,12,14", "--T", "1", "--seeds", "10"],
    ],
}


def _load_summaries(tag: str) -> list[dict]:
    """Read all cached summary rows for a sweep, generating them if absent."""
    root = ACCEPTANCE_DIR / tag
    paths = sorted(root.glob("*/summary.csv"))
    if not paths:
        for args in SWEEPS[tag]:
            assert cli_main(args + ["--out", str(root)]) == 0
        paths = sorted(root.glob("*/summary.csv"))
    rows = []
    for path in paths:
        with open(path) as fh:
            rows.extend(csv.DictReader(fh))
    assert rows, f"no summary rows under {root}"
    return rows


def _mean(rows, value, **filters):
    picked = [
        float(r[value])
        for r in rows
        if all(r.get(k) == v for k, v in filters.items())
    ]
    assert picked, f"no rows matching {filters}"
    return float(np.mean(picked)), len(picked)


class TestKernelExactness:
    def test_500_randomized_cases_match_dense_oracles(self):
        rng = random.Random(515151)
        np_rng = np.random.default_rng(515151)
        for case in range(500):
            n = rng.randint(1, 4)
            psi = random_state(np_rng, n)
            p = random_pauli(rng, n)
            np.testing.assert_allclose(
                apply_pauli(p, psi), dense_pauli(p.label) @ psi, atol=1e-10
            )
            theta = rng.uniform(-math.pi, math.pi)
            mat = dense_pauli(p.label)
            expected = (
                math.cos(theta) * np.eye(1 << n) - 1j * math.sin(theta) * mat
            ) @ psi
            np.testing.assert_allclose(
                apply_rotation(p, theta, psi), expected, atol=1e-10
            )
            h = random_sum(rng, n, rng.randint(1, 6))
            np.testing.assert_allclose(
                apply_sum(h, psi), dense_sum(h) @ psi, atol=1e-10
            )


class TestGeometryExactness:
    def test_matrices_match_finite_difference_oracles(self):
        rng = random.Random(626262)
        eps = 1e-5
        for case in range(20):
            n = rng.randint(2, 3)
            depth = rng.randint(2, 4)
            gens, angles = [], []
            while len(gens) < depth:
                p = random_pauli(rng, n)
                if p.weight:
                    gens.append(p)
                    angles.append(rng.uniform(-1.5, 1.5))
            ansatz = Ansatz(n, tuple(gens), np.array(angles))
            h = random_sum(rng, n, 4)
            if len(h) == 0:
                continue
            snap = geometry_snapshot(ansatz, h)

            fd = []
            for mu in range(depth):
                up, down = np.array(angles), np.array(angles)
                up[mu] += eps
                down[mu] -= eps
                fd.append(
                    (ansatz.with_angles(up).prepare()
                     - ansatz.with_angles(down).prepare()) / (2 * eps)
                )
            fd = np.array(fd)
            psi = ansatz.prepare()
            d = fd.conj() @ psi
            hpsi = dense_sum(h) @ psi
            energy = float(np.vdot(psi, hpsi).real)
            a_fd = 2.0 * (fd.conj() @ fd.T + np.outer(d, d)).real
            c_fd = 2.0 * (fd.conj() @ hpsi + np.conj(d) * energy).imag
            a_r_fd = (fd.conj() @ fd.T).real
            c_r_fd = (fd.conj() @ hpsi).real
            np.testing.assert_allclose(snap.a, a_fd, atol=1e-6)
            np.testing.assert_allclose(snap.c, c_fd, atol=1e-6)
            np.testing.assert_allclose(snap.a_r, a_r_fd, atol=1e-6)
            np.testing.assert_allclose(snap.c_r, c_r_fd, atol=1e-6)

    def test_analytic_rabi_case(self):
        ansatz = Ansatz(1, (PauliString.from_label("Z"),), np.array([0.3]))
        h = WeightedPauliSum.from_terms(1, [(1.0, PauliString.from_label("Z"))])
        a, c = realtime_geometry(ansatz, h)
        assert abs(a[0, 0] - 2.0) < 1e-12
        assert abs(c[0] - 2.0) < 1e-12
        theta_dot = solve_regularized(a, c, lam=0.0)
        assert abs(theta_dot[0] - 1.0) < 1e-12


class TestSuppressionLaw:
    def test_closed_form_matches_filter_oracle(self):
        rng = random.Random(737373)
        np_rng = np.random.default_rng(737373)
        checked = 0
        seed = 0
        while checked < 100:
            inst = sample_sk(4, seed)
            seed += 1
            s = rng.uniform(0.2, 0.8)
            h = build_h_ad(inst, s)
            vals = np.linalg.eigvalsh(dense_sum(h))
            if vals[1] - vals[0] < 1e-8:
                continue
            vecs = np.linalg.eigh(dense_sum(h))[1]
            psi = random_state(np_rng, 4)
            for tau in (0.0, 0.05, 0.5, 5.0):
                filtered = imaginary_filter_exact(h, psi, tau)
                oracle = abs(np.vdot(vecs[:, 0], filtered)) ** 2
                closed = ground_state_probability(h, psi, tau)
                assert abs(closed - oracle) < 1e-10
            checked += 1

    def test_two_level_closed_form_exact(self):
        gap = 1.3
        h = WeightedPauliSum.from_terms(
            1, [(gap / 2, PauliString.from_label("Z"))]
        )
        for tau in (0.0, 0.1, 1.0, 4.0):
            p = ground_state_probability(h, plus_state(1), tau)
            assert abs(p - 1.0 / (1.0 + math.exp(-2.0 * tau * gap))) < 1e-12


class TestGateAccounting:
    def test_trotter_cnot_identities(self):
        for n, total_time, dt in ((6, 1.0, 0.01), (10, 0.5, 0.01)):
            inst = sample_sk(n, 0)
            steps = round(total_time / dt)
            ad = run_trotter(inst, "AD", total_time, dt, compute_ratio=False)
            cd = run_trotter(inst, "CD", total_time, dt, compute_ratio=False)
            assert ad.tally.cnot_count == steps * n * (n - 1)
            assert cd.tally.cnot_count == 3 * ad.tally.cnot_count

    def test_filtering_adds_no_gates(self):
        inst = sample_sk(4, 0)
        cfg = RunConfig(n_qubits=4, total_time=1.0, eps_var=1e-4)
        res = run_havqds(inst, cfg)
        assert any(r.imag_steps > 0 for r in res.records)
        cnots = [r.cnot_total for r in res.records]
        assert cnots == sorted(cnots)
        assert res.ansatz.cnot_total() == cnots[-1]
        # Imaginary-time steps move angles only; the circuit never grows.
        h = build_h_ad(inst, 0.5)
        stepped = imaginary_time_step(res.ansatz, h, 0.05)
        assert stepped.generators == res.ansatz.generators
        assert stepped.cnot_total() == res.ansatz.cnot_total()


class TestTrotterConvergence:
    def test_fine_step_ad_matches_exact_evolution(self):
        inst = sample_sk(4, 0)
        total = 1.0
        res = run_trotter(inst, "AD", total, dt=1e-4, compute_ratio=False)
        exact = evolve_exact(
            lambda t: build_h_ad(inst, schedule_s(t, total)),
            plus_state(4), total, substep=1e-4,
        )
        fidelity = abs(np.vdot(exact, res.psi)) ** 2
        assert fidelity >= 1.0 - 1e-6


class TestDilemmaTrend:
    def test_cd_beats_ad_fast_and_gap_closes_slow(self):
        rows = _load_summaries("c6")
        cd_fast, n_cd = _mean(rows, "r_final", protocol="CD", T="1.0")
        ad_fast, n_ad = _mean(rows, "r_final", protocol="AD", T="1.0")
        cd_slow, _ = _mean(rows, "r_final", protocol="CD", T="10.0")
        ad_slow, _ = _mean(rows, "r_final", protocol="AD", T="10.0")
        assert n_cd == 10 and n_ad == 10
        assert cd_fast > ad_fast
        assert abs(cd_slow - ad_slow) < abs(cd_fast - ad_fast)


class TestHybridSuperiority:
    def test_hybrid_beats_trotter_cd_and_realtime_ablation(self):
        rows = _load_summaries("c7")
        for total_time in ("1.0", "5.0"):
            hybrid, n_h = _mean(rows, "r_final", method="havqds", T=total_time)
            ablated, n_a = _mean(rows, "r_final", method="avqds", T=total_time)
            trotter_cd, n_t = _mean(rows, "r_final", protocol="CD", T=total_time)
            assert n_h == 10 and n_a == 10 and n_t == 10
            assert hybrid > trotter_cd
            assert hybrid >= ablated


class TestResourceReduction:
    def test_order_of_magnitude_fewer_cnots_and_saturation(self):
        rows = _load_summaries("c8")
        hybrid_slow, n1 = _mean(rows, "cnot_total", method="havqds", T="10.0")
        hybrid_fast, n2 = _mean(rows, "cnot_total", method="havqds", T="2.0")
        trotter_cd, n3 = _mean(rows, "cnot_total", protocol="CD", T="10.0")
        assert n1 == 10 and n2 == 10 and n3 == 10
        assert hybrid_slow <= trotter_cd / 10.0
        assert hybrid_slow <= 2.0 * hybrid_fast


class TestScalingShape:
    def test_quadratic_fit_of_mean_cnots(self):
        rows = _load_summaries("c9")
        sizes = np.array([6, 8, 10, 12, 14], dtype=float)
        means = []
        for n in sizes:
            mean, count = _mean(
                rows, "cnot_total", method="havqds", n=str(int(n)), T="1.0"
            )
            assert count == 10
            means.append(mean)
        means = np.array(means)
        design = np.column_stack([sizes ** 2, sizes])
        coeffs, *_ = np.linalg.lstsq(design, means, rcond=None)
        a, b = map(float, coeffs)
        predicted = design @ coeffs
        ss_res = float(np.sum((means - predicted) ** 2))
        ss_tot = float(np.sum((means - np.mean(means)) ** 2))
        r_squared = 1.0 - ss_res / ss_tot
        assert 1.0 <= a <= 15.0, f"quadratic coefficient a={a}"
        assert r_squared >= 0.9, f"R^2={r_squared}"


class TestEnergyDescent:
    def test_filter_steps_never_raise_energy(self):
        rows = _load_summaries("c7")
        increases = [
            float(r["max_filter_energy_increase"])
            for r in rows
            if "max_filter_energy_increase" in r
        ]
        assert increases, "no hybrid summaries with filter statistics"
        assert max(increases) <= 1e-8
