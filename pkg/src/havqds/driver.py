"""Hybrid real/imaginary-time adaptive variational main loop and its ablation.

One run alternates: grow the ansatz until the McLachlan distance is under
threshold, take a real-time Euler step under H_AD(s(t)), then - if the
instantaneous energy variance exceeds the trigger - run imaginary-time
filtering steps until the variance is back under threshold or the per-block
cap is hit.  Each filter step follows the natural-gradient direction with a
backtracked step size so the energy never increases.  The CD term is never
built; the pool merely contains its operators.  Filtering re-optimizes
existing angles, so it adds no gates.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .models import SkInstance, build_h_ad, build_pool, schedule_s
from .pauli import apply_sum, expectation, variance
from .spectra import SpectralTracker
from .variational import (
    DEFAULT_ANSATZ_CAP,
    DEFAULT_TIKHONOV,
    Ansatz,
    adaptive_expand,
    geometry_snapshot,
    minimized_distance_squared,
    real_time_step,
    solve_regularized,
)


@dataclass(frozen=True)
class RunConfig:
    n_qubits: int
    total_time: float
    dt: float = 0.01
    dtau: float = 0.05
    delta_cut: float = 0.05
    eps_var: float = 0.05
    k_max: int = 11
    lam: float = DEFAULT_TIKHONOV
    seed: int = 0
    ansatz_cap: int = DEFAULT_ANSATZ_CAP
    compute_ratio: bool = True

    def __post_init__(self):
        if min(self.total_time, self.dt, self.dtau, self.delta_cut,
               self.eps_var, self.lam) <= 0:
            raise ValueError("all config scales must be positive")
        if self.k_max < 0:
            raise ValueError("k_max must be nonnegative")
        if self.n_qubits < 2:
            raise ValueError("n_qubits must be at least 2")


@dataclass
class TrajectoryRecord:
    step: int
    t: float
    s: float
    energy: float
    variance: float
    ratio: float
    ansatz_size: int
    cnot_total: int
    imag_steps: int


@dataclass
class RunResult:
    ansatz: Ansatz
    records: list[TrajectoryRecord] = field(default_factory=list)
    degraded: bool = False
    max_filter_energy_increase: float = 0.0

    @property
    def final_energy(self) -> float:
        return self.records[-1].energy

    @property
    def final_ratio(self) -> float:
        return self.records[-1].ratio


def run_havqds(instance: SkInstance, config: RunConfig) -> RunResult:
    """Hybrid loop: adaptive real-time evolution with variance-gated filtering."""
    return _run(instance, config, config.k_max)


def run_avqds_only(instance: SkInstance, config: RunConfig) -> RunResult:
    """Ablation: identical loop with the imaginary-time block disabled."""
    return _run(instance, config, 0)


def _run(instance: SkInstance, config: RunConfig, k_max: int) -> RunResult:
    if instance.n_qubits != config.n_qubits:
        raise ValueError("instance and config qubit counts differ")
    n = config.n_qubits
    total_time = config.total_time
    pool = build_pool(n)
    tracker = SpectralTracker(instance) if config.compute_ratio else None
    ansatz = Ansatz.empty(n)
    result = RunResult(ansatz)

    psi0 = ansatz.prepare()
    h0 = build_h_ad(instance, 0.0)
    result.records.append(
        _trajectory_record(0, 0.0, 0.0, h0, psi0, ansatz, 0, tracker)
    )

    t = 0.0
    step = 0
    while t < total_time - 1e-12:
        s = schedule_s(t, total_time)
        h = build_h_ad(instance, s)
        snap = geometry_snapshot(ansatz, h)
        delta_sq, _ = minimized_distance_squared(snap, config.lam)
        if math.sqrt(delta_sq) > config.delta_cut:
            ansatz, snap, report = adaptive_expand(
                ansatz, h, pool, config.delta_cut, config.lam,
                config.ansatz_cap, snapshot=snap,
            )
            result.degraded = result.degraded or report.degraded
        ansatz = real_time_step(ansatz, h, config.dt, config.lam, snapshot=snap)

        t = min(t + config.dt, total_time)
        step += 1
        s_new = schedule_s(t, total_time)
        h_new = build_h_ad(instance, s_new)

        imag_steps = 0
        if t < total_time - 1e-12 and k_max > 0:
            psi = ansatz.prepare()
            var = variance(h_new, psi)
            prev_energy = expectation(h_new, psi)
            while var > config.eps_var and imag_steps < k_max:
                # Natural-gradient direction, then a backtracked Euler step:
                # the full dtau overshoots when A_R is near singular, so the
                # substep halves until the energy stops increasing.
                snap_f = geometry_snapshot(ansatz, h_new)
                theta_dot = -solve_regularized(snap_f.a_r, snap_f.c_r, config.lam)
                sub = config.dtau
                candidate = ansatz.with_angles(ansatz.angles + sub * theta_dot)
                psi = candidate.prepare()
                energy = expectation(h_new, psi)
                while energy > prev_energy and sub > config.dtau * 2.0 ** -40:
                    sub *= 0.5
                    candidate = ansatz.with_angles(ansatz.angles + sub * theta_dot)
                    psi = candidate.prepare()
                    energy = expectation(h_new, psi)
                if energy > prev_energy:
                    break  # descent direction numerically flat
                ansatz = candidate
                imag_steps += 1
                var = variance(h_new, psi)
                result.max_filter_energy_increase = max(
                    result.max_filter_energy_increase, energy - prev_energy
                )
                prev_energy = energy

        psi = ansatz.prepare()
        record = _trajectory_record(
            step, t, s_new, h_new, psi, ansatz, imag_steps, tracker
        )
        if not math.isfinite(record.energy):
            raise RuntimeError("non-finite energy; run aborted")
        result.records.append(record)
    result.ansatz = ansatz
    return result


def _trajectory_record(step, t, s, h, psi, ansatz, imag_steps, tracker):
    hpsi = apply_sum(h, psi)
    energy = float(np.vdot(psi, hpsi).real)
    var = max(float(np.vdot(hpsi, hpsi).real - energy ** 2), 0.0)
    ratio = math.nan
    if tracker is not None:
        lo, hi = tracker.extremes(s)
        ratio = (hi - energy) / (hi - lo)
    return TrajectoryRecord(
        step, t, s, energy, var, ratio, len(ansatz), ansatz.cnot_total(), imag_steps
    )


STATE_DUMP_MAGIC = b"HVQS"


def dump_statevector(path, psi: np.ndarray, n_qubits: int):
    """Binary amplitude dump.

    Header: magic ``HVQS``, uint32 format version (1), uint32 n_qubits, all
    little-endian; then 2^n (real, imag) float64 pairs in basis order.
    """
    with open(path, "wb") as fh:
        fh.write(STATE_DUMP_MAGIC)
        fh.write(struct.pack("<II", 1, n_qubits))
        interleaved = np.empty(2 * len(psi))
        interleaved[0::2] = psi.real
        interleaved[1::2] = psi.imag
        fh.write(interleaved.astype("<f8").tobytes())


def load_statevector(path) -> tuple[np.ndarray, int]:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != STATE_DUMP_MAGIC:
            raise ValueError("not a statevector dump")
        version, n_qubits = struct.unpack("<II", fh.read(8))
        if version != 1:
            raise ValueError(f"unsupported dump version {version}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    psi = data[0::2] + 1j * data[1::2]
    if len(psi) != 1 << n_qubits:
        raise ValueError("dump length does not match header")
    return psi, n_qubits
