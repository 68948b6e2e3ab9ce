"""First-order Trotterized adiabatic (AD) and counterdiabatic (CD) baselines.

Per step k at time t_k = k*dt the circuit applies, in fixed order, all driver
rotations, all problem rotations, and (for CD) the first-order CD rotations,
each with angle coefficient*dt evaluated at the step's start time.  CNOTs are
tallied per applied rotation via the ladder decomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .models import (
    SkInstance,
    build_h_ad,
    cd_alpha1,
    pairs,
    schedule_s,
    schedule_sdot,
)
from .pauli import PauliString, apply_rotation, cnot_cost, expectation, plus_state
from .spectra import SpectralTracker

PROTOCOLS = ("AD", "CD")
DEFAULT_DT = 0.01


@dataclass
class GateTally:
    cnot_count: int = 0
    single_qubit_rotations: int = 0
    two_qubit_rotations: int = 0
    steps: int = 0

    def add_rotation(self, p: PauliString):
        if p.weight >= 2:
            self.two_qubit_rotations += 1
        else:
            self.single_qubit_rotations += 1
        self.cnot_count += cnot_cost(p)


@dataclass
class TrotterStepRecord:
    step: int
    s: float
    energy: float
    ratio: float
    cnot_cumulative: int


@dataclass
class TrotterResult:
    psi: np.ndarray
    tally: GateTally
    records: list[TrotterStepRecord] = field(default_factory=list)


def run_trotter(
    instance: SkInstance,
    protocol: str,
    total_time: float,
    dt: float = DEFAULT_DT,
    compute_ratio: bool = True,
    midpoint_cd: bool = False,
) -> TrotterResult:
    """Evolve |+>^n through the Trotterized protocol and log the trajectory.

    `midpoint_cd` is an ablation flag: evaluate the CD coefficient at the
    step midpoint instead of the left endpoint.
    """
    if protocol not in PROTOCOLS:
        raise ValueError(f"protocol must be one of {PROTOCOLS}")
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = instance.n_qubits
    psi = plus_state(n)
    tally = GateTally()
    tracker = SpectralTracker(instance) if compute_ratio else None

    x_ops = [PauliString.single(n, i, "X") for i in range(n)]
    zz_ops = {(i, j): PauliString.two(n, i, "Z", j, "Z") for i, j in pairs(n)}
    if protocol == "CD":
        y_ops = [PauliString.single(n, i, "Y") for i in range(n)]
        yz_ops = {(i, j): PauliString.two(n, i, "Y", j, "Z") for i, j in pairs(n)}
        zy_ops = {(i, j): PauliString.two(n, i, "Z", j, "Y") for i, j in pairs(n)}
    has_fields = bool(np.any(instance.fields != 0.0))

    records = [_record(instance, 0, 0.0, psi, tally, tracker)]
    t = 0.0
    step = 0
    while t < total_time - 1e-12:
        step_dt = min(dt, total_time - t)
        s = schedule_s(t, total_time)
        # Driver rotations: term -(1-s) X_i.
        for p in x_ops:
            psi = apply_rotation(p, -(1.0 - s) * step_dt, psi)
            tally.add_rotation(p)
        # Problem rotations: term -s J_ij Z_i Z_j (and -s h_i Z_i if fields set).
        for (i, j), p in zz_ops.items():
            psi = apply_rotation(p, -s * instance.coupling(i, j) * step_dt, psi)
            tally.add_rotation(p)
        if has_fields:
            for i in range(n):
                zp = PauliString.single(n, i, "Z")
                psi = apply_rotation(zp, -s * float(instance.fields[i]) * step_dt, psi)
                tally.add_rotation(zp)
        if protocol == "CD":
            t_cd = t + step_dt / 2 if midpoint_cd else t
            pref = 2.0 * schedule_sdot(t_cd, total_time) * cd_alpha1(
                instance, schedule_s(t_cd, total_time)
            )
            if has_fields:
                for i, p in enumerate(y_ops):
                    psi = apply_rotation(
                        p, pref * float(instance.fields[i]) * step_dt, psi
                    )
                    tally.add_rotation(p)
            for (i, j) in yz_ops:
                jij = instance.coupling(i, j)
                psi = apply_rotation(yz_ops[(i, j)], pref * jij * step_dt, psi)
                tally.add_rotation(yz_ops[(i, j)])
                psi = apply_rotation(zy_ops[(i, j)], pref * jij * step_dt, psi)
                tally.add_rotation(zy_ops[(i, j)])
        t += step_dt
        step += 1
        tally.steps = step
        records.append(
            _record(instance, step, schedule_s(min(t, total_time), total_time),
                    psi, tally, tracker)
        )
    return TrotterResult(psi, tally, records)


def _record(instance, step, s, psi, tally, tracker):
    h = build_h_ad(instance, s)
    energy = expectation(h, psi)
    ratio = math.nan
    if tracker is not None:
        lo, hi = tracker.extremes(s)
        ratio = (hi - energy) / (hi - lo)
    return TrotterStepRecord(step, s, energy, ratio, tally.cnot_count)


@dataclass
class SweepRow:
    protocol: str
    n: int
    total_time: float
    seed: int
    r_final: float
    cnot_total: int


def dilemma_sweep(
    instances: list[SkInstance],
    t_grid: list[float],
    protocols: tuple[str, ...] = PROTOCOLS,
    dt: float = DEFAULT_DT,
) -> list[SweepRow]:
    """Final approximation ratio per (instance, protocol, T)."""
    if not instances or not t_grid:
        raise ValueError("instance set and T grid must be nonempty")
    rows = []
    for protocol in protocols:
        for total_time in t_grid:
            for instance in instances:
                result = run_trotter(instance, protocol, total_time, dt)
                rows.append(
                    SweepRow(
                        protocol,
                        instance.n_qubits,
                        total_time,
                        instance.seed,
                        result.records[-1].ratio,
                        result.tally.cnot_count,
                    )
                )
    return rows
