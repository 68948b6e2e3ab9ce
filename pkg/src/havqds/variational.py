"""McLachlan variational machinery.

Derivative states, the real-time (A, C) and imaginary-time (A_R, C_R)
geometry, the McLachlan distance, regularized solves, greedy adaptive ansatz
growth, and single Euler steps in real and imaginary time.

The ansatz is a product of Pauli rotations applied in list order to the
reference state |+>^n:

    |psi(theta)> = e^{-i theta_N P_N} ... e^{-i theta_1 P_1} |+>^n

so derivative mu is the same circuit with -i P_mu inserted after rotation mu.
One forward pass propagates all derivative rows together, which keeps the
cost at O(N) kernel applications per derivative and lets the Gram products
run through BLAS.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .models import OperatorPool
from .pauli import (
    PauliString,
    WeightedPauliSum,
    apply_pauli,
    apply_rotation,
    apply_sum,
    cnot_cost,
    plus_state,
    rotate_rows_inplace,
)

DEFAULT_TIKHONOV = 1e-6
EXPANSION_IMPROVEMENT_TOL = 1e-12
DEFAULT_ANSATZ_CAP = 500


@dataclass(frozen=True)
class Ansatz:
    """Ordered Pauli rotations with angles, on the |+>^n reference."""

    n_qubits: int
    generators: tuple[PauliString, ...]
    angles: np.ndarray

    def __post_init__(self):
        if len(self.generators) != len(self.angles):
            raise ValueError("generator and angle counts differ")

    @classmethod
    def empty(cls, n_qubits: int) -> "Ansatz":
        return cls(n_qubits, (), np.zeros(0))

    def __len__(self):
        return len(self.generators)

    def prepare(self) -> np.ndarray:
        psi = plus_state(self.n_qubits)
        for p, theta in zip(self.generators, self.angles):
            psi = apply_rotation(p, float(theta), psi)
        return psi

    def cnot_total(self) -> int:
        """CNOTs of the circuit realizing the ansatz, one rotation per generator."""
        return sum(cnot_cost(p) for p in self.generators)

    def with_angles(self, angles: np.ndarray) -> "Ansatz":
        return Ansatz(self.n_qubits, self.generators, np.asarray(angles, float))

    def extended(self, generator: PauliString) -> "Ansatz":
        """Append a zero-angle rotation; leaves the prepared state unchanged."""
        return Ansatz(
            self.n_qubits,
            self.generators + (generator,),
            np.append(self.angles, 0.0),
        )

    def to_json(self) -> str:
        return json.dumps(
            [[p.label, float(a)] for p, a in zip(self.generators, self.angles)]
        )

    @classmethod
    def from_json(cls, text: str, n_qubits: int) -> "Ansatz":
        entries = json.loads(text)
        gens = tuple(PauliString.from_label(lbl) for lbl, _ in entries)
        return cls(n_qubits, gens, np.array([a for _, a in entries], float))


def derivative_states(ansatz: Ansatz) -> tuple[np.ndarray, np.ndarray]:
    """All |d psi / d theta_mu> as rows, plus the prepared state.

    Row mu is built as: rotations 1..mu applied to the reference, then
    -i P_mu (which commutes with rotation mu), then rotations mu+1..N.
    The batch of finished rows rides along through the remaining rotations.
    """
    n = ansatz.n_qubits
    dim = 1 << n
    count = len(ansatz)
    psi = plus_state(n)
    rows = np.zeros((count, dim), dtype=np.complex128)
    for mu, (p, theta) in enumerate(zip(ansatz.generators, ansatz.angles)):
        theta = float(theta)
        if mu:
            rotate_rows_inplace(rows[:mu], p, theta)
        psi = apply_rotation(p, theta, psi)
        rows[mu] = -1j * apply_pauli(p, psi)
    return rows, psi


@dataclass
class GeometrySnapshot:
    """Real/imaginary-time geometry of one (ansatz, H) configuration.

    A and A_R are symmetric by construction; A_R is the real part of the
    Gram matrix of the derivative states (positive semidefinite).
    """

    a: np.ndarray
    c: np.ndarray
    a_r: np.ndarray
    c_r: np.ndarray
    energy: float
    variance: float
    psi: np.ndarray = field(repr=False)
    hpsi: np.ndarray = field(repr=False)
    deriv: np.ndarray = field(repr=False)
    overlaps: np.ndarray = field(repr=False)  # <d_mu psi | psi>


def geometry_snapshot(ansatz: Ansatz, h: WeightedPauliSum) -> GeometrySnapshot:
    rows, psi = derivative_states(ansatz)
    hpsi = apply_sum(h, psi)
    energy = float(np.vdot(psi, hpsi).real)
    var = float(np.vdot(hpsi, hpsi).real - energy ** 2)
    var = max(var, 0.0)
    gram = rows.conj() @ rows.T
    d = rows.conj() @ psi
    hvec = rows.conj() @ hpsi
    a = 2.0 * (gram + np.outer(d, d)).real
    a = 0.5 * (a + a.T)
    c = 2.0 * (hvec + np.conj(d) * energy).imag
    a_r = gram.real.copy()
    a_r = 0.5 * (a_r + a_r.T)
    c_r = hvec.real.copy()
    return GeometrySnapshot(a, c, a_r, c_r, energy, var, psi, hpsi, rows, d)


def realtime_geometry(ansatz: Ansatz, h: WeightedPauliSum):
    """A_{mn} = 2Re[<d_m|d_n> + <d_m|psi><d_n|psi>], C_m = 2Im[<d_m|H|psi> + <psi|d_m><H>]."""
    snap = geometry_snapshot(ansatz, h)
    return snap.a, snap.c


def imagtime_geometry(ansatz: Ansatz, h: WeightedPauliSum):
    """(A_R)_{ij} = Re<d_i|d_j>, (C_R)_i = Re<d_i|H|psi> (no phase terms)."""
    snap = geometry_snapshot(ansatz, h)
    return snap.a_r, snap.c_r


def solve_regularized(
    m: np.ndarray, b: np.ndarray, lam: float = DEFAULT_TIKHONOV
) -> np.ndarray:
    """Tikhonov solve (M + lam I) x = b for symmetric PSD M."""
    if m.shape[0] != len(b):
        raise ValueError("dimension mismatch")
    if len(b) == 0:
        return np.zeros(0)
    x = np.linalg.solve(m + lam * np.eye(len(b)), b)
    if not np.all(np.isfinite(x)):
        raise RuntimeError("regularized solve produced non-finite entries")
    return x


def mclachlan_distance_squared(
    snap: GeometrySnapshot, theta_dot: np.ndarray
) -> float:
    """Delta^2 = thetadot^T A thetadot - 2 thetadot . C + 2 Var(H), clamped at 0."""
    val = (
        float(theta_dot @ snap.a @ theta_dot)
        - 2.0 * float(theta_dot @ snap.c)
        + 2.0 * snap.variance
    )
    if val < -1e-10:
        raise ValueError(f"McLachlan distance^2 {val:.3e} below clamp tolerance")
    return max(val, 0.0)


def mclachlan_distance(
    ansatz: Ansatz, h: WeightedPauliSum, theta_dot: np.ndarray
) -> float:
    if len(theta_dot) != len(ansatz):
        raise ValueError("theta_dot length does not match ansatz")
    return math.sqrt(
        mclachlan_distance_squared(geometry_snapshot(ansatz, h), theta_dot)
    )


def minimized_distance_squared(
    snap: GeometrySnapshot, lam: float = DEFAULT_TIKHONOV
) -> tuple[float, np.ndarray]:
    theta_dot = solve_regularized(snap.a, snap.c, lam)
    return mclachlan_distance_squared(snap, theta_dot), theta_dot


@dataclass
class ExpansionReport:
    added: list[PauliString]
    delta: float
    degraded: bool


def _bordered_distance_squared(chol, a, c, col, diag, rhs, var, lam):
    """Minimized Delta^2 after bordering (A, C) with one candidate row.

    Uses the Schur complement against the cached Cholesky factor of
    A + lam I, so each candidate costs O(N^2).
    """
    u = cho_solve(chol, col)
    w = cho_solve(chol, c)
    schur = diag + lam - float(col @ u)
    schur = max(schur, 1e-14)
    y = (rhs - float(col @ w)) / schur
    x = w - y * u
    ax = a @ x + col * y
    an = float(col @ x) + diag * y
    quad = float(x @ ax) + y * an
    lin = float(x @ c) + y * rhs
    return max(quad - 2.0 * lin + 2.0 * var, 0.0)


def adaptive_expand(
    ansatz: Ansatz,
    h: WeightedPauliSum,
    pool: OperatorPool,
    delta_cut: float,
    lam: float = DEFAULT_TIKHONOV,
    cap: int = DEFAULT_ANSATZ_CAP,
    snapshot: GeometrySnapshot | None = None,
) -> tuple[Ansatz, GeometrySnapshot, ExpansionReport]:
    """Greedily append zero-angle pool operators until Delta <= delta_cut.

    Each round scores every pool operator (except the current last generator)
    by the minimized McLachlan distance it would give, appending the best;
    ties break by pool order.  Stops when Delta <= delta_cut, when no
    candidate improves Delta^2 by more than 1e-12, or at the size cap (the
    last case sets the degraded flag).  Appended angles are zero, so the
    prepared state never changes during expansion.
    """
    if delta_cut <= 0:
        raise ValueError("delta_cut must be positive")
    snap = snapshot if snapshot is not None else geometry_snapshot(ansatz, h)
    best_sq, _ = minimized_distance_squared(snap, lam)
    added: list[PauliString] = []
    degraded = False

    # Candidate derivative rows are -i P |psi>; |psi> is constant throughout.
    pool_rows = None

    while math.sqrt(best_sq) > delta_cut:
        if len(ansatz) >= cap:
            degraded = True
            break
        if pool_rows is None:
            pool_rows = np.stack(
                [-1j * apply_pauli(p, snap.psi) for p in pool.operators]
            )
            pool_d = pool_rows.conj() @ snap.psi
            pool_h = pool_rows.conj() @ snap.hpsi
            pool_diag = 2.0 * (1.0 + pool_d ** 2).real
            pool_rhs = 2.0 * (pool_h + np.conj(pool_d) * snap.energy).imag
        # Cross overlaps of existing derivative rows with every candidate.
        cross = snap.deriv.conj() @ pool_rows.T
        chol = (
            cho_factor(snap.a + lam * np.eye(len(ansatz)), lower=True)
            if len(ansatz)
            else None
        )
        last = ansatz.generators[-1] if len(ansatz) else None
        best_candidate = None
        best_candidate_sq = None
        for k, p in enumerate(pool.operators):
            if last is not None and p == last:
                continue
            col = 2.0 * (cross[:, k] + snap.overlaps * pool_d[k]).real
            if chol is None:
                y = float(pool_rhs[k]) / (float(pool_diag[k]) + lam)
                sq = max(
                    float(pool_diag[k]) * y * y
                    - 2.0 * y * float(pool_rhs[k])
                    + 2.0 * snap.variance,
                    0.0,
                )
            else:
                sq = _bordered_distance_squared(
                    chol,
                    snap.a,
                    snap.c,
                    col,
                    float(pool_diag[k]),
                    float(pool_rhs[k]),
                    snap.variance,
                    lam,
                )
            if best_candidate_sq is None or sq < best_candidate_sq:
                best_candidate, best_candidate_sq = k, sq
        if best_candidate is None or best_sq - best_candidate_sq <= EXPANSION_IMPROVEMENT_TOL:
            break
        k = best_candidate
        p = pool.operators[k]
        ansatz = ansatz.extended(p)
        added.append(p)
        # Incremental snapshot update: the new zero-angle rotation is the
        # identity, so existing rows and the state are unchanged.
        col = 2.0 * (cross[:, k] + snap.overlaps * pool_d[k]).real
        a = np.block(
            [[snap.a, col[:, None]], [col[None, :], np.array([[pool_diag[k]]])]]
        )
        c = np.append(snap.c, pool_rhs[k])
        gram_col = cross[:, k] if len(snap.deriv) else np.zeros(0, complex)
        a_r = np.block(
            [
                [snap.a_r, gram_col.real[:, None]],
                [gram_col.real[None, :], np.array([[1.0]])],
            ]
        )
        c_r = np.append(snap.c_r, pool_h[k].real)
        snap = GeometrySnapshot(
            a,
            c,
            0.5 * (a_r + a_r.T),
            c_r,
            snap.energy,
            snap.variance,
            snap.psi,
            snap.hpsi,
            np.vstack([snap.deriv, pool_rows[k][None, :]]),
            np.append(snap.overlaps, pool_d[k]),
        )
        best_sq, _ = minimized_distance_squared(snap, lam)

    return ansatz, snap, ExpansionReport(added, math.sqrt(best_sq), degraded)


def real_time_step(
    ansatz: Ansatz,
    h: WeightedPauliSum,
    dt: float,
    lam: float = DEFAULT_TIKHONOV,
    snapshot: GeometrySnapshot | None = None,
) -> Ansatz:
    """Euler update theta <- theta + A^{-1} C dt (regularized solve)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    snap = snapshot if snapshot is not None else geometry_snapshot(ansatz, h)
    theta_dot = solve_regularized(snap.a, snap.c, lam)
    return ansatz.with_angles(ansatz.angles + dt * theta_dot)


def imaginary_time_step(
    ansatz: Ansatz,
    h: WeightedPauliSum,
    dtau: float,
    lam: float = DEFAULT_TIKHONOV,
    snapshot: GeometrySnapshot | None = None,
) -> Ansatz:
    """Euler update theta <- theta - (A_R)^{-1} C_R dtau (natural gradient)."""
    if dtau <= 0:
        raise ValueError("dtau must be positive")
    snap = snapshot if snapshot is not None else geometry_snapshot(ansatz, h)
    theta_dot = -solve_regularized(snap.a_r, snap.c_r, lam)
    return ansatz.with_angles(ansatz.angles + dtau * theta_dot)
