"""Ground-truth machinery: exact evolution, spectra, imaginary-time filtering.

Everything variational or Trotterized in this package is judged against the
functions here.  Dense paths are used up to n = 8; beyond that the extremal
eigenvalues come from Lanczos iteration on the matrix-free Pauli kernels and
the imaginary-time filter from RK4 integration of the normalized flow.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .pauli import WeightedPauliSum, apply_sum, check_norm

DENSE_QUBIT_LIMIT = 8


def evolve_exact(
    h_of_t: Callable[[float], WeightedPauliSum],
    psi0: np.ndarray,
    total_time: float,
    substep: float | None = None,
) -> np.ndarray:
    """Integrate i d|psi>/dt = H(t)|psi> with classic RK4.

    Default substep is T/10^4.  Convergence contract: halving the substep
    changes the final state by < 1e-8 in norm.  Per-step norm drift above
    1e-6 aborts (integrator failure); smaller drift is renormalized away.
    """
    if total_time == 0.0:
        return psi0.copy()
    if substep is None:
        substep = total_time / 1e4
    if substep <= 0:
        raise ValueError("substep must be positive")
    psi = check_norm(psi0).astype(np.complex128, copy=True)

    def rhs(t, y):
        return -1j * apply_sum(h_of_t(t), y)

    t = 0.0
    while t < total_time - 1e-15:
        h = min(substep, total_time - t)
        k1 = rhs(t, psi)
        k2 = rhs(t + h / 2, psi + (h / 2) * k1)
        k3 = rhs(t + h / 2, psi + (h / 2) * k2)
        k4 = rhs(t + h, psi + h * k3)
        psi = psi + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > 1e-6:
            raise RuntimeError(f"integrator norm drift {abs(norm - 1.0):.3e}")
        psi /= norm
        t += h
    return psi


def extremal_eigenvalues(
    h: WeightedPauliSum,
    v0_min: np.ndarray | None = None,
    v0_max: np.ndarray | None = None,
    return_vectors: bool = False,
    force_lanczos: bool = False,
):
    """(E_min, E_max) of H; dense for n <= 8, matrix-free Lanczos above.

    Optional v0 vectors warm-start the Lanczos iterations (useful when
    scanning a slowly varying H along the schedule).  `force_lanczos`
    exercises the iterative path at small n for validation.
    """
    n = h.n_qubits
    if n > 20:
        raise ValueError("dimension bound exceeded (n <= 20)")
    dim = 1 << n
    if n <= DENSE_QUBIT_LIMIT and not force_lanczos:
        vals = np.linalg.eigvalsh(h.to_dense())
        lo, hi = float(vals[0]), float(vals[-1])
        if return_vectors:
            return lo, hi, None, None
        return lo, hi

    op = LinearOperator(
        (dim, dim), matvec=lambda v: apply_sum(h, v), dtype=np.complex128
    )
    try:
        lo_val, lo_vec = eigsh(op, k=1, which="SA", tol=1e-10, v0=v0_min,
                               maxiter=10000)
        hi_val, hi_vec = eigsh(op, k=1, which="LA", tol=1e-10, v0=v0_max,
                               maxiter=10000)
    except Exception as exc:  # pragma: no cover - non-convergence report
        raise RuntimeError(f"Lanczos failed to converge: {exc}") from exc
    lo, hi = float(lo_val[0]), float(hi_val[0])
    if return_vectors:
        return lo, hi, lo_vec[:, 0], hi_vec[:, 0]
    return lo, hi


def approximation_ratio(
    h: WeightedPauliSum,
    psi: np.ndarray,
    extremes: tuple[float, float] | None = None,
) -> float:
    """r = (E_max - <H>) / (E_max - E_min); 1 at the ground state.

    Precomputed (E_min, E_max) can be passed to avoid rediagonalizing when
    many states are scored against the same H.
    """
    from .pauli import expectation

    e_min, e_max = extremes if extremes is not None else extremal_eigenvalues(h)
    width = e_max - e_min
    if width < 1e-12:
        raise ValueError("degenerate total spectrum: E_max - E_min below 1e-12")
    return (e_max - expectation(h, psi)) / width


def low_spectrum(h: WeightedPauliSum, k: int = 5) -> np.ndarray:
    """Lowest k eigenvalues via dense diagonalization (n <= 8 path).

    Levels are of the bare interpolated Hamiltonian (no CD term); noted in
    run metadata by the CLI.
    """
    if h.n_qubits > DENSE_QUBIT_LIMIT:
        raise ValueError("dense spectrum limited to n <= 8")
    vals = np.linalg.eigvalsh(h.to_dense())
    return vals[:k]


def imaginary_filter_exact(
    h: WeightedPauliSum,
    psi: np.ndarray,
    tau: float,
    substep: float = 1e-3,
    force_integration: bool = False,
) -> np.ndarray:
    """Normalized e^{-tau H}|psi>.

    Dense eigendecomposition up to n = 8; otherwise RK4 on the normalized
    imaginary-time flow d|psi>/dtau = -(H - <H>)|psi>.  `force_integration`
    exercises the RK4 path at small n for validation.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if tau == 0.0:
        return psi.copy()
    if h.n_qubits <= DENSE_QUBIT_LIMIT and not force_integration:
        vals, vecs = np.linalg.eigh(h.to_dense())
        coeffs = vecs.conj().T @ psi
        # Shift by E_min before exponentiating to avoid overflow at large tau.
        coeffs = coeffs * np.exp(-tau * (vals - vals[0]))
        out = vecs @ coeffs
        return out / np.linalg.norm(out)

    from .pauli import expectation

    steps = max(1, int(math.ceil(tau / substep)))
    h_step = tau / steps
    out = psi.astype(np.complex128, copy=True)

    def rhs(y):
        y = y / np.linalg.norm(y)
        hy = apply_sum(h, y)
        return -(hy - np.vdot(y, hy).real * y)

    for _ in range(steps):
        k1 = rhs(out)
        k2 = rhs(out + (h_step / 2) * k1)
        k3 = rhs(out + (h_step / 2) * k2)
        k4 = rhs(out + h_step * k3)
        out = out + (h_step / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        out /= np.linalg.norm(out)
    return out


def ground_state_probability(
    h: WeightedPauliSum,
    psi: np.ndarray,
    tau: float,
    degeneracy_tol: float = 1e-10,
    return_degenerate_flag: bool = False,
):
    """Ground-state weight of the filtered state, from the closed form.

    For tau = 0 this is the bare overlap p = |<psi_0|psi>|^2; for tau > 0 it
    is p' = 1 / (1 + sum_{i>0} (|a_i|^2/|a_0|^2) e^{-2 tau Delta_i0}) computed
    from the full eigendecomposition (n <= 8).  A ground space degenerate
    within `degeneracy_tol` is handled by projecting onto the full subspace.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if h.n_qubits > DENSE_QUBIT_LIMIT:
        raise ValueError("closed-form probability needs the dense path (n <= 8)")
    vals, vecs = np.linalg.eigh(h.to_dense())
    weights = np.abs(vecs.conj().T @ psi) ** 2
    ground = vals - vals[0] <= degeneracy_tol
    degenerate = int(np.sum(ground)) > 1
    w0 = float(np.sum(weights[ground]))
    if w0 < 1e-14:
        raise ValueError("state orthogonal to the ground space; filter undefined")
    gaps = vals[~ground] - vals[0]
    ratio_sum = float(np.sum((weights[~ground] / w0) * np.exp(-2.0 * tau * gaps)))
    p = 1.0 / (1.0 + ratio_sum)
    if return_degenerate_flag:
        return p, degenerate
    return p
