"""Fast extremal spectrum of the interpolated Hamiltonian along a schedule.

H(s) = (1-s) H_driver + s H_problem has a diagonal problem part and an
X-flip driver part, so the matvec is O(n 2^n) without building matrices.
For n <= 8 a dense diagonalization per s is cheap enough; above that the
tracker runs Lanczos with the previous step's eigenvectors as warm starts,
which converges in a handful of iterations for slowly varying s.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .exact import DENSE_QUBIT_LIMIT
from .models import SkInstance, build_h_ad, pairs


class SpectralTracker:
    """Extremal eigenvalues of H_AD(s) for one instance, reusable across s."""

    def __init__(self, instance: SkInstance):
        self.instance = instance
        n = instance.n_qubits
        self.n = n
        self.dim = 1 << n
        self._dense = n <= DENSE_QUBIT_LIMIT
        if not self._dense:
            idx = np.arange(self.dim, dtype=np.uint64)
            z = 1.0 - 2.0 * (
                (idx[:, None] >> np.arange(n, dtype=np.uint64)[None, :])
                & np.uint64(1)
            ).astype(float)
            diag = -z @ instance.fields
            for i, j in pairs(n):
                diag -= instance.coupling(i, j) * z[:, i] * z[:, j]
            self._problem_diag = diag
            self._flip_perms = [idx ^ np.uint64(1 << q) for q in range(n)]
            self._v_min = None
            self._v_max = None

    def _matvec(self, s: float):
        def mv(v):
            out = (s * self._problem_diag) * v
            drive = np.zeros_like(v)
            for perm in self._flip_perms:
                drive += v[perm]
            return out - (1.0 - s) * drive

        return mv

    def extremes(self, s: float) -> tuple[float, float]:
        if self._dense:
            vals = np.linalg.eigvalsh(build_h_ad(self.instance, s).to_dense())
            return float(vals[0]), float(vals[-1])
        # H_AD is real symmetric in the computational basis; run real Lanczos.
        op = LinearOperator(
            (self.dim, self.dim), matvec=self._matvec(s), dtype=np.float64
        )
        lo, lo_vec = eigsh(op, k=1, which="SA", tol=1e-10, v0=self._v_min)
        hi, hi_vec = eigsh(op, k=1, which="LA", tol=1e-10, v0=self._v_max)
        self._v_min = lo_vec[:, 0]
        self._v_max = hi_vec[:, 0]
        return float(lo[0]), float(hi[0])
