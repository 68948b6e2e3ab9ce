"""n-qubit Pauli-string algebra and statevector kernels.

A Pauli string is stored symplectically as two bitmasks: bit i of ``x_mask``
is set iff the factor on qubit i is X or Y, bit i of ``z_mask`` iff it is
Z or Y.  The phase factor carried by Y (one i per Y) is applied inside the
kernels, so every string represented here is exactly Hermitian and every
Hamiltonian is a real-weighted sum of strings.

Statevectors are plain complex ndarrays of length 2**n in the computational
basis with qubit 0 as the least-significant bit of the index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is an optional accelerator
    _njit = None

# Norm drift larger than this indicates a kernel bug, not float noise.
NORM_DRIFT_LIMIT = 1e-8

_PAULI_CHARS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_CHAR_OF = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


@dataclass(frozen=True)
class PauliString:
    """Tensor product of I/X/Y/Z factors in symplectic mask encoding."""

    n_qubits: int
    x_mask: int
    z_mask: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        full = (1 << self.n_qubits) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask has bits at positions >= n_qubits")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse a dense label like ``"XIZY"``; character k acts on qubit k."""
        x = z = 0
        for q, ch in enumerate(label):
            try:
                xb, zb = _PAULI_CHARS[ch]
            except KeyError:
                raise ValueError(f"unknown Pauli character {ch!r}") from None
            x |= xb << q
            z |= zb << q
        return cls(len(label), x, z)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, kind: str) -> "PauliString":
        xb, zb = _PAULI_CHARS[kind]
        if not 0 <= qubit < n_qubits:
            raise ValueError("qubit index out of range")
        return cls(n_qubits, xb << qubit, zb << qubit)

    @classmethod
    def two(cls, n_qubits: int, qi: int, ki: str, qj: int, kj: str) -> "PauliString":
        if qi == qj:
            raise ValueError("two-qubit factors must act on distinct qubits")
        xi, zi = _PAULI_CHARS[ki]
        xj, zj = _PAULI_CHARS[kj]
        return cls(n_qubits, (xi << qi) | (xj << qj), (zi << qi) | (zj << qj))

    @property
    def label(self) -> str:
        return "".join(
            _CHAR_OF[((self.x_mask >> q) & 1, (self.z_mask >> q) & 1)]
            for q in range(self.n_qubits)
        )

    @property
    def weight(self) -> int:
        """Number of non-identity factors."""
        return (self.x_mask | self.z_mask).bit_count()

    def __str__(self):
        return self.label


# Per-string kernel tables: permutation index array and phase array such that
# (P psi)[b] = phase[b] * psi[perm[b]].  Cached because the same generators
# are applied many thousands of times during a run.
_KERNEL_CACHE: dict[tuple[int, int, int], tuple[np.ndarray, np.ndarray]] = {}


def _kernel(p: PauliString) -> tuple[np.ndarray, np.ndarray]:
    key = (p.n_qubits, p.x_mask, p.z_mask)
    hit = _KERNEL_CACHE.get(key)
    if hit is not None:
        return hit
    dim = 1 << p.n_qubits
    idx = np.arange(dim, dtype=np.uint64)
    perm = idx ^ np.uint64(p.x_mask)
    y_count = (p.x_mask & p.z_mask).bit_count()
    parity = np.bitwise_count(perm & np.uint64(p.z_mask)) & 1
    phase = np.where(parity, -1.0, 1.0) * (1j ** y_count)
    phase = np.ascontiguousarray(phase.astype(np.complex128))
    perm = np.ascontiguousarray(perm.astype(np.intp))
    _KERNEL_CACHE[key] = (perm, phase)
    return perm, phase


if _njit is not None:

    @_njit(fastmath=True)
    def _rotate_rows_jit(rows, scratch, x_mask, phase, cos_t, msin):
        m, dim = rows.shape
        for r in range(m):
            row = rows[r]
            for i in range(dim):
                scratch[i] = cos_t * row[i] + msin * phase[i] * row[i ^ x_mask]
            row[:] = scratch

else:  # pragma: no cover
    _rotate_rows_jit = None


def rotate_rows_inplace(rows: np.ndarray, p: PauliString, theta: float):
    """Apply exp(-i theta P) to every row of a complex batch, in place.

    The hot path of the derivative-state forward pass: a fused jit kernel
    avoids the gather temporaries of the numpy formulation.
    """
    if rows.shape[0] == 0 or theta == 0.0:
        return
    _check_dims(p.n_qubits, rows)
    perm, phase = _kernel(p)
    cos_t = math.cos(theta)
    msin = -1j * math.sin(theta)
    if _rotate_rows_jit is not None and rows.flags.c_contiguous:
        scratch = np.empty(rows.shape[1], dtype=np.complex128)
        _rotate_rows_jit(rows, scratch, p.x_mask, phase, cos_t, msin)
    else:
        np.copyto(rows, cos_t * rows + msin * (phase * rows[:, perm]))


@dataclass(frozen=True)
class WeightedPauliSum:
    """Hermitian operator: real-weighted sum of Pauli strings.

    Duplicate strings are merged by coefficient addition and exactly-zero
    coefficients dropped, so the term list is canonical.
    """

    n_qubits: int
    terms: tuple[tuple[float, PauliString], ...]

    @classmethod
    def from_terms(cls, n_qubits, terms) -> "WeightedPauliSum":
        merged: dict[tuple[int, int], float] = {}
        order: list[tuple[int, int]] = []
        strings: dict[tuple[int, int], PauliString] = {}
        for coeff, p in terms:
            if p.n_qubits != n_qubits:
                raise ValueError("term qubit count mismatch")
            key = (p.x_mask, p.z_mask)
            if key not in merged:
                merged[key] = 0.0
                order.append(key)
                strings[key] = p
            merged[key] += float(coeff)
        kept = tuple(
            (merged[k], strings[k]) for k in order if merged[k] != 0.0
        )
        return cls(n_qubits, kept)

    def __len__(self):
        return len(self.terms)

    def scaled(self, factor: float) -> "WeightedPauliSum":
        return WeightedPauliSum.from_terms(
            self.n_qubits, [(factor * c, p) for c, p in self.terms]
        )

    def __add__(self, other: "WeightedPauliSum") -> "WeightedPauliSum":
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        return WeightedPauliSum.from_terms(
            self.n_qubits, list(self.terms) + list(other.terms)
        )

    def to_dense(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix; for oracles and small-n spectra only."""
        dim = 1 << self.n_qubits
        out = np.zeros((dim, dim), dtype=np.complex128)
        for coeff, p in self.terms:
            perm, phase = _kernel(p)
            out[np.arange(dim), perm] += coeff * phase
        return out


# ---------------------------------------------------------------------------
# Statevector helpers
# ---------------------------------------------------------------------------

def plus_state(n_qubits: int) -> np.ndarray:
    dim = 1 << n_qubits
    return np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128)


def basis_state(n_qubits: int, index: int) -> np.ndarray:
    psi = np.zeros(1 << n_qubits, dtype=np.complex128)
    psi[index] = 1.0
    return psi


def check_norm(psi: np.ndarray, tol: float = NORM_DRIFT_LIMIT) -> np.ndarray:
    drift = abs(np.linalg.norm(psi) - 1.0)
    if drift > tol:
        raise ValueError(f"statevector norm drift {drift:.3e} exceeds {tol:.0e}")
    return psi


def _check_dims(p_qubits: int, psi: np.ndarray):
    if psi.shape[-1] != (1 << p_qubits):
        raise ValueError(
            f"dimension mismatch: operator on {p_qubits} qubits, "
            f"state of length {psi.shape[-1]}"
        )


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------

def apply_pauli(p: PauliString, psi: np.ndarray) -> np.ndarray:
    """Return P|psi>.  Exactly norm-preserving (permutation + unit phases)."""
    _check_dims(p.n_qubits, psi)
    perm, phase = _kernel(p)
    return phase * psi[..., perm]


def apply_rotation(p: PauliString, theta: float, psi: np.ndarray) -> np.ndarray:
    """Return exp(-i theta P)|psi> = cos(theta)|psi> - i sin(theta) P|psi>.

    Valid because P^2 = I for every Pauli string.  Works on a single vector
    or on a batch with states along the leading axis.
    """
    _check_dims(p.n_qubits, psi)
    perm, phase = _kernel(p)
    return math.cos(theta) * psi - (1j * math.sin(theta)) * (phase * psi[..., perm])


def apply_sum(h: WeightedPauliSum, psi: np.ndarray) -> np.ndarray:
    """Return H|psi> for a weighted Pauli sum."""
    _check_dims(h.n_qubits, psi)
    out = np.zeros_like(psi)
    for coeff, p in h.terms:
        perm, phase = _kernel(p)
        out += (coeff * phase) * psi[..., perm]
    return out


def expectation(h: WeightedPauliSum, psi: np.ndarray) -> float:
    """<psi|H|psi>.  A non-negligible imaginary part means H is not Hermitian."""
    val = np.vdot(psi, apply_sum(h, psi))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"non-Hermitian expectation: imaginary part {val.imag:.3e}")
    return float(val.real)


def variance(h: WeightedPauliSum, psi: np.ndarray) -> float:
    """Var(H) = <H^2> - <H>^2 from a single application of H."""
    hpsi = apply_sum(h, psi)
    e = np.vdot(psi, hpsi)
    if abs(e.imag) > 1e-10:
        raise ValueError(f"non-Hermitian expectation: imaginary part {e.imag:.3e}")
    var = float(np.vdot(hpsi, hpsi).real - e.real ** 2)
    if var < 0.0:
        if var < -1e-12:
            raise ValueError(f"variance {var:.3e} below clamp tolerance")
        var = 0.0
    return var


def cnot_cost(p: PauliString) -> int:
    """CNOT count of the standard ladder decomposition of exp(-i theta P)."""
    w = p.weight
    return 2 * (w - 1) if w >= 2 else 0
