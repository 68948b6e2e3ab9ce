"""Shared oracles: dense matrix construction independent of the package kernels."""

import numpy as np
import pytest

from havqds import PauliString, WeightedPauliSum

I2 = np.eye(2, dtype=complex)
X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
MATS = {"I": I2, "X": X2, "Y": Y2, "Z": Z2}


def dense_pauli(label: str) -> np.ndarray:
    """Kronecker-product matrix for a label; qubit 0 is the least-significant bit."""
    out = np.array([[1.0 + 0j]])
    for ch in label:  # qubit 0 first in the label, so it must be innermost
        out = np.kron(MATS[ch], out)
    return out


def dense_sum(h: WeightedPauliSum) -> np.ndarray:
    dim = 1 << h.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for coeff, p in h.terms:
        out += coeff * dense_pauli(p.label)
    return out


def random_state(rng, n: int) -> np.ndarray:
    psi = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return psi / np.linalg.norm(psi)


def random_pauli(rng, n: int) -> PauliString:
    label = "".join(rng.choice(list("IXYZ")) for _ in range(n))
    return PauliString.from_label(label)


def random_sum(rng, n: int, terms: int) -> WeightedPauliSum:
    return WeightedPauliSum.from_terms(
        n,
        [(rng.uniform(-1, 1), random_pauli(rng, n)) for _ in range(terms)],
    )


@pytest.fixture
def rng():
    import random

    return random.Random(20240817)


@pytest.fixture
def np_rng():
    return np.random.default_rng(20240817)
