"""SK spin-glass instances, annealing schedule, AD/CD Hamiltonians, operator pool.

Instance sampling is pinned to a documented PRNG so instances are bit-exactly
reproducible from (n, seed) across implementations: a splitmix64 stream
(64-bit state) feeding a Box-Muller transform, see :class:`SplitMix64` and
:func:`sample_sk`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliString, WeightedPauliSum

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64 generator with Box-Muller Gaussian draws.

    Stream definition (all arithmetic mod 2^64):
      state += 0x9E3779B97F4A7C15
      z = state; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9
      z = (z ^ z>>27) * 0x94D049BB133111EB; output z ^ z>>31
    Uniforms use the top 53 bits mapped to (0, 1]:  u = (bits + 1) / 2^53.
    Standard normals come in Box-Muller pairs from consecutive uniforms:
      z0 = sqrt(-2 ln u1) cos(2 pi u2),  z1 = sqrt(-2 ln u1) sin(2 pi u2),
    consumed in order (z0 first).
    """

    def __init__(self, seed: int):
        self.state = seed & _MASK64
        self._spare = None

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_uniform(self) -> float:
        return ((self.next_u64() >> 11) + 1) * 2.0 ** -53

    def next_normal(self) -> float:
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = self.next_uniform()
        u2 = self.next_uniform()
        radius = math.sqrt(-2.0 * math.log(u1))
        self._spare = radius * math.sin(2.0 * math.pi * u2)
        return radius * math.cos(2.0 * math.pi * u2)


def pair_index(i: int, j: int, n: int) -> int:
    """Row-major index of the (i, j) pair, i < j, in the coupling array."""
    if not 0 <= i < j < n:
        raise ValueError("require 0 <= i < j < n")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def pairs(n: int):
    for i in range(n - 1):
        for j in range(i + 1, n):
            yield i, j


@dataclass(frozen=True)
class SkInstance:
    """Fully connected Ising instance: couplings J_ij (i<j, row-major), fields h_i."""

    n_qubits: int
    couplings: np.ndarray
    fields: np.ndarray
    seed: int

    def __post_init__(self):
        n = self.n_qubits
        if len(self.couplings) != n * (n - 1) // 2:
            raise ValueError("coupling count must be n(n-1)/2")
        if len(self.fields) != n:
            raise ValueError("field count must be n")

    def coupling(self, i: int, j: int) -> float:
        return float(self.couplings[pair_index(i, j, self.n_qubits)])

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n_qubits,
                "seed": self.seed,
                "couplings": list(map(float, self.couplings)),
                "fields": list(map(float, self.fields)),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "SkInstance":
        d = json.loads(text)
        return cls(
            n_qubits=int(d["n"]),
            couplings=np.asarray(d["couplings"], dtype=float),
            fields=np.asarray(d["fields"], dtype=float),
            seed=int(d["seed"]),
        )


def sample_sk(n: int, seed: int) -> SkInstance:
    """Draw an SK instance: J_ij ~ N(0, 1/n) i.i.d., h_i = 0.

    Couplings are drawn in row-major i<j order from the pinned splitmix64 /
    Box-Muller stream, then scaled by 1/sqrt(n).
    """
    if n < 2:
        raise ValueError("SK instance needs n >= 2")
    rng = SplitMix64(seed)
    sigma = 1.0 / math.sqrt(n)
    couplings = np.array(
        [sigma * rng.next_normal() for _ in range(n * (n - 1) // 2)]
    )
    return SkInstance(n, couplings, np.zeros(n), seed)


# ---------------------------------------------------------------------------
# Annealing schedule
# ---------------------------------------------------------------------------

def schedule_s(t: float, total_time: float) -> float:
    """s(t) = sin^2(pi t / 2T); s(0)=0, s(T)=1, flat at both endpoints."""
    _check_t(t, total_time)
    return math.sin(math.pi * t / (2.0 * total_time)) ** 2


def schedule_sdot(t: float, total_time: float) -> float:
    """Analytic derivative: ds/dt = (pi / 2T) sin(pi t / T); exactly 0 at t = 0, T."""
    _check_t(t, total_time)
    if t == 0.0 or t == total_time:
        return 0.0
    return (math.pi / (2.0 * total_time)) * math.sin(math.pi * t / total_time)


def _check_t(t: float, total_time: float):
    if total_time <= 0:
        raise ValueError("total time must be positive")
    if t < -1e-12 or t > total_time + 1e-12:
        raise ValueError(f"t={t} outside [0, {total_time}]")


# ---------------------------------------------------------------------------
# Hamiltonians
# ---------------------------------------------------------------------------

def build_h_problem(instance: SkInstance) -> WeightedPauliSum:
    """H_f = -sum_{i<j} J_ij Z_i Z_j - sum_i h_i Z_i."""
    n = instance.n_qubits
    terms = [
        (-instance.coupling(i, j), PauliString.two(n, i, "Z", j, "Z"))
        for i, j in pairs(n)
    ]
    terms += [
        (-float(instance.fields[i]), PauliString.single(n, i, "Z"))
        for i in range(n)
    ]
    return WeightedPauliSum.from_terms(n, terms)


def build_h_driver(n: int) -> WeightedPauliSum:
    """H_i = -sum_i X_i; ground state |+>^n with energy -n."""
    return WeightedPauliSum.from_terms(
        n, [(-1.0, PauliString.single(n, i, "X")) for i in range(n)]
    )


def build_h_ad(instance: SkInstance, s: float) -> WeightedPauliSum:
    """Interpolated annealing Hamiltonian (1-s) H_i + s H_f."""
    if not -1e-12 <= s <= 1 + 1e-12:
        raise ValueError(f"s={s} outside [0, 1]")
    return build_h_driver(instance.n_qubits).scaled(1.0 - s) + build_h_problem(
        instance
    ).scaled(s)


def cd_r(instance: SkInstance, s: float) -> float:
    """Denominator R of the first-order CD coefficient.

    R = [1-2s][sum h^2 + 8 sum J^2]
        + s^2 [sum h^2 + sum h^4 + 8 sum J^2 + 2 sum J^4
               + 6 sum_i sum_{j!=i} h_i^2 J_ij^2
               + 6 (sum_{i<j} J_ij^2)(sum_{k<l} J_kl^2)].

    The mixed h^2 J^2 term sums each field against the couplings incident on
    its qubit (the only well-typed reading; it vanishes for zero fields).
    """
    n = instance.n_qubits
    h2 = float(np.sum(instance.fields ** 2))
    h4 = float(np.sum(instance.fields ** 4))
    j2 = float(np.sum(instance.couplings ** 2))
    j4 = float(np.sum(instance.couplings ** 4))
    mixed = 0.0
    if h2 > 0.0:
        for i, j in pairs(n):
            jij2 = instance.coupling(i, j) ** 2
            mixed += (instance.fields[i] ** 2 + instance.fields[j] ** 2) * jij2
    return (1.0 - 2.0 * s) * (h2 + 8.0 * j2) + s * s * (
        h2 + h4 + 8.0 * j2 + 2.0 * j4 + 6.0 * mixed + 6.0 * j2 * j2
    )


def cd_alpha1(instance: SkInstance, s: float) -> float:
    """First-order CD coefficient alpha_1 = -(1/4)[sum h^2 + 2 sum J^2] / R.

    |R| is floored at 1e-9 * (8 sum J^2) before dividing; the [1-2s] prefactor
    drives R through zero mid-schedule, and the floor keeps the baseline
    runnable there.
    """
    h2 = float(np.sum(instance.fields ** 2))
    j2 = float(np.sum(instance.couplings ** 2))
    numerator = -(h2 + 2.0 * j2) / 4.0
    if numerator == 0.0:
        return 0.0
    r = cd_r(instance, s)
    floor = 1e-9 * 8.0 * j2
    if abs(r) < floor:
        r = math.copysign(floor, r if r != 0.0 else 1.0)
    if r == 0.0:
        raise ValueError("CD denominator R vanished with zero floor")
    return numerator / r


def build_h_cd1(instance: SkInstance, t: float, total_time: float) -> WeightedPauliSum:
    """First-order counterdiabatic term.

    H_CD^(1) = 2 sdot(t) alpha_1(t) [sum_i h_i Y_i
               + sum_{i<j} J_ij (Y_i Z_j + Z_i Y_j)].
    Vanishes identically at t = 0 and t = T where sdot = 0.

    The sign follows the convention H_f = -sum J_ij Z_i Z_j - sum h_i Z_i
    used throughout this package: the coefficient on each generator agrees
    with the action-minimizing first-order gauge potential for that H_f
    (checked numerically in the tests).  With the opposite problem-term
    sign the bracket flips, so the prefactor would be -2 sdot alpha_1.
    """
    _check_t(t, total_time)
    n = instance.n_qubits
    prefactor = 2.0 * schedule_sdot(t, total_time) * cd_alpha1(
        instance, schedule_s(t, total_time)
    )
    terms = []
    for i in range(n):
        terms.append(
            (prefactor * float(instance.fields[i]), PauliString.single(n, i, "Y"))
        )
    for i, j in pairs(n):
        jij = instance.coupling(i, j)
        terms.append((prefactor * jij, PauliString.two(n, i, "Y", j, "Z")))
        terms.append((prefactor * jij, PauliString.two(n, i, "Z", j, "Y")))
    return WeightedPauliSum.from_terms(n, terms)


# ---------------------------------------------------------------------------
# Operator pool
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorPool:
    operators: tuple[PauliString, ...]

    def __len__(self):
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)


def build_pool(n: int) -> OperatorPool:
    """Adaptive-ansatz generator pool.

    Deterministic order: per qubit (ascending) X_i then Y_i, then per pair
    i<j (lexicographic) Z_i Z_j, Z_i Y_j, Y_i Z_j.
    Size 2n + 3 n(n-1)/2.  Contains every term of the problem, driver, and
    first-order CD Hamiltonians; the {Y_i, Z_i Y_j} subset alone is a
    complete pool, so the ansatz can reach any state.
    """
    if n < 2:
        raise ValueError("pool needs n >= 2")
    ops = []
    for i in range(n):
        ops.append(PauliString.single(n, i, "X"))
        ops.append(PauliString.single(n, i, "Y"))
    for i, j in pairs(n):
        ops.append(PauliString.two(n, i, "Z", j, "Z"))
        ops.append(PauliString.two(n, i, "Z", j, "Y"))
        ops.append(PauliString.two(n, i, "Y", j, "Z"))
    return OperatorPool(tuple(ops))
