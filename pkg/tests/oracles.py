"""Brute-force full-matrix oracles, independent of the package's kernels.

Everything here builds explicit 2^n x 2^n matrices from Kronecker products
and projector algebra, so agreement with the package is a real cross-check
rather than the same code run twice. Only usable for small n.
"""

from __future__ import annotations

import numpy as np

P0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
P1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)
I2 = np.eye(2, dtype=np.complex128)


def kron_chain(factors) -> np.ndarray:
    out = np.array([[1.0]], dtype=np.complex128)
    for f in factors:
        out = np.kron(out, f)
    return out


def single_matrix(n: int, qubit: int, gate: np.ndarray) -> np.ndarray:
    """Gate on one qubit, identity elsewhere; qubit 0 is the leftmost factor."""
    return kron_chain(gate if i == qubit else I2 for i in range(n))


def controlled_matrix(n: int, control: int, target: int,
                      gate: np.ndarray) -> np.ndarray:
    """P0(c) x I + P1(c) x gate(t), built purely from projectors."""
    off = kron_chain(P0 if i == control else I2 for i in range(n))
    on = kron_chain(
        P1 if i == control else (gate if i == target else I2) for i in range(n)
    )
    return off + on


def chained_cu_matrix(n: int, perm, gates_per_slot) -> np.ndarray:
    """Product of controlled gates, slot 0 applied first (rightmost factor)."""
    full = np.eye(2 ** n, dtype=np.complex128)
    for j in range(n):
        if perm[j] == j:
            continue
        full = controlled_matrix(n, j, perm[j], gates_per_slot[j]) @ full
    return full


def local_layer_matrix(n: int, gates_per_qubit) -> np.ndarray:
    return kron_chain(gates_per_qubit[i] for i in range(n))


def qotp_matrix(n: int, key: str) -> np.ndarray:
    """X^x Z^z per qubit from a 2n-bit key (Z applied first)."""
    X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    factors = []
    for j in range(n):
        f = I2.copy()
        if key[2 * j] == "1":
            f = Z @ f
        if key[2 * j + 1] == "1":
            f = X @ f
        factors.append(f)
    return kron_chain(factors)


def cnot_chain_matrix(n: int, perm) -> np.ndarray:
    X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    full = np.eye(2 ** n, dtype=np.complex128)
    for j in range(n):
        if perm[j] == j:
            continue
        full = controlled_matrix(n, j, perm[j], X) @ full
    return full


def pauli_string_matrix(sigma: str) -> np.ndarray:
    table = {
        "I": I2,
        "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
        "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    }
    return kron_chain(table[ch] for ch in sigma.upper())


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    amps = rng.standard_normal(2 ** n) + 1j * rng.standard_normal(2 ** n)
    return amps / np.linalg.norm(amps)
