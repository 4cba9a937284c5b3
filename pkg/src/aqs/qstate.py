"""Exact dense statevector states and the operations the protocol needs.

A register of n qubits is a vector of 2**n complex128 amplitudes. Qubit 0 is
the most significant bit of the basis label: for n=4 the label ``0110`` means
qubit0=0, qubit1=1, qubit2=1, qubit3=0, and indexes amplitude 6.

``StateVector`` is immutable; every gate application returns a new instance.
Mutation happens only on private working copies inside this module, routed
through the kernel backend (see :mod:`aqs.kernels`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import (
    DimensionMismatchError,
    EmptyMessageError,
    NonNormalizedQubitError,
    QubitOutOfRangeError,
    ControlEqualsTargetError,
    ZeroShotsError,
)

NORM_ATOL = 1e-9

# Swap-test defaults: accept only if no shot lands on ancilla=1.
SWAP_TEST_SHOTS = 64


def _check_qubit(n: int, qubit: int, role: str = "qubit") -> int:
    if not 0 <= qubit < n:
        raise QubitOutOfRangeError(
            f"{role} index {qubit} out of range for {n}-qubit register"
        )
    return qubit


def _mask(n: int, qubit: int) -> int:
    # Qubit 0 is the MSB of the basis label.
    return 1 << (n - 1 - qubit)


@dataclass(frozen=True)
class StateVector:
    """Immutable n-qubit pure state with a defensively copied amplitude array."""

    n: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise EmptyMessageError("a state needs at least one qubit")
        amps = np.array(self.amps, dtype=np.complex128)
        if amps.shape != (2 ** self.n,):
            raise DimensionMismatchError(
                f"expected {2 ** self.n} amplitudes for n={self.n}, "
                f"got shape {amps.shape}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_ATOL:
            raise NonNormalizedQubitError(
                f"state norm {norm} deviates from 1 by more than {NORM_ATOL}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return 2 ** self.n

    def working_copy(self) -> np.ndarray:
        """Fresh writable copy of the amplitudes."""
        return np.array(self.amps, dtype=np.complex128)


def basis_state(n: int, label: int | str) -> StateVector:
    """Computational basis state; label is an index or a bit string."""
    if isinstance(label, str):
        if len(label) != n or any(ch not in "01" for ch in label):
            raise ValueError(f"label {label!r} is not an {n}-bit string")
        index = int(label, 2)
    else:
        index = int(label)
    if not 0 <= index < 2 ** n:
        raise ValueError(f"basis index {index} out of range for n={n}")
    amps = np.zeros(2 ** n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(n, amps)


def init_product_state(qubit_states: Sequence[tuple[complex, complex]]) -> StateVector:
    """Tensor product of per-qubit states (alpha, beta), qubit 0 first."""
    if len(qubit_states) == 0:
        raise EmptyMessageError("cannot build a product state of zero qubits")
    amps = np.array([1.0], dtype=np.complex128)
    for i, (alpha, beta) in enumerate(qubit_states):
        pair = np.array([alpha, beta], dtype=np.complex128)
        norm = float(np.linalg.norm(pair))
        if abs(norm - 1.0) > NORM_ATOL:
            raise NonNormalizedQubitError(
                f"qubit {i} amplitudes have norm {norm}, expected 1"
            )
        amps = np.kron(amps, pair)
    return StateVector(len(qubit_states), amps)


def apply_single(state: StateVector, qubit: int, gate: np.ndarray) -> StateVector:
    """Apply a 2x2 gate to one qubit; returns a new state."""
    _check_qubit(state.n, qubit)
    amps = state.working_copy()
    kernels.apply_single_inplace(amps, _mask(state.n, qubit), np.asarray(gate))
    return StateVector(state.n, amps)


def apply_controlled(state: StateVector, control: int, target: int,
                     gate: np.ndarray) -> StateVector:
    """Apply a controlled 2x2 gate; returns a new state."""
    _check_qubit(state.n, control, "control")
    _check_qubit(state.n, target, "target")
    if control == target:
        raise ControlEqualsTargetError(
            f"control and target both {control}; they must differ"
        )
    amps = state.working_copy()
    kernels.apply_controlled_inplace(
        amps, _mask(state.n, control), _mask(state.n, target), np.asarray(gate)
    )
    return StateVector(state.n, amps)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> with a conjugated."""
    if a.n != b.n:
        raise DimensionMismatchError(
            f"inner product needs equal sizes, got n={a.n} and n={b.n}"
        )
    return complex(np.vdot(a.amps, b.amps))


def overlap_sq(a: StateVector, b: StateVector) -> float:
    """Squared overlap |<a|b>|^2, the quantity the verifier thresholds.

    Accumulation error can push the raw value a few ulp past 1; values within
    1e-9 are clamped so downstream [0,1] invariants hold exactly.
    """
    raw = float(abs(inner_product(a, b)) ** 2)
    if raw > 1.0:
        if raw > 1.0 + 1e-9:
            raise DimensionMismatchError(
                f"overlap {raw} exceeds 1 beyond tolerance; non-normalized input?"
            )
        raw = 1.0
    return raw


def distribution(state: StateVector) -> np.ndarray:
    """Born-rule probabilities over all 2**n basis labels."""
    probs = np.abs(state.amps) ** 2
    return probs / probs.sum()


@dataclass(frozen=True)
class ShotHistogram:
    """Counts per basis label from a finite-shot measurement."""

    n: int
    shots: int
    counts: dict[str, int]

    def probability(self, label: str) -> float:
        return self.counts.get(label, 0) / self.shots

    def to_csv(self) -> str:
        lines = ["basis_label,count"]
        for label in sorted(self.counts):
            lines.append(f"{label},{self.counts[label]}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_csv(text: str) -> "ShotHistogram":
        rows = [ln for ln in text.strip().splitlines() if ln.strip()]
        if not rows or rows[0].strip() != "basis_label,count":
            raise ValueError("expected header line 'basis_label,count'")
        counts: dict[str, int] = {}
        for ln in rows[1:]:
            label, value = ln.strip().split(",")
            counts[label] = int(value)
        if not counts:
            raise ValueError("histogram has no rows")
        n = len(next(iter(counts)))
        if any(len(lbl) != n or set(lbl) - {"0", "1"} for lbl in counts):
            raise ValueError("inconsistent basis labels in histogram")
        return ShotHistogram(n=n, shots=sum(counts.values()), counts=counts)


def sample(state: StateVector, shots: int, rng: np.random.Generator) -> ShotHistogram:
    """Measure all qubits ``shots`` times; multinomial over the exact distribution."""
    if shots <= 0:
        raise ZeroShotsError(f"shots must be positive, got {shots}")
    probs = distribution(state)
    draw = rng.multinomial(shots, probs)
    width = state.n
    counts = {
        format(i, f"0{width}b"): int(c) for i, c in enumerate(draw) if c > 0
    }
    return ShotHistogram(n=state.n, shots=shots, counts=counts)


# -- swap test ----------------------------------------------------------------

def swap_test_pass_probability(a: StateVector, b: StateVector) -> float:
    """Probability the swap-test ancilla reads 0: 1/2 + |<a|b>|^2 / 2."""
    return 0.5 + 0.5 * overlap_sq(a, b)


def _swap_test_ancilla_distribution(a: StateVector, b: StateVector) -> float:
    """Run the (2n+1)-qubit ancilla circuit exactly; returns P(ancilla = 1).

    Layout: ancilla is qubit 0, register a occupies qubits 1..n, register b
    occupies qubits n+1..2n. Circuit: H on ancilla, controlled swaps pairing
    qubit i of a with qubit i of b, H on ancilla.
    """
    if a.n != b.n:
        raise DimensionMismatchError(
            f"swap test needs equal sizes, got n={a.n} and n={b.n}"
        )
    n = a.n
    total = 2 * n + 1
    amps = np.kron(np.array([1.0, 0.0], dtype=np.complex128),
                   np.kron(a.amps, b.amps))
    inv = 1.0 / math.sqrt(2.0)
    h = np.array([[inv, inv], [inv, -inv]], dtype=np.complex128)
    kernels.apply_single_inplace(amps, _mask(total, 0), h)
    # Controlled swap = permutation of basis labels where the ancilla bit is set.
    idx = np.arange(2 ** total)
    anc = _mask(total, 0)
    perm = idx.copy()
    for i in range(n):
        ma = _mask(total, 1 + i)
        mb = _mask(total, 1 + n + i)
        bit_a = (perm & ma) != 0
        bit_b = (perm & mb) != 0
        differ = ((idx & anc) != 0) & (bit_a != bit_b)
        perm = np.where(differ, perm ^ (ma | mb), perm)
    # The pairwise swap is an involution, so gathering by perm applies it.
    amps = amps[perm]
    kernels.apply_single_inplace(amps, _mask(total, 0), h)
    probs = np.abs(amps) ** 2
    return float(probs[(idx & anc) != 0].sum())


def swap_test_sampled(a: StateVector, b: StateVector, shots: int,
                      rng: np.random.Generator) -> tuple[bool, int]:
    """Finite-shot swap test; returns (accepted, number of ancilla-1 outcomes).

    Accepts only when every shot reads ancilla 0. Identical states always
    pass; orthogonal states slip through with probability 2**-shots.
    """
    if shots <= 0:
        raise ZeroShotsError(f"shots must be positive, got {shots}")
    p_one = _swap_test_ancilla_distribution(a, b)
    ones = int(rng.binomial(shots, min(max(p_one, 0.0), 1.0)))
    return ones == 0, ones


# -- serialization --------------------------------------------------------------

def state_to_json(state: StateVector) -> str:
    """JSON form {"n": ..., "amps": [[re, im], ...]} with .17g floats."""
    amps = [
        [float(f"{z.real:.17g}"), float(f"{z.imag:.17g}")] for z in state.amps
    ]
    return json.dumps({"n": state.n, "amps": amps}, separators=(",", ":"))


def state_from_json(text: str) -> StateVector:
    data = json.loads(text)
    n = int(data["n"])
    pairs = data["amps"]
    amps = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
    return StateVector(n, amps)
