"""Quantum encryption layers and signature construction.

Three schemes share one interface:

* ``cu``   -- chained controlled rotations: for each qubit j in ascending
  order, apply a controlled U(theta_j, phi_j, lambda_j) with control j and
  target perm[j] (skipped when perm[j] == j). Signing adds a local
  U(theta_j, phi_j, lambda_j) on every qubit on top of the encryption.
* ``cnot`` -- the same chaining with plain CNOTs; no phase layer.
* ``qotp`` -- per-qubit Pauli one-time pad Z then X from a 2n-bit key; no
  phase layer.

``diagonal`` Euler mode pins theta = phi = 0 so every rotation is
diag(1, e^{i lambda}); ``general`` mode uses full three-angle rotations.
Decryption applies the adjoint gates in exactly reversed order.

Ops lists: every function accepts an optional list and appends
``(gate_name, qubits)`` events for circuit accounting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import gates, qstate
from .errors import ConfigError, LengthMismatchError
from .qstate import StateVector

OpList = list[tuple[str, tuple[int, ...]]]


class Scheme(str, Enum):
    CHAINED_CU = "cu"
    CHAINED_CNOT = "cnot"
    QOTP = "qotp"


class EulerMode(str, Enum):
    DIAGONAL = "diagonal"
    GENERAL = "general"


def _check_perm(perm: tuple[int, ...], n: int) -> tuple[int, ...]:
    if sorted(perm) != list(range(n)):
        raise ConfigError(f"{perm!r} is not a permutation of 0..{n - 1}")
    return tuple(perm)


def _check_angles(angles: tuple[float, ...], n: int, name: str) -> tuple[float, ...]:
    if len(angles) != n:
        raise LengthMismatchError(
            f"{name} must have {n} entries, got {len(angles)}"
        )
    return tuple(float(a) for a in angles)


@dataclass(frozen=True)
class EncryptionContext:
    """Everything a party needs to run one scheme on an n-qubit register."""

    scheme: Scheme
    n: int
    perm: tuple[int, ...] | None = None
    lambdas: tuple[float, ...] | None = None
    thetas: tuple[float, ...] | None = None
    phis: tuple[float, ...] | None = None
    qotp_key: str | None = None
    euler_mode: EulerMode = EulerMode.DIAGONAL

    def __post_init__(self) -> None:
        scheme = Scheme(self.scheme)
        mode = EulerMode(self.euler_mode)
        object.__setattr__(self, "scheme", scheme)
        object.__setattr__(self, "euler_mode", mode)
        if self.n < 1:
            raise ConfigError(f"n must be positive, got {self.n}")
        if scheme in (Scheme.CHAINED_CU, Scheme.CHAINED_CNOT):
            if self.perm is None:
                raise ConfigError(f"scheme {scheme.value} needs a permutation")
            object.__setattr__(self, "perm", _check_perm(tuple(self.perm), self.n))
        if scheme is Scheme.CHAINED_CU:
            if self.lambdas is None:
                raise ConfigError("scheme cu needs lambda angles")
            object.__setattr__(
                self, "lambdas", _check_angles(tuple(self.lambdas), self.n, "lambdas")
            )
            if mode is EulerMode.DIAGONAL:
                if self.thetas is not None or self.phis is not None:
                    raise ConfigError("diagonal mode fixes theta = phi = 0")
                object.__setattr__(self, "thetas", (0.0,) * self.n)
                object.__setattr__(self, "phis", (0.0,) * self.n)
            else:
                if self.thetas is None or self.phis is None:
                    raise ConfigError("general mode needs theta and phi angles")
                object.__setattr__(
                    self, "thetas", _check_angles(tuple(self.thetas), self.n, "thetas")
                )
                object.__setattr__(
                    self, "phis", _check_angles(tuple(self.phis), self.n, "phis")
                )
        if scheme is Scheme.QOTP:
            key = self.qotp_key
            if key is None or len(key) != 2 * self.n or set(key) - {"0", "1"}:
                raise ConfigError(
                    f"scheme qotp needs a {2 * self.n}-bit pad key"
                )

    def rotation(self, j: int) -> np.ndarray:
        """The scheme's single-qubit rotation for slot j (cu scheme only)."""
        if self.scheme is not Scheme.CHAINED_CU:
            raise ConfigError(f"scheme {self.scheme.value} has no rotation angles")
        return gates.u_gate(self.thetas[j], self.phis[j], self.lambdas[j])


def _record(ops: OpList | None, name: str, qubits: tuple[int, ...]) -> None:
    if ops is not None:
        ops.append((name, qubits))


# -- chained controlled-U ---------------------------------------------------------

def _encrypt_cu(state: StateVector, ctx: EncryptionContext,
                ops: OpList | None) -> StateVector:
    for j in range(ctx.n):
        t = ctx.perm[j]
        if t == j:
            continue
        state = qstate.apply_controlled(state, j, t, ctx.rotation(j))
        _record(ops, "cu", (j, t))
    return state


def _decrypt_cu(state: StateVector, ctx: EncryptionContext,
                ops: OpList | None) -> StateVector:
    for j in reversed(range(ctx.n)):
        t = ctx.perm[j]
        if t == j:
            continue
        state = qstate.apply_controlled(state, j, t, gates.adjoint(ctx.rotation(j)))
        _record(ops, "cu_adjoint", (j, t))
    return state


def sign_layer(state: StateVector, ctx: EncryptionContext,
               ops: OpList | None = None) -> StateVector:
    """Local rotation U(theta_j, phi_j, lambda_j) on every qubit."""
    if ctx.scheme is not Scheme.CHAINED_CU:
        raise ConfigError("the signing layer is defined for the cu scheme only")
    for j in range(ctx.n):
        state = qstate.apply_single(state, j, ctx.rotation(j))
        _record(ops, "u", (j,))
    return state


def unsign_layer(state: StateVector, ctx: EncryptionContext,
                 ops: OpList | None = None) -> StateVector:
    """Adjoint of :func:`sign_layer`."""
    if ctx.scheme is not Scheme.CHAINED_CU:
        raise ConfigError("the signing layer is defined for the cu scheme only")
    for j in reversed(range(ctx.n)):
        state = qstate.apply_single(state, j, gates.adjoint(ctx.rotation(j)))
        _record(ops, "u_adjoint", (j,))
    return state


# -- chained CNOT -----------------------------------------------------------------

def _encrypt_cnot(state: StateVector, ctx: EncryptionContext,
                  ops: OpList | None) -> StateVector:
    x = gates.pauli_x()
    for j in range(ctx.n):
        t = ctx.perm[j]
        if t == j:
            continue
        state = qstate.apply_controlled(state, j, t, x)
        _record(ops, "cnot", (j, t))
    return state


def _decrypt_cnot(state: StateVector, ctx: EncryptionContext,
                  ops: OpList | None) -> StateVector:
    x = gates.pauli_x()
    for j in reversed(range(ctx.n)):
        t = ctx.perm[j]
        if t == j:
            continue
        state = qstate.apply_controlled(state, j, t, x)
        _record(ops, "cnot", (j, t))
    return state


# -- Pauli one-time pad -----------------------------------------------------------

def _encrypt_qotp(state: StateVector, ctx: EncryptionContext,
                  ops: OpList | None) -> StateVector:
    z = gates.pauli_z()
    x = gates.pauli_x()
    for j in range(ctx.n):
        if ctx.qotp_key[2 * j] == "1":
            state = qstate.apply_single(state, j, z)
            _record(ops, "z", (j,))
        if ctx.qotp_key[2 * j + 1] == "1":
            state = qstate.apply_single(state, j, x)
            _record(ops, "x", (j,))
    return state


def _decrypt_qotp(state: StateVector, ctx: EncryptionContext,
                  ops: OpList | None) -> StateVector:
    z = gates.pauli_z()
    x = gates.pauli_x()
    for j in reversed(range(ctx.n)):
        if ctx.qotp_key[2 * j + 1] == "1":
            state = qstate.apply_single(state, j, x)
            _record(ops, "x", (j,))
        if ctx.qotp_key[2 * j] == "1":
            state = qstate.apply_single(state, j, z)
            _record(ops, "z", (j,))
    return state


# -- dispatch ---------------------------------------------------------------------

_ENCRYPT = {
    Scheme.CHAINED_CU: _encrypt_cu,
    Scheme.CHAINED_CNOT: _encrypt_cnot,
    Scheme.QOTP: _encrypt_qotp,
}
_DECRYPT = {
    Scheme.CHAINED_CU: _decrypt_cu,
    Scheme.CHAINED_CNOT: _decrypt_cnot,
    Scheme.QOTP: _decrypt_qotp,
}


def encrypt(state: StateVector, ctx: EncryptionContext,
            ops: OpList | None = None) -> StateVector:
    if state.n != ctx.n:
        raise LengthMismatchError(
            f"context is for n={ctx.n}, state has n={state.n}"
        )
    return _ENCRYPT[ctx.scheme](state, ctx, ops)


def decrypt(state: StateVector, ctx: EncryptionContext,
            ops: OpList | None = None) -> StateVector:
    if state.n != ctx.n:
        raise LengthMismatchError(
            f"context is for n={ctx.n}, state has n={state.n}"
        )
    return _DECRYPT[ctx.scheme](state, ctx, ops)


def make_signature(message: StateVector, ctx: EncryptionContext,
                   ops: OpList | None = None) -> StateVector:
    """Signature state for a message.

    The cu scheme stacks the per-qubit signing rotation on top of the
    chained encryption; the baseline schemes sign by encryption alone.
    """
    state = encrypt(message, ctx, ops)
    if ctx.scheme is Scheme.CHAINED_CU:
        state = sign_layer(state, ctx, ops)
    return state


def recover_message(signature: StateVector, ctx: EncryptionContext,
                    ops: OpList | None = None) -> StateVector:
    """Exact inverse of :func:`make_signature`."""
    state = signature
    if ctx.scheme is Scheme.CHAINED_CU:
        state = unsign_layer(state, ctx, ops)
    return decrypt(state, ctx, ops)
