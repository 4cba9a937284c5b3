"""Classical key material: bit strings, permutation derivation, hash tags.

Bit strings are plain ``str`` of '0'/'1', indexed left to right. Hashing is
SHAKE-256; bit strings are first packed big-endian behind an 8-byte length
prefix so inputs of different lengths can never collide via padding.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DuplicateDeliveryError,
    InvalidChannelError,
    LengthMismatchError,
    UnknownPartyError,
)

# Phase angles are drawn from [0, pi]; the signing rotation only needs half a turn.
LAMBDA_MAX = math.pi

CHANNEL_KINDS = ("qkd", "quantum-auth")


def _check_bits(bits: str, name: str = "bits") -> str:
    if not bits or any(ch not in "01" for ch in bits):
        raise ValueError(f"{name} must be a nonempty string of 0s and 1s, got {bits!r}")
    return bits


def random_bits(length: int, rng: np.random.Generator) -> str:
    """Uniform bit string of the given length."""
    if length < 1:
        raise ValueError(f"length must be positive, got {length}")
    return "".join("1" if b else "0" for b in rng.integers(0, 2, size=length))


def xor_bits(a: str, b: str) -> str:
    """Bitwise XOR of two equal-length bit strings."""
    _check_bits(a, "a")
    _check_bits(b, "b")
    if len(a) != len(b):
        raise LengthMismatchError(
            f"xor needs equal lengths, got {len(a)} and {len(b)}"
        )
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


def derive_permutation(bits: str, indexing_base: int = 0) -> tuple[int, ...]:
    """Permutation from a bit string: 0-bit positions ascending, then 1-bit.

    Positions are counted from ``indexing_base``. With base 0, '1010' gives
    (1, 3, 0, 2); with base 1, '11010' gives (3, 5, 1, 2, 4). The protocol
    uses base 0 so entries index qubits directly.
    """
    _check_bits(bits)
    if indexing_base not in (0, 1):
        raise ValueError(f"indexing_base must be 0 or 1, got {indexing_base}")
    zeros = [i + indexing_base for i, ch in enumerate(bits) if ch == "0"]
    ones = [i + indexing_base for i, ch in enumerate(bits) if ch == "1"]
    return tuple(zeros + ones)


def pack_bits(bits: str) -> bytes:
    """Canonical byte packing: 8-byte big-endian bit count, then MSB-first bits."""
    _check_bits(bits)
    length = len(bits)
    padded = bits + "0" * (-length % 8)
    body = bytes(int(padded[i : i + 8], 2) for i in range(0, len(padded), 8))
    return length.to_bytes(8, "big") + body


def hash_tag(data: bytes, n: int) -> str:
    """n-bit tag: SHAKE-256 of ``data``, truncated to the first n bits."""
    if n < 1:
        raise ValueError(f"tag length must be positive, got {n}")
    digest = hashlib.shake_256(data).digest((n + 7) // 8)
    stream = "".join(format(byte, "08b") for byte in digest)
    return stream[:n]


def tag_of_bits(bits: str, out_bits: int | None = None) -> str:
    """Tag of a bit string via the canonical packing; defaults to same length."""
    _check_bits(bits)
    n = len(bits) if out_bits is None else int(out_bits)
    return hash_tag(pack_bits(bits), n)


def chained_tag(key_bits: str, blind_bits: str) -> str:
    """Two-level tag H(H(key) xor blind), the form the arbiter recomputes."""
    inner = tag_of_bits(key_bits)
    return tag_of_bits(xor_bits(inner, blind_bits))


def sample_lambda(count: int, rng: np.random.Generator) -> tuple[float, ...]:
    """Independent signing angles, uniform over [0, pi]."""
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    return tuple(float(x) for x in rng.uniform(0.0, LAMBDA_MAX, size=count))


# -- trusted-delivery bookkeeping -------------------------------------------------

@dataclass(frozen=True)
class KeyDeliveryRecord:
    """One secret moved over a trusted channel, recorded exactly once."""

    sender: str
    receiver: str
    purpose: str
    bits: str
    channel_kind: str


class DeliveryLedger:
    """Append-only record of trusted deliveries, one per (sender, receiver, purpose)."""

    def __init__(self) -> None:
        self._records: dict[tuple[str, str, str], KeyDeliveryRecord] = {}

    def distribute(self, sender: str, receiver: str, purpose: str, bits: str,
                   channel_kind: str) -> KeyDeliveryRecord:
        _check_bits(bits, purpose)
        if channel_kind not in CHANNEL_KINDS:
            raise InvalidChannelError(
                f"channel {channel_kind!r} is not a trusted delivery channel; "
                f"expected one of {CHANNEL_KINDS}"
            )
        slot = (sender, receiver, purpose)
        if slot in self._records:
            raise DuplicateDeliveryError(
                f"{purpose!r} already delivered from {sender!r} to {receiver!r}"
            )
        record = KeyDeliveryRecord(
            sender=sender, receiver=receiver, purpose=purpose,
            bits=bits, channel_kind=channel_kind,
        )
        self._records[slot] = record
        return record

    def lookup(self, receiver: str, purpose: str) -> str:
        for (_, rcv, purp), record in self._records.items():
            if rcv == receiver and purp == purpose:
                return record.bits
        raise UnknownPartyError(
            f"no secret {purpose!r} on record for party {receiver!r}"
        )

    def records(self) -> tuple[KeyDeliveryRecord, ...]:
        return tuple(self._records.values())
