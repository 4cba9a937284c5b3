"""Arbitrated signature protocol: KGC, signers and a verifier as party machines.

One run walks four phases: trusted setup (identity keys over simulated QKD),
signing-angle registration, signing, and arbiter verification with a stored
proof on acceptance. Every externally visible step lands in an append-only
transcript whose JSON form is byte-identical across equal-seed runs.

Two wirings cover the message routing:

* ``relay``  -- the verifier forwards message, signature and blinded tag to
  the arbiter (the normative flow),
* ``direct`` -- the signer hands the message register to the arbiter
  directly and the verifier forwards only signature and blinded tag.

The verification math is identical in both.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from . import cipher, keys, qstate
from .cipher import EncryptionContext, EulerMode, OpList, Scheme
from .errors import (
    ConfigError,
    ContextMismatchError,
    InvalidChannelError,
    LengthMismatchError,
    MissingLambdaError,
    NoProofStoredError,
    UnknownSignerError,
)
from .qstate import StateVector

EXACT_ACCEPT_THRESHOLD = 1.0 - 1e-9

TAMPER_CHANNELS = ("signer-verifier", "verifier-kgc")


class Role(str, Enum):
    KGC = "kgc"
    SIGNER = "signer"
    VERIFIER = "verifier"


@dataclass(frozen=True)
class PartyId:
    role: Role
    index: int | None = None

    def __post_init__(self) -> None:
        role = Role(self.role)
        object.__setattr__(self, "role", role)
        if role is Role.SIGNER:
            if self.index is None or self.index < 1:
                raise ConfigError("signer parties need a positive index")
        elif self.index is not None:
            raise ConfigError(f"{role.value} takes no index")

    @property
    def label(self) -> str:
        if self.role is Role.SIGNER:
            return f"signer_{self.index}"
        return self.role.value


KGC = PartyId(Role.KGC)
VERIFIER = PartyId(Role.VERIFIER)


def signer(index: int) -> PartyId:
    return PartyId(Role.SIGNER, index)


class Wiring(str, Enum):
    RELAY = "relay"
    DIRECT = "direct"


class VerifyMode(str, Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


# -- message specification -------------------------------------------------------

@dataclass(frozen=True)
class MessageSpec:
    """Recipe for the message register: classical bits or per-qubit amplitudes.

    Preparing from a recipe is what lets the signer hold "two copies" without
    cloning: both copies are built independently from the same description.
    """

    kind: str
    bits: str | None = None
    amps: tuple[tuple[complex, complex], ...] | None = None

    def __post_init__(self) -> None:
        if self.kind == "classical":
            if not self.bits or set(self.bits) - {"0", "1"}:
                raise ConfigError("classical message needs a nonempty bit string")
        elif self.kind == "product":
            if not self.amps:
                raise ConfigError("product message needs per-qubit amplitudes")
            object.__setattr__(
                self,
                "amps",
                tuple((complex(a), complex(b)) for a, b in self.amps),
            )
        else:
            raise ConfigError(f"unknown message kind {self.kind!r}")

    @staticmethod
    def classical(bits: str) -> "MessageSpec":
        return MessageSpec(kind="classical", bits=bits)

    @staticmethod
    def product(pairs) -> "MessageSpec":
        return MessageSpec(kind="product", amps=tuple(pairs))

    @staticmethod
    def uniform_qubit(n: int, alpha: complex, beta: complex) -> "MessageSpec":
        return MessageSpec.product(((alpha, beta),) * n)

    @staticmethod
    def random_product(n: int, rng: np.random.Generator) -> "MessageSpec":
        """Per-qubit states drawn uniformly on the Bloch sphere."""
        pairs = []
        for _ in range(n):
            theta = math.acos(1.0 - 2.0 * rng.uniform())
            phi = rng.uniform(0.0, 2.0 * math.pi)
            pairs.append(
                (math.cos(theta / 2.0),
                 complex(math.cos(phi), math.sin(phi)) * math.sin(theta / 2.0))
            )
        return MessageSpec.product(pairs)

    @property
    def n(self) -> int:
        return len(self.bits) if self.kind == "classical" else len(self.amps)

    def prepare(self) -> StateVector:
        if self.kind == "classical":
            return encode_classical_message(self.bits)
        return qstate.init_product_state(self.amps)

    def to_payload(self) -> dict[str, Any]:
        if self.kind == "classical":
            return {"kind": "classical", "bits": self.bits}
        return {
            "kind": "product",
            "amps": [[a.real, a.imag, b.real, b.imag] for a, b in self.amps],
        }

    @staticmethod
    def from_payload(data: dict[str, Any]) -> "MessageSpec":
        if data["kind"] == "classical":
            return MessageSpec.classical(data["bits"])
        pairs = [
            (complex(ar, ai), complex(br, bi)) for ar, ai, br, bi in data["amps"]
        ]
        return MessageSpec.product(pairs)


def encode_classical_message(bits: str) -> StateVector:
    """Computational basis state |b1...bn> for a classical bit string."""
    return qstate.basis_state(len(bits), bits)


# -- tamper injection --------------------------------------------------------------

@dataclass(frozen=True)
class TamperSpec:
    """In-transit modification on one classical-or-quantum hop.

    ``message_pauli`` hits the message register only (signature untouched);
    ``tag_flip_bit`` flips one bit of the tag travelling on that hop.
    """

    channel: str
    message_pauli: str | None = None
    tag_flip_bit: int | None = None

    def __post_init__(self) -> None:
        if self.channel not in TAMPER_CHANNELS:
            raise InvalidChannelError(
                f"cannot tamper channel {self.channel!r}; interceptable "
                f"channels are {TAMPER_CHANNELS}"
            )
        if self.message_pauli is not None:
            if not self.message_pauli or set(self.message_pauli.upper()) - set("IXYZ"):
                raise ConfigError(
                    f"message_pauli must be a string over IXYZ, got {self.message_pauli!r}"
                )
            object.__setattr__(self, "message_pauli", self.message_pauli.upper())
        if self.tag_flip_bit is not None and self.tag_flip_bit < 0:
            raise ConfigError("tag_flip_bit must be non-negative")

    def to_payload(self) -> dict[str, Any]:
        return {
            "channel": self.channel,
            "message_pauli": self.message_pauli,
            "tag_flip_bit": self.tag_flip_bit,
        }


def _flip_bit(bits: str, index: int) -> str:
    if index >= len(bits):
        raise LengthMismatchError(
            f"tag has {len(bits)} bits; cannot flip bit {index}"
        )
    flipped = "1" if bits[index] == "0" else "0"
    return bits[:index] + flipped + bits[index + 1 :]


# -- protocol data types ------------------------------------------------------------

@dataclass(frozen=True)
class SignaturePackage:
    """What the signer emits: clear message copy, signature state, identity tag."""

    signer: PartyId
    message: StateVector
    signature: StateVector
    tag: str

    def __post_init__(self) -> None:
        if self.message.n != self.signature.n:
            raise LengthMismatchError(
                f"message has {self.message.n} qubits, signature {self.signature.n}"
            )
        if len(self.tag) != self.message.n:
            raise LengthMismatchError(
                f"tag length {len(self.tag)} != qubit count {self.message.n}"
            )


@dataclass(frozen=True)
class ForwardedPackage:
    """What the verifier hands the arbiter; message is absent in direct wiring."""

    signer: PartyId
    signature: StateVector
    tag: str
    message: StateVector | None = None

    def __post_init__(self) -> None:
        if self.message is not None and self.message.n != self.signature.n:
            raise LengthMismatchError(
                f"message has {self.message.n} qubits, signature {self.signature.n}"
            )


@dataclass(frozen=True)
class VerificationOutcome:
    """Arbiter decision; overlap fields stay unset on a hash-stage rejection."""

    accepted: bool
    stage: str
    overlap_sq: float | None = None
    pass_probability: float | None = None
    swap_ones: int | None = None

    def to_payload(self) -> dict[str, Any]:
        return {
            "accepted": self.accepted,
            "stage": self.stage,
            "overlap_sq": self.overlap_sq,
            "pass_probability": self.pass_probability,
            "swap_ones": self.swap_ones,
        }


@dataclass(frozen=True)
class SignatureProof:
    """What the arbiter keeps after acceptance: the signing angles and blinded tag."""

    signer: PartyId
    lambdas: tuple[float, ...]
    tag: str


# -- run configuration ---------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """Everything one protocol run depends on; equal configs replay bit-exactly."""

    n: int
    message: MessageSpec
    scheme: Scheme = Scheme.CHAINED_CU
    euler_mode: EulerMode = EulerMode.DIAGONAL
    wiring: Wiring = Wiring.RELAY
    verify_mode: VerifyMode = VerifyMode.EXACT
    num_signers: int = 1
    signer_index: int = 1
    seed_keys: int = 0
    seed_lambda: int = 0
    seed_shots: int = 0
    shots: int = 1024
    swap_shots: int = 64
    tamper: TamperSpec | None = None
    inject_key_bits: str | None = None
    inject_lambdas: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "euler_mode", EulerMode(self.euler_mode))
        object.__setattr__(self, "wiring", Wiring(self.wiring))
        object.__setattr__(self, "verify_mode", VerifyMode(self.verify_mode))
        if self.n < 1:
            raise ConfigError(f"n must be at least 1, got {self.n}")
        if self.shots < 1:
            raise ConfigError(f"shots must be at least 1, got {self.shots}")
        if self.swap_shots < 1:
            raise ConfigError(f"swap_shots must be at least 1, got {self.swap_shots}")
        if self.message.n != self.n:
            raise ConfigError(
                f"message spec covers {self.message.n} qubits, config says {self.n}"
            )
        if not 1 <= self.signer_index <= self.num_signers:
            raise ConfigError(
                f"signer_index {self.signer_index} outside 1..{self.num_signers}"
            )
        if self.inject_key_bits is not None and len(self.inject_key_bits) != self.n:
            raise ConfigError("injected key must have one bit per qubit")
        if self.inject_lambdas is not None:
            if len(self.inject_lambdas) != self.n:
                raise ConfigError("injected lambdas need one angle per qubit")
            object.__setattr__(
                self, "inject_lambdas", tuple(float(x) for x in self.inject_lambdas)
            )

    def to_payload(self, reveal_secrets: bool = False) -> dict[str, Any]:
        inject_key: Any = self.inject_key_bits
        inject_lams: Any = self.inject_lambdas
        if not reveal_secrets:
            if inject_key is not None:
                inject_key = {"redacted": True, "length": len(inject_key)}
            if inject_lams is not None:
                inject_lams = {"redacted": True, "count": len(inject_lams)}
        elif inject_lams is not None:
            inject_lams = list(inject_lams)
        return {
            "n": self.n,
            "message": self.message.to_payload(),
            "scheme": self.scheme.value,
            "euler_mode": self.euler_mode.value,
            "wiring": self.wiring.value,
            "verify_mode": self.verify_mode.value,
            "num_signers": self.num_signers,
            "signer_index": self.signer_index,
            "seed_keys": self.seed_keys,
            "seed_lambda": self.seed_lambda,
            "seed_shots": self.seed_shots,
            "shots": self.shots,
            "swap_shots": self.swap_shots,
            "tamper": self.tamper.to_payload() if self.tamper else None,
            "inject_key_bits": inject_key,
            "inject_lambdas": inject_lams,
        }


# -- transcript -----------------------------------------------------------------------

_SECRET_KEYS = ("bits", "lambdas", "thetas", "phis")


def _fingerprint(state: StateVector) -> str:
    return hashlib.sha256(qstate.state_to_json(state).encode()).hexdigest()[:16]


class Transcript:
    """Append-only event log; serializes deterministically."""

    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.events: list[dict[str, Any]] = []
        self.outcome: VerificationOutcome | None = None

    def append(self, kind: str, frm: str, to: str, payload: dict[str, Any]) -> None:
        self.events.append({"type": kind, "from": frm, "to": to, "payload": payload})

    def gate_events(self) -> list[tuple[str, tuple[int, ...]]]:
        return [
            (e["payload"]["gate"], tuple(e["payload"]["qubits"]))
            for e in self.events
            if e["type"] == "gate"
        ]

    def _redact(self, payload: dict[str, Any]) -> dict[str, Any]:
        out = dict(payload)
        for key in _SECRET_KEYS:
            if key in out and out[key] is not None:
                value = out[key]
                size = len(value)
                out[key] = {"redacted": True, "length": size}
        return out

    def to_dict(self, reveal_secrets: bool = False) -> dict[str, Any]:
        events = self.events
        if not reveal_secrets:
            events = [dict(e, payload=self._redact(e["payload"])) for e in events]
        return {
            "config": self.config.to_payload(reveal_secrets),
            "events": events,
            "outcome": self.outcome.to_payload() if self.outcome else None,
        }

    def to_json(self, reveal_secrets: bool = False) -> str:
        return json.dumps(
            self.to_dict(reveal_secrets), sort_keys=True, separators=(",", ":")
        )

    def summary_csv_row(self) -> str:
        """Flat outcome row: header plus one line."""
        header = "scheme,euler_mode,wiring,n,accepted,stage,overlap_sq,pass_probability"
        o = self.outcome
        row = ",".join(
            [
                self.config.scheme.value,
                self.config.euler_mode.value,
                self.config.wiring.value,
                str(self.config.n),
                "" if o is None else str(o.accepted).lower(),
                "" if o is None else o.stage,
                "" if o is None or o.overlap_sq is None else f"{o.overlap_sq:.12g}",
                ""
                if o is None or o.pass_probability is None
                else f"{o.pass_probability:.12g}",
            ]
        )
        return header + "\n" + row + "\n"


# -- the session ------------------------------------------------------------------------

@dataclass
class _SignerState:
    key_bits: str
    perm: tuple[int, ...]
    lambdas: tuple[float, ...] | None = None
    thetas: tuple[float, ...] | None = None
    phis: tuple[float, ...] | None = None
    qotp_key: str | None = None


class ProtocolSession:
    """Holds the party secret stores and drives the four phases for one run."""

    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.transcript = Transcript(config)
        self.ledger = keys.DeliveryLedger()
        self._rng_keys = np.random.default_rng(config.seed_keys)
        self._rng_lambda = np.random.default_rng(config.seed_lambda)
        self._rng_shots = np.random.default_rng(config.seed_shots)
        self._signers: dict[int, _SignerState] = {}
        self._verifier_key: str | None = None
        self._kgc_lambdas: dict[int, tuple[float, ...]] = {}
        self._proofs: dict[int, SignatureProof] = {}
        self._direct_messages: dict[int, StateVector] = {}
        self._last_recovered: StateVector | None = None
        self._is_setup = False

    # -- phase 1: trusted setup

    def setup(self) -> None:
        cfg = self.config
        n = cfg.n
        for idx in range(1, cfg.num_signers + 1):
            if idx == cfg.signer_index and cfg.inject_key_bits is not None:
                bits = cfg.inject_key_bits
            else:
                bits = keys.random_bits(n, self._rng_keys)
            state = _SignerState(key_bits=bits, perm=keys.derive_permutation(bits, 0))
            if cfg.scheme is Scheme.QOTP:
                state.qotp_key = keys.random_bits(2 * n, self._rng_keys)
            self._signers[idx] = state
            self._record_delivery(signer(idx), "identity-key", bits)
            if state.qotp_key is not None:
                self._record_delivery(signer(idx), "pad-key", state.qotp_key)
        self._verifier_key = keys.random_bits(n, self._rng_keys)
        self._record_delivery(VERIFIER, "blind-key", self._verifier_key)
        self._is_setup = True

    def _record_delivery(self, to: PartyId, purpose: str, bits: str) -> None:
        record = self.ledger.distribute(
            KGC.label, to.label, purpose, bits, channel_kind="qkd"
        )
        self.transcript.append(
            "delivery",
            record.sender,
            record.receiver,
            {"purpose": purpose, "channel": record.channel_kind,
             "bits": bits, "length": len(bits)},
        )

    # -- phase 2: signing-angle registration

    def register_lambda(self, signer_index: int,
                        inject: tuple[float, ...] | None = None) -> tuple[float, ...]:
        st = self._signer_state(signer_index)
        n = self.config.n
        lams = tuple(float(x) for x in inject) if inject is not None \
            else keys.sample_lambda(n, self._rng_lambda)
        if len(lams) != n:
            raise LengthMismatchError(f"need {n} angles, got {len(lams)}")
        st.lambdas = lams
        payload: dict[str, Any] = {"lambdas": list(lams), "count": n}
        if self.config.euler_mode is EulerMode.GENERAL:
            st.thetas = tuple(float(x) for x in self._rng_lambda.uniform(0, math.pi, n))
            st.phis = tuple(float(x) for x in self._rng_lambda.uniform(0, 2 * math.pi, n))
            payload["thetas"] = list(st.thetas)
            payload["phis"] = list(st.phis)
        else:
            st.thetas = None
            st.phis = None
        # The angle transfer rides the authenticated channel, so the arbiter's
        # copy always matches the signer's.
        self._kgc_lambdas[signer_index] = lams
        self.transcript.append(
            "lambda-registration", signer(signer_index).label, KGC.label, payload
        )
        return lams

    # -- shared context construction

    def _signer_state(self, index: int) -> _SignerState:
        if not self._is_setup or index not in self._signers:
            raise UnknownSignerError(f"no signer {index} in this session")
        return self._signers[index]

    def context_for(self, signer_index: int) -> EncryptionContext:
        cfg = self.config
        st = self._signer_state(signer_index)
        if cfg.scheme is Scheme.QOTP:
            return EncryptionContext(scheme=cfg.scheme, n=cfg.n, qotp_key=st.qotp_key)
        if cfg.scheme is Scheme.CHAINED_CNOT:
            return EncryptionContext(scheme=cfg.scheme, n=cfg.n, perm=st.perm)
        if st.lambdas is None:
            raise MissingLambdaError(
                f"signer {signer_index} has not registered signing angles"
            )
        return EncryptionContext(
            scheme=cfg.scheme, n=cfg.n, perm=st.perm, lambdas=st.lambdas,
            thetas=st.thetas, phis=st.phis, euler_mode=cfg.euler_mode,
        )

    # -- phase 3: signing

    def sign(self, signer_index: int, message: StateVector,
             ops: OpList | None = None) -> SignaturePackage:
        cfg = self.config
        st = self._signer_state(signer_index)
        if cfg.scheme is Scheme.CHAINED_CU and st.lambdas is None:
            raise MissingLambdaError(
                f"signer {signer_index} has not registered signing angles"
            )
        if message.n != cfg.n:
            raise LengthMismatchError(
                f"message has {message.n} qubits, session runs n={cfg.n}"
            )
        ctx = self.context_for(signer_index)
        gate_ops: OpList = []
        signature = cipher.make_signature(message, ctx, gate_ops)
        self._log_gates(signer(signer_index).label, gate_ops, ops)
        self._log_skipped_steps(signer(signer_index).label, ctx)
        tag = keys.tag_of_bits(st.key_bits)
        pkg = SignaturePackage(
            signer=signer(signer_index), message=message, signature=signature, tag=tag
        )
        self.transcript.append(
            "package", pkg.signer.label, VERIFIER.label,
            {"tag": tag, "message_fp": _fingerprint(message),
             "signature_fp": _fingerprint(signature)},
        )
        return pkg

    def _log_gates(self, owner: str, gate_ops: OpList,
                   collect: OpList | None) -> None:
        for name, qubits in gate_ops:
            self.transcript.append(
                "gate", owner, owner, {"gate": name, "qubits": list(qubits)}
            )
            if collect is not None:
                collect.append((name, qubits))

    def _log_skipped_steps(self, owner: str, ctx: EncryptionContext) -> None:
        # Identity chain steps stay out of the gate count but leave a trace.
        if ctx.perm is None:
            return
        for j, t in enumerate(ctx.perm):
            if t == j:
                self.transcript.append(
                    "skipped-step", owner, owner, {"slot": j}
                )

    def log_initialize(self, owner: PartyId, n: int, ops: OpList | None = None) -> None:
        for q in range(n):
            self.transcript.append(
                "gate", owner.label, owner.label,
                {"gate": "initialize", "qubits": [q]},
            )
            if ops is not None:
                ops.append(("initialize", (q,)))

    def log_measure(self, owner: PartyId, n: int, ops: OpList | None = None) -> None:
        for q in range(n):
            self.transcript.append(
                "gate", owner.label, owner.label,
                {"gate": "measure", "qubits": [q]},
            )
            if ops is not None:
                ops.append(("measure", (q,)))

    # -- direct wiring: the signer hands the message register to the arbiter

    def send_message_direct(self, signer_index: int, message: StateVector) -> None:
        self._signer_state(signer_index)
        self._direct_messages[signer_index] = message
        self.transcript.append(
            "direct-message", signer(signer_index).label, KGC.label,
            {"message_fp": _fingerprint(message)},
        )

    # -- phase 4a: verifier blinds and forwards

    def verifier_forward(self, pkg: SignaturePackage) -> ForwardedPackage:
        if self._verifier_key is None:
            raise UnknownSignerError("session not set up; verifier holds no key")
        if len(pkg.tag) != len(self._verifier_key):
            raise LengthMismatchError(
                f"tag length {len(pkg.tag)} != verifier key length "
                f"{len(self._verifier_key)}"
            )
        blinded = keys.tag_of_bits(keys.xor_bits(pkg.tag, self._verifier_key))
        message = pkg.message if self.config.wiring is Wiring.RELAY else None
        fwd = ForwardedPackage(
            signer=pkg.signer, signature=pkg.signature, tag=blinded, message=message
        )
        self.transcript.append(
            "forward", VERIFIER.label, KGC.label,
            {"tag": blinded,
             "message_fp": None if message is None else _fingerprint(message),
             "signature_fp": _fingerprint(pkg.signature)},
        )
        return fwd

    # -- phase 4b: arbiter verification

    def kgc_verify(self, fwd: ForwardedPackage,
                   ops: OpList | None = None) -> VerificationOutcome:
        cfg = self.config
        idx = fwd.signer.index
        st = self._signer_state(idx)
        expected = keys.chained_tag(st.key_bits, self._verifier_key)
        if fwd.tag != expected:
            outcome = VerificationOutcome(accepted=False, stage="hash-check")
            self._finish(fwd, outcome)
            return outcome
        message = fwd.message
        if message is None:
            message = self._direct_messages.get(idx)
        if message is None:
            raise ContextMismatchError(
                "no message register available: relay wiring forwards none and "
                "the signer sent nothing directly"
            )
        if message.n != fwd.signature.n:
            raise LengthMismatchError(
                f"message has {message.n} qubits, signature {fwd.signature.n}"
            )
        if cfg.scheme is Scheme.CHAINED_CU and idx not in self._kgc_lambdas:
            raise MissingLambdaError(
                f"arbiter holds no signing angles for signer {idx}"
            )
        ctx = self.context_for(idx)
        gate_ops: OpList = []
        recovered = cipher.recover_message(fwd.signature, ctx, gate_ops)
        self._log_gates(KGC.label, gate_ops, ops)
        self._log_skipped_steps(KGC.label, ctx)
        self._last_recovered = recovered
        ov = qstate.overlap_sq(recovered, message)
        if cfg.verify_mode is VerifyMode.SAMPLED:
            accepted, ones = qstate.swap_test_sampled(
                recovered, message, cfg.swap_shots, self._rng_shots
            )
            outcome = VerificationOutcome(
                accepted=accepted, stage="state-compare", overlap_sq=ov,
                pass_probability=qstate.swap_test_pass_probability(recovered, message),
                swap_ones=ones,
            )
        else:
            outcome = VerificationOutcome(
                accepted=ov >= EXACT_ACCEPT_THRESHOLD, stage="state-compare",
                overlap_sq=ov,
                pass_probability=0.5 + 0.5 * ov,
            )
        if outcome.accepted:
            proof = SignatureProof(signer=fwd.signer,
                                   lambdas=self._kgc_lambdas.get(idx, ()),
                                   tag=fwd.tag)
            self._proofs[idx] = proof
            self.transcript.append(
                "proof-stored", KGC.label, KGC.label,
                {"signer": fwd.signer.label, "lambdas": list(proof.lambdas),
                 "tag": proof.tag},
            )
        self._finish(fwd, outcome)
        return outcome

    def _finish(self, fwd: ForwardedPackage, outcome: VerificationOutcome) -> None:
        self.transcript.append(
            "outcome", KGC.label, VERIFIER.label, outcome.to_payload()
        )
        self.transcript.outcome = outcome

    # -- dispute resolution

    def arbitrate_dispute(self, signer_id: PartyId | int) -> SignatureProof:
        idx = signer_id.index if isinstance(signer_id, PartyId) else int(signer_id)
        if idx not in self._proofs:
            raise NoProofStoredError(
                f"no accepted signature proof stored for signer {idx}"
            )
        return self._proofs[idx]

    @property
    def shots_rng(self) -> np.random.Generator:
        return self._rng_shots


# -- end-to-end run ----------------------------------------------------------------------

@dataclass
class ProtocolResult:
    """One run's artifacts: transcript plus the states and samples around it."""

    config: RunConfig
    session: ProtocolSession
    transcript: Transcript
    outcome: VerificationOutcome
    message_state: StateVector
    recovered_state: StateVector | None
    histogram: qstate.ShotHistogram | None
    proof: SignatureProof | None
    ops: OpList


def _tamper_package(pkg: SignaturePackage, spec: TamperSpec) -> SignaturePackage:
    from .attacks import apply_pauli_string  # call-time import avoids a cycle

    message = pkg.message
    tag = pkg.tag
    if spec.message_pauli is not None:
        message = apply_pauli_string(message, spec.message_pauli)
    if spec.tag_flip_bit is not None:
        tag = _flip_bit(tag, spec.tag_flip_bit)
    return SignaturePackage(
        signer=pkg.signer, message=message, signature=pkg.signature, tag=tag
    )


def _tamper_forwarded(fwd: ForwardedPackage, spec: TamperSpec) -> ForwardedPackage:
    from .attacks import apply_pauli_string  # call-time import avoids a cycle

    message = fwd.message
    tag = fwd.tag
    if spec.message_pauli is not None:
        if message is None:
            raise InvalidChannelError(
                "no message register travels verifier->kgc under direct wiring"
            )
        message = apply_pauli_string(message, spec.message_pauli)
    if spec.tag_flip_bit is not None:
        tag = _flip_bit(tag, spec.tag_flip_bit)
    return ForwardedPackage(
        signer=fwd.signer, signature=fwd.signature, tag=tag, message=message
    )


def run_protocol(config: RunConfig, sample_histogram: bool = True) -> ProtocolResult:
    """Execute setup, angle registration, signing, forwarding and verification.

    Returns the full result bundle; the transcript alone suffices to replay
    the run (it embeds the config and all seeds).
    """
    session = ProtocolSession(config)
    session.setup()
    idx = config.signer_index
    session.register_lambda(idx, inject=config.inject_lambdas)

    ops: OpList = []
    alice = signer(idx)
    # Two independent preparations from one recipe: the register to sign and
    # the clear copy the arbiter compares against.
    to_sign = config.message.prepare()
    clear_copy = config.message.prepare()
    session.transcript.append(
        "prepare-message", alice.label, alice.label,
        {"n": config.n, "copies": 2, "message_fp": _fingerprint(clear_copy)},
    )
    session.log_initialize(alice, config.n, ops)

    pkg = session.sign(idx, to_sign, ops)
    pkg = SignaturePackage(
        signer=pkg.signer, message=clear_copy, signature=pkg.signature, tag=pkg.tag
    )

    tamper = config.tamper
    if tamper is not None and tamper.channel == "signer-verifier":
        session.transcript.append(
            "tamper-injection", "adversary", VERIFIER.label, tamper.to_payload()
        )
        pkg = _tamper_package(pkg, tamper)

    if config.wiring is Wiring.DIRECT:
        session.send_message_direct(idx, pkg.message)

    fwd = session.verifier_forward(pkg)
    if tamper is not None and tamper.channel == "verifier-kgc":
        session.transcript.append(
            "tamper-injection", "adversary", KGC.label, tamper.to_payload()
        )
        fwd = _tamper_forwarded(fwd, tamper)

    outcome = session.kgc_verify(fwd, ops)

    recovered = None
    histogram = None
    proof = None
    if outcome.stage == "state-compare":
        recovered = session._last_recovered
        session.log_measure(KGC, config.n, ops)
        if sample_histogram:
            histogram = qstate.sample(recovered, config.shots, session.shots_rng)
            session.transcript.append(
                "histogram", KGC.label, KGC.label,
                {"shots": config.shots,
                 "distinct_outcomes": len(histogram.counts)},
            )
    if outcome.accepted:
        proof = session.arbitrate_dispute(idx)

    return ProtocolResult(
        config=config, session=session, transcript=session.transcript,
        outcome=outcome, message_state=clear_copy, recovered_state=recovered,
        histogram=histogram, proof=proof, ops=ops,
    )
