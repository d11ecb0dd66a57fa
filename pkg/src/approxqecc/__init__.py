"""Approximate quantum error correction with authenticated registers, simulated in the Pauli frame."""

from .aqecc import (
    AqeccCodeword,
    AqeccParams,
    AttackScript,
    DecodeOutcome,
    Tamper,
    apply_attack,
    bare_decode,
    decode,
    decode3_warmup,
    encode,
    encode3_warmup,
)

__all__ = [
    "AqeccCodeword",
    "AqeccParams",
    "AttackScript",
    "DecodeOutcome",
    "Tamper",
    "apply_attack",
    "bare_decode",
    "decode",
    "decode3_warmup",
    "encode",
    "encode3_warmup",
]
