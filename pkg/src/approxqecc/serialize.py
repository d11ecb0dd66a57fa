"""Canonical JSON documents for codewords, decode outcomes and reports.

Every document carries ``format`` and ``version``.  Field elements are plain
decimal integers; moduli appear once, in the header.  Keys are sorted and
the layout is fixed, so equal objects serialize to identical bytes.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .aqecc import (
    AqeccCodeword,
    AqeccParams,
    Classical,
    DecodeOutcome,
    GroundTruth,
    Register,
    WarmupKeys,
    reconstructed_keys_match,
)
from .mac import MacKey
from .pauli import PauliVector
from .qauth import QAuthKey
from .sharing import EtssShare, ShamirShare

VERSION = 1
CODEWORD = "approxqecc/codeword"
VIEW = "approxqecc/adversary-view"
OUTCOME = "approxqecc/decode-outcome"
REPORT = "approxqecc/experiment-report"


class ParseError(ValueError):
    """A document is not valid JSON or does not have the expected shape."""


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _ints(arr) -> list[int]:
    return [int(v) for v in np.asarray(arr).reshape(-1)]


# -- writing -----------------------------------------------------------------


def params_doc(params: AqeccParams) -> dict:
    return {"n": params.n, "t": params.t, "p": params.p, "s": params.s, "p_mac": params.p_mac}


def _header(params: AqeccParams, scheme: str) -> dict:
    return {"params": params_doc(params), "scheme": scheme,
            "moduli": {"qudit": params.p, "mac": params.p_mac, "share": params.etss.p_share}}


def _pauli_doc(v: PauliVector) -> dict:
    return {"x": _ints(v.x), "z": _ints(v.z)}


def classical_doc(c: Classical) -> dict:
    if isinstance(c, WarmupKeys):
        return {"key_copies": {str(j): _ints(v) for j, v in sorted(c.copies.items())}}
    return {
        "share": {"index": int(c.shamir.index), "values": _ints(c.shamir.values)},
        "verify_keys": {str(j): [int(k.a), int(k.b)] for j, k in sorted(c.verify_keys.items())},
        "tags": {str(j): int(v) for j, v in sorted(c.own_tags.items())},
    }


def codeword_doc(cw: AqeccCodeword, ground_truth: bool = True) -> dict:
    doc = {
        "format": CODEWORD,
        "version": VERSION,
        "header": _header(cw.params, cw.scheme),
        "registers": [{"index": i, "frame": _pauli_doc(r.frame), "classical": classical_doc(r.classical)}
                      for i, r in enumerate(cw.registers, start=1)],
    }
    if ground_truth and cw.ground_truth is not None:
        gt = cw.ground_truth
        doc["ground_truth"] = {
            "note": "harness only; never read by decode",
            "keys": [_ints(k.to_symbols()) for k in gt.keys],
            "classical": [classical_doc(c) for c in gt.classical],
        }
    return doc


def adversary_view_doc(cw: AqeccCodeword, corrupted) -> dict:
    """What a coalition B holds classically; no frames, no ground truth."""
    view = cw.adversary_view(corrupted)
    return {
        "format": VIEW,
        "version": VERSION,
        "header": _header(cw.params, cw.scheme),
        "corrupted": sorted(view),
        "classical": {str(i): classical_doc(c) for i, c in view.items()},
    }


def outcome_doc(outcome: DecodeOutcome, cw: AqeccCodeword | None = None) -> dict:
    tr = outcome.trace
    keys_ok = reconstructed_keys_match(cw, outcome) if cw is not None else None
    return {
        "format": OUTCOME,
        "version": VERSION,
        "tag": outcome.tag,
        "residual": None if outcome.residual is None else _pauli_doc(outcome.residual),
        "identity": bool(outcome.recovered and outcome.residual.is_identity()),
        "trace": {
            "valid_shares": [bool(v) for v in tr.valid_shares],
            "tag_counts": [int(c) for c in tr.tag_counts],
            "discarded_shares": list(tr.discarded_shares),
            "rejected_registers": list(tr.rejected),
            "abort_step": tr.abort_step,
            "reason": tr.reason,
            "warmup_case": tr.case,
            "reconstructed_keys_match": keys_ok,
        },
    }


# -- reading -----------------------------------------------------------------


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    return doc


def _get(obj: Any, key: str, kind=None, where: str = ""):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"missing field {where + key!r}")
    value = obj[key]
    if kind is not None and (not isinstance(value, kind) or kind is int and isinstance(value, bool)):
        raise ParseError(f"field {where + key!r} has the wrong type")
    return value


def _int_list(value, where: str, length: int | None = None) -> np.ndarray:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise ParseError(f"{where} must be a list of integers")
    if length is not None and len(value) != length:
        raise ParseError(f"{where} must have {length} entries, got {len(value)}")
    return np.array(value, dtype=np.int64)


def _label_map(obj, where: str) -> dict[int, Any]:
    if not isinstance(obj, dict):
        raise ParseError(f"{where} must be an object")
    try:
        return {int(k): v for k, v in obj.items()}
    except ValueError:
        raise ParseError(f"{where} keys must be register labels") from None


def _parse_params(doc: dict) -> tuple[AqeccParams, str]:
    header = _get(doc, "header", dict)
    pd = _get(header, "params", dict, "header.")
    try:
        params = AqeccParams(*(int(_get(pd, k, int, "header.params.")) for k in ("n", "t", "p", "s", "p_mac")))
    except ValueError as exc:
        raise ParseError(f"bad parameters: {exc}") from None
    scheme = _get(header, "scheme", str, "header.")
    if scheme not in ("etss", "warmup"):
        raise ParseError(f"unknown scheme {scheme!r}")
    return params, scheme


def _parse_classical(obj, params: AqeccParams, scheme: str, where: str) -> Classical:
    if scheme == "warmup":
        copies = _label_map(_get(obj, "key_copies", dict, where), where + "key_copies")
        return WarmupKeys({j: _int_list(v, f"{where}key_copies.{j}") for j, v in copies.items()})
    share = _get(obj, "share", dict, where)
    index = _get(share, "index", int, where + "share.")
    values = _int_list(_get(share, "values", list, where + "share."), where + "share.values")
    keys = {}
    for j, pair in _label_map(_get(obj, "verify_keys", dict, where), where + "verify_keys").items():
        a, b = _int_list(pair, f"{where}verify_keys.{j}", 2)
        keys[j] = MacKey(int(a), int(b))
    tags = {}
    for j, v in _label_map(_get(obj, "tags", dict, where), where + "tags").items():
        if not isinstance(v, int) or isinstance(v, bool):
            raise ParseError(f"{where}tags.{j} must be an integer")
        tags[j] = v
    return EtssShare(ShamirShare(index, values), keys, tags)


def _parse_frame(obj, params: AqeccParams, where: str) -> PauliVector:
    size = 1 + params.s
    x = _int_list(_get(obj, "x", list, where), where + "x", size)
    z = _int_list(_get(obj, "z", list, where), where + "z", size)
    if np.any((x < 0) | (x >= params.p)) or np.any((z < 0) | (z >= params.p)):
        raise ParseError(f"{where} entries must lie in [0, {params.p})")
    return PauliVector(x, z, params.p)


def parse_codeword(text: str) -> AqeccCodeword:
    doc = loads(text)
    if doc.get("format") != CODEWORD:
        raise ParseError(f"expected format {CODEWORD!r}, got {doc.get('format')!r}")
    if doc.get("version") != VERSION:
        raise ParseError(f"unsupported version {doc.get('version')!r}")
    params, scheme = _parse_params(doc)
    regs = _get(doc, "registers", list)
    if len(regs) != params.n:
        raise ParseError(f"expected {params.n} registers, got {len(regs)}")
    registers = []
    for k, r in enumerate(regs, start=1):
        where = f"registers[{k}]."
        if _get(r, "index", int, where) != k:
            raise ParseError(f"{where}index must be {k}")
        registers.append(Register(_parse_frame(_get(r, "frame", dict, where), params, where + "frame."),
                                  _parse_classical(_get(r, "classical", dict, where), params, scheme,
                                                   where + "classical.")))
    gt = None
    if "ground_truth" in doc:
        g = _get(doc, "ground_truth", dict)
        keys = []
        for k, sym in enumerate(_get(g, "keys", list, "ground_truth."), start=1):
            arr = _int_list(sym, f"ground_truth.keys[{k}]", params.key_length)
            try:
                keys.append(QAuthKey.from_symbols(arr, params.qauth))
            except ValueError as exc:
                raise ParseError(f"ground_truth.keys[{k}]: {exc}") from None
        classical = tuple(_parse_classical(c, params, scheme, f"ground_truth.classical[{k}].")
                          for k, c in enumerate(_get(g, "classical", list, "ground_truth."), start=1))
        gt = GroundTruth(tuple(keys), classical)
    return AqeccCodeword(params, tuple(registers), scheme, gt)
