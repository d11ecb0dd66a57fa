"""One-time polynomial-evaluation MAC over GF(p).

``tag = b + sum_{i=1..L} a**i * m_i``.  For two distinct messages of length
L the forgery probability over a uniform key is at most ``L / p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .field import matmul


@dataclass(frozen=True)
class MacKey:
    a: int
    b: int


def _message_array(message, p: int) -> np.ndarray:
    m = np.asarray([int(v) for v in message], dtype=np.int64)
    if m.ndim != 1 or m.size == 0:
        raise ValueError("MAC message must be a non-empty sequence")
    if np.any(m < 0) or np.any(m >= p):
        raise ValueError(f"MAC message symbols must lie in [0, {p})")
    return m


def power_table(a: np.ndarray, length: int, p: int) -> np.ndarray:
    """Rows ``(a_k**1, ..., a_k**length) mod p`` for each entry a_k of ``a``.

    Built by doubling: columns ``w..2w-1`` are columns ``0..w-1`` times ``a**w``.
    """
    a = np.asarray(a, dtype=np.int64).reshape(-1) % p
    table = np.empty((a.size, length + 1), dtype=np.int64)
    table[:, 0] = 1
    w = 1
    while w <= length:
        aw = a if w == 1 else table[:, w - 1] * a % p
        c = min(w, length + 1 - w)
        table[:, w:w + c] = table[:, :c] * aw[:, None] % p
        w *= 2
    return table[:, 1:]


def mac_tag(key: MacKey, message: Sequence[int], p: int) -> int:
    m = _message_array(message, p)
    if not (0 <= key.a < p and 0 <= key.b < p):
        raise ValueError("MAC key outside field")
    powers = power_table(np.array([key.a]), m.size, p)[0]
    return int((key.b + int(matmul(powers, m, p))) % p)


def mac_verify(key: MacKey, message: Sequence[int], tag: int, p: int) -> bool:
    return mac_tag(key, message, p) == int(tag) % p and 0 <= int(tag) < p


def mac_tags(a: np.ndarray, b: np.ndarray, messages: np.ndarray, p: int) -> np.ndarray:
    """Vectorised tags: row k uses key ``(a[k], b[k])`` on ``messages[k]``."""
    messages = np.asarray(messages, dtype=np.int64)
    powers = power_table(a, messages.shape[1], p)
    dots = np.mod(np.einsum("kl,kl->k", powers, messages), p) if messages.shape[1] * (p - 1) ** 2 < 2**63 \
        else np.array([int(matmul(pw, m, p)) for pw, m in zip(powers, messages)], dtype=np.int64)
    return (np.asarray(b, dtype=np.int64) + dots) % p


def forgery_epsilon(length: int, p: int) -> float:
    """Upper bound on one-time forgery probability for length-``length`` messages."""
    return length / p
