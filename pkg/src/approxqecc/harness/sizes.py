"""Per-register size accounting."""

from __future__ import annotations

import math

from ..aqecc import AqeccParams


def _bits(modulus: int) -> int:
    return math.ceil(math.log2(modulus))


def size_report(params: AqeccParams) -> dict:
    """Exact qudit and bit counts per register, with the asymptotic formula beside them.

    Classical content of register i: its share (index plus values), one MAC
    key ``(a, b)`` for each other party and one tag for each other party.
    The formula column is ``l + n log2(1/eps)`` with ``l`` the message
    length in qudits and ``eps`` the MAC forgery bound; it is printed for
    comparison only.
    """
    n, pm = params.n, params.p_mac
    bits = _bits(pm)
    share_bits = (1 + params.secret_length) * bits
    key_bits = (n - 1) * 2 * bits
    tag_bits = (n - 1) * bits
    message = n - 2 * params.t
    return {
        "n": n,
        "qudits_per_register": 1 + params.s,
        "qudit_dimension": params.p,
        "share_bits": share_bits,
        "mac_key_count": n - 1,
        "mac_key_bits": key_bits,
        "tag_count": n - 1,
        "tag_bits": tag_bits,
        "classical_bits_per_register": share_bits + key_bits + tag_bits,
        "message_qudits": message,
        "formula_l_plus_n_log_inv_eps": message + n * math.log2(1 / params.eps_mac),
    }
