"""Shamir secret sharing and the pairwise-MAC error-tolerant scheme.

Vector secrets are shared symbol by symbol with independent polynomials of
degree ``d - 1`` evaluated at points ``1..n``.  The error-tolerant variant
gives every ordered pair of parties a fresh one-time MAC key: party ``j``
keeps ``a_ji`` and party ``i`` keeps the tag ``h_{a_ji}(s_i)``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .field import inverse, is_prime, matmul, vandermonde
from .mac import MacKey, mac_tags


@dataclass(frozen=True)
class EtssParams:
    n: int
    d: int
    p_share: int
    p_mac: int

    def __post_init__(self):
        if not 1 <= self.d <= self.n:
            raise ValueError(f"need 1 <= d <= n, got d={self.d}, n={self.n}")
        if not is_prime(self.p_share) or self.p_share <= self.n:
            raise ValueError(f"p_share must be a prime > n, got {self.p_share}")
        if not is_prime(self.p_mac) or self.p_mac < self.p_share:
            raise ValueError(f"p_mac must be a prime >= p_share, got {self.p_mac}")

    @property
    def t(self) -> int:
        return self.d - 1

    @property
    def tau(self) -> int:
        """Number of valid tags a share needs to be kept."""
        return self.n - 1 - self.t


@dataclass(frozen=True, eq=False)
class ShamirShare:
    index: int
    values: np.ndarray

    def __eq__(self, other) -> bool:
        return (isinstance(other, ShamirShare) and self.index == other.index
                and np.array_equal(self.values, other.values))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class EtssShare:
    shamir: ShamirShare
    verify_keys: dict[int, MacKey]  # j -> a_ij, used to check party j's share
    own_tags: dict[int, int]  # j -> h_{a_ji}(s_i)

    def __eq__(self, other) -> bool:
        return (isinstance(other, EtssShare) and self.shamir == other.shamir
                and self.verify_keys == other.verify_keys and self.own_tags == other.own_tags)


@dataclass(frozen=True)
class EtssResult:
    secret: np.ndarray | None
    valid: tuple[bool, ...]
    tag_counts: tuple[int, ...]

    @property
    def aborted(self) -> bool:
        return self.secret is None


def _secret_array(secret, p: int) -> np.ndarray:
    s = np.asarray([int(v) for v in secret], dtype=np.int64)
    if s.size == 0:
        raise ValueError("secret must have at least one symbol")
    if np.any(s < 0) or np.any(s >= p):
        raise ValueError(f"secret symbols must lie in [0, {p})")
    return s


def shamir_share(secret: Sequence[int], params: EtssParams, rng: np.random.Generator) -> list[ShamirShare]:
    p, n, d = params.p_share, params.n, params.d
    s = _secret_array(secret, p)
    coeffs = np.empty((s.size, d), dtype=np.int64)
    coeffs[:, 0] = s
    coeffs[:, 1:] = rng.integers(0, p, size=(s.size, d - 1))
    evals = matmul(coeffs, _evaluator(n, d, p), p)  # (L, n)
    return [ShamirShare(i + 1, evals[:, i].copy()) for i in range(n)]


@lru_cache(maxsize=64)
def _evaluator(n: int, d: int, p: int) -> np.ndarray:
    vm = vandermonde(range(1, n + 1), d, p).T.copy()
    vm.setflags(write=False)
    return vm


@lru_cache(maxsize=4096)
def _interpolator(xs: tuple[int, ...], d: int, p: int) -> np.ndarray:
    inv = inverse(vandermonde(xs, d, p), p)
    inv.setflags(write=False)
    return inv


def shamir_reconstruct(shares: Sequence[ShamirShare], params: EtssParams) -> np.ndarray | None:
    """Recover the secret, or ``None`` if the shares do not lie on one polynomial."""
    p, d = params.p_share, params.d
    if len(shares) < d:
        raise ValueError(f"need at least {d} shares, got {len(shares)}")
    xs = [sh.index for sh in shares]
    if len(set(xs)) != len(xs):
        raise ValueError("duplicate share indices")
    ys = np.stack([np.asarray(sh.values, dtype=np.int64) for sh in shares])  # (k, L)
    coeffs = matmul(_interpolator(tuple(xs[:d]), d, p), ys[:d], p)  # (d, L)
    if len(shares) > d:
        predicted = matmul(vandermonde(xs[d:], d, p), coeffs, p)
        if not np.array_equal(predicted, ys[d:]):
            return None
    return coeffs[0]


def mac_message(share: ShamirShare) -> np.ndarray:
    """Injective encoding of a share as a MAC message: index, then values."""
    return np.concatenate([[share.index], np.asarray(share.values, dtype=np.int64)])


def etss_share(secret: Sequence[int], params: EtssParams, rng: np.random.Generator) -> list[EtssShare]:
    n, p_mac = params.n, params.p_mac
    shamir = shamir_share(secret, params, rng)
    a = rng.integers(0, p_mac, size=(n, n))
    b = rng.integers(0, p_mac, size=(n, n))
    pairs = [(j, i) for i in range(n) for j in range(n) if j != i]
    js = np.array([j for j, _ in pairs])
    is_ = np.array([i for _, i in pairs])
    msgs = np.stack([mac_message(shamir[i]) for i in is_])
    tags = mac_tags(a[js, is_], b[js, is_], msgs, p_mac)
    keys: list[dict[int, MacKey]] = [{} for _ in range(n)]
    own: list[dict[int, int]] = [{} for _ in range(n)]
    for (j, i), tag in zip(pairs, tags):
        keys[j][i + 1] = MacKey(int(a[j, i]), int(b[j, i]))
        own[i][j + 1] = int(tag)
    return [EtssShare(shamir[i], keys[i], own[i]) for i in range(n)]


def _well_formed(slot: int, share: EtssShare, params: EtssParams, length: int) -> bool:
    sh = share.shamir
    v = np.asarray(sh.values)
    return (sh.index == slot and v.shape == (length,)
            and bool(np.all((v >= 0) & (v < params.p_share))))


def etss_reconstruct(
    shares: Sequence[EtssShare], params: EtssParams, length: int | None = None
) -> EtssResult:
    """Filter shares by tag count, then reconstruct with a full consistency check.

    ``shares[i]`` is the content of slot ``i + 1``; tampered or garbage
    content is allowed.  A share is kept when at least ``params.tau`` of the
    other parties' keys accept its tag.  The result is aborted when fewer
    than ``d`` shares survive or the survivors disagree.  ``length`` is the
    expected number of secret symbols; by default the most common share
    length is assumed (honest parties are a majority).
    """
    n, p_mac = params.n, params.p_mac
    if len(shares) != n:
        raise ValueError(f"expected {n} share slots, got {len(shares)}")
    if length is None:
        length = Counter(np.asarray(sh.shamir.values).size for sh in shares).most_common(1)[0][0]
    formed = [_well_formed(i + 1, sh, params, length) for i, sh in enumerate(shares)]

    rows_a, rows_b, rows_m, rows_t, owner = [], [], [], [], []
    for i, sh in enumerate(shares):
        if not formed[i]:
            continue
        msg = mac_message(sh.shamir)
        for j in range(n):
            if j == i:
                continue
            key = shares[j].verify_keys.get(i + 1)
            tag = sh.own_tags.get(j + 1)
            if key is None or tag is None or not (0 <= tag < p_mac):
                continue
            if not (0 <= key.a < p_mac and 0 <= key.b < p_mac):
                continue
            rows_a.append(key.a); rows_b.append(key.b); rows_m.append(msg)
            rows_t.append(tag); owner.append(i)
    counts = np.zeros(n, dtype=np.int64)
    if owner:
        ok = mac_tags(np.array(rows_a), np.array(rows_b), np.stack(rows_m), p_mac) == np.array(rows_t)
        np.add.at(counts, np.array(owner)[ok], 1)
    valid = tuple(bool(formed[i] and counts[i] >= params.tau) for i in range(n))
    kept = [shares[i].shamir for i in range(n) if valid[i]]
    secret = shamir_reconstruct(kept, params) if len(kept) >= params.d else None
    return EtssResult(secret, valid, tuple(int(c) for c in counts))
