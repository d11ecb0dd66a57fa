"""Clifford-twirl quantum authentication in the Pauli frame.

A register of ``m`` message qudits is padded with ``s`` trap qudits in
``|0>``, hit with a random Clifford ``C`` and a random Pauli pad.  Qudit
order is message first, then traps.  An attack ``E`` on the transmitted
register becomes ``C^-1 E C`` after Bob undoes the key (the pad only
contributes a phase), Bob accepts iff the traps still read ``0`` in the
computational basis, and the message sees the restriction of ``C^-1 E C``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.stats import beta

from .field import is_prime
from .pauli import (
    PauliVector,
    SymplecticMatrix,
    all_vectors,
    enumerate_symplectic,
    is_symplectic,
    random_pauli,
    random_symplectic,
    sp_order,
    symplectic_inverse,
)

ENUMERATION_LIMIT = 2_000_000


@dataclass(frozen=True)
class QAuthParams:
    m: int
    s: int
    p: int

    def __post_init__(self):
        if self.m < 1 or self.s < 1:
            raise ValueError(f"need m >= 1 and s >= 1, got m={self.m}, s={self.s}")
        if not is_prime(self.p):
            raise ValueError(f"qudit dimension must be prime, got {self.p}")

    @property
    def size(self) -> int:
        """Qudits per authenticated register."""
        return self.m + self.s

    @property
    def key_length(self) -> int:
        """Symbols in a serialized key: the Clifford matrix, then the pad."""
        return (2 * self.size) ** 2 + 2 * self.size


@dataclass(frozen=True)
class QAuthKey:
    clifford: SymplecticMatrix
    pad: PauliVector

    def to_symbols(self) -> np.ndarray:
        return np.concatenate([self.clifford.matrix.reshape(-1), self.pad.vector])

    @classmethod
    def from_symbols(cls, symbols, params: QAuthParams) -> QAuthKey:
        """Inverse of :meth:`to_symbols`; rejects anything that is not a valid key."""
        arr = np.asarray(symbols, dtype=np.int64)
        dim = 2 * params.size
        if arr.shape != (params.key_length,):
            raise ValueError(f"key must have {params.key_length} symbols, got shape {arr.shape}")
        if np.any(arr < 0) or np.any(arr >= params.p):
            raise ValueError(f"key symbols must lie in [0, {params.p})")
        mat = arr[: dim * dim].reshape(dim, dim)
        if not is_symplectic(mat, params.p):
            raise ValueError("key matrix is not symplectic")
        return cls(SymplecticMatrix(mat, params.p), PauliVector.from_vector(arr[dim * dim:], params.p))


class Verdict(NamedTuple):
    accept: bool
    residual: PauliVector  # on the m message qudits


@dataclass(frozen=True)
class AuthFrame:
    error: PauliVector


def qauth_keygen(params: QAuthParams, rng: np.random.Generator) -> QAuthKey:
    return QAuthKey(random_symplectic(params.size, params.p, rng), random_pauli(params.size, params.p, rng))


def effective_error(key: QAuthKey, attack: PauliVector) -> np.ndarray:
    """Symplectic vector of ``C^-1 E C`` (up to phase)."""
    c = key.clifford
    if attack.m != c.m or attack.p != c.p:
        raise ValueError(f"attack acts on {attack.m} qudits, key on {c.m}")
    return symplectic_inverse(c.matrix, c.p) @ attack.vector % c.p


def qauth_transmit(key: QAuthKey, attack: AuthFrame | PauliVector, m: int = 1) -> Verdict:
    e = attack.error if isinstance(attack, AuthFrame) else attack
    f = effective_error(key, e)
    size = e.m
    accept = not f[m:size].any()
    return Verdict(accept, PauliVector(f[:m], f[size:size + m], e.p))


def _bad_mask(images: np.ndarray, m: int, size: int) -> np.ndarray:
    """Accept-with-nontrivial-residual; coordinates run along axis -2."""
    traps_clear = ~np.any(images[..., m:size, :] != 0, axis=-2)
    msg_hit = np.any(images[..., :m, :] != 0, axis=-2) | np.any(images[..., size:size + m, :] != 0, axis=-2)
    return traps_clear & msg_hit


def _images(mats: np.ndarray, vectors: np.ndarray, p: int) -> np.ndarray:
    """``mats @ vectors mod p`` for a stack of small matrices, via one float GEMM.

    Entries are below p and the inner dimension is tiny, so float64 sums
    are exact.
    """
    n, dim, _ = mats.shape
    flat = mats.reshape(n * dim, dim).astype(np.float64) @ vectors.astype(np.float64)
    return (np.rint(flat).astype(np.int64) % p).reshape(n, dim, vectors.shape[1])


@dataclass(frozen=True)
class SoundnessResult:
    """Soundness of the scheme: worst case over nonidentity attacks.

    For an exact run ``epsilon`` is a :class:`Fraction` and ``upper_bound``
    equals it; for a sampled run ``epsilon`` is the worst empirical rate
    and ``upper_bound`` a Bonferroni-corrected one-sided Clopper-Pearson
    bound at confidence ``1 - alpha`` that holds for every attack at once.
    """

    params: QAuthParams
    exact: bool
    epsilon: Fraction | float
    upper_bound: float
    worst_attack: PauliVector
    keys_examined: int
    alpha: float = 0.0


def analytic_soundness(params: QAuthParams) -> Fraction:
    """Closed form for this family; Sp acts transitively on nonzero vectors.

    Bad images: trap X-parts zero, trap Z-parts free, message part nonzero.
    """
    p, m, s = params.p, params.m, params.s
    return Fraction(p**s * (p ** (2 * m) - 1), p ** (2 * (m + s)) - 1)


def qauth_soundness_oracle(
    params: QAuthParams,
    limit: int = ENUMERATION_LIMIT,
    samples: int = 2000,
    alpha: float = 1e-3,
    seed: int = 0,
) -> SoundnessResult:
    """Worst-case accept-and-corrupt probability over all nonidentity attacks.

    Enumerates the whole symplectic group when it has at most ``limit``
    elements; otherwise falls back to sampling ``samples`` uniform keys.
    Because ``C -> C^-1`` permutes the group, enumerating the group and
    applying each element directly covers every ``C^-1`` exactly once.
    """
    size, p = params.size, params.p
    attacks = all_vectors(2 * size, p)[1:].T  # (2 size, n_attacks)
    order = sp_order(size, p)
    if order <= limit:
        group = enumerate_symplectic(size, p, limit=limit)
        counts = np.zeros(attacks.shape[1], dtype=np.int64)
        chunk = max(1, 4_000_000 // attacks.size)
        for lo in range(0, group.shape[0], chunk):
            images = _images(group[lo:lo + chunk], attacks, p)
            counts += _bad_mask(images, params.m, size).sum(axis=0)
        worst = int(np.argmax(counts))
        eps = Fraction(int(counts[worst]), order)
        return SoundnessResult(params, True, eps, float(eps),
                               PauliVector.from_vector(attacks[:, worst], p), order)
    rng = np.random.default_rng(seed)
    counts = np.zeros(attacks.shape[1], dtype=np.int64)
    for _ in range(samples):
        inv = symplectic_inverse(random_symplectic(size, p, rng).matrix, p)
        counts += _bad_mask(_images(inv[None], attacks, p)[0], params.m, size)
    worst = int(np.argmax(counts))
    c = int(counts[worst])
    level = 1 - alpha / attacks.shape[1]
    ub = 1.0 if c == samples else float(beta.ppf(level, c + 1, samples - c))
    return SoundnessResult(params, False, c / samples, ub,
                           PauliVector.from_vector(attacks[:, worst], p), samples, alpha)


def attack_failure_probability(params: QAuthParams, attack: PauliVector, limit: int = ENUMERATION_LIMIT) -> Fraction:
    """Exact Pr over uniform keys that ``attack`` is accepted with a nontrivial residual."""
    if attack.is_identity():
        return Fraction(0)
    group = enumerate_symplectic(params.size, params.p, limit=limit)
    bad = 0
    chunk = 200_000
    for lo in range(0, group.shape[0], chunk):
        images = _images(group[lo:lo + chunk], attack.vector[:, None], params.p)
        bad += int(_bad_mask(images, params.m, params.size).sum())
    return Fraction(bad, group.shape[0])
