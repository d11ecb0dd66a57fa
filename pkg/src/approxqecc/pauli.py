"""Qudit Pauli operators in symplectic form, and Clifford maps as symplectic matrices.

A Pauli on ``m`` qudits of prime dimension ``p`` is a vector ``(x | z)`` in
GF(p)^{2m}; phases are not tracked.  The symplectic form is
``omega(u, v) = u_x . v_z - u_z . v_x``.  A Clifford acts on Pauli
coordinates by a matrix ``M`` with ``M^T J M = J``.

Uniform sampling of Sp(2m, p) uses the recursive coset structure: pick the
image ``v`` of the first X unit vector uniformly among nonzero vectors, the
image ``w`` of the first Z unit vector uniformly among vectors with
``omega(v, w) = 1``, and recurse on the symplectic complement of
``span(v, w)``.  Each matrix arises from exactly one sequence of choices,
and the number of choices at each level is fixed, so the result is uniform.
The same recursion drives exhaustive enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .field import inv_mod


@dataclass(frozen=True, eq=False)
class PauliVector:
    x: np.ndarray
    z: np.ndarray
    p: int

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.int64) % self.p
        z = np.asarray(self.z, dtype=np.int64) % self.p
        if x.shape != z.shape or x.ndim != 1:
            raise ValueError(f"x and z parts must be equal-length vectors, got {x.shape}, {z.shape}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    @classmethod
    def identity(cls, m: int, p: int) -> PauliVector:
        return cls(np.zeros(m, dtype=np.int64), np.zeros(m, dtype=np.int64), p)

    @classmethod
    def from_vector(cls, vec: Sequence[int], p: int) -> PauliVector:
        vec = np.asarray(vec, dtype=np.int64)
        if vec.ndim != 1 or vec.size % 2:
            raise ValueError("symplectic vector must have even length")
        m = vec.size // 2
        return cls(vec[:m], vec[m:], p)

    @classmethod
    def single(cls, m: int, p: int, position: int, x: int = 0, z: int = 0) -> PauliVector:
        """``X^x Z^z`` on one qudit (0-based ``position``), identity elsewhere."""
        xs = np.zeros(m, dtype=np.int64)
        zs = np.zeros(m, dtype=np.int64)
        xs[position], zs[position] = x, z
        return cls(xs, zs, p)

    @property
    def m(self) -> int:
        return self.x.size

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.nonzero((self.x != 0) | (self.z != 0))[0])

    @property
    def weight(self) -> int:
        return len(self.support)

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def restrict(self, positions: Iterable[int]) -> PauliVector:
        idx = list(positions)
        return PauliVector(self.x[idx], self.z[idx], self.p)

    def _check(self, other: PauliVector) -> None:
        if other.p != self.p or other.m != self.m:
            raise ValueError(f"Pauli mismatch: m={self.m},p={self.p} vs m={other.m},p={other.p}")

    def __add__(self, other: PauliVector) -> PauliVector:
        self._check(other)
        return PauliVector(self.x + other.x, self.z + other.z, self.p)

    def __sub__(self, other: PauliVector) -> PauliVector:
        self._check(other)
        return PauliVector(self.x - other.x, self.z - other.z, self.p)

    def __neg__(self) -> PauliVector:
        return PauliVector(-self.x, -self.z, self.p)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PauliVector) and other.p == self.p
                and np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z))

    def __hash__(self) -> int:
        return hash((self.p, self.x.tobytes(), self.z.tobytes()))

    def __repr__(self) -> str:
        return f"PauliVector(x={self.x.tolist()}, z={self.z.tolist()}, p={self.p})"


@lru_cache(maxsize=None)
def symplectic_form(m: int, p: int) -> np.ndarray:
    j = np.zeros((2 * m, 2 * m), dtype=np.int64)
    j[:m, m:] = np.eye(m, dtype=np.int64)
    j[m:, :m] = (-np.eye(m, dtype=np.int64)) % p
    j.setflags(write=False)
    return j


def omega(u: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    """Symplectic form on (..., 2m) arrays, broadcasting over leading axes."""
    m = u.shape[-1] // 2
    swapped = np.concatenate([v[..., m:], -v[..., :m]], axis=-1)
    return (u * swapped).sum(axis=-1) % p


@lru_cache(maxsize=None)
def _inverse_table(p: int) -> np.ndarray:
    table = np.array([0] + [pow(c, -1, p) for c in range(1, p)], dtype=np.int64)
    table.setflags(write=False)
    return table


def symplectic_product(a: PauliVector, b: PauliVector) -> int:
    """Zero iff ``a`` and ``b`` commute up to phase."""
    a._check(b)
    return int((a.x @ b.z - a.z @ b.x) % a.p)


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    matrix: np.ndarray
    p: int

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.int64) % self.p
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % 2:
            raise ValueError(f"symplectic matrix must be 2m x 2m, got {mat.shape}")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def identity(cls, m: int, p: int) -> SymplecticMatrix:
        return cls(np.eye(2 * m, dtype=np.int64), p)

    @property
    def m(self) -> int:
        return self.matrix.shape[0] // 2

    def is_valid(self) -> bool:
        return is_symplectic(self.matrix, self.p)

    def inverse(self) -> SymplecticMatrix:
        return SymplecticMatrix(symplectic_inverse(self.matrix, self.p), self.p)

    def __matmul__(self, other: SymplecticMatrix) -> SymplecticMatrix:
        if other.p != self.p or other.m != self.m:
            raise ValueError("symplectic matrix mismatch")
        return SymplecticMatrix(self.matrix @ other.matrix, self.p)

    def __eq__(self, other) -> bool:
        return isinstance(other, SymplecticMatrix) and other.p == self.p and np.array_equal(self.matrix, other.matrix)

    def __hash__(self) -> int:
        return hash((self.p, self.matrix.tobytes()))


def is_symplectic(mat: np.ndarray, p: int) -> bool:
    mat = np.asarray(mat, dtype=np.int64)
    j = symplectic_form(mat.shape[0] // 2, p)
    return bool(np.array_equal((mat.T @ j @ mat) % p, j))


def symplectic_inverse(mat: np.ndarray, p: int) -> np.ndarray:
    """``J^{-1} M^T J``; works on stacks of matrices too."""
    mat = np.asarray(mat, dtype=np.int64)
    j = symplectic_form(mat.shape[-1] // 2, p)
    return j.T @ np.swapaxes(mat, -1, -2) @ j % p


def conjugate(c: SymplecticMatrix, pauli: PauliVector) -> PauliVector:
    if c.p != pauli.p or c.m != pauli.m:
        raise ValueError(f"cannot conjugate m={pauli.m} Pauli by m={c.m} Clifford")
    return PauliVector.from_vector(c.matrix @ pauli.vector, pauli.p)


def sp_order(m: int, p: int) -> int:
    """|Sp(2m, p)| = prod_i p^(2i-1) (p^(2i) - 1)."""
    out = 1
    for i in range(1, m + 1):
        out *= p ** (2 * i - 1) * (p ** (2 * i) - 1)
    return out


def _complete_basis(v: np.ndarray, w: np.ndarray, p: int) -> np.ndarray:
    """Symplectic matrix with first X column ``v``, first Z column ``w``.

    Requires ``omega(v, w) = 1``.  The other columns are a symplectic basis
    of the complement of ``span(v, w)``, found by symplectic Gram-Schmidt
    on the projected unit vectors; the result depends only on ``(v, w)``.
    """
    dim = v.size
    r = dim // 2

    def project(vecs, a, b):
        # remove the span(a, b) component; assumes omega(a, b) = 1
        wa = omega(vecs, a[None, :], p)[:, None]
        wb = omega(vecs, b[None, :], p)[:, None]
        return (vecs - wb * a[None, :] + wa * b[None, :]) % p

    pool = project(np.eye(dim, dtype=np.int64), v, w)
    es, fs = [], []
    while len(es) < r - 1:
        pool = pool[np.any(pool, axis=1)]
        u = pool[0]
        pairing = omega(pool, u[None, :], p)  # omega(s, u)
        k = int(np.nonzero(pairing)[0][0])
        u2 = pool[k] * inv_mod((-pairing[k]) % p, p) % p  # omega(u, u2) = 1
        es.append(u)
        fs.append(u2)
        pool = project(np.delete(pool, [0, k], axis=0), u, u2)
    cols = [v] + es + [w] + fs
    return np.stack(cols, axis=1) % p


def _embed(sub: np.ndarray, r: int) -> np.ndarray:
    """Lift (..., 2r-2, 2r-2) matrices to act on all but coordinates 0 and r."""
    keep = [i for i in range(2 * r) if i not in (0, r)]
    out = np.zeros(sub.shape[:-2] + (2 * r, 2 * r), dtype=np.int64)
    out[..., 0, 0] = 1
    out[..., r, r] = 1
    out[(...,) + np.ix_(keep, keep)] = sub
    return out


def random_symplectic(m: int, p: int, rng: np.random.Generator) -> SymplecticMatrix:
    if m < 1:
        raise ValueError("need m >= 1")
    return SymplecticMatrix(random_symplectic_batch(m, p, rng, 1)[0], p)


def random_symplectic_batch(m: int, p: int, rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` independent uniform elements of Sp(2m, p), shape (count, 2m, 2m).

    Builds the columns ``v_1..v_m | w_1..w_m`` pair by pair.  Projecting a
    uniform vector onto the complement of the pairs chosen so far gives a
    uniform vector of that complement; ``v_i`` is such a vector conditioned
    on being nonzero, and ``w_i`` one conditioned on ``omega(v_i, w_i) != 0``,
    rescaled so the pairing is 1.  Rescaling maps each level set of the
    pairing bijectively onto the level set ``1``, so ``w_i`` is uniform there.
    """
    dim = 2 * m
    half = m
    cols = np.zeros((count, dim, dim), dtype=np.int64)  # rows here are columns of the result
    inv = _inverse_table(p)

    def swap(u):
        # omega(a, b) = a . swap(b)
        return np.concatenate([u[..., half:], -u[..., :half]], axis=-1)

    def project(u, i):
        if i == 0:
            return u
        vs, ws = cols[:, :i], cols[:, half:half + i]
        a = np.einsum("cd,ckd->ck", u, swap(ws))  # omega(u, w_k)
        b = np.einsum("cd,ckd->ck", u, swap(vs))  # omega(u, v_k)
        return (u - np.einsum("ck,ckd->cd", a, vs) + np.einsum("ck,ckd->cd", b, ws)) % p

    for i in range(m):
        v = project(rng.integers(0, p, size=(count, dim)), i)
        bad = ~v.any(axis=1)
        while bad.any():
            v[bad] = project(rng.integers(0, p, size=(count, dim)), i)[bad]
            bad = ~v.any(axis=1)
        cols[:, i] = v
        w = project(rng.integers(0, p, size=(count, dim)), i)
        c = (w * swap(v)).sum(axis=1) % p  # omega(w, v)
        bad = c == 0
        while bad.any():
            w[bad] = project(rng.integers(0, p, size=(count, dim)), i)[bad]
            c = (w * swap(v)).sum(axis=1) % p
            bad = c == 0
        # omega(v, w) = -c; rescale to make it 1
        cols[:, half + i] = w * inv[(-c) % p][:, None] % p
    return cols.transpose(0, 2, 1).copy()


def random_pauli(m: int, p: int, rng: np.random.Generator) -> PauliVector:
    return PauliVector.from_vector(rng.integers(0, p, size=2 * m), p)


def all_vectors(dim: int, p: int) -> np.ndarray:
    """Every vector of GF(p)^dim, lexicographic order, as a (p**dim, dim) array."""
    grids = np.indices((p,) * dim).reshape(dim, -1).T
    return grids.astype(np.int64)


@lru_cache(maxsize=None)
def _pair_completions(r: int, p: int) -> np.ndarray:
    vecs = all_vectors(2 * r, p)[1:]
    mats = []
    for v in vecs:
        ws = vecs[omega(vecs, v[None, :], p) == (p - 1) % p]  # omega(v, w) = 1 <=> omega(w, v) = -1
        for w in ws:
            mats.append(_complete_basis(v, w, p))
    return np.stack(mats)


def enumerate_symplectic(m: int, p: int, limit: int = 3_000_000) -> np.ndarray:
    """All of Sp(2m, p) as an (N, 2m, 2m) array; refuses above ``limit`` elements."""
    order = sp_order(m, p)
    if order > limit:
        raise ValueError(f"|Sp({2 * m},{p})| = {order} exceeds enumeration limit {limit}")
    return _enumerate_sp(m, p)


@lru_cache(maxsize=4)
def _enumerate_sp(r: int, p: int) -> np.ndarray:
    heads = _pair_completions(r, p)
    if r == 1:
        heads.setflags(write=False)
        return heads
    tails = _embed(_enumerate_sp(r - 1, p), r)
    dtype = np.int8 if p < 128 else np.int64
    out = np.empty((heads.shape[0] * tails.shape[0], 2 * r, 2 * r), dtype=dtype)
    for i, h in enumerate(heads):
        block = np.einsum("ij,njk->nik", h, tails) % p
        out[i * tails.shape[0]:(i + 1) * tails.shape[0]] = block
    out.setflags(write=False)
    return out
