"""Arithmetic and linear algebra over prime fields GF(p).

Scalars are :class:`FieldElement` objects for readable small-scale work.
Vectors and matrices are plain ``numpy`` int64 arrays with entries in
``[0, p)``; every array routine takes the modulus explicitly.  Array
routines require ``p < 2**31`` so that a single product fits in int64.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable, Sequence

import numpy as np

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
MAX_ARRAY_PRIME = 2**31


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


class PrimeField:
    """The field GF(p) for a prime p."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
            raise ValueError(f"field modulus must be prime, got {p!r}")
        self.p = int(p)

    def __repr__(self) -> str:
        return f"GF({self.p})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("GF", self.p))

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(int(value) % self.p, self)

    def elements(self) -> list[FieldElement]:
        return [FieldElement(v, self) for v in range(self.p)]

    def array(self, values) -> np.ndarray:
        """Reduce ``values`` into an int64 array over this field."""
        if self.p >= MAX_ARRAY_PRIME:
            raise ValueError("array routines need p < 2**31")
        return np.mod(np.asarray(values, dtype=np.int64), self.p)


@total_ordering
@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.value < self.field.p:
            raise ValueError(f"{self.value} not in [0, {self.field.p})")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError(f"mixing {self.field} and {other.field}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.field.p
        return NotImplemented

    def _new(self, v: int) -> FieldElement:
        return FieldElement(v % self.field.p, self.field)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.value)

    def inverse(self) -> FieldElement:
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self.field}")
        return self._new(pow(self.value, -1, self.field.p))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * self._new(o).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return self._new(pow(self.value, k, self.field.p))

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.field.p
        return NotImplemented

    def __lt__(self, other) -> bool:
        return self.value < self._coerce(other)

    def __hash__(self) -> int:
        return hash((self.value, self.field.p))

    def __int__(self) -> int:
        return self.value

    __index__ = __int__


# ---------------------------------------------------------------------------
# array linear algebra
# ---------------------------------------------------------------------------


def _check_prime(p: int) -> None:
    if p >= MAX_ARRAY_PRIME:
        raise ValueError("array routines need p < 2**31")


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """``a @ b mod p`` without int64 overflow."""
    _check_prime(p)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1] if a.ndim else 1
    if inner * (p - 1) ** 2 < 2**63:
        return np.mod(a @ b, p)
    # split b into 16-bit limbs and the inner dimension into safe chunks
    chunk = max(1, (2**63 - 1) // ((p - 1) * 2**16))
    lo, hi = b & 0xFFFF, b >> 16
    acc_lo = acc_hi = 0
    for k in range(0, inner, chunk):
        ak = a[..., k:k + chunk]
        acc_lo = (acc_lo + np.mod(ak @ lo[k:k + chunk], p)) % p
        acc_hi = (acc_hi + np.mod(ak @ hi[k:k + chunk], p)) % p
    return np.asarray((acc_lo + acc_hi * 2**16 % p) % p, dtype=np.int64)


def inv_mod(v: int, p: int) -> int:
    return pow(int(v), -1, p)


def row_reduce(mat: np.ndarray, p: int, pivot_order: Sequence[int] | None = None):
    """Reduced row echelon form of ``mat`` over GF(p).

    Columns are scanned in ``pivot_order`` (default left to right); within a
    column the first nonzero remaining row is taken as pivot.  Returns
    ``(rref, pivot_columns)`` where ``rref`` keeps the input shape and the
    first ``len(pivot_columns)`` rows are the nonzero ones.
    """
    _check_prime(p)
    m = np.mod(np.array(mat, dtype=np.int64, copy=True), p)
    rows, cols = m.shape
    order = range(cols) if pivot_order is None else pivot_order
    pivots: list[int] = []
    r = 0
    for c in order:
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            m[[r, k]] = m[[k, r]]
        m[r] = m[r] * inv_mod(m[r, c], p) % p
        col = m[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            m[nzr] = (m[nzr] - np.outer(col[nzr], m[r])) % p
        pivots.append(int(c))
        r += 1
    return m, pivots


def rank(mat: np.ndarray, p: int) -> int:
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0
    return len(row_reduce(mat, p)[1])


def nullspace(mat: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows) of ``{x : mat @ x = 0}``."""
    mat = np.asarray(mat, dtype=np.int64)
    cols = mat.shape[1]
    if mat.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    rref, pivots = row_reduce(mat, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, pc in enumerate(pivots):
            basis[i, pc] = (-rref[r, f]) % p
    return basis


def row_space_basis(mat: np.ndarray, p: int) -> np.ndarray:
    mat = np.asarray(mat, dtype=np.int64)
    if mat.shape[0] == 0:
        return mat.reshape(0, mat.shape[1])
    rref, pivots = row_reduce(mat, p)
    return rref[: len(pivots)]


@dataclass(frozen=True)
class Solution:
    """Solution set of ``A x = b``.

    ``kind`` is ``"unique"``, ``"affine"`` or ``"inconsistent"``.  For the
    first two, every solution is ``particular + c @ nullspace`` for a
    coefficient row vector ``c``.
    """

    kind: str
    particular: np.ndarray | None = None
    nullspace: np.ndarray | None = None

    @property
    def consistent(self) -> bool:
        return self.kind != "inconsistent"


def gaussian_solve(a: np.ndarray, b: np.ndarray, p: int) -> Solution:
    """Describe the full solution set of ``a x = b`` over GF(p)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    if a.ndim != 2 or a.shape[0] != b.shape[0]:
        raise ValueError(f"shape mismatch: A is {a.shape}, b has {b.shape[0]} entries")
    rows, cols = a.shape
    aug = np.concatenate([np.mod(a, p), np.mod(b, p)[:, None]], axis=1)
    rref, pivots = row_reduce(aug, p, pivot_order=range(cols))
    r = len(pivots)
    if np.any(rref[r:, cols]):
        return Solution("inconsistent")
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = rref[i, cols]
    free = [c for c in range(cols) if c not in set(pivots)]
    ns = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        ns[i, f] = 1
        for j, pc in enumerate(pivots):
            ns[i, pc] = (-rref[j, f]) % p
    return Solution("unique" if not free else "affine", x, ns)


def inverse(mat: np.ndarray, p: int) -> np.ndarray:
    mat = np.asarray(mat, dtype=np.int64)
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise ValueError("inverse needs a square matrix")
    rref, pivots = row_reduce(np.concatenate([mat, np.eye(n, dtype=np.int64)], axis=1), p, range(n))
    if len(pivots) < n:
        raise ZeroDivisionError("matrix is singular")
    return rref[:, n:]


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


def vandermonde(xs: Sequence[int], width: int, p: int) -> np.ndarray:
    """Matrix with entry (i, j) = xs[i] ** j mod p."""
    xs = [int(x) % p for x in xs]
    if len(set(xs)) != len(xs):
        raise ValueError("vandermonde points must be distinct")
    out = np.ones((len(xs), width), dtype=np.int64)
    for j in range(1, width):
        out[:, j] = out[:, j - 1] * np.array(xs, dtype=np.int64) % p
    return out


def poly_eval(coeffs: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(list(coeffs)):
        acc = (acc * x + int(c)) % p
    return acc


def lagrange_interpolate(
    points: Iterable[tuple[int, int]], degree_bound: int, p: int
) -> np.ndarray | None:
    """Coefficients (low to high) of the degree <= ``degree_bound`` fit.

    The polynomial is fitted through the first ``degree_bound + 1`` points
    and the rest are checked against it; ``None`` means some point is off
    the polynomial.  Points may be ints or :class:`FieldElement`.
    """
    pts = [(int(x) % p, int(y) % p) for x, y in points]
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise ValueError("duplicate x values")
    need = degree_bound + 1
    if len(pts) < need:
        raise ValueError(f"need at least {need} points, got {len(pts)}")
    vm = vandermonde(xs[:need], need, p)
    ys = np.array([y for _, y in pts], dtype=np.int64)
    coeffs = matmul(inverse(vm, p), ys[:need], p)
    if len(pts) > need:
        check = matmul(vandermonde(xs[need:], need, p), coeffs, p)
        if np.any(check != ys[need:]):
            return None
    return coeffs
