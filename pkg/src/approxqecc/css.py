"""Polynomial (quantum Reed-Solomon) CSS codes [[n, n-2t, t+1]]_p.

Evaluation points are ``0..n-1``, so ``p >= n`` suffices.  With
``C1 = {f(0..n-1) : deg f <= n-t-1}`` and ``C2 = {f(0..n-1) : deg f <= t-1}``
the code is CSS(C1, C2): X-type stabilizers come from C2, Z-type from C1^perp.

* ``hz`` has rows spanning C1^perp; ``hz @ x`` is the computational-basis
  syndrome of an error with X-part ``x``.
* ``hx`` has rows spanning C2; ``hx @ z`` is the Fourier-basis syndrome.
* ``logical_x[j]`` evaluates ``x**(t+j)``; ``logical_z`` is the dual basis in
  C2^perp, so the logical class of ``(x | z)`` is ``(x . LZ_j | z . LX_j)``.

Positions are 0-based throughout this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable

import numpy as np

from .field import gaussian_solve, is_prime, matmul, nullspace, rank, row_reduce, vandermonde
from .pauli import PauliVector, all_vectors

BRUTEFORCE_LIMIT = 10**6


@dataclass(frozen=True, eq=False)
class CssCode:
    n: int
    t: int
    p: int
    hz: np.ndarray
    hx: np.ndarray
    logical_x: np.ndarray
    logical_z: np.ndarray
    _solvers: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def k(self) -> int:
        return self.n - 2 * self.t

    @property
    def distance(self) -> int:
        """Design distance t + 1."""
        return self.t + 1


@dataclass(frozen=True)
class FrameState:
    code: CssCode
    error: PauliVector

    def __post_init__(self):
        if self.error.m != self.code.n or self.error.p != self.code.p:
            raise ValueError(f"frame error must act on {self.code.n} qudits over GF({self.code.p})")


@dataclass(frozen=True)
class Correction:
    residual: PauliVector  # logical class on k qudits


@lru_cache(maxsize=None)
def build_polynomial_code(n: int, t: int, p: int) -> CssCode:
    if not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    if p < n:
        raise ValueError(f"need p >= n for {n} distinct evaluation points, got p={p}")
    if not (t >= 0 and 2 * t < n):
        raise ValueError(f"need 0 <= 2t < n, got t={t}, n={n}")
    pts = range(n)
    gen_c1 = vandermonde(pts, n - t, p).T  # rows: evaluations of x^0..x^{n-t-1}
    hz = nullspace(gen_c1, p)
    hx = gen_c1[:t].copy()
    lx = gen_c1[t:n - t].copy()
    k = n - 2 * t
    lz = np.zeros((k, n), dtype=np.int64)
    system = np.concatenate([hx, lx])
    for j in range(k):
        rhs = np.zeros(t + k, dtype=np.int64)
        rhs[t + j] = 1
        lz[j] = gaussian_solve(system, rhs, p).particular
    for mat in (hz, hx, lx, lz):
        mat.setflags(write=False)
    return CssCode(n, t, p, hz, hx, lx, lz)


def _check_error(code: CssCode, pauli: PauliVector) -> None:
    if pauli.m != code.n or pauli.p != code.p:
        raise ValueError(f"expected a Pauli on {code.n} qudits over GF({code.p}), got m={pauli.m}, p={pauli.p}")


def syndrome(code: CssCode, pauli: PauliVector) -> tuple[np.ndarray, np.ndarray]:
    _check_error(code, pauli)
    return matmul(code.hz, pauli.x, code.p), matmul(code.hx, pauli.z, code.p)


def logical_class(code: CssCode, pauli: PauliVector) -> PauliVector:
    """Logical Pauli of a normalizer element (meaningless off the normalizer)."""
    _check_error(code, pauli)
    return PauliVector(matmul(code.logical_z, pauli.x, code.p), matmul(code.logical_x, pauli.z, code.p), code.p)


def in_stabilizer(code: CssCode, pauli: PauliVector) -> bool:
    sz, sx = syndrome(code, pauli)
    return not (sz.any() or sx.any()) and logical_class(code, pauli).is_identity()


class _ErasureSolver:
    """Precomputed solve of ``H[:, D] c = s`` for one check matrix and erased set.

    ``transform @ H[:, D]`` is in reduced echelon form; consistency is the
    vanishing of the non-pivot rows of ``transform @ s``.
    """

    def __init__(self, h: np.ndarray, erased: tuple[int, ...], p: int):
        sub = h[:, list(erased)]
        rows = h.shape[0]
        rref, pivots = row_reduce(np.concatenate([sub, np.eye(rows, dtype=np.int64)], axis=1), p, range(len(erased)))
        self.transform = rref[:, len(erased):]
        self.pivots = pivots
        self.erased = erased
        self.p = p

    def solve(self, s: np.ndarray) -> np.ndarray | None:
        ts = matmul(self.transform, s, self.p)
        r = len(self.pivots)
        if ts[r:].any():
            return None
        c = np.zeros(len(self.erased), dtype=np.int64)
        c[self.pivots] = ts[:r]
        return c


def _solver(code: CssCode, which: str, erased: tuple[int, ...]) -> _ErasureSolver:
    key = (which, erased)
    if key not in code._solvers:
        code._solvers[key] = _ErasureSolver(code.hz if which == "z" else code.hx, erased, code.p)
    return code._solvers[key]


def _normalize_set(code: CssCode, positions: Iterable[int]) -> tuple[int, ...]:
    out = tuple(sorted(set(int(i) for i in positions)))
    if any(i < 0 or i >= code.n for i in out):
        raise ValueError(f"positions must lie in [0, {code.n})")
    return out


def erasure_decode(code: CssCode, frame: FrameState, erased: Iterable[int]) -> Correction | None:
    """Recover from erasures at ``erased``; ``None`` means the rest is inconsistent.

    The erased components of the frame are ignored (the decoder never sees
    them).  A correction supported on ``erased`` that zeroes the syndrome is
    found by linear algebra; because the code has distance t + 1, every such
    correction gives the same logical class.
    """
    d = _normalize_set(code, erased)
    if len(d) > code.t:
        raise ValueError(f"cannot erase {len(d)} > t = {code.t} positions")
    x = frame.error.x.copy()
    z = frame.error.z.copy()
    x[list(d)] = 0
    z[list(d)] = 0
    p = code.p
    sz = matmul(code.hz, x, p)
    sx = matmul(code.hx, z, p)
    if d:
        cx = _solver(code, "z", d).solve(-sz % p)
        cz = _solver(code, "x", d).solve(-sx % p)
        if cx is None or cz is None:
            return None
        x[list(d)] = cx
        z[list(d)] = cz
    elif sz.any() or sx.any():
        return None
    return Correction(logical_class(code, PauliVector(x, z, p)))


def _checks_within(h: np.ndarray, kept: tuple[int, ...], n: int, p: int) -> np.ndarray:
    """Basis of row-space vectors of ``h`` that vanish off ``kept``."""
    outside = [i for i in range(n) if i not in kept]
    if not outside:
        return h
    combos = nullspace(h[:, outside].T, p)  # y with y @ h[:, outside] = 0
    if combos.shape[0] == 0:
        return np.zeros((0, n), dtype=np.int64)
    return matmul(combos, h, p)


def restricted_consistency(code: CssCode, frame: FrameState, kept: Iterable[int]) -> bool:
    """True iff every parity check supported inside ``kept`` is satisfied."""
    r = _normalize_set(code, kept)
    p = code.p
    key = ("within", r)
    if key not in code._solvers:
        code._solvers[key] = (_checks_within(code.hz, r, code.n, p), _checks_within(code.hx, r, code.n, p))
    cz, cx = code._solvers[key]
    return not (matmul(cz, frame.error.x, p).any() or matmul(cx, frame.error.z, p).any())


def adapted_basis(code: CssCode, bad: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    """Bases of the Z- and X-check spaces where each ``bad`` position touches one vector.

    Row reduction with the ``bad`` columns pivoted first: in reduced form a
    pivot column is zero in every other row.  Any ``t`` columns of either
    check matrix are independent (both are MDS generators), so every bad
    column becomes a pivot.
    """
    b = _normalize_set(code, bad)
    if len(b) > code.t:
        raise ValueError(f"|B| = {len(b)} exceeds t = {code.t}")
    order = list(b) + [i for i in range(code.n) if i not in b]
    out = []
    for h in (code.hz, code.hx):
        rref, pivots = row_reduce(h, code.p, order)
        out.append(rref[: len(pivots)])
    return out[0], out[1]


def single_touch(basis: np.ndarray, bad: Iterable[int]) -> bool:
    """Each position in ``bad`` lies in the support of exactly one basis vector."""
    return all(int(np.count_nonzero(basis[:, i])) == 1 for i in bad)


def _space_members(h: np.ndarray, n: int, p: int) -> np.ndarray:
    """All vectors v of GF(p)^n with h @ v = 0."""
    basis = nullspace(h, p) if h.shape[0] else np.eye(n, dtype=np.int64)
    coeffs = all_vectors(basis.shape[0], p)
    return coeffs @ basis % p


def min_distance_bruteforce(code: CssCode, limit: int = BRUTEFORCE_LIMIT) -> int:
    """Minimum weight of a normalizer element outside the stabilizer.

    The normalizer condition splits into ``hz @ x = 0`` and ``hx @ z = 0``,
    so the p**(2n) candidates are scanned as a product of the p**n X-parts
    and the p**n Z-parts, each filtered to its kernel first.
    """
    n, p = code.n, code.p
    if p**n > limit:
        raise ValueError(f"p**n = {p**n} exceeds brute-force limit {limit}")
    every = all_vectors(n, p)
    xs = every[np.all(every @ code.hz.T % p == 0, axis=1)]
    zs = every[np.all(every @ code.hx.T % p == 0, axis=1)]
    x_stab = np.all(xs @ code.logical_z.T % p == 0, axis=1)  # x in C2
    z_stab = np.all(zs @ code.logical_x.T % p == 0, axis=1)  # z in C1^perp
    xsupp = xs != 0
    zsupp = zs != 0
    best = None
    for i in range(xs.shape[0]):
        weights = np.count_nonzero(xsupp[i][None, :] | zsupp, axis=1)
        mask = ~(x_stab[i] & z_stab)
        if mask.any():
            w = int(weights[mask].min())
            best = w if best is None else min(best, w)
    return best


def logical_weight_ok(code: CssCode) -> bool:
    """Every nontrivial logical has weight >= t + 1 (brute force)."""
    return min_distance_bruteforce(code) >= code.t + 1


class BareDecoder:
    """Minimum-weight syndrome decoder for the bare code, no authentication.

    Candidates are scanned by weight, then support in lexicographic order,
    then local Pauli value, so ties go to the lowest positions.  The leader
    table is filled lazily one weight class at a time.
    """

    def __init__(self, code: CssCode, limit: int = BRUTEFORCE_LIMIT):
        self.code = code
        self.limit = limit
        n = code.n
        self.table: dict[bytes, PauliVector] = {}
        self._insert(np.zeros((1, n), dtype=np.int64), np.zeros((1, n), dtype=np.int64))
        self._weight = 0

    def _insert(self, xs: np.ndarray, zs: np.ndarray) -> None:
        p = self.code.p
        syn = np.concatenate([xs @ self.code.hz.T % p, zs @ self.code.hx.T % p], axis=1)
        for row, key in enumerate(map(bytes, syn.astype(np.int64))):
            if key not in self.table:
                self.table[key] = PauliVector(xs[row], zs[row], p)

    def _grow(self) -> None:
        n, p = self.code.n, self.code.p
        w = self._weight + 1
        local = all_vectors(2, p)[1:]
        count = len(list(combinations(range(n), w))) * local.shape[0] ** w
        if count > self.limit:
            raise ValueError(f"weight-{w} coset search ({count} candidates) exceeds limit {self.limit}")
        choice = np.indices((local.shape[0],) * w).reshape(w, -1).T
        for supp in combinations(range(n), w):
            xs = np.zeros((choice.shape[0], n), dtype=np.int64)
            zs = np.zeros((choice.shape[0], n), dtype=np.int64)
            xs[:, list(supp)] = local[choice, 0]
            zs[:, list(supp)] = local[choice, 1]
            self._insert(xs, zs)
        self._weight = w

    @staticmethod
    def _key(sz: np.ndarray, sx: np.ndarray) -> bytes:
        return bytes(np.concatenate([sz, sx]).astype(np.int64))

    def leader(self, error: PauliVector) -> PauliVector:
        key = self._key(*syndrome(self.code, error))
        while key not in self.table:
            if self._weight >= self.code.n:
                raise RuntimeError("syndrome not reachable")
            self._grow()
        return self.table[key]

    def decode(self, error: PauliVector) -> PauliVector:
        """Logical residual after correcting by the coset leader."""
        return logical_class(self.code, error - self.leader(error))


def code_rank_check(code: CssCode) -> bool:
    return rank(code.hz, code.p) + rank(code.hx, code.p) == code.n - code.k
