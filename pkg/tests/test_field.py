from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from approxqecc.field import (
    FieldElement,
    PrimeField,
    gaussian_solve,
    inverse,
    is_prime,
    lagrange_interpolate,
    matmul,
    next_prime,
    nullspace,
    rank,
    vandermonde,
)


def test_primality():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert is_prime(2**31 - 1)
    assert not is_prime(2**31 + 1)
    assert next_prime(60001) == 60013


def test_prime_field_rejects_composites():
    with pytest.raises(ValueError):
        PrimeField(9)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_field_axioms_exhaustive(p):
    f = PrimeField(p)
    els = f.elements()
    for a, b, c in product(els, repeat=3):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
    for a in els:
        if int(a):
            assert a * a.inverse() == f(1)
            assert a / a == f(1)


def test_field_elements_mix_with_ints():
    f = PrimeField(7)
    assert f(3) + 5 == f(1)
    assert 2 - f(5) == f(4)
    assert f(3) ** 6 == f(1)
    with pytest.raises(ZeroDivisionError):
        f(0).inverse()
    with pytest.raises(ValueError):
        FieldElement(3, PrimeField(5)) + FieldElement(1, PrimeField(7))


def test_solve_identity():
    sol = gaussian_solve(np.eye(3, dtype=np.int64), [1, 2, 3], 5)
    assert sol.kind == "unique"
    assert sol.particular.tolist() == [1, 2, 3]


def test_solve_affine_matches_enumeration():
    sol = gaussian_solve([[1, 1]], [0], 3)
    assert sol.kind == "affine" and sol.nullspace.shape == (1, 2)
    members = {tuple((sol.particular + c * sol.nullspace[0]) % 3) for c in range(3)}
    brute = {v for v in product(range(3), repeat=2) if (v[0] + v[1]) % 3 == 0}
    assert members == brute == {(0, 0), (1, 2), (2, 1)}


def test_solve_inconsistent():
    assert gaussian_solve([[1, 0], [1, 0]], [0, 1], 7).kind == "inconsistent"


def test_solve_shape_mismatch():
    with pytest.raises(ValueError):
        gaussian_solve(np.eye(2, dtype=np.int64), [1, 2, 3], 5)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.sampled_from([2, 3, 5, 7]), st.integers(0, 2**32 - 1))
def test_solution_set_reproduces_rhs(rows, cols, p, seed):
    r = np.random.default_rng(seed)
    a = r.integers(0, p, size=(rows, cols))
    b = a @ r.integers(0, p, size=cols) % p if seed % 2 else r.integers(0, p, size=rows)
    sol = gaussian_solve(a, b, p)
    brute = [v for v in product(range(p), repeat=cols) if np.array_equal(a @ np.array(v) % p, b)]
    if not sol.consistent:
        assert brute == []
        return
    assert len(brute) == p ** sol.nullspace.shape[0]
    for c in product(range(p), repeat=sol.nullspace.shape[0]):
        x = (sol.particular + np.array(c, dtype=np.int64) @ sol.nullspace) % p if c else sol.particular
        assert np.array_equal(a @ x % p, b)


def test_rank_nullspace_inverse(rng):
    a = rng.integers(0, 5, size=(3, 6))
    ns = nullspace(a, 5)
    assert rank(a, 5) + ns.shape[0] == 6
    assert not (a @ ns.T % 5).any()
    m = vandermonde([1, 2, 3, 4], 4, 5)
    assert np.array_equal(matmul(m, inverse(m, 5), 5), np.eye(4, dtype=np.int64))
    with pytest.raises(ZeroDivisionError):
        inverse(np.ones((2, 2), dtype=np.int64), 5)


def test_vandermonde_examples():
    assert vandermonde([0, 1, 2], 2, 3).tolist() == [[1, 0], [1, 1], [1, 2]]
    assert vandermonde([1], 3, 7).tolist() == [[1, 1, 1]]
    for xs in product(range(5), repeat=4):
        if len(set(xs)) == 4:
            assert rank(vandermonde(xs, 4, 5), 5) == 4
    with pytest.raises(ValueError):
        vandermonde([1, 1], 2, 5)


def test_interpolation_examples():
    assert lagrange_interpolate([(0, 7), (1, 7)], 0, 11).tolist() == [7]
    assert lagrange_interpolate([(1, 1), (2, 2), (3, 3)], 1, 5).tolist() == [0, 1]
    f = PrimeField(5)
    assert lagrange_interpolate([(f(1), f(1)), (f(2), f(2))], 1, 5).tolist() == [0, 1]
    with pytest.raises(ValueError):
        lagrange_interpolate([(1, 1), (1, 2)], 1, 5)


def _degree1_fits(pts, p):
    return [(c0, c1) for c0, c1 in product(range(p), repeat=2)
            if all((c0 + c1 * x) % p == y for x, y in pts)]


def test_interpolation_consistency_matches_enumeration():
    # (0,1),(1,2),(2,0) lies on 1 + x over GF(3), so it is consistent
    pts = [(0, 1), (1, 2), (2, 0)]
    assert _degree1_fits(pts, 3) == [(1, 1)]
    assert lagrange_interpolate(pts, 1, 3).tolist() == [1, 1]
    off = [(0, 1), (1, 2), (2, 1)]
    assert _degree1_fits(off, 3) == []
    assert lagrange_interpolate(off, 1, 3) is None


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 12), min_size=1, max_size=5), st.integers(0, 3))
def test_interpolate_roundtrip(coeffs, extra):
    p = 13
    deg = len(coeffs) - 1
    xs = range(deg + 1 + extra)
    pts = [(x, sum(c * x**k for k, c in enumerate(coeffs)) % p) for x in xs]
    assert lagrange_interpolate(pts, deg, p).tolist() == coeffs
