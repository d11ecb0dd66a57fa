from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from approxqecc.pauli import (
    PauliVector,
    SymplecticMatrix,
    all_vectors,
    conjugate,
    enumerate_symplectic,
    is_symplectic,
    random_pauli,
    random_symplectic,
    random_symplectic_batch,
    sp_order,
    symplectic_inverse,
    symplectic_product,
)


def pauli(p, *vec):
    return PauliVector.from_vector(list(vec), p)


def test_canonical_pair_and_self_product():
    assert symplectic_product(pauli(3, 1, 0), pauli(3, 0, 1)) == 1
    assert symplectic_product(pauli(3, 0, 1), pauli(3, 1, 0)) == 2
    for v in all_vectors(4, 3):
        p = PauliVector.from_vector(v, 3)
        assert symplectic_product(p, p) == 0


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        symplectic_product(pauli(3, 1, 0), pauli(3, 1, 0, 0, 0))
    with pytest.raises(ValueError):
        conjugate(SymplecticMatrix.identity(2, 3), pauli(3, 1, 0))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_bilinearity(seed):
    r = np.random.default_rng(seed)
    a, b, c = (random_pauli(3, 5, r) for _ in range(3))
    k = int(r.integers(0, 5))
    assert symplectic_product(a + b, c) == (symplectic_product(a, c) + symplectic_product(b, c)) % 5
    scaled = PauliVector(k * a.x, k * a.z, 5)
    assert symplectic_product(scaled, c) == k * symplectic_product(a, c) % 5


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(1, 2), (2, 3), (3, 5), (2, 7)]))
def test_conjugation_preserves_products(seed, mp):
    m, p = mp
    r = np.random.default_rng(seed)
    c = random_symplectic(m, p, r)
    a, b = random_pauli(m, p, r), random_pauli(m, p, r)
    assert c.is_valid()
    assert symplectic_product(conjugate(c, a), conjugate(c, b)) == symplectic_product(a, b)
    assert conjugate(c, PauliVector.identity(m, p)).is_identity()
    assert conjugate(SymplecticMatrix.identity(m, p), a) == a
    assert conjugate(c.inverse(), conjugate(c, a)) == a


def test_closure(rng):
    for _ in range(20):
        a, b = random_symplectic(2, 3, rng), random_symplectic(2, 3, rng)
        assert (a @ b).is_valid() and a.inverse().is_valid()
        assert a @ a.inverse() == SymplecticMatrix.identity(2, 3)


def test_group_orders():
    assert [sp_order(1, 2), sp_order(1, 3), sp_order(2, 2), sp_order(2, 3), sp_order(3, 2)] \
        == [6, 24, 720, 51840, 1451520]


@pytest.mark.parametrize("m,p", [(1, 2), (1, 3), (2, 2), (1, 5)])
def test_enumeration_is_the_whole_group(m, p):
    brute = None
    if 4 * m * m <= 16 and p ** (4 * m * m) <= 3**16:
        mats = all_vectors(4 * m * m, p).reshape(-1, 2 * m, 2 * m) if p ** (4 * m * m) < 10**6 else None
        if mats is not None:
            brute = {m_.tobytes() for m_ in mats if is_symplectic(m_, p)}
    group = enumerate_symplectic(m, p)
    keys = {g.astype(np.int64).tobytes() for g in group}
    assert len(keys) == group.shape[0] == sp_order(m, p)
    assert all(is_symplectic(g, p) for g in group)
    if brute is not None:
        assert keys == brute


@pytest.mark.parametrize("m,p,samples", [(1, 2, 6000), (1, 3, 24000)])
def test_sampler_uniform(m, p, samples):
    r = np.random.default_rng(7)
    mats = random_symplectic_batch(m, p, r, samples)
    counts = Counter(g.tobytes() for g in mats)
    assert len(counts) == sp_order(m, p)
    freq = np.array(list(counts.values()))
    assert chisquare(freq).pvalue > 1e-3
    mean = samples / sp_order(m, p)
    assert np.all(np.abs(freq - mean) < 4 * np.sqrt(mean))


def test_sampler_determinism():
    a = random_symplectic(3, 5, np.random.default_rng(11))
    b = random_symplectic(3, 5, np.random.default_rng(11))
    assert a == b and a.is_valid()


def test_random_pauli_uniform():
    r = np.random.default_rng(3)
    draws = [tuple(random_pauli(1, 2, r).vector) for _ in range(4000)]
    counts = Counter(draws)
    assert len(counts) == 4 and chisquare(list(counts.values())).pvalue > 1e-3
    xs = Counter(tuple(random_pauli(2, 3, r).x) for _ in range(4500))
    assert len(xs) == 9 and chisquare(list(xs.values())).pvalue > 1e-3
    assert random_pauli(2, 3, np.random.default_rng(5)) == random_pauli(2, 3, np.random.default_rng(5))


@pytest.mark.parametrize("m,p", [(1, 2), (1, 3), (2, 2), (2, 3)])
def test_twirl_is_uniform_on_nonzero_vectors(m, p):
    group = enumerate_symplectic(m, p)
    e = np.zeros(2 * m, dtype=np.int64)
    e[0] = 1
    images = group @ e % p
    counts = Counter(v.tobytes() for v in images)
    assert len(counts) == p ** (2 * m) - 1
    assert len(set(counts.values())) == 1


def test_inverse_on_stacks(rng):
    mats = random_symplectic_batch(2, 5, rng, 10)
    inv = symplectic_inverse(mats, 5)
    assert all(np.array_equal(a @ b % 5, np.eye(4, dtype=np.int64)) for a, b in zip(mats, inv))


def test_pauli_helpers():
    q = PauliVector.single(3, 5, 1, x=2, z=3)
    assert q.support == (1,) and q.weight == 1
    assert q.restrict([1]) == PauliVector([2], [3], 5)
    assert (q - q).is_identity() and (-q + q).is_identity()
    assert hash(q) == hash(PauliVector.single(3, 5, 1, x=7, z=8))
    with pytest.raises(ValueError):
        PauliVector.from_vector([1, 2, 3], 5)
    with pytest.raises(ValueError):
        SymplecticMatrix(np.eye(3, dtype=np.int64), 3)
