from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from approxqecc.css import (
    BareDecoder,
    FrameState,
    adapted_basis,
    build_polynomial_code,
    code_rank_check,
    erasure_decode,
    in_stabilizer,
    logical_class,
    min_distance_bruteforce,
    restricted_consistency,
    single_touch,
    syndrome,
)
from approxqecc.field import matmul
from approxqecc.pauli import PauliVector, all_vectors

REFERENCE_KETS = {  # logical value -> kets of the n = 3 qutrit code
    0: {(0, 0, 0), (1, 1, 1), (2, 2, 2)},
    1: {(0, 1, 2), (1, 2, 0), (2, 0, 1)},
    2: {(0, 2, 1), (1, 0, 2), (2, 1, 0)},
}


def single(code, pos, x=0, z=0):
    """Pauli on 1-based position ``pos``."""
    return PauliVector.single(code.n, code.p, pos - 1, x=x, z=z)


def supported_on(code, positions):
    """Every Pauli on n qudits supported inside the 0-based ``positions``."""
    local = all_vectors(2, code.p)
    for combo in product(range(local.shape[0]), repeat=len(positions)):
        x = np.zeros(code.n, dtype=np.int64)
        z = np.zeros(code.n, dtype=np.int64)
        for pos, c in zip(positions, combo):
            x[pos], z[pos] = local[c]
        yield PauliVector(x, z, code.p)


@pytest.mark.parametrize("n,t,p", [(3, 1, 3), (3, 1, 5), (5, 2, 5), (5, 2, 7), (5, 1, 7), (7, 3, 7)])
def test_code_invariants(n, t, p):
    code = build_polynomial_code(n, t, p)
    assert not matmul(code.hz, code.hx.T, p).any()
    assert code_rank_check(code)
    assert code.k == n - 2 * t and code.distance == t + 1
    # logical operators pair up canonically
    assert np.array_equal(matmul(code.logical_z, code.logical_x.T, p), np.eye(code.k, dtype=np.int64))


def test_codespace_kets():
    code = build_polynomial_code(3, 1, 3)
    assert code.k == 1 and min_distance_bruteforce(code) == 2
    in_c1 = {tuple(v) for v in all_vectors(3, 3) if not matmul(code.hz, v, 3).any()}
    assert in_c1 == set().union(*REFERENCE_KETS.values())
    for j, kets in REFERENCE_KETS.items():
        for ket in kets:
            assert int(matmul(code.logical_z, np.array(ket), 3)[0]) == j
            for shift in code.hx:
                assert tuple((np.array(ket) + shift) % 3) in kets  # X stabilizers permute the kets


def test_parameter_errors():
    for bad in [(3, 1, 2), (3, 2, 5), (4, 1, 6), (3, -1, 3)]:
        with pytest.raises(ValueError):
            build_polynomial_code(*bad)


def test_syndrome_examples():
    code = build_polynomial_code(3, 1, 3)
    sz, sx = syndrome(code, PauliVector.identity(3, 3))
    assert not sz.any() and not sx.any()
    sz, _ = syndrome(code, single(code, 1, x=1))
    assert sz.any()
    with pytest.raises(ValueError):
        syndrome(code, PauliVector.identity(2, 3))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_syndrome_additive(seed):
    code = build_polynomial_code(5, 2, 7)
    r = np.random.default_rng(seed)
    a = PauliVector(r.integers(0, 7, 5), r.integers(0, 7, 5), 7)
    b = PauliVector(r.integers(0, 7, 5), r.integers(0, 7, 5), 7)
    for u, v, w in zip(syndrome(code, a + b), syndrome(code, a), syndrome(code, b)):
        assert np.array_equal(u, (v + w) % 7)


@pytest.mark.parametrize("n,t,p,d", [(3, 1, 3, 2), (5, 2, 5, 3), (3, 1, 5, 2), (5, 2, 7, 3)])
def test_min_distance(n, t, p, d):
    assert min_distance_bruteforce(build_polynomial_code(n, t, p)) == d


def test_min_distance_refuses_large():
    with pytest.raises(ValueError):
        min_distance_bruteforce(build_polynomial_code(7, 3, 11))


def test_erasure_examples_313():
    code = build_polynomial_code(3, 1, 3)
    for e in supported_on(code, [1]):  # position 2
        assert erasure_decode(code, FrameState(code, e), [1]).residual.is_identity()
    for d in ([], [0], [1], [2]):
        assert erasure_decode(code, FrameState(code, PauliVector.identity(3, 3)), d).residual.is_identity()
    out = erasure_decode(code, FrameState(code, single(code, 1, x=1)), [1])
    assert out is None or not out.residual.is_identity()
    with pytest.raises(ValueError):
        erasure_decode(code, FrameState(code, PauliVector.identity(3, 3)), [0, 1])


def test_single_errors_off_the_erasure_never_look_clean():
    code = build_polynomial_code(3, 1, 3)
    for pos, d in product(range(3), range(3)):
        for e in supported_on(code, [pos]):
            out = erasure_decode(code, FrameState(code, e), [d])
            if pos == d or e.is_identity():
                assert out.residual.is_identity()
            else:
                assert out is None or not out.residual.is_identity()


@pytest.mark.parametrize("n,t,p,exhaustive", [(3, 1, 3, True), (5, 2, 5, True)])
def test_erasure_correction_soundness(n, t, p, exhaustive):
    code = build_polynomial_code(n, t, p)
    for size in range(t + 1):
        for s in combinations(range(n), size):
            for e in supported_on(code, list(s)):
                assert erasure_decode(code, FrameState(code, e), s).residual.is_identity()


def test_restricted_consistency_examples():
    code = build_polynomial_code(3, 1, 3)
    x1 = single(code, 1, x=1)
    assert restricted_consistency(code, FrameState(code, PauliVector.identity(3, 3)), [0, 1])
    assert not restricted_consistency(code, FrameState(code, x1), [0, 1, 2])
    assert restricted_consistency(code, FrameState(code, x1), [1, 2])


@pytest.mark.parametrize("n,t,p", [(3, 1, 3), (5, 2, 5)])
def test_adapted_basis_single_touch(n, t, p):
    code = build_polynomial_code(n, t, p)
    subsets = [b for r in range(t + 1) for b in combinations(range(n), r)]
    assert len(subsets) == (4 if n == 3 else 16)
    for b in subsets:
        v, w = adapted_basis(code, b)
        # same spaces as the original checks
        assert v.shape[0] == code.hz.shape[0] and w.shape[0] == code.hx.shape[0]
        for basis, h in ((v, code.hz), (w, code.hx)):
            stacked = np.concatenate([basis, h])
            from approxqecc.field import rank
            assert rank(stacked, p) == rank(h, p) == basis.shape[0]
            assert single_touch(basis, b)
    with pytest.raises(ValueError):
        adapted_basis(code, range(t + 1))


def test_adapted_basis_313_position_one():
    code = build_polynomial_code(3, 1, 3)
    v, _ = adapted_basis(code, [0])
    assert v.shape[0] == 1 and v[0, 0] != 0


@pytest.mark.parametrize("n,t,p", [(3, 1, 3), (5, 2, 5)])
def test_detect_plus_correct(n, t, p):
    """Errors on B, erase D inside B: passing the kept-set checks means exact recovery."""
    code = build_polynomial_code(n, t, p)
    for b in combinations(range(n), t):
        for e in supported_on(code, list(b)):
            for r in range(len(b) + 1):
                for d in combinations(b, r):
                    frame = FrameState(code, e)
                    kept = [i for i in range(n) if i not in d]
                    out = erasure_decode(code, frame, d)
                    if restricted_consistency(code, frame, kept) and out is not None:
                        assert out.residual.is_identity()


def test_in_stabilizer():
    code = build_polynomial_code(3, 1, 3)
    assert in_stabilizer(code, PauliVector([1, 1, 1], [0, 0, 0], 3))
    assert not in_stabilizer(code, PauliVector([0, 1, 2], [0, 0, 0], 3))
    assert logical_class(code, PauliVector([0, 1, 2], [0, 0, 0], 3)) == PauliVector([1], [0], 3)


def test_bare_decoder_min_weight():
    code = build_polynomial_code(3, 1, 3)
    dec = BareDecoder(code)
    # position 0 errors are the coset leaders; the same errors elsewhere are miscorrected
    for e in supported_on(code, [0]):
        assert dec.decode(e).is_identity()
    wrong = [e for e in supported_on(code, [2]) if not dec.decode(e).is_identity()]
    assert len(wrong) == 8
    code5 = build_polynomial_code(5, 2, 7)
    dec5 = BareDecoder(code5)
    for e in supported_on(code5, [3]):
        assert dec5.decode(e).is_identity()  # weight-1 errors are correctable at d = 3
