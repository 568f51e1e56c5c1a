import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from demuskin import zmod
from demuskin.errors import InvalidInputError
from demuskin.zmod import ModuleProfile, RingModulus


def brute_kernel_size(A, ring):
    """Count solutions of A v = 0 by enumeration."""
    A = np.asarray(A, dtype=object)
    c = A.shape[1]
    return sum(1 for v in itertools.product(range(ring.N), repeat=c)
               if not np.any(A.dot(np.array(v, dtype=object)) % ring.N))


def brute_span(rows, ring):
    rows = [np.asarray(r, dtype=object) for r in rows]
    out = set()
    for coeffs in itertools.product(range(ring.N), repeat=len(rows)):
        v = sum((a * r for a, r in zip(coeffs, rows)), np.zeros(len(rows[0]), dtype=object)) % ring.N
        out.add(tuple(v))
    return out


matrices = st.tuples(st.integers(1, 3), st.integers(1, 3), st.sampled_from([(3, 2), (5, 1), (3, 1)])).flatmap(
    lambda t: st.tuples(
        st.lists(st.lists(st.integers(0, t[2][0] ** t[2][1] - 1), min_size=t[1], max_size=t[1]),
                 min_size=t[0], max_size=t[0]),
        st.just(t[2]),
    )
)


def test_ring_rejects_bad_moduli():
    with pytest.raises(InvalidInputError):
        RingModulus(9, 1)
    with pytest.raises(InvalidInputError):
        RingModulus(2, 3)
    with pytest.raises(InvalidInputError):
        RingModulus(5, 0)


def test_ring_basics():
    R = RingModulus(5, 3)
    assert R.N == 125
    assert R.half * 2 % R.N == 1
    assert R.inv(7) * 7 % 125 == 1
    assert R.val(50) == 2 and R.val(0) == 3
    with pytest.raises(InvalidInputError):
        R.inv(10)


def test_profile_accessors():
    prof = ModuleProfile((2, 0, 1, 3), 5, 3)
    assert prof.exponents == (1, 2, 3)
    assert prof.free_rank_mod_p == 3
    assert prof.free_rank == 1
    assert prof.order == 5**6
    assert prof.elementary_divisors == (5, 25, 125)


@given(matrices)
def test_kernel_order_matches_enumeration(data):
    rows, (p, s) = data
    R = RingModulus(p, s)
    G, prof = zmod.kernel(rows, R)
    assert prof.order == brute_kernel_size(rows, R)
    if G.shape[0]:
        assert not np.any(R.matmul(np.asarray(rows, dtype=object), G.T))


@given(matrices)
def test_howell_span_matches_enumeration(data):
    rows, (p, s) = data
    R = RingModulus(p, s)
    H = zmod.howell_basis(rows, R)
    assert brute_span(list(H), R) == brute_span(rows, R) if len(H) else not np.any(np.asarray(rows))
    assert zmod.row_module_profile(rows, R).order == len(brute_span(rows, R))


@given(matrices)
def test_canonical_form_transform(data):
    rows, (p, s) = data
    R = RingModulus(p, s)
    H, U = zmod.canonical_form(rows, R)
    assert np.array_equal(R.matmul(U, np.asarray(rows, dtype=object)), R.reduce(H))


@given(matrices, st.integers(0, 10**6))
def test_solve_or_certificate(data, seed):
    rows, (p, s) = data
    R = RingModulus(p, s)
    A = np.asarray(rows, dtype=object)
    b = np.random.default_rng(seed).integers(0, R.N, A.shape[0])
    out = zmod.solve(A, b, R)
    if isinstance(out, zmod.Unsolvable):
        f = np.asarray(out.functional, dtype=object)
        assert not np.any(f.dot(A) % R.N)
        assert f.dot(np.asarray(b, dtype=object)) % R.N == out.residue % R.N != 0
    else:
        assert np.array_equal(A.dot(np.asarray(out, dtype=object)) % R.N, np.asarray(b, dtype=object) % R.N)


def test_solve_dimension_mismatch():
    R = RingModulus(5, 1)
    with pytest.raises(InvalidInputError):
        zmod.solve([[1, 2]], [1, 2], R)


def test_smith_and_cokernel():
    R = RingModulus(3, 2)
    A = [[3, 0], [0, 1]]
    assert zmod.smith_valuations(A, R) == [0, 1]
    assert zmod.cokernel_profile(A, R).exponents == (1,)
    assert zmod.image_profile(A, R).exponents == (1, 2)


def test_quotient_profile():
    R = RingModulus(5, 2)
    sup = [[1, 0], [0, 1]]
    sub = [[5, 0]]
    assert zmod.quotient_profile(sup, sub, R).exponents == (1, 2)
    with pytest.raises(InvalidInputError):
        zmod.quotient_profile([[5, 0]], [[1, 0]], R)


def test_inverse_and_det():
    R = RingModulus(7, 2)
    A = np.array([[2, 1], [1, 1]], dtype=object)
    Ai = zmod.inverse(A, R)
    assert np.array_equal(R.matmul(A, Ai), R.eye(2).astype(object))
    assert zmod.det_mod_p(A, 7) == 1
    with pytest.raises(InvalidInputError):
        zmod.inverse([[7, 0], [0, 1]], R)


def test_membership_and_mod_p_image():
    R = RingModulus(5, 2)
    assert zmod.membership([[5, 0]], [10, 0], R)
    assert not zmod.membership([[5, 0]], [1, 0], R)
    assert zmod.mod_p_image([[5, 0], [1, 1]], R).tolist() == [[1, 1]]


def test_empty_kernel_shapes():
    R = RingModulus(5, 1)
    G, prof = zmod.kernel(np.eye(3, dtype=object), R)
    assert G.shape == (0, 3) and prof.order == 1
