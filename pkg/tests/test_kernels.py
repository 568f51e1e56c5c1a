import numpy as np
import pytest

from demuskin import _pykernels, kernels

ck = pytest.importorskip("demuskin._ckernels")


@pytest.mark.parametrize("p,s", [(3, 1), (5, 2), (7, 3), (13, 2)])
def test_howell_backends_agree(p, s):
    rng = np.random.default_rng(p * 10 + s)
    for _ in range(30):
        r, c = rng.integers(1, 7, 2)
        A = rng.integers(0, p**s, (r, c))
        # low-valuation entries exercise the annihilator rows
        A[rng.random((r, c)) < 0.3] *= p
        A %= p**s
        py = np.asarray(_pykernels.howell(A.astype(object), p, s), dtype=object)
        cy = np.asarray(ck.howell(np.ascontiguousarray(A, dtype=np.int64), p, s), dtype=object)
        assert py.shape == cy.shape
        assert np.array_equal(py, cy)
        assert sorted(_pykernels.smith_valuations(A.astype(object), p, s)) == sorted(
            ck.smith_valuations(np.ascontiguousarray(A, dtype=np.int64), p, s))


def test_fold_backends_agree():
    p, s = 7, 2
    N = p**s
    rng = np.random.default_rng(1)
    m, G = 3, 4
    B = rng.integers(0, N, (m, m))
    B = (B - B.T) % N
    act = np.array([np.eye(m, dtype=np.int64) for _ in range(G)])
    act_inv = act.copy()
    zact = np.ones(G, dtype=np.int64)
    gens = rng.integers(0, G, 40)
    signs = rng.choice([-1, 1], 40)
    val_ad = rng.integers(0, N, (G, m))
    val_z = rng.integers(0, N, G)
    half = (N + 1) // 2
    a1, z1 = _pykernels.fold_word(gens, signs, act, act_inv, zact, zact, B, val_ad, val_z, N, half)
    a2, z2 = ck.fold_word(gens, signs, act, act_inv, zact, zact, B, val_ad, val_z, N, half)
    assert [int(v) for v in a1] == [int(v) for v in a2] and int(z1) == int(z2)


def test_backend_flag():
    assert kernels.BACKEND in ("cython", "python")
