import numpy as np
import pytest
from hypothesis import settings

from demuskin import coeff_systems as cs
from demuskin.free_group import build_relator
from demuskin.zmod import RingModulus

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def f5():
    return RingModulus(5, 1)


@pytest.fixture
def pres_5_2():
    return build_relator(2, 5)


def short_root(p, s, n, seed=0, kind="random"):
    """G2 short-root system on a seeded Levi datum."""
    R = RingModulus(p, s)
    rng = np.random.default_rng(seed)
    if kind == "random":
        levi = cs.random_unipotent_levi(R, n + 2, rng)
    else:
        levi = cs.mildly_regular_levi(R, n, rng)
    return cs.g2_short_root(levi)


def long_root(p, s, n, seed=0, kind="random"):
    R = RingModulus(p, s)
    rng = np.random.default_rng(seed)
    if kind == "random":
        levi = cs.random_unipotent_levi(R, n + 2, rng)
    else:
        levi = cs.mildly_regular_levi(R, n, rng)
    return cs.g2_long_heisenberg(levi)


def zero_bracket(p, s, n, m_a=2):
    """Trivial actions, zero bracket: the degenerate instance."""
    R = RingModulus(p, s)
    G = n + 2
    eye = np.eye(m_a, dtype=object)
    return cs.generic_heisenberg(m_a, np.zeros((m_a, m_a), dtype=object), [eye] * G, [1] * G, R, label="zero")


def rigged_center(p=5, s=1):
    """Heisenberg system whose center piece has d2 surjective mod p.

    Only ``x3`` acts, by ``diag(2, 1)`` on the ad part and by 2 on the
    center; since ``x2`` is trivial the relator still acts trivially.
    """
    R = RingModulus(p, s)
    eye = np.eye(2, dtype=object)
    acts = [eye, eye, eye, np.diag([2, 1]).astype(object)]
    B = np.array([[0, 1], [-1, 0]], dtype=object)
    return cs.generic_heisenberg(2, B, acts, [1, 1, 1, 2], R, label="rigged")


def random_ld_abelian(p, n, rank, rng):
    """Random abelian system whose actions commute and are unipotent mod p.

    Each action is ``P (I + f_i(N)) P^-1`` for one random strictly
    upper-triangular ``N``, random polynomials ``f_i`` without constant term and
    a random change of basis ``P``.  Commuting unipotent actions of size below
    p kill every commutator and ``x0^p``, so the relator acts trivially.
    """
    from demuskin import zmod

    R = RingModulus(p, 1)
    N = np.triu(rng.integers(0, p, (rank, rank)), 1).astype(object)
    while True:
        P = rng.integers(0, p, (rank, rank)).astype(object)
        if zmod.rank_mod_p(P, p) == rank:
            break
    Pi = zmod.inverse(P, R).astype(object)
    powers = [np.linalg.matrix_power(N, k) % p for k in range(1, rank)]
    acts = []
    for _ in range(n + 2):
        M = np.eye(rank, dtype=object)
        for Nk in powers:
            M = M + int(rng.integers(0, p)) * Nk
        acts.append(P.dot(M).dot(Pi) % p)
    return cs.AbelianSystem(rank, tuple(acts), R)
