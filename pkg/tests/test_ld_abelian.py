import numpy as np
import pytest
from hypothesis import given, strategies as st

from demuskin import coeff_systems as cs
from demuskin.errors import InvalidInputError
from demuskin.free_group import Word, build_relator, evaluate, fox_derivative
from demuskin.ld_abelian import build_complex, cohomology, extend_abelian, h0_torsion_probe
from demuskin.zmod import RingModulus

from conftest import random_ld_abelian


@pytest.mark.parametrize("p", [5, 7, 11, 13])
@pytest.mark.parametrize("n", [2, 4])
def test_trivial_dims(p, n):
    R = RingModulus(p, 1)
    h = cohomology(build_complex(build_relator(n, p), cs.trivial_system(R, n + 2)))
    assert h.dims == (1, n + 2, 1)


def test_trivial_module_at_higher_precision():
    R = RingModulus(5, 2)
    h = cohomology(build_complex(build_relator(2, 5), cs.trivial_system(R, 4)))
    assert h.h0.exponents == (2,)
    assert h.h1.exponents == (1, 2, 2, 2)
    assert h.h2.exponents == (1,)
    assert h.euler_length == -2 * 1 * 2


def test_euler_random_systems():
    rng = np.random.default_rng(7)
    for _ in range(40):
        p = int(rng.choice([5, 7]))
        n = int(rng.choice([2, 4]))
        rank = int(rng.integers(1, 5))
        sys_ = random_ld_abelian(p, n, rank, rng)
        h = cohomology(build_complex(build_relator(n, p), sys_))
        assert h.dims[0] - h.dims[1] + h.dims[2] == -n * rank


words = st.lists(st.tuples(st.integers(0, 3), st.sampled_from([1, -1])), max_size=15)


@given(words, st.integers(0, 2**32 - 1))
def test_extension_is_fox_pairing(lets, seed):
    """c(w) = sum_i rho(dw/dx_i) c_i for any word."""
    rng = np.random.default_rng(seed)
    sys_ = random_ld_abelian(5, 2, 3, rng)
    R = sys_.ring
    w = Word.from_letters(lets)
    c = rng.integers(0, 5, (4, 3)).astype(object)
    expected = np.zeros(3, dtype=object)
    for i in range(4):
        expected = expected + np.asarray(evaluate(fox_derivative(w, i), sys_.actions, R), dtype=object).dot(c[i])
    assert np.array_equal(extend_abelian(sys_, c, w), R.reduce(expected))


def test_extension_on_relator_is_d2():
    rng = np.random.default_rng(2)
    pres = build_relator(4, 7)
    sys_ = random_ld_abelian(7, 4, 4, rng)
    cx = build_complex(pres, sys_)
    for _ in range(20):
        c = rng.integers(0, 7, (6, 4)).astype(object)
        d2c = np.asarray(cx.d2, dtype=object).dot(c.reshape(-1)) % 7
        assert np.array_equal(extend_abelian(sys_, c, pres.relator), d2c)


def test_build_complex_errors():
    R = RingModulus(5, 1)
    with pytest.raises(InvalidInputError, match="generators"):
        build_complex(build_relator(4, 5), cs.trivial_system(R, 4))
    bad = cs.AbelianSystem(1, tuple(np.array([[v]]) for v in (2, 1, 1, 1)), R)
    with pytest.raises(InvalidInputError, match="validation"):
        build_complex(build_relator(2, 5), bad)


def test_h0_probe():
    pres = build_relator(2, 5)
    R = RingModulus(5, 3)
    triv = h0_torsion_probe(pres, cs.trivial_system(R, 4), 3)
    assert triv.verdict == "free-fixed-vectors-present"
    levi = cs.mildly_regular_levi(R, 2, np.random.default_rng(0))
    std = cs.sym_power_twist(levi, 1, 0)
    probe = h0_torsion_probe(pres, std, 3)
    assert probe.verdict == "no-free-fixed-vectors"
    assert [p.free_rank_mod_p for p in probe.profiles] == [1, 1, 1]
    with pytest.raises(InvalidInputError):
        h0_torsion_probe(pres, std, 1)
    with pytest.raises(InvalidInputError):
        h0_torsion_probe(pres, std, 4)


def test_cohomology_dict():
    R = RingModulus(5, 1)
    h = cohomology(build_complex(build_relator(2, 5), cs.trivial_system(R, 4)))
    assert h.as_dict()["dims"] == [1, 4, 1]
