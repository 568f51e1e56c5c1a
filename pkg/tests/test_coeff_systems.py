import numpy as np
import pytest

from demuskin import coeff_systems as cs
from demuskin.errors import InvalidInputError
from demuskin.free_group import build_relator
from demuskin.zmod import RingModulus

from conftest import rigged_center, zero_bracket


def test_sym_power_is_multiplicative():
    R = RingModulus(7, 2)
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = [[1 + 7 * int(rng.integers(0, 7)), int(rng.integers(0, 49))], [0, 1 + 7 * int(rng.integers(0, 7))]]
        h = [[1, int(rng.integers(0, 49))], [0, 1]]
        gh = (np.array(g, dtype=object).dot(np.array(h, dtype=object)) % R.N).tolist()
        lhs = cs.sym_power_matrix(gh, 3, -2, R)
        rhs = R.matmul(cs.sym_power_matrix(g, 3, -2, R), cs.sym_power_matrix(h, 3, -2, R))
        assert np.array_equal(np.asarray(lhs, dtype=object), np.asarray(rhs, dtype=object))


def test_sym_power_identity_and_rank():
    R = RingModulus(5, 1)
    assert np.array_equal(cs.sym_power_matrix([[1, 0], [0, 1]], 3, 0, R), np.eye(4))
    levi = cs.unipotent_levi(R, [1, 2, 3, 4])
    assert cs.sym_power_twist(levi, 2, 0).rank == 3
    with pytest.raises(InvalidInputError):
        cs.sym_power_twist(levi, -1, 0)


def test_short_root_equivariance_and_constants():
    R = RingModulus(7, 1)
    levi = cs.unipotent_levi(R, [1, 2, 3, 4])
    sys_ = cs.g2_short_root(levi)
    assert sys_.constants == {"b03": 3, "b12": -1}
    assert cs.validate_system(sys_, build_relator(2, 7)).ok
    # b03 = -3 b12 is forced
    with pytest.raises(InvalidInputError, match="equivariance"):
        cs.g2_short_root(levi, b03=1, b12=1)
    with pytest.raises(InvalidInputError, match="unit"):
        cs.g2_short_root(levi, b03=7, b12=1)


def test_long_root_bracket():
    R = RingModulus(5, 1)
    sys_ = cs.g2_long_heisenberg(cs.unipotent_levi(R, [1, 0, 2, 3]))
    assert sys_.bracket_value([1, 0], [0, 1]) == 1
    assert sys_.bracket_value([0, 1], [1, 0]) == 4


def test_mildly_regular_relator_holds_at_any_precision():
    for p in (5, 7):
        R = RingModulus(p, 4)
        levi = cs.mildly_regular_levi(R, 2, np.random.default_rng(p))
        sys_ = cs.g2_short_root(levi)
        for q in (p, p**2):
            rep = cs.validate_system(sys_, build_relator(2, q))
            assert rep.ok, rep.messages
        assert not levi.unipotent


def test_unipotent_levi_needs_large_q_at_higher_precision():
    R = RingModulus(5, 2)
    levi = cs.unipotent_levi(R, [1, 0, 0, 0])
    sys_ = cs.g2_long_heisenberg(levi)
    assert not cs.validate_system(sys_, build_relator(2, 5)).relator_ok
    assert cs.validate_system(sys_, build_relator(2, 125)).relator_ok


def test_levi_diag_must_be_one_mod_p():
    R = RingModulus(5, 2)
    with pytest.raises(InvalidInputError):
        cs.LeviData(R, (0, 0), ((2, 1), (1, 1)))


def test_unitriangularizable():
    assert cs.unitriangularizable_mod_p([np.array([[1, 1], [0, 1]]), np.array([[1, 3], [0, 1]])], 5)
    assert not cs.unitriangularizable_mod_p([np.array([[1, 1], [0, 1]]), np.array([[1, 0], [1, 1]])], 5)
    assert not cs.unitriangularizable_mod_p([np.diag([2, 1])], 5)


def test_exhaustive_p_group_agrees_with_flag_test():
    rng = np.random.default_rng(3)
    for _ in range(30):
        acts = [np.array([[1, int(rng.integers(0, 5))], [int(rng.integers(0, 2)) * int(rng.integers(0, 5)), 1]])
                for _ in range(2)]
        assert cs.is_p_group_exhaustive(acts, 5) == cs.unitriangularizable_mod_p(acts, 5)
    with pytest.raises(InvalidInputError):
        cs.is_p_group_exhaustive([np.eye(3, dtype=int)], 5)


def test_validation_reports_failures():
    rep = cs.validate_system(rigged_center(), build_relator(2, 5))
    assert not rep.ok
    assert rep.relator_ok
    assert not rep.unitriangularizable
    d = rep.as_dict()
    assert d["ok"] is False and d["messages"]


def test_generic_heisenberg_rejects():
    R = RingModulus(5, 1)
    eye = np.eye(2, dtype=object)
    with pytest.raises(InvalidInputError, match="antisymmetric"):
        cs.generic_heisenberg(2, [[1, 0], [0, 0]], [eye] * 4, [1] * 4, R)
    with pytest.raises(InvalidInputError, match="equivariance"):
        cs.generic_heisenberg(2, [[0, 1], [-1, 0]], [eye, eye, eye, np.diag([2, 1])], [1] * 4, R)
    with pytest.raises(InvalidInputError, match="not a unit"):
        cs.NilpotentSystem(2, np.zeros((2, 2)), (eye,), (5,), R)


def test_direct_sum_and_trivial():
    R = RingModulus(5, 1)
    a = cs.trivial_system(R, 4, 2)
    b = cs.sym_power_twist(cs.unipotent_levi(R, [1, 2, 3, 4]), 1, 0)
    s = cs.direct_sum(a, b)
    assert s.rank == 4
    assert np.array_equal(s.actions[0][2:, 2:], b.actions[0])


def test_zero_bracket_system_is_valid():
    sys_ = zero_bracket(5, 2, 2)
    assert cs.validate_system(sys_, build_relator(2, 5)).ok
