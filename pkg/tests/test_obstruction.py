import numpy as np
import pytest

from demuskin import coeff_systems as cs
from demuskin import obstruction as ob
from demuskin.errors import InvalidInputError
from demuskin.free_group import build_relator
from demuskin.ld_nilpotent import Cochain1, complex_for, d2_nilpotent
from demuskin.unipotent_groups import relator_is_identity
from demuskin.zmod import RingModulus

from conftest import long_root, rigged_center, short_root, zero_bracket


def x0_directions(sys_):
    G = sys_.n_generators
    return [np.eye(G * sys_.m_a, dtype=object)[k] for k in range(2)]


@pytest.fixture
def mr_short():
    return short_root(5, 4, 2, seed=1, kind="mildly-regular")


def test_zero_cocycle_lifts(mr_short):
    pres = build_relator(2, 5)
    zero = Cochain1.zeros(4, 4, RingModulus(5, 1))
    st = ob.lift_to_precision(mr_short, pres, zero, 4)
    assert isinstance(st, ob.LiftState) and st.precision == 4
    assert st.cocycle == Cochain1.zeros(4, 4, mr_short.ring)
    assert ob.lift_to_precision(mr_short, pres, zero, 1).precision == 1


@pytest.mark.parametrize("builder,p", [(short_root, 5), (long_root, 5), (short_root, 7)])
def test_lifts_are_sound(builder, p):
    sys_ = builder(p, 4, 2, seed=2, kind="mildly-regular")
    pres = build_relator(2, p)
    rng = np.random.default_rng(p)
    for _ in range(10):
        cbar = ob.sample_mod_p_cocycle(sys_, pres, rng, ad_precision=4)
        st = ob.lift_to_precision(sys_, pres, cbar, 4)
        assert isinstance(st, ob.LiftState)
        assert ob.verify_lift(sys_, pres, st)
        assert st.cocycle.reduce(RingModulus(p, 1)) == cbar
        assert d2_nilpotent(sys_, pres, st.cocycle).is_zero()
        assert relator_is_identity(sys_, pres, st.cocycle)


def test_step_is_monotone(mr_short):
    pres = build_relator(2, 5)
    cbar = ob.sample_mod_p_cocycle(mr_short, pres, np.random.default_rng(1), ad_precision=4)
    st = ob.initial_state(mr_short, pres, cbar)
    for k in (2, 3, 4):
        st = ob.lift_step(mr_short, pres, st, target=4)
        assert st.precision == k
    with pytest.raises(InvalidInputError):
        ob.lift_step(mr_short, pres, st, target=4)


def test_deterministic(mr_short):
    pres = build_relator(2, 5)
    cbar = ob.sample_mod_p_cocycle(mr_short, pres, np.random.default_rng(3), ad_precision=4)
    a = ob.lift_to_precision(mr_short, pres, cbar, 4, seed=9)
    b = ob.lift_to_precision(mr_short, pres, cbar, 4, seed=9)
    assert a.cocycle == b.cocycle


def test_rejects_non_cocycle(mr_short):
    pres = build_relator(2, 5)
    bad = Cochain1(np.ones((4, 4), dtype=object), np.zeros(4, dtype=object))
    with pytest.raises(InvalidInputError, match="cocycle"):
        ob.lift_to_precision(mr_short, pres, bad, 4)
    with pytest.raises(InvalidInputError, match="precision"):
        ob.lift_to_precision(mr_short.at(2), build_relator(2, 5), Cochain1.zeros(4, 4, RingModulus(5, 1)), 3)


def test_classify_tags():
    pres = build_relator(2, 5)
    trivial_levi = cs.g2_short_root(cs.unipotent_levi(RingModulus(5, 1), [0, 0, 0, 0]))
    assert ob.classify(trivial_levi, pres).tag == "cup-nontrivial"
    assert ob.classify(rigged_center(), pres).tag == "center-h2-zero"
    case = ob.classify(zero_bracket(5, 1, 2), pres)
    assert case.tag == "outside-theorem-hypotheses"
    assert case.evidence["h2_center_dim"] == 1 and case.evidence["h2_ad_dim"] == 2
    # zero bracket, trivial center, ad action with no coinvariants
    R = RingModulus(5, 1)
    eye = np.eye(2, dtype=object)
    ad_only = cs.generic_heisenberg(2, np.zeros((2, 2), dtype=object), [eye, eye, eye, 2 * eye], [1] * 4, R)
    assert ob.classify(ad_only, pres).tag == "ad-h2-zero"


def test_center_h2_zero_never_needs_quadratic():
    sys_ = rigged_center(5, 4)
    pres = build_relator(2, 5)
    assert ob.classify(sys_, pres).tag == "center-h2-zero"
    rng = np.random.default_rng(4)
    for _ in range(20):
        cbar = ob.sample_mod_p_cocycle(sys_, pres, rng, ad_precision=4)
        st = ob.lift_to_precision(sys_, pres, cbar, 4)
        assert isinstance(st, ob.LiftState) and not st.used_quadratic


def test_zero_bracket_with_vanishing_d2_lifts_everything():
    p = 5
    sys_ = zero_bracket(p, 4, 2)
    pres = build_relator(2, p**4)
    rng = np.random.default_rng(5)
    for _ in range(10):
        cbar = ob.sample_mod_p_cocycle(sys_, pres, rng)
        assert isinstance(ob.lift_to_precision(sys_, pres, cbar, 4), ob.LiftState)


def test_degenerate_obstructions_are_genuine():
    sys_ = zero_bracket(5, 2, 2)
    pres = build_relator(2, 5)
    R1 = RingModulus(5, 1)
    cases = {
        "ad": Cochain1(np.array([[1, 0], [0, 0], [0, 0], [0, 0]], dtype=object), R1.zeros(4)),
        "center": Cochain1(R1.zeros(4, 2), np.array([2, 0, 0, 0], dtype=object)),
    }
    for label, cbar in cases.items():
        res = ob.lift_to_precision(sys_, pres, cbar, 2)
        assert isinstance(res, ob.Obstruction), label
        assert res.level == 2 and res.residue % 5
        assert res.kind == ("ad" if label == "ad" else "degenerate-newton-polygon")
        assert not ob.brute_force_liftable(sys_, pres, res.state, x0_directions(sys_), res.level)


def test_corrected_input_lifts_after_removing_residue():
    sys_ = zero_bracket(5, 2, 2)
    pres = build_relator(2, 5)
    R1 = RingModulus(5, 1)
    y = np.array([3, 1, 4, 1], dtype=object)
    res = ob.lift_to_precision(sys_, pres, Cochain1(R1.zeros(4, 2), y), 2)
    assert isinstance(res, ob.Obstruction)
    # d2_z / p is the first coordinate functional, so subtract the residue there
    y2 = y.copy()
    y2[0] = (y2[0] - res.residue) % 5
    assert isinstance(ob.lift_to_precision(sys_, pres, Cochain1(R1.zeros(4, 2), y2), 2), ob.LiftState)


def test_center_obstruction_on_mildly_regular(mr_short):
    """(0, y) with y0 a unit is a mod-p cocycle that cannot keep its reduction."""
    pres = build_relator(2, 5)
    R1 = RingModulus(5, 1)
    cbar = Cochain1(R1.zeros(4, 4), np.array([1, 0, 0, 0], dtype=object))
    res = ob.lift_to_precision(mr_short, pres, cbar, 4)
    assert isinstance(res, ob.Obstruction)
    assert (res.level, res.kind) == (2, "center")
    assert res.newton["quadratic"] == 0
    assert not ob.brute_force_liftable(mr_short, pres, res.state, x0_directions(mr_short), 2)


def test_quadratic_adjustment_branch(mr_short):
    """A level-2 residue invisible to the linear step is cleared by lower-level corrections."""
    pres = build_relator(2, 5)
    R = mr_short.ring
    cx = complex_for(mr_short, pres)
    u = int(cx.d2_z[0, 0]) // 5 % 5
    assert u != 0
    y = R.zeros(4).astype(object)
    y[0] = 5
    c = Cochain1(R.zeros(4, 4), y)
    cbar = c.reduce(RingModulus(5, 1))
    cert = d2_nilpotent(mr_short.at(2), pres, c.reduce(RingModulus(5, 2)))
    state = ob.LiftState(2, c, cert, cbar, ad_precision=4)
    if not cert.is_zero():
        pytest.skip("chosen y is not a cocycle mod p^2 for this levi")
    nxt = ob.lift_step(mr_short, pres, state, target=4)
    assert isinstance(nxt, ob.LiftState) and nxt.used_quadratic
    assert nxt.precision == 3
    assert nxt.cocycle.reduce(RingModulus(5, 1)) == cbar
    assert ob.verify_lift(mr_short, pres, nxt)


def test_reports_serialize(mr_short):
    pres = build_relator(2, 5)
    st = ob.lift_to_precision(mr_short, pres, Cochain1.zeros(4, 4, RingModulus(5, 1)), 2)
    assert st.as_dict()["precision"] == 2
    res = ob.lift_to_precision(zero_bracket(5, 2, 2), pres,
                               Cochain1(RingModulus(5, 1).zeros(4, 2), np.array([1, 0, 0, 0], dtype=object)), 2)
    assert set(res.as_dict()) == {"level", "kind", "residue", "functional", "newton"}
    assert ob.classify(mr_short, pres).as_dict()["tag"] == "cup-nontrivial"
