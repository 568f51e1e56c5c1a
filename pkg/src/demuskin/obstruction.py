"""Finite-precision lifting of nonabelian cocycles and the case classifier.

A mod-p cocycle ``(x, y)`` is lifted to ``Z/p^T`` while keeping its reduction
mod p.  The ad part is lifted in one linear solve over ``Z/p^T``.  The center
equation ``Q(x) + d2_z(y) = 0`` is then raised one level at a time: at level
``k`` the corrections ``x += p^k a`` (with ``a`` in the kernel of ``L_R`` mod
``p^(T-k)``) and ``y += p^k b`` enter linearly through ``2 cup(x, a) + d2_z b``.
When that linear equation has no solution the quadratic adjustment
``x += lambda w`` with ``lambda = p mu`` and ``Q(w)`` a unit is tried.  If it
fails too, an :class:`Obstruction` is returned.

All lifting is to finite precision; nothing here certifies characteristic-0
lifts.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import zmod
from .errors import InvalidInputError
from .ld_abelian import build_complex, cohomology
from .ld_nilpotent import Cochain1, complex_for, d2_nilpotent

DEFAULT_TARGET = 4


@dataclass(frozen=True, eq=False)
class LiftState:
    """A cocycle known modulo ``p^precision``.

    Attributes:
        precision: Level ``k`` reached.
        cocycle: Integer representatives ``(x, y)`` as a :class:`Cochain1`
            over the target ring.
        certificate: ``d2`` of the cocycle reduced mod ``p^k`` (zero).
        original: The mod-p input.
        ad_precision: Precision to which ``L_R x = 0`` holds.
        used_quadratic: Whether a quadratic adjustment was applied.
    """

    precision: int
    cocycle: Cochain1
    certificate: object
    original: Cochain1
    ad_precision: int = 1
    used_quadratic: bool = False

    def as_dict(self):
        return {
            "precision": self.precision,
            "cocycle": self.cocycle.as_dict(),
            "certificate": self.certificate.as_dict(),
            "used_quadratic": self.used_quadratic,
        }


@dataclass(frozen=True, eq=False)
class Obstruction:
    """Failure to reach ``level``.

    Attributes:
        level: The precision that could not be reached.
        kind: ``"ad"``, ``"center"`` or ``"degenerate-newton-polygon"``.
        residue: Leading p-adic digit of the obstructing residue.
        functional: Functional certifying that the residue is not hit.
        newton: Valuations of the quadratic's coefficients, when tried.
        state: Last valid state.
    """

    level: int
    kind: str
    residue: int
    functional: list
    newton: dict = None
    state: LiftState = None

    def as_dict(self):
        return {
            "level": self.level,
            "kind": self.kind,
            "residue": int(self.residue),
            "functional": [int(v) for v in self.functional],
            "newton": self.newton,
        }


@dataclass(frozen=True)
class ObstructionCase:
    """Tag of the obstruction trichotomy with its evidence."""

    tag: str
    evidence: dict = field(default_factory=dict)

    def as_dict(self):
        return {"tag": self.tag, "evidence": dict(self.evidence)}


TAGS = ("cup-nontrivial", "center-h2-zero", "ad-h2-zero")


def _low(sys):
    return sys.at(1) if sys.ring.s != 1 else sys


def pairing_on_h1(sys, pres):
    """Matrix of the cup pairing on ``Z^1(U^ad)`` mod p, projected to ``H^2(Z)``.

    Returns:
        ``(Zbasis, values)`` where ``values[f]`` is the pairing matrix composed
        with the ``f``-th functional on the cokernel of ``d2_z`` mod p.
    """
    lo = _low(sys)
    F = lo.ring
    cx = complex_for(lo, pres)
    Zb, _ = zmod.kernel(cx.L, F)
    Q = np.asarray(cx.quad_matrix(), dtype=object)
    Gm = F.reduce((Q + Q.T) * F.half)
    funcs, _ = zmod.left_kernel(cx.d2_z, F)
    pair = F.matmul(F.matmul(Zb, Gm), np.asarray(Zb).T) if Zb.shape[0] else F.zeros(0, 0)
    return Zb, [F.reduce(int(f[0]) * np.asarray(pair, dtype=object)) for f in funcs]


def classify(sys, pres, check_ld=False):
    """Which hypothesis of the obstruction trichotomy holds, at precision 1.

    Returns:
        An :class:`ObstructionCase` whose tag is the first applicable of
        ``cup-nontrivial``, ``center-h2-zero``, ``ad-h2-zero``, or
        ``outside-theorem-hypotheses``.
    """
    lo = _low(sys)
    hz = cohomology(build_complex(pres, lo.center_system(), check_ld=check_ld))
    ha = cohomology(build_complex(pres, lo.ad_system(), check_ld=check_ld))
    _, vals = pairing_on_h1(lo, pres)
    cup_nontrivial = any(np.any(v != 0) for v in vals)
    evidence = {
        "h2_center_dim": hz.h2.free_rank_mod_p,
        "h2_ad_dim": ha.h2.free_rank_mod_p,
        "h1_ad_dim": ha.h1.free_rank_mod_p,
        "pairing_nontrivial": bool(cup_nontrivial),
    }
    if cup_nontrivial:
        tag = "cup-nontrivial"
    elif hz.h2.free_rank_mod_p == 0:
        tag = "center-h2-zero"
    elif ha.h2.free_rank_mod_p == 0:
        tag = "ad-h2-zero"
    else:
        tag = "outside-theorem-hypotheses"
    return ObstructionCase(tag, evidence)


def _val(x, ring):
    return ring.val(int(x) % ring.N)


class _Lifter:
    """Precomputed data for lifting at a fixed target precision."""

    def __init__(self, sys, pres, target):
        if target > sys.ring.s:
            raise InvalidInputError(f"system is only known to precision {sys.ring.s}, target is {target}")
        self.sys = sys.at(target) if sys.ring.s != target else sys
        self.pres = pres
        self.T = target
        self.R = self.sys.ring
        self.cx = complex_for(self.sys, pres)
        self.Q = np.asarray(self.cx.quad_matrix(), dtype=object)
        self.Gsym = self.R.reduce((self.Q + self.Q.T) * self.R.half)
        self._ker = {}

    def kernel_gens(self, prec):
        """Kernel generators of ``L_R`` mod ``p^prec``, as integer rows."""
        if prec not in self._ker:
            Rk = self.R.at(prec)
            G, _ = zmod.kernel(Rk.reduce(self.cx.L), Rk)
            self._ker[prec] = np.asarray(G, dtype=object)
        return self._ker[prec]

    def qval(self, xv):
        return int(xv.dot(self.Q).dot(xv)) % self.R.N

    def cupval(self, a, b):
        return int(np.asarray(a, dtype=object).dot(self.Gsym).dot(np.asarray(b, dtype=object))) % self.R.N

    def center_residual(self, c):
        xv = np.asarray(c.ad, dtype=object).reshape(-1)
        dz = int(np.asarray(self.cx.d2_z, dtype=object).dot(np.asarray(c.z, dtype=object).reshape(-1))[0])
        return (self.qval(xv) + dz) % self.R.N


def _certify(sys_hi, pres, c, k):
    Rk = sys_hi.ring.at(k)
    lo = sys_hi.at(k) if sys_hi.ring.s != k else sys_hi
    return d2_nilpotent(lo, pres, c.reduce(Rk))


def _check_mod_p_cocycle(sys, pres, cbar):
    lo = _low(sys)
    c = Cochain1(lo.ring.reduce(np.asarray(cbar.ad)), lo.ring.reduce(np.asarray(cbar.z)))
    if not d2_nilpotent(lo, pres, c).is_zero():
        raise InvalidInputError("input is not a mod-p nonabelian cocycle")
    return c


def initial_state(sys, pres, cbar):
    """Wrap a certified mod-p cocycle as a precision-1 state.

    Raises:
        InvalidInputError: If ``cbar`` is not a cocycle mod p.
    """
    c = _check_mod_p_cocycle(sys, pres, cbar)
    R = sys.ring
    c_int = Cochain1(R.reduce(np.asarray(c.ad, dtype=object)), R.reduce(np.asarray(c.z, dtype=object)))
    return LiftState(1, c_int, d2_nilpotent(_low(sys), pres, c), c, ad_precision=1)


def _lift_ad(lf, state):
    """Lift the ad part to the target in one solve, or locate the failing level."""
    R = lf.R
    xbar = np.asarray(state.cocycle.ad, dtype=object).reshape(-1) % R.p
    L = np.asarray(lf.cx.L, dtype=object)

    def attempt(prec):
        Rk = R.at(prec)
        return zmod.solve(Rk.reduce(L * R.p), Rk.reduce(-L.dot(xbar)), Rk)

    sol = attempt(lf.T)
    if not isinstance(sol, zmod.Unsolvable):
        x = R.reduce(xbar + R.p * np.asarray(sol, dtype=object))
        c = Cochain1(x.reshape(lf.cx.G, lf.cx.m), state.cocycle.z)
        return LiftState(state.precision, c, state.certificate, state.original, ad_precision=lf.T,
                         used_quadratic=state.used_quadratic)
    for prec in range(2, lf.T + 1):
        low = attempt(prec) if prec < lf.T else sol
        if isinstance(low, zmod.Unsolvable):
            # leading p-adic digit of the residue
            res = int(low.residue) % R.p**prec
            lead = res // R.p ** R.at(prec).val(res) % R.p
            return Obstruction(prec, "ad", lead, [int(v) for v in low.functional], None, state)
    raise AssertionError("unreachable")


def _solve_center_linear(lf, state, e):
    """Solve ``e + sum alpha_j 2cup(x, w_j) + sum beta_i d2_z[i] = 0`` mod p."""
    R = lf.R
    p = R.p
    k = state.precision
    W = lf.kernel_gens(lf.T - k)
    xv = np.asarray(state.cocycle.ad, dtype=object).reshape(-1)
    coef_w = [2 * lf.cupval(xv, w) % p for w in W]
    coef_b = [int(v) % p for v in np.asarray(lf.cx.d2_z).reshape(-1)]
    target = -e % p
    for j, cval in enumerate(coef_w):
        if cval:
            alpha = target * pow(cval, -1, p) % p
            x = R.reduce(xv + R.p**k * alpha * W[j])
            return Cochain1(x.reshape(lf.cx.G, lf.cx.m), state.cocycle.z)
    for i, cval in enumerate(coef_b):
        if cval:
            beta = target * pow(cval, -1, p) % p
            z = np.asarray(state.cocycle.z, dtype=object).copy()
            z[i] = (z[i] + R.p**k * beta) % R.N
            return Cochain1(state.cocycle.ad, R.reduce(z))
    return None


def _direction(lf, rng):
    """A kernel direction with unit self-pairing, canonical first."""
    R = lf.R
    W = lf.kernel_gens(lf.T)
    for w in W:
        if lf.qval(w) % R.p:
            return w
    if len(W) == 0:
        return None
    for _ in range(64):
        w = R.reduce(np.asarray(rng.integers(0, R.p, len(W)), dtype=object).dot(W))
        if lf.qval(w) % R.p:
            return w
    return None


def _quadratic_adjust(lf, state, rng):
    """Try ``x += p mu w`` (and ``y += p b``) to clear the residue at level k+1."""
    R = lf.R
    p = R.p
    k = state.precision
    Rk1 = R.at(k + 1)
    w = _direction(lf, rng)
    xv = np.asarray(state.cocycle.ad, dtype=object).reshape(-1)
    r0 = lf.center_residual(state.cocycle)
    if w is None:
        newton = {"constant": _val(r0, R), "linear": None, "quadratic": None}
        return None, newton
    A = 2 * lf.cupval(xv, w) % R.N
    C = lf.qval(w)
    newton = {"constant": _val(r0, R), "linear": _val(A, R), "quadratic": _val(C, R)}
    dz = Rk1.reduce(np.asarray(lf.cx.d2_z, dtype=object) * p)
    for mu in range(p**k):
        lam = p * mu
        x = R.reduce(xv + lam * np.asarray(w, dtype=object))
        cand = Cochain1(x.reshape(lf.cx.G, lf.cx.m), state.cocycle.z)
        r = lf.center_residual(cand) % Rk1.N
        if r == 0:
            return cand, newton
        sol = zmod.solve(dz, [(-r) % Rk1.N], Rk1)
        if not isinstance(sol, zmod.Unsolvable):
            z = R.reduce(np.asarray(state.cocycle.z, dtype=object) + p * np.asarray(sol, dtype=object))
            return Cochain1(cand.ad, z), newton
    return None, newton


def lift_step(sys, pres, state, target=DEFAULT_TARGET, seed=0):
    """Raise a state from precision ``k`` to ``k + 1``.

    Args:
        sys: Nilpotent system known to precision at least ``target``.
        pres: Presentation.
        state: A valid :class:`LiftState` with ``precision < target``.
        target: Final precision; the ad part is lifted to it up front.
        seed: Seed for the random fallback direction.

    Returns:
        The new :class:`LiftState` or an :class:`Obstruction`.

    Raises:
        InvalidInputError: If the state is already at the target or invalid.
    """
    if not isinstance(state, LiftState) or state.precision >= target:
        raise InvalidInputError("state must be a LiftState below the target precision")
    lf = _Lifter(sys, pres, target)
    return _step(lf, state, np.random.default_rng(seed))


def _step(lf, state, rng):
    R = lf.R
    if state.ad_precision < lf.T:
        up = _lift_ad(lf, state)
        if isinstance(up, Obstruction):
            return up
        state = up
    k = state.precision
    r = lf.center_residual(state.cocycle)
    if r % R.p**k:
        raise InvalidInputError(f"state is not a cocycle modulo p^{k}")
    e = (r // R.p**k) % R.p
    quad = state.used_quadratic
    if e == 0:
        new = state.cocycle
    else:
        new = _solve_center_linear(lf, state, e)
        if new is None:
            new, newton = _quadratic_adjust(lf, state, rng)
            if new is None:
                kind = "center" if newton["quadratic"] == 0 else "degenerate-newton-polygon"
                return Obstruction(k + 1, kind, e, [1], newton, state)
            quad = True
    cert = _certify(lf.sys, lf.pres, new, k + 1)
    if not cert.is_zero():
        raise AssertionError("lift step produced a non-cocycle")
    return LiftState(k + 1, new, cert, state.original, ad_precision=lf.T, used_quadratic=quad)


def lift_to_precision(sys, pres, cbar, target=DEFAULT_TARGET, seed=0):
    """Lift a mod-p nonabelian cocycle to ``Z/p^target``.

    Args:
        sys: Nilpotent system known to precision at least ``target``.
        pres: Presentation.
        cbar: The mod-p cocycle as a :class:`Cochain1`.
        target: Precision to reach.
        seed: Seed for the random fallback direction.

    Returns:
        The final :class:`LiftState`, or the :class:`Obstruction` met on the
        way.

    Raises:
        InvalidInputError: If ``cbar`` is not a cocycle mod p.
    """
    state = initial_state(sys, pres, cbar)
    if target == 1:
        return state
    lf = _Lifter(sys, pres, target)
    rng = np.random.default_rng(seed)
    while state.precision < target:
        nxt = _step(lf, state, rng)
        if isinstance(nxt, Obstruction):
            return nxt
        state = nxt
    return state


def verify_lift(sys, pres, state):
    """Recheck soundness: zero ``d2`` at the reached precision and the same reduction mod p."""
    k = state.precision
    cert = _certify(sys, pres, state.cocycle, k)
    F = sys.ring.at(1)
    same = state.cocycle.reduce(F) == state.original.reduce(F)
    return cert.is_zero() and same


def sample_mod_p_cocycle(sys, pres, rng, ad_precision=1, max_tries=200):
    """Random mod-p nonabelian cocycle whose ad part lifts to ``ad_precision``.

    ``x`` is drawn from the mod-p image of ``ker L_R`` over
    ``Z/p^ad_precision`` and rejected until ``-Q(x)`` lies in the image of
    ``d2_z`` mod p; ``y`` is a particular solution plus a random kernel
    element.
    """
    hi = sys.at(ad_precision) if sys.ring.s != ad_precision else sys
    lo = _low(sys)
    F = lo.ring
    Zg, _ = zmod.kernel(complex_for(hi, pres).L, hi.ring)
    Zbar = np.asarray(zmod.mod_p_image(Zg, hi.ring), dtype=object)
    cx = complex_for(lo, pres)
    Yk, _ = zmod.kernel(cx.d2_z, F)
    G, m = cx.G, cx.m
    for _ in range(max_tries):
        if Zbar.shape[0]:
            xv = F.reduce(np.asarray(rng.integers(0, F.p, Zbar.shape[0]), dtype=object).dot(Zbar))
        else:
            xv = F.zeros(G * m)
        x = Cochain1(np.asarray(xv).reshape(G, m), F.zeros(G))
        qx = int(np.asarray(xv, dtype=object).dot(np.asarray(cx.quad_matrix(), dtype=object)).dot(np.asarray(xv, dtype=object))) % F.N
        sol = zmod.solve(cx.d2_z, [(-qx) % F.N], F)
        if isinstance(sol, zmod.Unsolvable):
            continue
        y = np.asarray(sol, dtype=object)
        if Yk.shape[0]:
            y = y + np.asarray(rng.integers(0, F.p, Yk.shape[0]), dtype=object).dot(np.asarray(Yk, dtype=object))
        c = Cochain1(x.ad, F.reduce(y))
        if not d2_nilpotent(lo, pres, c).is_zero():
            raise AssertionError("sampled cochain is not a cocycle")
        return c
    raise InvalidInputError("could not sample a mod-p cocycle")


def brute_force_liftable(sys, pres, state, ad_basis, level=None):
    """Search ``x += p^k a``, ``y += p^k b`` for a cocycle mod ``p^(k+1)``.

    Args:
        sys: System known to precision at least ``k + 1``.
        pres: Presentation.
        state: State at precision ``k``.
        ad_basis: Rows spanning the ad correction subspace (generator-major
            flat vectors); ``b`` ranges over all of ``F_p^(n+2)``.
        level: Target level, default ``k + 1``.

    Returns:
        True if some correction yields a cocycle.
    """
    k = state.precision
    level = k + 1 if level is None else level
    hi = sys.at(level) if sys.ring.s != level else sys
    R = hi.ring
    p = R.p
    G = pres.n_generators
    m = hi.m_a
    base_x = np.asarray(state.cocycle.ad, dtype=object).reshape(-1)
    base_y = np.asarray(state.cocycle.z, dtype=object).reshape(-1)
    basis = [np.asarray(v, dtype=object).reshape(-1) for v in ad_basis]
    pk = p**k
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        x = base_x.copy()
        for a, v in zip(coeffs, basis):
            x = x + pk * a * v
        xr = R.reduce(x).reshape(G, m)
        for b in itertools.product(range(p), repeat=G):
            y = R.reduce(base_y + pk * np.asarray(b, dtype=object))
            if d2_nilpotent(hi, pres, Cochain1(xr, y)).is_zero():
                return True
    return False
