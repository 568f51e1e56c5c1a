"""Class-2 nilpotent coefficients: nonlinear d2, the quadratic form and cup.

Lie values split as ``U^ad + Z`` with a rank-1 center.  A 1-cochain is
extended to the free group by ``c(gh) = c(g) + g.c(h) + 1/2 [c(g), g.c(h)]``
and ``d2(c)`` is its value on the relator.  For ``c = (x, y)`` this equals
``(L_R x, Q(x) + d2_z(y))`` where ``L_R`` and ``d2_z`` are the abelian
differentials of ``U^ad`` and ``Z``.

Cochains are stored as an ``(n+2, m_a)`` ad array and an ``(n+2,)`` center
array.  The Gram basis orders coordinates by root height and then generator:
flat index ``j * (n+2) + i`` is the ``E_j`` coordinate on ``x_i``.
"""

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from . import kernels, zmod
from .errors import InternalError, InvalidInputError
from .ld_abelian import d1_matrix, d2_matrix


@dataclass(frozen=True, eq=False)
class LieValue:
    """Element of ``U^ad + Z``.

    Attributes:
        ad: Length-``m_a`` residue vector.
        z: Center residue.
    """

    ad: np.ndarray
    z: int

    def __eq__(self, other):
        return isinstance(other, LieValue) and np.array_equal(
            np.asarray(self.ad, dtype=object), np.asarray(other.ad, dtype=object)
        ) and int(self.z) == int(other.z)

    def is_zero(self):
        return not np.any(np.asarray(self.ad) != 0) and int(self.z) == 0

    def as_dict(self):
        return {"ad": [int(v) for v in np.asarray(self.ad).tolist()], "z": int(self.z)}


@dataclass(frozen=True, eq=False)
class Cochain1:
    """A 1-cochain: one Lie value per generator.

    Attributes:
        ad: Array of shape ``(n_generators, m_a)``.
        z: Array of shape ``(n_generators,)``.
    """

    ad: np.ndarray
    z: np.ndarray

    @classmethod
    def zeros(cls, n_generators, m_a, ring):
        return cls(ring.zeros(n_generators, m_a), ring.zeros(n_generators))

    @classmethod
    def from_basis(cls, vec, n_generators, m_a, ring, z=None):
        """Build an ad-only cochain from a Gram-basis coordinate vector."""
        v = ring.reduce(np.asarray(vec, dtype=object).reshape(m_a, n_generators).T)
        zz = ring.zeros(n_generators) if z is None else ring.reduce(np.asarray(z))
        return cls(v, zz)

    def basis_vector(self):
        """Ad coordinates in Gram-basis order."""
        return np.asarray(self.ad).T.reshape(-1)

    def gm_vector(self):
        """Ad coordinates in generator-major order."""
        return np.asarray(self.ad).reshape(-1)

    def value(self, i):
        return LieValue(np.asarray(self.ad)[i], int(np.asarray(self.z)[i]))

    def __eq__(self, other):
        return (
            isinstance(other, Cochain1)
            and np.array_equal(np.asarray(self.ad, dtype=object), np.asarray(other.ad, dtype=object))
            and np.array_equal(np.asarray(self.z, dtype=object), np.asarray(other.z, dtype=object))
        )

    def reduce(self, ring):
        return Cochain1(ring.reduce(self.ad), ring.reduce(self.z))

    def add(self, other, ring):
        return Cochain1(ring.reduce(np.asarray(self.ad, dtype=object) + np.asarray(other.ad, dtype=object)),
                        ring.reduce(np.asarray(self.z, dtype=object) + np.asarray(other.z, dtype=object)))

    def scale(self, lam, ring):
        return Cochain1(ring.reduce(np.asarray(self.ad, dtype=object) * lam),
                        ring.reduce(np.asarray(self.z, dtype=object) * lam))

    def as_dict(self):
        return {"ad": np.asarray(self.ad).tolist(), "z": np.asarray(self.z).tolist()}


def _require_odd(ring):
    if ring.p == 2:
        raise InvalidInputError("p must be odd so that 1/2 exists")


class _Action:
    """Inverses and packed arrays used to fold cochains along words."""

    def __init__(self, sys):
        _require_odd(sys.ring)
        self.sys = sys
        self.ring = R = sys.ring
        self.G = sys.n_generators
        self.m = sys.m_a
        self.ad_inv = [zmod.inverse(a, R) for a in sys.ad_actions]
        self.z_inv = [R.inv(z) for z in sys.z_actions]
        self._act = np.array(sys.ad_actions)
        self._act_inv = np.array(self.ad_inv)

    def fold(self, c, gens, signs):
        R = self.ring
        ad, z = kernels.fold_word(
            gens, signs, self._act, self._act_inv, np.array(self.sys.z_actions, dtype=object),
            np.array(self.z_inv, dtype=object), self.sys.bracket, R.reduce(np.asarray(c.ad)),
            R.reduce(np.asarray(c.z)), R.N, R.half,
        )
        return LieValue(R.reduce(np.asarray(ad, dtype=object)), int(z) % R.N)


class NilpotentComplex:
    """Cached differentials and quadratic data of a nilpotent system.

    Args:
        sys: A :class:`~demuskin.coeff_systems.NilpotentSystem`.
        pres: A Demuskin presentation.
    """

    def __init__(self, sys, pres):
        if sys.n_generators != pres.n_generators:
            raise InvalidInputError(
                f"system has {sys.n_generators} generators, presentation has {pres.n_generators}"
            )
        self.action = action_for(sys)
        self.sys = sys
        self.pres = pres
        self.ring = R = sys.ring
        self.G = pres.n_generators
        self.m = sys.m_a
        self.ad_inv = self.action.ad_inv
        self.L = d2_matrix(pres, sys.ad_system())
        self.d2_z = d2_matrix(pres, sys.center_system())
        self.d1_ad = d1_matrix(sys.ad_system())
        self.d1_z = d1_matrix(sys.center_system())
        self._gens, self._signs = pres.relator.arrays()
        self._act = self.action._act
        self._quad = None
        self._perm = np.array([i * self.m + j for j in range(self.m) for i in range(self.G)])

    @property
    def n_cochain(self):
        return self.G * self.m

    def fold(self, c, gens=None, signs=None):
        """Extended cochain on a word given as letter arrays (default: relator)."""
        gens = self._gens if gens is None else gens
        signs = self._signs if signs is None else signs
        return self.action.fold(c, gens, signs)

    def quad_matrix(self):
        """Matrix ``G`` in generator-major order with ``Q(c) = c^T G c``.

        Accumulates ``1/2 L^T B M`` letter by letter along the relator, where
        ``L`` is the running linear map ``c -> c~(prefix)`` and ``M`` the map
        ``c -> prefix . c~(letter)``.
        """
        if self._quad is None:
            R = self.ring
            m, G = self.m, self.G
            nc = m * G
            B = np.asarray(self.sys.bracket, dtype=object)
            L = np.zeros((m, nc), dtype=object)
            phi = np.eye(m, dtype=object)
            Q = np.zeros((nc, nc), dtype=object)
            for g, e in zip(self._gens.tolist(), self._signs.tolist()):
                blk = slice(g * m, (g + 1) * m)
                if e > 0:
                    step = np.asarray(self._act[g], dtype=object)
                    Mb = phi
                else:
                    step = np.asarray(self.ad_inv[g], dtype=object)
                    Mb = -phi.dot(step) % R.N
                # M is supported on the columns of generator g
                Q[:, blk] = (Q[:, blk] + L.T.dot(B).dot(Mb)) % R.N
                L[:, blk] = (L[:, blk] + Mb) % R.N
                phi = phi.dot(step) % R.N
            self._quad = R.reduce(Q * R.half)
            if np.any(R.reduce(L) != R.reduce(self.L)):
                raise InternalError("linear part of the relator fold disagrees with the Fox matrix")
        return self._quad

    def q_matrix_basis(self):
        """Quadratic-form matrix in Gram-basis order."""
        Q = self.quad_matrix()
        return Q[np.ix_(self._perm, self._perm)]

    def to_gm(self, vec_basis):
        out = np.zeros(self.n_cochain, dtype=object)
        out[self._perm] = np.asarray(vec_basis, dtype=object)
        return out

    def to_basis(self, vec_gm):
        return np.asarray(vec_gm, dtype=object)[self._perm]


_CACHE = OrderedDict()


def _cached(key, owners, build):
    hit = _CACHE.get(key)
    if hit is not None and all(a is b for a, b in zip(hit[0], owners)):
        _CACHE.move_to_end(key)
        return hit[1]
    val = build()
    _CACHE[key] = (owners, val)
    if len(_CACHE) > 128:
        _CACHE.popitem(last=False)
    return val


def action_for(sys):
    """Cached folding data for a system."""
    return _cached(("action", id(sys)), (sys,), lambda: _Action(sys))


def complex_for(sys, pres):
    """Cached :class:`NilpotentComplex` for a system and presentation."""
    return _cached(("complex", id(sys), id(pres)), (sys, pres), lambda: NilpotentComplex(sys, pres))


def _check_shape(cx, c):
    ad = np.asarray(c.ad)
    z = np.asarray(c.z)
    if ad.shape != (cx.G, cx.m) or z.shape != (cx.G,):
        raise InvalidInputError(f"cochain shape {ad.shape}/{z.shape} does not match ({cx.G}, {cx.m})")


def extend_cochain(sys, c, w):
    """Value of the extended cochain on a word.

    Args:
        sys: Nilpotent system.
        c: A :class:`Cochain1`.
        w: A :class:`~demuskin.free_group.Word`, or a ``(gens, signs)`` pair of
            letter arrays (which need not be freely reduced).

    Raises:
        InvalidInputError: If p = 2 or the shapes disagree.
    """
    _require_odd(sys.ring)
    act = action_for(sys)
    _check_shape(act, c)
    if isinstance(w, tuple):
        gens, signs = (np.asarray(a, dtype=np.int64) for a in w)
    else:
        gens, signs = w.arrays()
    if len(gens) and (gens.max() >= act.G or gens.min() < 0):
        raise InvalidInputError("word uses a generator outside the system")
    return act.fold(c, gens, signs)


def d2_nilpotent(sys, pres, c):
    """The nonlinear differential: value of the extended cochain on the relator."""
    cx = complex_for(sys, pres)
    _check_shape(cx, c)
    return cx.fold(c)


def d2_split(sys, pres, c):
    """``(L_R x, Q(x) + d2_z(y))`` from the cached matrices."""
    cx = complex_for(sys, pres)
    R = cx.ring
    x = np.asarray(c.ad, dtype=object).reshape(-1)
    ad = R.reduce(R.matmul(cx.L, x.reshape(-1, 1)).reshape(-1))
    Q = cx.quad_matrix()
    qx = int(x.dot(np.asarray(Q, dtype=object)).dot(x)) % R.N
    dz = int(R.matmul(cx.d2_z, np.asarray(c.z, dtype=object).reshape(-1, 1))[0, 0])
    return LieValue(ad, (qx + dz) % R.N)


def q_form(sys, pres, x):
    """``Q(x)``: center part of ``d2`` on the lift of ``x`` with zero center values.

    Raises:
        InvalidInputError: If ``x`` has nonzero center values.
    """
    if np.any(np.asarray(x.z) != 0):
        raise InvalidInputError("q_form takes an ad-only cochain (zero center values)")
    return int(d2_nilpotent(sys, pres, x).z)


def cup(sys, pres, x, y):
    """``1/2 (Q(x + y) - Q(x) - Q(y))``."""
    R = sys.ring
    _require_odd(R)
    s = x.add(y, R)
    return (q_form(sys, pres, s) - q_form(sys, pres, x) - q_form(sys, pres, y)) * R.half % R.N


def _basis_cochain(k, G, m, ring):
    v = np.zeros(G * m, dtype=object)
    v[k] = 1
    return Cochain1.from_basis(v, G, m, ring)


@dataclass(frozen=True, eq=False)
class GramReport:
    """The cup pairing on the standard cochain basis, mod p.

    Attributes:
        matrix: Symmetric Gram matrix of size ``m_a * (n+2)``.
        block_structure: ``m_a x m_a`` boolean array, True where a block is
            nonzero.
        anti_triangular: Every block strictly above the anti-diagonal is zero.
        determinant: Determinant mod p.
        mr2_verdict: Whether the determinant is a unit.
    """

    matrix: np.ndarray
    block_structure: np.ndarray
    anti_triangular: bool
    determinant: int
    mr2_verdict: bool

    def as_dict(self):
        return {
            "block_structure": [[int(b) for b in row] for row in self.block_structure.tolist()],
            "anti_triangular": self.anti_triangular,
            "determinant": int(self.determinant),
            "mr2": self.mr2_verdict,
        }


def gram_matrix(sys, pres, method="polarization"):
    """Gram matrix of the cup pairing on the Gram basis, mod p.

    Args:
        sys: Nilpotent system (reduced to precision 1 if needed).
        pres: Presentation.
        method: ``"polarization"`` evaluates ``cup`` on every basis pair;
            ``"accumulate"`` symmetrizes the one-pass quadratic matrix.

    Raises:
        InvalidInputError: If the bracket is not a square ``m_a`` array (the
            center must have rank 1).
    """
    B = np.asarray(sys.bracket)
    if B.ndim != 2 or B.shape != (sys.m_a, sys.m_a):
        raise InvalidInputError("gram_matrix needs a rank-1 center (an m_a x m_a bracket)")
    if sys.ring.s != 1:
        sys = sys.at(1)
    R = sys.ring
    G, m = pres.n_generators, sys.m_a
    n = G * m
    if method == "polarization":
        basis = [_basis_cochain(k, G, m, R) for k in range(n)]
        qs = [q_form(sys, pres, b) for b in basis]
        M = np.zeros((n, n), dtype=object)
        for a in range(n):
            M[a, a] = qs[a]
            for b in range(a + 1, n):
                s = basis[a].add(basis[b], R)
                v = (q_form(sys, pres, s) - qs[a] - qs[b]) * R.half % R.N
                M[a, b] = M[b, a] = v
    elif method == "accumulate":
        Q = complex_for(sys, pres).q_matrix_basis()
        M = R.reduce((np.asarray(Q, dtype=object) + np.asarray(Q, dtype=object).T) * R.half)
    else:
        raise InvalidInputError(f"unknown method {method!r}")
    M = R.reduce(M)
    blocks = np.zeros((m, m), dtype=bool)
    for j in range(m):
        for k in range(m):
            blocks[j, k] = bool(np.any(M[j * G : (j + 1) * G, k * G : (k + 1) * G] != 0))
    anti = not any(blocks[j, k] for j in range(m) for k in range(m) if j + k < m - 1)
    det = zmod.det_mod_p(M, R.p)
    return GramReport(M, blocks, anti, det, det != 0)


def mr2_check(sys, pres):
    """Whether the mod-p cup pairing on cochains is non-degenerate."""
    return gram_matrix(sys, pres).mr2_verdict


@dataclass(frozen=True)
class FiberObstruction:
    """``Q(x)`` is not in the image of ``d2_z``.

    Attributes:
        residue: ``Q(x)``.
        functional: Row vector killing the image of ``d2_z``.
        value: Value of the functional on ``-Q(x)``; nonzero.
    """

    residue: int
    functional: np.ndarray
    value: int


def cocycle_fiber_solve(sys, pres, x):
    """Find center values ``y`` making ``(x, y)`` a nonabelian cocycle.

    Args:
        sys: Nilpotent system.
        pres: Presentation.
        x: Cochain whose ad part is an abelian cocycle (center part ignored).

    Returns:
        A certified :class:`Cochain1` ``(x, y)``, or a :class:`FiberObstruction`.

    Raises:
        InvalidInputError: If the ad part of ``x`` is not a cocycle.
    """
    cx = complex_for(sys, pres)
    R = cx.ring
    xa = Cochain1(R.reduce(np.asarray(x.ad)), R.zeros(cx.G))
    _check_shape(cx, xa)
    if np.any(R.matmul(cx.L, np.asarray(xa.ad, dtype=object).reshape(-1, 1)) != 0):
        raise InvalidInputError("x is not an abelian cocycle on U^ad")
    qx = q_form(sys, pres, xa)
    sol = zmod.solve(cx.d2_z, [(-qx) % R.N], R)
    if isinstance(sol, zmod.Unsolvable):
        return FiberObstruction(qx, sol.functional, sol.residue)
    out = Cochain1(xa.ad, R.reduce(np.asarray(sol)))
    if not d2_nilpotent(sys, pres, out).is_zero():
        raise InternalError("fiber solution is not a cocycle")
    return out


def is_nonabelian_cocycle(sys, pres, c):
    return d2_nilpotent(sys, pres, c).is_zero()


@dataclass(frozen=True)
class KldReport:
    """Dimensions feeding the delta-flatness probe at one precision.

    Attributes:
        s: Precision at which ``Z^1`` was computed.
        z_dim: Dimension of the mod-p image of ``Z^1(U^ad)``.
        ker_dim: Dimension of the radical of cup restricted to that image.
        kld_dim: Dimension of ``B^1 + radical``.
        b1_dim: Dimension of the mod-p image of ``B^1``.
    """

    s: int
    z_dim: int
    ker_dim: int
    kld_dim: int
    b1_dim: int

    def as_dict(self):
        return dict(self.__dict__)


def kernel_and_kld(sys, pres, s):
    """Radical of cup on the mod-p image of ``Z^1`` at precision ``s``.

    Returns:
        A :class:`KldReport`; its ``(ker_dim, kld_dim, b1_dim)`` are the
        requested dimensions.

    Raises:
        InvalidInputError: If the system is not known to precision ``s``.
    """
    if s < 1 or s > sys.ring.s:
        raise InvalidInputError(f"precision {s} outside 1..{sys.ring.s}")
    hi = sys.at(s) if sys.ring.s != s else sys
    F = sys.ring.at(1)
    cxh = complex_for(hi, pres)
    Zg, _ = zmod.kernel(cxh.L, hi.ring)
    Zbar = zmod.mod_p_image(Zg, hi.ring)
    Bbar = zmod.mod_p_image(np.asarray(cxh.d1_ad).T, hi.ring)
    lo = sys.at(1) if sys.ring.s != 1 else sys
    cx1 = complex_for(lo, pres)
    Q = np.asarray(cx1.quad_matrix(), dtype=object)
    Gm = F.reduce((Q + Q.T) * F.half)
    zdim = Zbar.shape[0]
    if zdim:
        pair = F.matmul(F.matmul(Zbar, Gm), np.asarray(Zbar).T)
        coeffs, _ = zmod.kernel(pair, F)
        rad = F.matmul(coeffs, Zbar) if coeffs.shape[0] else F.zeros(0, Zbar.shape[1])
    else:
        rad = F.zeros(0, cx1.n_cochain)
    rad_dim = zmod.rank_mod_p(rad, F.p) if rad.shape[0] else 0
    b1 = Bbar.shape[0]
    both = np.vstack([np.asarray(Bbar, dtype=object).reshape(-1, cx1.n_cochain),
                      np.asarray(rad, dtype=object).reshape(-1, cx1.n_cochain)])
    kld = zmod.rank_mod_p(both, F.p) if both.shape[0] else 0
    return KldReport(s, zdim, rad_dim, kld, b1)
