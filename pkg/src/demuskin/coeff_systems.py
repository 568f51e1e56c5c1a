"""Coefficient systems: Levi data, abelian modules and class-2 nilpotent data.

A rank-2 Levi datum assigns an upper-triangular matrix ``[[a, l], [0, d]]`` to
each generator.  The builders turn it into symmetric-power modules, the G2
short-root system (sym^3 twisted by det^-2 with center det^-1) and the G2
long-root Heisenberg quotient (std with center det).
"""

from collections import deque
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import zmod
from .errors import InvalidInputError
from .free_group import evaluate

DEFAULT_B03 = 3
DEFAULT_B12 = -1


@dataclass(frozen=True, eq=False)
class LeviData:
    """Images of the generators in the rank-2 Levi.

    Attributes:
        ring: Coefficient ring.
        l: Upper-right entries, one per generator.
        diag: Optional ``(a, d)`` diagonal pairs, each congruent to 1 mod p.
            ``None`` means every image is unipotent.
    """

    ring: zmod.RingModulus
    l: tuple
    diag: tuple = None

    def __post_init__(self):
        R = self.ring
        object.__setattr__(self, "l", tuple(R.reduce(int(x)) for x in self.l))
        if self.diag is not None:
            dg = tuple((R.reduce(int(a)), R.reduce(int(d))) for a, d in self.diag)
            if len(dg) != len(self.l):
                raise InvalidInputError("diag must have one pair per generator")
            for i, (a, d) in enumerate(dg):
                if a % R.p != 1 or d % R.p != 1:
                    raise InvalidInputError(f"diagonal of x{i} is not congruent to 1 mod p")
            object.__setattr__(self, "diag", dg)

    @property
    def n_generators(self):
        return len(self.l)

    def pair(self, i):
        if self.diag is None:
            return 1, 1
        return self.diag[i]

    def det(self, i):
        a, d = self.pair(i)
        return self.ring.reduce(a * d)

    def matrix(self, i):
        a, d = self.pair(i)
        return np.array([[a, self.l[i]], [0, d]], dtype=self.ring.dtype)

    def matrices(self):
        return [self.matrix(i) for i in range(self.n_generators)]

    def at(self, s):
        """The same integer data reduced to precision ``s``."""
        return LeviData(self.ring.at(s), self.l, self.diag)

    @property
    def unipotent(self):
        return self.diag is None or all(a == 1 and d == 1 for a, d in self.diag)


def unipotent_levi(ring, l):
    """Levi datum with images ``[[1, l_i], [0, 1]]``."""
    return LeviData(ring, tuple(l))


def random_unipotent_levi(ring, n_generators, rng):
    """Random unipotent Levi datum with entries in ``[0, p)``."""
    return LeviData(ring, tuple(int(x) for x in rng.integers(0, ring.p, n_generators)))


def mildly_regular_levi(ring, n, rng=None):
    """A Levi datum whose sym^3 and std modules have no fixed vectors in char 0.

    ``x0`` is trivial, ``x1`` is ``diag(1 + p t, 1)`` with ``t`` a unit and the
    remaining generators are unipotent with ``l_2`` a unit.  Since ``x0 = 1``
    and ``x2, ..., x_{n+1}`` commute, the relator maps to the identity for every
    ``q`` and precision.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    p = ring.p
    t = int(rng.integers(1, p))
    l = [0, int(rng.integers(0, p)), int(rng.integers(1, p))]
    l += [int(x) for x in rng.integers(0, p, n - 1)]
    diag = [(1, 1), (1 + p * t, 1)] + [(1, 1)] * n
    return LeviData(ring, tuple(l), tuple(diag))


@dataclass(frozen=True, eq=False)
class AbelianSystem:
    """A finite free Z/p^s-module with one action matrix per generator.

    Attributes:
        rank: Module rank.
        actions: Tuple of ``rank x rank`` matrices.
        ring: Coefficient ring.
    """

    rank: int
    actions: tuple
    ring: zmod.RingModulus

    def __post_init__(self):
        acts = tuple(self.ring.reduce(np.asarray(a)) for a in self.actions)
        for i, a in enumerate(acts):
            if a.shape != (self.rank, self.rank):
                raise InvalidInputError(f"action of x{i} has shape {a.shape}, expected rank {self.rank}")
        object.__setattr__(self, "actions", acts)

    @property
    def n_generators(self):
        return len(self.actions)

    def at(self, s):
        R = self.ring.at(s)
        return AbelianSystem(self.rank, tuple(R.reduce(a) for a in self.actions), R)


def trivial_system(ring, n_generators, rank=1):
    """Identity actions on a free module of the given rank."""
    return AbelianSystem(rank, tuple(ring.eye(rank) for _ in range(n_generators)), ring)


def direct_sum(a, b):
    """Block-diagonal sum of two abelian systems over the same ring."""
    acts = []
    for x, y in zip(a.actions, b.actions):
        m = a.ring.zeros(a.rank + b.rank, a.rank + b.rank)
        m[: a.rank, : a.rank] = x
        m[a.rank :, a.rank :] = y
        acts.append(m)
    return AbelianSystem(a.rank + b.rank, tuple(acts), a.ring)


@dataclass(frozen=True, eq=False)
class NilpotentSystem:
    """Graded data of a class-2 nilpotent coefficient group with rank-1 center.

    Attributes:
        m_a: Rank of the abelianization ``U^ad``.
        bracket: Antisymmetric ``m_a x m_a`` array of center-valued
            coefficients.
        ad_actions: Action matrices on ``U^ad``, one per generator.
        z_actions: Unit scalars giving the action on the center.
        ring: Coefficient ring.
        label: Name of the builder that produced the system.
        constants: Bracket normalization constants, echoed in reports.
        levi: The Levi datum the system was built from, if any.
    """

    m_a: int
    bracket: np.ndarray
    ad_actions: tuple
    z_actions: tuple
    ring: zmod.RingModulus
    label: str = "custom"
    constants: dict = field(default_factory=dict)
    levi: LeviData = None

    def __post_init__(self):
        R = self.ring
        B = R.reduce(np.asarray(self.bracket))
        if B.shape != (self.m_a, self.m_a):
            raise InvalidInputError(f"bracket must be {self.m_a}x{self.m_a}, got {B.shape}")
        acts = tuple(R.reduce(np.asarray(a)) for a in self.ad_actions)
        for i, a in enumerate(acts):
            if a.shape != (self.m_a, self.m_a):
                raise InvalidInputError(f"ad action of x{i} has shape {a.shape}")
        zs = tuple(R.reduce(int(z)) for z in self.z_actions)
        if len(zs) != len(acts):
            raise InvalidInputError("need one center action per generator")
        for i, z in enumerate(zs):
            if z % R.p == 0:
                raise InvalidInputError(f"center action of x{i} is not a unit")
        object.__setattr__(self, "bracket", B)
        object.__setattr__(self, "ad_actions", acts)
        object.__setattr__(self, "z_actions", zs)

    @property
    def n_generators(self):
        return len(self.ad_actions)

    def ad_system(self):
        return AbelianSystem(self.m_a, self.ad_actions, self.ring)

    def center_system(self):
        acts = tuple(np.array([[z]], dtype=self.ring.dtype) for z in self.z_actions)
        return AbelianSystem(1, acts, self.ring)

    def graded_actions(self):
        """Block-diagonal actions on ``U^ad + Z``."""
        out = []
        for a, z in zip(self.ad_actions, self.z_actions):
            m = self.ring.zeros(self.m_a + 1, self.m_a + 1)
            m[: self.m_a, : self.m_a] = a
            m[self.m_a, self.m_a] = z
            out.append(m)
        return out

    def bracket_value(self, x, y):
        """Center value of ``[x, y]`` for ad-vectors ``x, y``."""
        R = self.ring
        x = np.asarray(x, dtype=object)
        y = np.asarray(y, dtype=object)
        return int(x.dot(np.asarray(self.bracket, dtype=object)).dot(y)) % R.N

    def at(self, s):
        R = self.ring.at(s)
        return NilpotentSystem(
            self.m_a,
            R.reduce(self.bracket),
            tuple(R.reduce(a) for a in self.ad_actions),
            tuple(R.reduce(z) for z in self.z_actions),
            R,
            label=self.label,
            constants=dict(self.constants),
            levi=self.levi.at(s) if self.levi is not None else None,
        )

    def with_bracket(self, bracket, label=None):
        """Copy with a different bracket tensor (equivariance not rechecked)."""
        return NilpotentSystem(
            self.m_a, bracket, self.ad_actions, self.z_actions, self.ring,
            label=label or self.label, constants=dict(self.constants), levi=self.levi,
        )


def sym_power_matrix(g, k, d, ring):
    """Action of ``g = [[a, l], [0, delta]]`` on sym^k twisted by det^d.

    The basis is ``E_j = e1^(k-j) e2^j``; ``g`` sends ``e1 -> a e1`` and
    ``e2 -> l e1 + delta e2``.
    """
    a, l, delta = int(g[0][0]), int(g[0][1]), int(g[1][1])
    det = a * delta % ring.N
    scale = pow(det, d, ring.N) if d >= 0 else pow(ring.inv(det), -d, ring.N)
    M = ring.zeros(k + 1, k + 1)
    for j in range(k + 1):
        for t in range(j + 1):
            M[t, j] = pow(a, k - j, ring.N) * comb(j, t) * pow(l, j - t, ring.N) * pow(delta, t, ring.N) * scale % ring.N
    return M


def sym_power_twist(levi, k, d):
    """The module sym^k(std) twisted by det^d over a Levi datum.

    Args:
        levi: The Levi datum.
        k: Symmetric power, at least 0.
        d: Determinant twist (may be negative).

    Returns:
        An :class:`AbelianSystem` of rank ``k + 1``.
    """
    if int(k) != k or k < 0:
        raise InvalidInputError(f"symmetric power must be >= 0, got {k}")
    R = levi.ring
    acts = tuple(sym_power_matrix(levi.matrix(i), k, d, R) for i in range(levi.n_generators))
    return AbelianSystem(k + 1, acts, R)


def _equivariance_violation(bracket, ad_actions, z_actions, ring):
    B = np.asarray(bracket, dtype=object)
    for g, (A, z) in enumerate(zip(ad_actions, z_actions)):
        A = np.asarray(A, dtype=object)
        lhs = A.T.dot(B).dot(A) % ring.N
        rhs = (int(z) * B) % ring.N
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            i, j = (int(x) for x in bad[0])
            return g, i, j
    return None


def _antisymmetry_violation(bracket, ring):
    B = np.asarray(bracket, dtype=object) % ring.N
    m = B.shape[0]
    for i in range(m):
        if B[i, i]:
            return i, i
        for j in range(i + 1, m):
            if (B[i, j] + B[j, i]) % ring.N:
                return i, j
    return None


def g2_short_root(levi, b03=DEFAULT_B03, b12=DEFAULT_B12):
    """The G2 short-root system: ``sym^3 (x) det^-2`` with center ``det^-1``.

    The bracket pairs ``E0`` with ``E3`` and ``E1`` with ``E2``.  Equivariance
    under the unipotent Levi forces ``b03 = -3 b12``.

    Raises:
        InvalidInputError: If a constant is not a unit or the pair violates
            equivariance.
    """
    R = levi.ring
    for name, v in (("b03", b03), ("b12", b12)):
        if int(v) % R.p == 0:
            raise InvalidInputError(f"{name} = {v} is not a unit mod {R.p}")
    B = R.zeros(4, 4)
    B[0, 3], B[3, 0] = R.reduce(b03), R.reduce(-b03)
    B[1, 2], B[2, 1] = R.reduce(b12), R.reduce(-b12)
    ad = sym_power_twist(levi, 3, -2).actions
    z = tuple(R.inv(levi.det(i)) for i in range(levi.n_generators))
    bad = _equivariance_violation(B, ad, z, R)
    if bad is not None:
        g, i, j = bad
        raise InvalidInputError(
            f"bracket constants (b03={b03}, b12={b12}) break equivariance under x{g} at pair (E{i}, E{j})"
        )
    return NilpotentSystem(4, B, ad, z, R, label="g2-short", constants={"b03": int(b03), "b12": int(b12)}, levi=levi)


def g2_long_heisenberg(levi):
    """The G2 long-root Heisenberg quotient: ``std`` with center ``det``."""
    R = levi.ring
    B = np.array([[0, 1], [R.N - 1, 0]], dtype=R.dtype)
    ad = tuple(levi.matrices())
    z = tuple(levi.det(i) for i in range(levi.n_generators))
    return NilpotentSystem(2, B, ad, z, R, label="g2-long-heisenberg", constants={"b01": 1}, levi=levi)


def generic_heisenberg(m_a, bracket, ad_actions, z_actions, ring, label="custom"):
    """Validated class-2 system from raw data.

    Raises:
        InvalidInputError: Naming the first antisymmetry or equivariance
            violation.
    """
    B = ring.reduce(np.asarray(bracket))
    if B.shape != (m_a, m_a):
        raise InvalidInputError(f"bracket must be {m_a}x{m_a}")
    bad = _antisymmetry_violation(B, ring)
    if bad is not None:
        raise InvalidInputError(f"bracket not antisymmetric at ({bad[0]}, {bad[1]})")
    acts = [ring.reduce(np.asarray(a)) for a in ad_actions]
    for i, a in enumerate(acts):
        if zmod.rank_mod_p(a, ring.p) != m_a:
            raise InvalidInputError(f"ad action of x{i} is not invertible")
    bad = _equivariance_violation(B, acts, z_actions, ring)
    if bad is not None:
        g, i, j = bad
        raise InvalidInputError(f"equivariance fails for generator x{g} on pair ({i}, {j})")
    return NilpotentSystem(m_a, B, tuple(acts), tuple(z_actions), ring, label=label)


def unitriangularizable_mod_p(actions, p):
    """Whether the matrices share a full flag of fixed subquotients mod p.

    Builds ``V_0 = 0`` and ``V_{k+1} = {v : (A - I) v in V_k for all A}``; the
    actions are simultaneously unitriangularizable iff the chain reaches the
    whole space.
    """
    F = zmod.RingModulus(p, 1)
    acts = [F.reduce(np.asarray(a)) for a in actions]
    if not acts:
        return True
    m = acts[0].shape[0]
    dim = 0
    ann = F.eye(m)
    while True:
        blocks = [F.matmul(ann, F.reduce(a - F.eye(m))) for a in acts]
        stacked = np.vstack(blocks)
        V, _ = zmod.kernel(stacked, F)
        new_dim = V.shape[0]
        if new_dim == m:
            return True
        if new_dim == dim:
            return False
        dim = new_dim
        ann, _ = zmod.left_kernel(V.T, F)


def is_p_group_exhaustive(actions, p, limit=20000):
    """Enumerate the group generated by the matrices mod p and test its order.

    Only intended for rank at most 2 and p at most 7.

    Raises:
        InvalidInputError: Outside the supported range.
    """
    acts = [np.asarray(a, dtype=np.int64) % p for a in actions]
    m = acts[0].shape[0] if acts else 0
    if m > 2 or p > 7:
        raise InvalidInputError("exhaustive check supports rank <= 2 and p <= 7")
    start = np.eye(m, dtype=np.int64)
    seen = {start.tobytes()}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for a in acts:
            h = (g @ a) % p
            key = h.tobytes()
            if key not in seen:
                seen.add(key)
                queue.append(h)
                if len(seen) > limit:
                    raise InvalidInputError("group too large for exhaustive check")
    order = len(seen)
    while order % p == 0:
        order //= p
    return order == 1


def _matpow(A, k, ring):
    out = ring.eye(A.shape[0])
    base = A
    while k:
        if k & 1:
            out = ring.matmul(out, base)
        base = ring.matmul(base, base)
        k >>= 1
    return out


@dataclass
class ValidationReport:
    """Verdicts of :func:`validate_system`."""

    unitriangularizable: bool
    antisymmetric: bool
    equivariant: bool
    order_p: list
    relator_ok: bool = None
    p_group_exhaustive: bool = None
    messages: list = field(default_factory=list)

    @property
    def ok(self):
        flags = [self.unitriangularizable, self.antisymmetric, self.equivariant, all(self.order_p)]
        if self.relator_ok is not None:
            flags.append(self.relator_ok)
        if self.p_group_exhaustive is not None:
            flags.append(self.p_group_exhaustive)
        return all(flags)

    def as_dict(self):
        return {
            "ok": self.ok,
            "unitriangularizable_mod_p": self.unitriangularizable,
            "antisymmetric": self.antisymmetric,
            "equivariant": self.equivariant,
            "order_p": list(self.order_p),
            "relator_ok": self.relator_ok,
            "p_group_exhaustive": self.p_group_exhaustive,
            "messages": list(self.messages),
        }


def validate_system(sys, pres=None, exhaustive=False):
    """Check the Lyndon-Demuskin proxy and structural laws of a system.

    Args:
        sys: An :class:`AbelianSystem` or :class:`NilpotentSystem`.
        pres: Optional presentation; when given, the relator image is checked
            to be the identity at full precision.
        exhaustive: Also enumerate the mod-p image (rank <= 2, p <= 7 only).

    Returns:
        A :class:`ValidationReport`; never raises on failed verdicts.
    """
    R = sys.ring
    msgs = []
    if isinstance(sys, NilpotentSystem):
        acts = sys.graded_actions()
        anti = _antisymmetry_violation(sys.bracket, R)
        eq = _equivariance_violation(sys.bracket, sys.ad_actions, sys.z_actions, R)
        if anti is not None:
            msgs.append(f"bracket not antisymmetric at {anti}")
        if eq is not None:
            msgs.append(f"equivariance fails for x{eq[0]} on pair ({eq[1]}, {eq[2]})")
        antisym, equiv = anti is None, eq is None
    else:
        acts = list(sys.actions)
        antisym = equiv = True
    F = R.at(1)
    tri = unitriangularizable_mod_p(acts, R.p)
    if not tri:
        msgs.append("actions are not simultaneously unitriangularizable mod p")
    order = [bool(np.array_equal(_matpow(F.reduce(a), R.p, F), F.eye(a.shape[0]))) for a in acts]
    for i, ok in enumerate(order):
        if not ok:
            msgs.append(f"x{i} does not have order dividing p mod p")
    rel = None
    if pres is not None:
        if pres.n_generators != len(acts):
            raise InvalidInputError("generator count does not match the presentation")
        img = evaluate(pres.relator, acts, R)
        rel = bool(np.array_equal(img, R.eye(img.shape[0])))
        if not rel:
            msgs.append("relator does not act trivially")
    pg = None
    if exhaustive:
        pg = is_p_group_exhaustive(acts, R.p)
    return ValidationReport(tri, antisym, equiv, order, rel, pg, msgs)
