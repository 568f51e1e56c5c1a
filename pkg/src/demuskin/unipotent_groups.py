"""The group side: BCH products, semidirect products and unipotent powers.

Elements of ``U x| L`` are pairs ``(u, l)`` where ``u`` is a Lie value in log
coordinates and ``l`` encodes the Levi element ``[[1, l], [0, 1]]``.  The
product is ``(u, l)(v, k) = (u * phi(l) v, l + k)`` with ``*`` the class-2
BCH product ``u + v + 1/2 [u, v]``.

Power-formula coordinates.  The closed form is stated in coordinates
``(l; P0, P1, P2, P3; P4)``.  With the monomial basis ``E_j = e1^(3-j) e2^j``
and bracket ``B(E0, E3) = b03 = -3 b12``, ``B(E1, E2) = b12``, they relate to
the log coordinates ``(u0, u1, u2, u3; z)`` by

    u0 = P3,  u1 = 3 P2,  u2 = 3 P1,  u3 = -P0,  z = 3 b12 P4.

These were fitted once against iterated multiplication; the regression test
comparing both routes keeps them honest.
"""

from dataclasses import dataclass

import numpy as np

from .coeff_systems import DEFAULT_B03, DEFAULT_B12, sym_power_matrix
from .errors import InvalidInputError
from .ld_nilpotent import LieValue

POWER_CONVENTIONS = {
    "coordinates": "log",
    "ad_map": "u0=P3, u1=3*P2, u2=3*P1, u3=-P0",
    "z_map": "z=3*b12*P4",
}


def _require_odd(ring):
    if ring.p == 2:
        raise InvalidInputError("p must be odd so that 1/2 exists")


def bch_multiply(sys, u, v):
    """Class-2 BCH product ``u + v + 1/2 [u, v]`` in ``Lie U``.

    Args:
        sys: Anything with ``ring`` and an ``m_a x m_a`` ``bracket``.
        u: First :class:`LieValue`.
        v: Second :class:`LieValue`.

    Raises:
        InvalidInputError: If p = 2.
    """
    R = sys.ring
    _require_odd(R)
    a = np.asarray(u.ad, dtype=object)
    b = np.asarray(v.ad, dtype=object)
    br = int(a.dot(np.asarray(sys.bracket, dtype=object)).dot(b))
    z = (int(u.z) + int(v.z) + R.half * br) % R.N
    return LieValue(R.reduce(a + b), z)


@dataclass(frozen=True, eq=False)
class GroupElement:
    """Element ``(exp(u), [[1, l], [0, 1]])`` of the semidirect product.

    Attributes:
        l: Levi coordinate.
        u: Log coordinates of the unipotent-radical part.
    """

    l: int
    u: LieValue

    def __eq__(self, other):
        return isinstance(other, GroupElement) and int(self.l) == int(other.l) and self.u == other.u

    def coordinates(self):
        return (int(self.l), [int(x) for x in np.asarray(self.u.ad).tolist()], int(self.u.z))


class ParabolicGroup:
    """``U x| L`` for a class-2 radical and the unipotent rank-2 Levi.

    Args:
        kind: ``"g2-short"`` (``sym^3 (x) det^-2`` with center ``det^-1``) or
            ``"g2-long-heisenberg"`` (``std`` with center ``det``).
        ring: Coefficient ring.
        b03: Bracket constant on ``(E0, E3)`` for the short-root radical.
        b12: Bracket constant on ``(E1, E2)``.
    """

    def __init__(self, kind, ring, b03=DEFAULT_B03, b12=DEFAULT_B12):
        _require_odd(ring)
        self.kind = kind
        self.ring = ring
        self.b03, self.b12 = int(b03), int(b12)
        if kind == "g2-short":
            self.m_a = 4
            B = ring.zeros(4, 4)
            B[0, 3], B[3, 0] = ring.reduce(b03), ring.reduce(-b03)
            B[1, 2], B[2, 1] = ring.reduce(b12), ring.reduce(-b12)
        elif kind == "g2-long-heisenberg":
            self.m_a = 2
            B = np.array([[0, 1], [ring.N - 1, 0]], dtype=ring.dtype)
        else:
            raise InvalidInputError(f"unknown group kind {kind!r}")
        self.bracket = B

    def phi(self, l):
        """Action of ``[[1, l], [0, 1]]`` on ``U^ad``; the center is fixed."""
        g = [[1, int(l) % self.ring.N], [0, 1]]
        if self.kind == "g2-short":
            return sym_power_matrix(g, 3, -2, self.ring)
        return np.array(g, dtype=self.ring.dtype)

    def act(self, l, u):
        R = self.ring
        ad = R.matmul(self.phi(l), np.asarray(u.ad, dtype=object).reshape(-1, 1)).reshape(-1)
        return LieValue(R.reduce(ad), int(u.z) % R.N)

    def identity(self):
        return GroupElement(0, LieValue(self.ring.zeros(self.m_a), 0))

    def element(self, l, ad, z):
        R = self.ring
        return GroupElement(R.reduce(int(l)), LieValue(R.reduce(np.asarray(ad, dtype=object)), R.reduce(int(z))))

    def random(self, rng):
        N = self.ring.N
        return self.element(int(rng.integers(0, N)), rng.integers(0, N, self.m_a), int(rng.integers(0, N)))

    def multiply(self, g, h):
        return semidirect_multiply(self, g, h)

    def inverse(self, g):
        """``(u, l)^-1 = (-phi(-l) u, -l)``."""
        R = self.ring
        v = self.act(-int(g.l), g.u)
        return GroupElement(R.reduce(-int(g.l)), LieValue(R.reduce(-np.asarray(v.ad, dtype=object)), (-v.z) % R.N))


def semidirect_multiply(group, g, h):
    """``(u_g, l_g)(u_h, l_h) = (bch(u_g, phi(l_g) u_h), l_g + l_h)``."""
    u = bch_multiply(group, g.u, group.act(g.l, h.u))
    return GroupElement(group.ring.reduce(int(g.l) + int(h.l)), u)


def power_iterated(group, g, q, method="square"):
    """``g^q`` by repeated multiplication.

    Args:
        group: A :class:`ParabolicGroup`.
        g: Group element.
        q: Exponent, at least 1.
        method: ``"square"`` for square-and-multiply, ``"naive"`` for ``q - 1``
            successive products.

    Raises:
        InvalidInputError: If ``q < 1``.
    """
    if int(q) != q or q < 1:
        raise InvalidInputError(f"exponent must be >= 1, got {q}")
    if method == "naive":
        out = g
        for _ in range(q - 1):
            out = semidirect_multiply(group, out, g)
        return out
    out = group.identity()
    base = g
    k = int(q)
    while k:
        if k & 1:
            out = semidirect_multiply(group, out, base)
        base = semidirect_multiply(group, base, base)
        k >>= 1
    return out


def power_coefficients(q):
    """Integer coefficients of the closed form as functions of ``q``.

    Returns:
        ``(c1, c2, c1p, n120_over_15)`` where ``c1 = q(q-1)/2``,
        ``c2 = q(q-1)(2q-1)/6``, ``c1p = (q-1)q(q+1)/2`` and
        ``n120_over_15 = (q-1)q(q+1)(3q^2-2)/15``.  The last one still has to
        be divided by 8.
    """
    c1 = q * (q - 1) // 2
    c2 = q * (q - 1) * (2 * q - 1) // 6
    c1p = (q - 1) * q * (q + 1) // 2
    n120 = (q - 1) * q * (q + 1) * (3 * q * q - 2)
    if n120 % 15:
        raise AssertionError("integrality of the z coefficient failed")
    return c1, c2, c1p, n120 // 15


def to_power_coordinates(group, g):
    """``(l, P0, P1, P2, P3, P4)`` of a short-root element."""
    R = group.ring
    if group.kind != "g2-short":
        raise InvalidInputError("power coordinates exist for the short-root group only")
    if R.p <= 3:
        raise InvalidInputError("power coordinates need p > 3")
    u0, u1, u2, u3 = (int(x) for x in np.asarray(g.u.ad).tolist())
    i3 = R.inv(3)
    P0 = -u3 % R.N
    P1 = u2 * i3 % R.N
    P2 = u1 * i3 % R.N
    P3 = u0 % R.N
    P4 = int(g.u.z) * R.inv(3 * group.b12) % R.N
    return int(g.l) % R.N, P0, P1, P2, P3, P4


def from_power_coordinates(group, l, P0, P1, P2, P3, P4):
    """Inverse of :func:`to_power_coordinates`."""
    ad = [P3, 3 * P2, 3 * P1, -P0]
    z = 3 * group.b12 * P4
    return group.element(l, ad, z)


def power_closed_form(group, g, q):
    """``g^q`` from the polynomial formula in power coordinates.

    With ``c1 = q(q-1)/2``, ``c2 = q(q-1)(2q-1)/6`` and
    ``c1' = (q-1)q(q+1)/2``:

    * ``P0' = q P0``
    * ``P1' = -c1 P0 l + q P1``
    * ``P2' = -c2 P0 l^2 + 2 c1 P1 l + q P2``
    * ``P3' = -c1^2 P0 l^3 + 3 c2 P1 l^2 + 3 c1 P2 l + q P3``
    * ``P4' = q P4 + (q-1)q(q+1)(3q^2-2)/120 P0^2 l^3 - c1' (P1^2 + P0 P2) l``
    * ``l' = q l``

    Raises:
        InvalidInputError: If ``q < 1`` or the group is not the short-root one.
    """
    if int(q) != q or q < 1:
        raise InvalidInputError(f"exponent must be >= 1, got {q}")
    R = group.ring
    N = R.N
    l, P0, P1, P2, P3, P4 = to_power_coordinates(group, g)
    c1, c2, c1p, n15 = power_coefficients(int(q))
    k120 = n15 * R.inv(8) % N
    Q0 = q * P0
    Q1 = -c1 * P0 * l + q * P1
    Q2 = -c2 * P0 * l * l + 2 * c1 * P1 * l + q * P2
    Q3 = -c1 * c1 * P0 * l**3 + 3 * c2 * P1 * l * l + 3 * c1 * P2 * l + q * P3
    Q4 = q * P4 + k120 * P0 * P0 * l**3 - c1p * (P1 * P1 + P0 * P2) * l
    return from_power_coordinates(group, q * l % N, Q0 % N, Q1 % N, Q2 % N, Q3 % N, Q4 % N)


def _general_mul(sys, a, b):
    R = sys.ring
    (u1, z1, A1, c1), (u2, z2, A2, c2) = a, b
    w = R.matmul(A1, np.asarray(u2, dtype=object).reshape(-1, 1)).reshape(-1)
    br = int(np.asarray(u1, dtype=object).dot(np.asarray(sys.bracket, dtype=object)).dot(np.asarray(w, dtype=object)))
    return (
        R.reduce(np.asarray(u1, dtype=object) + np.asarray(w, dtype=object)),
        (int(z1) + int(c1) * int(z2) + R.half * br) % R.N,
        R.matmul(A1, A2),
        int(c1) * int(c2) % R.N,
    )


def _general_inv(sys, a):
    from . import zmod

    R = sys.ring
    u, z, A, c = a
    Ai = zmod.inverse(A, R)
    ci = R.inv(c)
    v = R.matmul(Ai, np.asarray(u, dtype=object).reshape(-1, 1)).reshape(-1)
    return (R.reduce(-np.asarray(v, dtype=object)), (-ci * int(z)) % R.N, Ai, ci)


def relator_image(sys, pres, c):
    """Image of the relator under ``x_i -> (c(x_i), rho(x_i))``.

    Multiplies generic semidirect-product elements ``(u, z, A, chi)`` letter by
    letter, using explicit group inverses.  The cochain ``c`` is a
    nonabelian cocycle and ``rho`` respects the relator exactly when the
    result is the identity.

    Returns:
        ``(LieValue, ad_matrix, center_scalar)``.
    """
    R = sys.ring
    _require_odd(R)
    gens = []
    for i in range(pres.n_generators):
        gens.append((R.reduce(np.asarray(c.ad)[i]), int(np.asarray(c.z)[i]) % R.N, sys.ad_actions[i], int(sys.z_actions[i])))
    invs = [_general_inv(sys, g) for g in gens]
    acc = (R.zeros(sys.m_a), 0, R.eye(sys.m_a), 1)
    for g, e in pres.relator.letters():
        acc = _general_mul(sys, acc, gens[g] if e > 0 else invs[g])
    u, z, A, chi = acc
    return LieValue(R.reduce(u), z), A, chi


def relator_is_identity(sys, pres, c):
    """Whether the crossed-homomorphism test of ``c`` passes."""
    u, A, chi = relator_image(sys, pres, c)
    R = sys.ring
    return u.is_zero() and np.array_equal(R.reduce(A), R.eye(sys.m_a)) and chi % R.N == 1
