"""Exact linear algebra over Z/p^s.

Matrices are plain numpy arrays holding canonical residues in ``[0, p^s)``.
Small moduli use ``int64`` storage; once products could overflow, arrays switch
to ``object`` dtype and Python integers take over.

Row modules are normalized with the Howell form.  Kernels, solving and
membership all reduce to it, and module structure is read off Smith
valuations.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InternalError, InvalidInputError


def _is_prime(n):
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True)
class RingModulus:
    """The coefficient ring Z/p^s.

    Attributes:
        p: An odd prime.
        s: Precision exponent, at least 1.
    """

    p: int
    s: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not isinstance(self.s, (int, np.integer)):
            raise InvalidInputError("p and s must be integers")
        if self.s < 1:
            raise InvalidInputError(f"precision s must be >= 1, got {self.s}")
        if not _is_prime(int(self.p)):
            raise InvalidInputError(f"modulus base {self.p} is not prime, so p^s is not a prime power")
        if self.p == 2:
            raise InvalidInputError("p must be odd")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "s", int(self.s))

    @property
    def N(self):
        """The modulus p^s."""
        return self.p**self.s

    @property
    def dtype(self):
        # int64 while a length-4096 dot product of residues cannot overflow
        return np.int64 if self.N**2 * 4096 < 2**63 else object

    @property
    def half(self):
        """The inverse of 2."""
        return (self.N + 1) // 2

    def at(self, s):
        """Same prime at another precision."""
        return RingModulus(self.p, s)

    def inv(self, x):
        """Inverse of a unit.

        Raises:
            InvalidInputError: If ``x`` is divisible by p.
        """
        x = int(x) % self.N
        if x % self.p == 0:
            raise InvalidInputError(f"{x} is not a unit mod {self.p}^{self.s}")
        return pow(x, -1, self.N)

    def val(self, x):
        """p-adic valuation of a residue, with ``val(0) = s``."""
        x = int(x) % self.N
        if x == 0:
            return self.s
        v = 0
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v

    def reduce(self, A):
        """Canonical residues of an integer array (or scalar)."""
        if np.isscalar(A) or isinstance(A, int):
            return int(A) % self.N
        A = np.asarray(A)
        if A.dtype == object or self.dtype is object:
            out = np.array(A, dtype=object) % self.N
            return out.astype(self.dtype) if self.dtype is not object else out
        return np.mod(A.astype(np.int64), self.N)

    def matmul(self, A, B):
        """Product of two residue arrays, reduced."""
        A = np.asarray(A)
        B = np.asarray(B)
        if self.dtype is object or A.dtype == object or B.dtype == object:
            return np.asarray(A, dtype=object).dot(np.asarray(B, dtype=object)) % self.N
        return (A.astype(np.int64) @ B.astype(np.int64)) % self.N

    def zeros(self, *shape):
        return np.zeros(shape, dtype=self.dtype)

    def eye(self, k):
        return np.eye(k, dtype=self.dtype)


@dataclass(frozen=True)
class ModuleProfile:
    """Structure of a finite Z/p^s-module as a sum of cyclic pieces.

    The module is the direct sum of ``Z/p^e`` over ``exponents``, sorted
    nondecreasing, with zero summands dropped.

    Attributes:
        exponents: Exponents of the cyclic summands, each in ``[1, s]``.
        p: The prime.
        s: Ambient precision.
    """

    exponents: tuple
    p: int
    s: int

    def __post_init__(self):
        exps = tuple(sorted(int(e) for e in self.exponents if e > 0))
        if any(e > self.s for e in exps):
            raise InternalError(f"divisor exponent exceeds precision: {exps}")
        object.__setattr__(self, "exponents", exps)

    @property
    def free_rank_mod_p(self):
        """Dimension of M/pM, the number of cyclic summands."""
        return len(self.exponents)

    @property
    def free_rank(self):
        """Number of summands isomorphic to the whole ring."""
        return sum(1 for e in self.exponents if e == self.s)

    @property
    def elementary_divisors(self):
        return tuple(self.p**e for e in self.exponents)

    @property
    def order(self):
        return self.p ** sum(self.exponents)

    @property
    def length(self):
        """Composition length, i.e. log_p of the order."""
        return sum(self.exponents)

    def as_dict(self):
        return {
            "exponents": list(self.exponents),
            "free_rank_mod_p": self.free_rank_mod_p,
            "free_rank": self.free_rank,
        }


@dataclass(frozen=True)
class Unsolvable:
    """Certificate that ``M v = b`` has no solution.

    Attributes:
        functional: Row vector ``f`` with ``f M = 0``.
        residue: The nonzero value ``f b``.
    """

    functional: np.ndarray
    residue: int


def _as_matrix(M, ring):
    A = np.asarray(M)
    if A.ndim != 2:
        raise InvalidInputError(f"expected a 2-d matrix, got shape {A.shape}")
    return ring.reduce(A)


def _hstack(A, B, ring):
    return ring.reduce(np.hstack([np.asarray(A, dtype=object), np.asarray(B, dtype=object)]))


def howell_basis(M, ring):
    """Nonzero rows of the Howell form of the row module of ``M``."""
    A = _as_matrix(M, ring)
    return ring.reduce(kernels.howell(A, ring.p, ring.s))


def _pivots(H):
    out = []
    for row in np.asarray(H).tolist():
        col = next((j for j, x in enumerate(row) if x), None)
        out.append(col)
    return out


def canonical_form(M, ring):
    """Howell form of the row module of ``M`` with a transform.

    Args:
        M: Integer matrix.
        ring: The coefficient ring.

    Returns:
        ``(H, U)`` with ``H = U M``.  ``H`` holds the Howell rows followed by
        zero rows, padded to ``max(rows(M), #Howell rows)``.  When no pivot is
        a proper power of p, ``U`` is square and invertible; otherwise extra
        annihilator rows make it taller than ``M``.

    Raises:
        InvalidInputError: For a malformed matrix or modulus.
    """
    if not isinstance(ring, RingModulus):
        raise InvalidInputError("ring must be a RingModulus")
    A = _as_matrix(M, ring)
    r, c = A.shape
    full = howell_basis(_hstack(A, ring.eye(r), ring), ring)
    left, right = full[:, :c], full[:, c:]
    nz = [i for i in range(full.shape[0]) if np.any(left[i] != 0)]
    zl = [i for i in range(full.shape[0]) if i not in nz]
    rows = max(r, len(nz))
    H = ring.zeros(rows, c)
    U = ring.zeros(rows, r)
    for k, i in enumerate(nz):
        H[k] = left[i]
        U[k] = right[i]
    for k, i in enumerate(zl[: rows - len(nz)]):
        U[len(nz) + k] = right[i]
    if not np.array_equal(ring.matmul(U, A), H):
        raise InternalError("canonical_form transform check failed")
    return H, U


def reduce_by(H, v, ring):
    """Back-substitute ``v`` against Howell rows ``H``.

    Returns:
        ``(coeffs, remainder)`` with ``v = coeffs H + remainder``.  The
        remainder is zero exactly when ``v`` lies in the row module.
    """
    H = np.asarray(H)
    rem = [int(x) % ring.N for x in np.asarray(v).tolist()]
    coeffs = [0] * H.shape[0]
    rows = H.tolist()
    for k, (row, col) in enumerate(zip(rows, _pivots(H))):
        if col is None:
            continue
        piv = int(row[col])
        if rem[col] % piv:
            continue
        f = rem[col] // piv
        if f:
            coeffs[k] = f
            rem = [(a - f * int(b)) % ring.N for a, b in zip(rem, row)]
    return np.array(coeffs, dtype=object), np.array(rem, dtype=object)


def membership(M, v, ring):
    """Whether ``v`` lies in the row module of ``M``."""
    _, rem = reduce_by(howell_basis(M, ring), v, ring)
    return not any(rem)


def kernel(M, ring):
    """Kernel of ``v -> M v`` on column vectors.

    Returns:
        ``(generators, profile)``: generators are the rows of a matrix, in
        Howell form; ``profile`` is the module structure of the kernel.
    """
    A = _as_matrix(M, ring)
    r, c = A.shape
    full = howell_basis(_hstack(A.T, ring.eye(c), ring), ring)
    gens = [full[i, r:] for i in range(full.shape[0]) if not np.any(full[i, :r] != 0)]
    G = np.array(gens, dtype=object).reshape(len(gens), c)
    G = ring.reduce(G) if G.size else ring.zeros(0, c)
    if G.size and np.any(ring.matmul(A, G.T) != 0):
        raise InternalError("kernel generator not annihilated")
    return G, row_module_profile(G, ring)


def left_kernel(M, ring):
    """Generators (rows) of ``{f : f M = 0}``."""
    return kernel(np.asarray(M).T, ring)


def solve(M, b, ring):
    """Solve ``M v = b``.

    Args:
        M: Matrix of shape (r, c).
        b: Length-r vector.
        ring: Coefficient ring.

    Returns:
        A solution vector, or an :class:`Unsolvable` certificate.

    Raises:
        InvalidInputError: On dimension mismatch.
    """
    A = _as_matrix(M, ring)
    r, c = A.shape
    bb = ring.reduce(np.asarray(b, dtype=object).reshape(-1))
    if bb.shape[0] != r:
        raise InvalidInputError(f"right-hand side has length {bb.shape[0]}, expected {r}")
    full = howell_basis(_hstack(A.T, ring.eye(c), ring), ring)
    coeffs, rem = reduce_by(full[:, :r], bb, ring)
    if not any(rem):
        v = ring.matmul(np.asarray(coeffs, dtype=object).reshape(1, -1), full[:, r:]).reshape(-1)
        v = ring.reduce(v)
        if np.any(ring.matmul(A, v.reshape(-1, 1)).reshape(-1) != bb):
            raise InternalError("solve produced a wrong solution")
        return v
    F, _ = left_kernel(A, ring)
    for f in F:
        res = int(ring.matmul(f.reshape(1, -1), bb.reshape(-1, 1))[0, 0])
        if res:
            return Unsolvable(functional=f, residue=res)
    raise InternalError("no certificate found for an unsolvable system")


def smith_valuations(M, ring):
    """Valuations of the Smith diagonal, ``s`` for zero entries."""
    A = _as_matrix(M, ring)
    return sorted(kernels.smith_valuations(A, ring.p, ring.s))


def row_module_profile(M, ring):
    """Structure of the row module of ``M``."""
    A = _as_matrix(M, ring)
    if A.size == 0:
        return ModuleProfile((), ring.p, ring.s)
    return ModuleProfile(tuple(ring.s - d for d in smith_valuations(A, ring)), ring.p, ring.s)


def image_profile(M, ring):
    """Structure of the image of ``v -> M v`` (same as the column module)."""
    return row_module_profile(np.asarray(M).T, ring)


def cokernel_profile(M, ring):
    """Structure of ``(Z/p^s)^rows / M (Z/p^s)^cols``."""
    A = _as_matrix(M, ring)
    r, c = A.shape
    if A.size == 0:
        return ModuleProfile((ring.s,) * r, ring.p, ring.s)
    d = smith_valuations(A, ring)
    return ModuleProfile(tuple(d) + (ring.s,) * (r - len(d)), ring.p, ring.s)


def quotient_profile(sup, sub, ring):
    """Structure of ``span(sup) / span(sub)`` for row generators.

    Args:
        sup: Generators (rows) of the ambient submodule.
        sub: Generators (rows) of a submodule of it.
        ring: Coefficient ring.

    Raises:
        InvalidInputError: If ``sub`` is not contained in ``sup``.
    """
    S = _as_matrix(sup, ring)
    k = S.shape[0]
    if k == 0:
        return ModuleProfile((), ring.p, ring.s)
    rel1, _ = left_kernel(S, ring)
    rel2 = []
    T = np.asarray(sub)
    for row in (T if T.size else []):
        x = solve(S.T, row, ring)
        if isinstance(x, Unsolvable):
            raise InvalidInputError("sub-module generator is not in the ambient module")
        rel2.append(x)
    parts = [r for r in (rel1, np.array(rel2, dtype=object).reshape(len(rel2), k)) if r.size]
    if not parts:
        return ModuleProfile((ring.s,) * k, ring.p, ring.s)
    R = ring.reduce(np.vstack([np.asarray(r, dtype=object) for r in parts]))
    return cokernel_profile(R.T, ring)


def inverse(A, ring):
    """Inverse of a square matrix.

    Raises:
        InvalidInputError: If the matrix is not invertible mod p.
    """
    A = _as_matrix(A, ring)
    k = A.shape[0]
    if A.shape != (k, k):
        raise InvalidInputError("inverse needs a square matrix")
    if k == 0:
        return A
    if rank_mod_p(A, ring.p) != k:
        raise InvalidInputError("matrix is not invertible mod p")
    full = howell_basis(_hstack(A, ring.eye(k), ring), ring)
    return ring.reduce(full[:k, k:])


def rank_mod_p(A, p):
    """Rank of the reduction of ``A`` mod p."""
    f = RingModulus(p, 1)
    A = _as_matrix(A, f)
    if A.size == 0:
        return 0
    return sum(1 for d in kernels.smith_valuations(A, p, 1) if d == 0)


def det_mod_p(A, p):
    """Determinant of the reduction of a square matrix mod p."""
    rows = [[int(x) % p for x in r] for r in np.asarray(A).tolist()]
    n = len(rows)
    det = 1
    for col in range(n):
        piv = next((i for i in range(col, n) if rows[i][col]), None)
        if piv is None:
            return 0
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = -det
        det = det * rows[col][col] % p
        inv = pow(rows[col][col], -1, p)
        for i in range(col + 1, n):
            f = rows[i][col] * inv % p
            if f:
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[col])]
    return det % p


def mod_p_image(G, ring):
    """Howell rows of the reduction mod p of the row module spanned by ``G``."""
    f = ring.at(1)
    if np.asarray(G).size == 0:
        return f.zeros(0, np.asarray(G).shape[1] if np.asarray(G).ndim == 2 else 0)
    return howell_basis(f.reduce(G), f)
