"""The Lyndon-Demuskin complex with abelian coefficients.

``C^0 = A``, ``C^1 = A^(n+2)`` and ``C^2 = A``.  A 1-cochain is stored
generator-major: entry ``i * rank + k`` is coordinate ``k`` of its value on
``x_i``.  The differentials are

* ``d1(v)_i = (rho(x_i) - 1) v``
* ``d2(c) = sum_i rho(dR/dx_i) c_i``
"""

from dataclasses import dataclass

import numpy as np

from . import kernels, zmod
from .coeff_systems import validate_system
from .errors import InternalError, InvalidInputError
from .free_group import fox_matrices


@dataclass(frozen=True, eq=False)
class AbelianComplex:
    """Assembled differentials of the complex.

    Attributes:
        pres: The presentation.
        sys: The coefficient system.
        d1: Matrix of shape ``(rank * (n+2), rank)``.
        d2: Matrix of shape ``(rank, rank * (n+2))``.
    """

    pres: object
    sys: object
    d1: np.ndarray
    d2: np.ndarray

    @property
    def ring(self):
        return self.sys.ring


@dataclass(frozen=True)
class Cohomology:
    """Profiles of H^0, H^1 and H^2."""

    h0: zmod.ModuleProfile
    h1: zmod.ModuleProfile
    h2: zmod.ModuleProfile

    @property
    def dims(self):
        """Number of cyclic summands of each group (dimensions when s = 1)."""
        return (self.h0.free_rank_mod_p, self.h1.free_rank_mod_p, self.h2.free_rank_mod_p)

    @property
    def euler_length(self):
        """Alternating sum of composition lengths."""
        return self.h0.length - self.h1.length + self.h2.length

    def as_dict(self):
        return {"h0": self.h0.as_dict(), "h1": self.h1.as_dict(), "h2": self.h2.as_dict(), "dims": list(self.dims)}


def d1_matrix(sys):
    """Stacked blocks ``rho(x_i) - 1``."""
    R = sys.ring
    I = R.eye(sys.rank)
    return R.reduce(np.vstack([R.reduce(a - I) for a in sys.actions]))


def d2_matrix(pres, sys):
    """Side-by-side blocks ``rho(dR/dx_i)``."""
    return sys.ring.reduce(np.hstack(fox_matrices(pres, list(sys.actions), sys.ring)))


def build_complex(pres, sys, check_ld=True):
    """Assemble the complex and verify ``d2 d1 = 0``.

    Args:
        pres: A Demuskin presentation.
        sys: An abelian system with one action per generator.
        check_ld: Run :func:`validate_system` first.

    Raises:
        InvalidInputError: If the system fails validation or has the wrong
            number of generators.
        InternalError: If ``d2 d1`` is nonzero for a valid system.
    """
    if sys.n_generators != pres.n_generators:
        raise InvalidInputError(f"system has {sys.n_generators} actions, presentation has {pres.n_generators} generators")
    if check_ld:
        rep = validate_system(sys, pres)
        if not rep.ok:
            raise InvalidInputError("system failed validation: " + "; ".join(rep.messages))
    R = sys.ring
    d1 = d1_matrix(sys)
    d2 = d2_matrix(pres, sys)
    if np.any(R.matmul(d2, d1) != 0):
        raise InternalError("d2 * d1 is nonzero")
    return AbelianComplex(pres, sys, d1, d2)


def cocycles(cx):
    """Generators and profile of ``Z^1 = ker d2``."""
    return zmod.kernel(cx.d2, cx.ring)


def cohomology(cx):
    """Profiles of the three cohomology groups.

    H^1 is computed as the quotient of the span of ``ker d2`` generators by
    the column span of ``d1``.
    """
    R = cx.ring
    _, h0 = zmod.kernel(cx.d1, R)
    Z, _ = zmod.kernel(cx.d2, R)
    h1 = zmod.quotient_profile(Z, np.asarray(cx.d1).T, R)
    h2 = zmod.cokernel_profile(cx.d2, R)
    return Cohomology(h0, h1, h2)


def extend_abelian(sys, c, w):
    """Value on ``w`` of the crossed homomorphism extending ``c``.

    Args:
        sys: Abelian system.
        c: Array of shape ``(n_generators, rank)``.
        w: A word.
    """
    R = sys.ring
    m = sys.rank
    G = sys.n_generators
    inv = [zmod.inverse(a, R) for a in sys.actions]
    gens, signs = w.arrays()
    ad, _ = kernels.fold_word(
        gens, signs, np.array(sys.actions), np.array(inv), np.ones(G, dtype=np.int64),
        np.ones(G, dtype=np.int64), np.zeros((m, m), dtype=np.int64), R.reduce(np.asarray(c)),
        np.zeros(G, dtype=np.int64), R.N, R.half,
    )
    return R.reduce(np.asarray(ad, dtype=object))


@dataclass(frozen=True)
class H0Probe:
    """Outcome of :func:`h0_torsion_probe`."""

    verdict: str
    profiles: tuple

    def as_dict(self):
        return {"verdict": self.verdict, "h0_profiles": [p.as_dict() for p in self.profiles]}


def h0_torsion_probe(pres, sys, S):
    """Finite-precision test for fixed vectors of infinite order.

    The integer action matrices of ``sys`` are reduced to each precision
    ``1..S`` and ``ker d1`` is profiled.  The verdict is
    ``"no-free-fixed-vectors"`` when the kernel at precision ``S`` has no
    element of order ``p^S``.

    Args:
        pres: Presentation (only its generator count is used).
        sys: Abelian system at precision at least ``S``.
        S: Top precision, at least 2.

    Raises:
        InvalidInputError: If ``S < 2`` or exceeds the system's precision.
    """
    if S < 2:
        raise InvalidInputError("the probe needs S >= 2")
    if S > sys.ring.s:
        raise InvalidInputError(f"system is only known to precision {sys.ring.s}")
    if sys.n_generators != pres.n_generators:
        raise InvalidInputError("generator count does not match the presentation")
    profiles = []
    for s in range(1, S + 1):
        sub = sys.at(s)
        _, prof = zmod.kernel(d1_matrix(sub), sub.ring)
        profiles.append(prof)
    top = profiles[-1]
    verdict = "no-free-fixed-vectors" if top.free_rank == 0 else "free-fixed-vectors-present"
    return H0Probe(verdict, tuple(profiles))
