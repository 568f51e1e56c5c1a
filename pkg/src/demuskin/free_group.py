"""Free-group words, the Demuskin relator and Fox calculus.

Words are stored run-length encoded as ``(generator, exponent)`` pairs and kept
freely reduced.  Group-ring elements are integer combinations of words, and
``evaluate`` pushes them through a matrix representation over Z/p^s.
"""

from dataclasses import dataclass

import numpy as np

from . import zmod
from .errors import InvalidInputError


class Word:
    """A freely reduced word in the generators x_0, x_1, ...

    Args:
        runs: Iterable of ``(generator, exponent)`` pairs.  Adjacent runs on
            the same generator are merged and zero exponents dropped.
    """

    __slots__ = ("runs", "_hash")

    def __init__(self, runs=()):
        out = []
        for g, e in runs:
            g, e = int(g), int(e)
            if g < 0:
                raise InvalidInputError(f"negative generator index {g}")
            if e == 0:
                continue
            if out and out[-1][0] == g:
                e += out[-1][1]
                out.pop()
                if e == 0:
                    continue
            out.append((g, e))
        self.runs = tuple(out)
        self._hash = hash(self.runs)

    @classmethod
    def from_letters(cls, letters):
        """Build from ``(generator, sign)`` letters."""
        letters = list(letters)
        for _, e in letters:
            if e not in (1, -1):
                raise InvalidInputError(f"letter exponent must be +1 or -1, got {e}")
        return cls(letters)

    @classmethod
    def gen(cls, i, e=1):
        return cls([(i, e)])

    def letters(self):
        """Expanded ``(generator, sign)`` letters."""
        out = []
        for g, e in self.runs:
            sign = 1 if e > 0 else -1
            out.extend([(g, sign)] * abs(e))
        return out

    def arrays(self):
        """Letters as parallel generator and sign arrays."""
        lets = self.letters()
        gens = np.array([g for g, _ in lets], dtype=np.int64)
        signs = np.array([e for _, e in lets], dtype=np.int64)
        return gens, signs

    def inverse(self):
        return Word((g, -e) for g, e in reversed(self.runs))

    def __mul__(self, other):
        return Word(self.runs + other.runs)

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        return Word(self.runs * k)

    def __len__(self):
        return sum(abs(e) for _, e in self.runs)

    def __eq__(self, other):
        return isinstance(other, Word) and self.runs == other.runs

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.runs < other.runs

    def max_generator(self):
        return max((g for g, _ in self.runs), default=-1)

    def __repr__(self):
        if not self.runs:
            return "1"
        return "".join(f"x{g}" if e == 1 else f"x{g}^{e}" for g, e in self.runs)


def commutator(a, b):
    """The commutator ``(a, b) = a^-1 b^-1 a b``."""
    return a.inverse() * b.inverse() * a * b


class GroupRingElt:
    """A finite integer combination of words.

    Args:
        terms: Mapping from :class:`Word` to integer coefficient.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for w, c in (terms or {}).items():
            c = int(c)
            if c:
                clean[w] = clean.get(w, 0) + c
                if clean[w] == 0:
                    del clean[w]
        self.terms = clean

    @classmethod
    def word(cls, w, c=1):
        return cls({w: c})

    @classmethod
    def one(cls):
        return cls({Word(): 1})

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return GroupRingElt(out)

    def __neg__(self):
        return GroupRingElt({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return GroupRingElt({w: c * other for w, c in self.terms.items()})
        out = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 * w2
                out[w] = out.get(w, 0) + c1 * c2
        return GroupRingElt(out)

    __rmul__ = __mul__

    def left_mul(self, w):
        """The element ``w * self`` for a word ``w``."""
        out = {}
        for v, c in self.terms.items():
            u = w * v
            out[u] = out.get(u, 0) + c
        return GroupRingElt(out)

    def augmentation(self):
        """Sum of coefficients."""
        return sum(self.terms.values())

    def __eq__(self, other):
        return isinstance(other, GroupRingElt) and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = [f"{c}*{w!r}" for w, c in sorted(self.terms.items())]
        return " + ".join(parts)


def _odd_prime_base(q):
    if q < 3:
        return None
    p = next(f for f in range(2, q + 1) if q % f == 0)
    while q % p == 0:
        q //= p
    return p if q == 1 and p != 2 else None


@dataclass(frozen=True)
class DemuskinPresentation:
    """The one-relator presentation ``x0^q (x0,x1)(x2,x3)...(xn,xn+1)``.

    Attributes:
        n: Even integer, at least 2.
        q: Power of the odd prime ``p``.
        p: The prime underlying ``q``.
        relator: The relator, freely reduced.
        raw_letters: Letter count before free reduction.
    """

    n: int
    q: int
    p: int
    relator: Word
    raw_letters: int

    @property
    def n_generators(self):
        return self.n + 2

    def fox(self, i):
        """Fox derivative of the relator in x_i."""
        if not 0 <= i < self.n_generators:
            raise InvalidInputError(f"generator index {i} out of range 0..{self.n + 1}")
        return fox_derivative(self.relator, i)


def build_relator(n, q):
    """Build the Demuskin presentation.

    Args:
        n: Even integer at least 2; there are ``n + 2`` generators.
        q: A power of an odd prime.

    Raises:
        InvalidInputError: If ``n`` is odd or too small, or ``q`` is not an
            odd prime power.
    """
    if int(n) != n or n < 2 or n % 2:
        raise InvalidInputError(f"n must be an even integer >= 2, got {n}")
    p = _odd_prime_base(int(q))
    if p is None:
        raise InvalidInputError(f"q must be a power of an odd prime, got {q}")
    n, q = int(n), int(q)
    rel = Word.gen(0, q)
    for k in range(0, n + 2, 2):
        rel = rel * commutator(Word.gen(k), Word.gen(k + 1))
    raw = q + 4 * (n // 2 + 1)
    return DemuskinPresentation(n=n, q=q, p=p, relator=rel, raw_letters=raw)


def fox_derivative(w, i):
    """Fox derivative of a word with respect to x_i.

    Uses ``d(uv) = du + u dv`` with ``d(x_i) = 1`` and
    ``d(x_i^-1) = -x_i^-1``.

    Raises:
        InvalidInputError: If ``i`` is negative.
    """
    if int(i) != i or i < 0:
        raise InvalidInputError(f"invalid generator index {i}")
    terms = {}
    prefix = []
    for g, e in w.runs:
        if g == i:
            if e > 0:
                for k in range(e):
                    u = Word(prefix + [(g, k)])
                    terms[u] = terms.get(u, 0) + 1
            else:
                for k in range(1, -e + 1):
                    u = Word(prefix + [(g, -k)])
                    terms[u] = terms.get(u, 0) - 1
        prefix.append((g, e))
    return GroupRingElt(terms)


class _PowerCache:
    def __init__(self, actions, ring):
        self.ring = ring
        self.pos = [ring.reduce(a) for a in actions]
        self.neg = []
        for j, a in enumerate(self.pos):
            try:
                self.neg.append(zmod.inverse(a, ring))
            except InvalidInputError:
                raise InvalidInputError(f"action matrix for x{j} is not invertible") from None
        self.cache = {}

    def power(self, g, e):
        key = (g, e)
        if key not in self.cache:
            base = self.pos[g] if e > 0 else self.neg[g]
            k = abs(e)
            if k == 1:
                out = base
            else:
                half = self.power(g, (k // 2) * (1 if e > 0 else -1))
                out = self.ring.matmul(half, half)
                if k % 2:
                    out = self.ring.matmul(out, base)
            self.cache[key] = out
        return self.cache[key]

    def word(self, w, dim):
        out = self.ring.eye(dim)
        for g, e in w.runs:
            if g >= len(self.pos):
                raise InvalidInputError(f"word uses x{g} but only {len(self.pos)} actions were given")
            out = self.ring.matmul(out, self.power(g, e))
        return out


def evaluate(e, actions, ring, _cache=None):
    """Image of a group-ring element under a matrix representation.

    Args:
        e: A :class:`GroupRingElt` or :class:`Word`.
        actions: One invertible square matrix per generator.
        ring: Coefficient ring.

    Returns:
        The matrix ``sum c * rho(w)`` over the terms, reduced mod p^s.

    Raises:
        InvalidInputError: If an action matrix is singular mod p.
    """
    if isinstance(e, Word):
        e = GroupRingElt.word(e)
    actions = [np.asarray(a) for a in actions]
    if not actions:
        raise InvalidInputError("at least one action matrix is required")
    dim = actions[0].shape[0]
    cache = _cache or _PowerCache(actions, ring)
    out = ring.zeros(dim, dim)
    for w, c in e.terms.items():
        out = ring.reduce(out + (c % ring.N) * ring.reduce(cache.word(w, dim)).astype(out.dtype))
    return out


def fox_matrices(pres, actions, ring):
    """Evaluated Fox derivatives of the relator, one matrix per generator.

    Walks the relator once with a running prefix product instead of expanding
    each derivative into words; agrees with ``evaluate(pres.fox(i), ...)``.
    """
    cache = _PowerCache(actions, ring)
    dim = cache.pos[0].shape[0]
    out = [ring.zeros(dim, dim) for _ in range(pres.n_generators)]
    prefix = ring.eye(dim)
    for g, e in pres.relator.letters():
        if e > 0:
            out[g] = ring.reduce(out[g] + prefix)
            prefix = ring.matmul(prefix, cache.pos[g])
        else:
            prefix = ring.matmul(prefix, cache.neg[g])
            out[g] = ring.reduce(out[g] - prefix)
    return out
