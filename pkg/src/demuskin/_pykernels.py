"""Pure-Python reference kernels.

These are the fallback implementations used when the compiled extension is
unavailable or the modulus is too large for 64-bit arithmetic.  They work on
Python integers, so any p^s is handled exactly.
"""

import numpy as np


def _val(x, p, s):
    if x == 0:
        return s
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def howell(A, p, s):
    """Howell basis of the row module of ``A`` over Z/p^s.

    Returns the nonzero rows in echelon order.  Pivots are powers of ``p``,
    entries above a pivot are reduced into ``[0, pivot)``, and every element of
    the row module whose first ``j`` entries vanish lies in the span of the
    returned rows with that property.
    """
    N = p**s
    A = np.asarray(A)
    ncols = A.shape[1] if A.ndim == 2 else 0
    work = [[int(x) % N for x in row] for row in A.tolist()]
    work = [r for r in work if any(r)]
    basis = []
    for col in range(ncols):
        best = -1
        best_v = s
        for idx, r in enumerate(work):
            if r[col]:
                v = _val(r[col], p, s)
                if v < best_v:
                    best, best_v = idx, v
                    if v == 0:
                        break
        if best < 0:
            continue
        piv = work.pop(best)
        pv = p**best_v
        unit_inv = pow(piv[col] // pv, -1, N)
        piv = [(unit_inv * x) % N for x in piv]
        rest = []
        for r in work:
            f = r[col] // pv
            if f:
                r = [(a - f * b) % N for a, b in zip(r, piv)]
            if any(r):
                rest.append(r)
        if best_v > 0:
            ann = [(x * p ** (s - best_v)) % N for x in piv]
            if any(ann):
                rest.append(ann)
        work = rest
        basis.append((col, piv))
    for k in range(len(basis)):
        ck, rk = basis[k]
        pv = rk[ck]
        for j in range(k):
            cj, rj = basis[j]
            f = rj[ck] // pv
            if f:
                basis[j] = (cj, [(a - f * b) % N for a, b in zip(rj, rk)])
    if not basis:
        return np.zeros((0, ncols), dtype=object)
    return np.array([r for _, r in basis], dtype=object)


def smith_valuations(A, p, s):
    """Valuations of the Smith diagonal of ``A`` over Z/p^s (``s`` for zero)."""
    N = p**s
    A = np.asarray(A)
    if A.ndim != 2 or 0 in A.shape:
        return []
    M = [[int(x) % N for x in row] for row in A.tolist()]
    out = []
    while M and M[0]:
        best = None
        best_v = s
        for i, row in enumerate(M):
            for j, x in enumerate(row):
                if x:
                    v = _val(x, p, s)
                    if v < best_v:
                        best, best_v = (i, j), v
        if best is None:
            out.extend([s] * min(len(M), len(M[0])))
            break
        i, j = best
        M[0], M[i] = M[i], M[0]
        for row in M:
            row[0], row[j] = row[j], row[0]
        pv = p**best_v
        unit_inv = pow(M[0][0] // pv, -1, N)
        M[0] = [(unit_inv * x) % N for x in M[0]]
        top = M[0]
        for r in range(1, len(M)):
            f = M[r][0] // pv
            if f:
                M[r] = [(a - f * b) % N for a, b in zip(M[r], top)]
        out.append(best_v)
        M = [row[1:] for row in M[1:]]
    return out


def fold_word(gens, signs, act, act_inv, zact, zact_inv, bracket, val_ad, val_z, N, half):
    """Extend a Lie-valued 1-cochain along a word, one letter at a time.

    The extension rule is ``c(gh) = c(g) + g.c(h) + 1/2 [c(g), g.c(h)]`` and an
    inverse letter carries ``c(x^-1) = -(x^-1 . c(x))``.
    """
    m = len(bracket)
    B = [[int(b) for b in row] for row in np.asarray(bracket).tolist()]
    acts = [np.asarray(a).tolist() for a in act]
    acts_inv = [np.asarray(a).tolist() for a in act_inv]
    vals = [[int(x) for x in row] for row in np.asarray(val_ad).tolist()]
    vz = [int(x) for x in np.asarray(val_z).tolist()]
    za = [int(x) for x in zact]
    zi = [int(x) for x in zact_inv]

    phi = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    chi = 1
    cur = [0] * m
    z = 0
    for g, e in zip(gens, signs):
        if e > 0:
            v = vals[g]
            vzl = vz[g]
            step = acts[g]
            chi_step = za[g]
        else:
            inv = acts_inv[g]
            v = [-sum(inv[i][k] * vals[g][k] for k in range(m)) % N for i in range(m)]
            vzl = (-zi[g] * vz[g]) % N
            step = inv
            chi_step = zi[g]
        w = [sum(phi[i][k] * v[k] for k in range(m)) % N for i in range(m)]
        br = 0
        for i in range(m):
            if cur[i]:
                row = B[i]
                for j in range(m):
                    if row[j] and w[j]:
                        br += row[j] * cur[i] * w[j]
        z = (z + chi * vzl + half * br) % N
        cur = [(a + b) % N for a, b in zip(cur, w)]
        phi = [[sum(phi[i][k] * step[k][j] for k in range(m)) % N for j in range(m)] for i in range(m)]
        chi = (chi * chi_step) % N
    return np.array(cur, dtype=object), z
