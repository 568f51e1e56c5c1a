# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled int64 kernels, valid while p^s < 2^31."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()


cdef inline int64_t _md(int64_t a, int64_t N) nogil:
    a %= N
    return a + N if a < 0 else a


cdef int64_t _inv(int64_t a, int64_t N):
    cdef int64_t t = 0, nt = 1, r = N, nr = a % N, q, tmp
    while nr:
        q = r // nr
        tmp = t - q * nt
        t = nt
        nt = tmp
        tmp = r - q * nr
        r = nr
        nr = tmp
    return _md(t, N)


cdef inline int _val(int64_t x, int64_t p, int s) nogil:
    cdef int v = 0
    if x == 0:
        return s
    while x % p == 0:
        x //= p
        v += 1
    return v


def howell(cnp.int64_t[:, ::1] A, int64_t p, int s):
    """Howell rows of ``A`` over Z/p^s; see the Python reference kernel."""
    cdef Py_ssize_t r = A.shape[0], c = A.shape[1]
    cdef int64_t N = 1
    cdef int k
    for k in range(s):
        N *= p
    cdef Py_ssize_t cap = r + c + 1
    cdef cnp.int64_t[:, ::1] W = np.zeros((cap, c), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] B = np.zeros((c, c), dtype=np.int64)
    cdef cnp.int64_t[::1] pcol = np.zeros(c, dtype=np.int64)
    cdef Py_ssize_t nw = 0, nb = 0, i, j, col, best, t
    cdef int v, best_v
    cdef int64_t pv, u, f, nz
    for i in range(r):
        nz = 0
        for j in range(c):
            W[nw, j] = _md(A[i, j], N)
            nz |= W[nw, j]
        if nz:
            nw += 1
    for col in range(c):
        best = -1
        best_v = s
        for i in range(nw):
            if W[i, col]:
                v = _val(W[i, col], p, s)
                if v < best_v:
                    best = i
                    best_v = v
                    if v == 0:
                        break
        if best < 0:
            continue
        pv = 1
        for k in range(best_v):
            pv *= p
        u = _inv(W[best, col] // pv, N)
        for j in range(c):
            B[nb, j] = (u * W[best, j]) % N
        pcol[nb] = col
        # drop the pivot row by moving the last row into its slot
        nw -= 1
        if best != nw:
            for j in range(c):
                W[best, j] = W[nw, j]
        t = 0
        for i in range(nw):
            f = W[i, col] // pv
            nz = 0
            for j in range(c):
                if f:
                    W[t, j] = _md(W[i, j] - (f * B[nb, j]) % N, N)
                else:
                    W[t, j] = W[i, j]
                nz |= W[t, j]
            if nz:
                t += 1
        nw = t
        if best_v > 0:
            f = N // pv
            nz = 0
            for j in range(c):
                W[nw, j] = (f * B[nb, j]) % N
                nz |= W[nw, j]
            if nz:
                nw += 1
        nb += 1
    for k in range(nb):
        col = pcol[k]
        pv = B[k, col]
        for i in range(k):
            f = B[i, col] // pv
            if f:
                for j in range(c):
                    B[i, j] = _md(B[i, j] - (f * B[k, j]) % N, N)
    return np.asarray(B[:nb]).copy()


def smith_valuations(cnp.int64_t[:, ::1] A, int64_t p, int s):
    """Smith diagonal valuations of ``A`` over Z/p^s."""
    cdef Py_ssize_t r = A.shape[0], c = A.shape[1]
    cdef int64_t N = 1
    cdef int k
    for k in range(s):
        N *= p
    if r == 0 or c == 0:
        return []
    cdef cnp.int64_t[:, ::1] M = np.mod(np.asarray(A), N)
    cdef Py_ssize_t top, i, j, bi, bj, kk = min(r, c)
    cdef int v, best_v
    cdef int64_t pv, u, f, tmp
    out = []
    for top in range(kk):
        bi = -1
        best_v = s
        for i in range(top, r):
            for j in range(top, c):
                if M[i, j]:
                    v = _val(M[i, j], p, s)
                    if v < best_v:
                        best_v = v
                        bi = i
                        bj = j
        if bi < 0:
            out.extend([s] * (kk - top))
            break
        if bi != top:
            for j in range(c):
                tmp = M[top, j]
                M[top, j] = M[bi, j]
                M[bi, j] = tmp
        if bj != top:
            for i in range(r):
                tmp = M[i, top]
                M[i, top] = M[i, bj]
                M[i, bj] = tmp
        pv = 1
        for k in range(best_v):
            pv *= p
        u = _inv(M[top, top] // pv, N)
        for j in range(top, c):
            M[top, j] = (u * M[top, j]) % N
        for i in range(top + 1, r):
            f = M[i, top] // pv
            if f:
                for j in range(top, c):
                    M[i, j] = _md(M[i, j] - (f * M[top, j]) % N, N)
        out.append(best_v)
    return out


def fold_word(cnp.int64_t[::1] gens, cnp.int64_t[::1] signs,
              cnp.int64_t[:, :, ::1] act, cnp.int64_t[:, :, ::1] act_inv,
              cnp.int64_t[::1] zact, cnp.int64_t[::1] zact_inv,
              cnp.int64_t[:, ::1] bracket, cnp.int64_t[:, ::1] val_ad,
              cnp.int64_t[::1] val_z, int64_t N, int64_t half):
    """Fold a 1-cochain along a word; see the Python reference kernel."""
    cdef Py_ssize_t m = bracket.shape[0], L = gens.shape[0]
    cdef Py_ssize_t t, i, j, k, g
    cdef cnp.int64_t[:, ::1] phi = np.eye(m, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] nphi = np.zeros((m, m), dtype=np.int64)
    cdef cnp.int64_t[::1] cur = np.zeros(m, dtype=np.int64)
    cdef cnp.int64_t[::1] v = np.zeros(m, dtype=np.int64)
    cdef cnp.int64_t[::1] w = np.zeros(m, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] Bm = np.mod(np.asarray(bracket), N)
    cdef int64_t chi = 1, z = 0, vzl, chi_step, acc, br
    cdef cnp.int64_t[:, :, ::1] step
    for t in range(L):
        g = gens[t]
        if signs[t] > 0:
            for i in range(m):
                v[i] = _md(val_ad[g, i], N)
            vzl = _md(val_z[g], N)
            step = act
            chi_step = _md(zact[g], N)
        else:
            for i in range(m):
                acc = 0
                for k in range(m):
                    acc = (acc + _md(act_inv[g, i, k], N) * _md(val_ad[g, k], N)) % N
                v[i] = _md(-acc, N)
            chi_step = _md(zact_inv[g], N)
            vzl = _md(-((chi_step * _md(val_z[g], N)) % N), N)
            step = act_inv
        for i in range(m):
            acc = 0
            for k in range(m):
                acc = (acc + phi[i, k] * v[k]) % N
            w[i] = acc
        br = 0
        for i in range(m):
            if cur[i]:
                for j in range(m):
                    if Bm[i, j] and w[j]:
                        br = (br + ((Bm[i, j] * cur[i]) % N) * w[j]) % N
        z = (z + (chi * vzl) % N + (half * br) % N) % N
        for i in range(m):
            cur[i] = (cur[i] + w[i]) % N
        for i in range(m):
            for j in range(m):
                acc = 0
                for k in range(m):
                    acc = (acc + phi[i, k] * _md(step[g, k, j], N)) % N
                nphi[i, j] = acc
        for i in range(m):
            for j in range(m):
                phi[i, j] = nphi[i, j]
        chi = (chi * chi_step) % N
    return np.asarray(cur).copy(), z
