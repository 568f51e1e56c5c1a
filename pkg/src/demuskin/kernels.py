"""Backend selection for the arithmetic hot loops.

The compiled extension is used when it imports and the modulus fits 64-bit
products; otherwise the pure-Python reference kernels run.  Setting
``DEMUSKIN_BACKEND=python`` forces the fallback.
"""

import os

import numpy as np

from . import _pykernels

_LIMIT = 2**31

try:
    if os.environ.get("DEMUSKIN_BACKEND", "").lower() == "python":
        raise ImportError("python backend requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"


def _fast(N):
    return _ckernels is not None and N < _LIMIT


def howell(A, p, s):
    """Howell rows of ``A`` over Z/p^s (see ``_pykernels.howell``)."""
    if _fast(p**s):
        A = np.ascontiguousarray(np.asarray(A, dtype=object).astype(np.int64))
        if A.ndim != 2:
            A = A.reshape(0, 0)
        return _ckernels.howell(A, p, s)
    return _pykernels.howell(A, p, s)


def smith_valuations(A, p, s):
    """Smith diagonal valuations of ``A`` over Z/p^s."""
    if _fast(p**s):
        A = np.ascontiguousarray(np.asarray(A, dtype=object).astype(np.int64))
        return list(_ckernels.smith_valuations(A, p, s))
    return _pykernels.smith_valuations(A, p, s)


def fold_word(gens, signs, act, act_inv, zact, zact_inv, bracket, val_ad, val_z, N, half):
    """Fold a 1-cochain along a word with the class-2 extension rule."""
    if _fast(N):
        i64 = lambda x: np.ascontiguousarray(np.asarray(x, dtype=object).astype(np.int64))
        ad, z = _ckernels.fold_word(
            i64(gens), i64(signs), i64(act), i64(act_inv), i64(zact), i64(zact_inv),
            i64(bracket), i64(val_ad), i64(val_z), N, half,
        )
        return np.asarray(ad, dtype=object), int(z)
    return _pykernels.fold_word(gens, signs, act, act_inv, zact, zact_inv, bracket, val_ad, val_z, N, half)
