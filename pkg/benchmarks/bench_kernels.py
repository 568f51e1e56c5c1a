"""Compare the compiled and pure-Python arithmetic kernels.

Run with ``python benchmarks/bench_kernels.py``.  Each kernel is timed on the
same inputs through both backends and the outputs are checked for equality.
"""

import argparse
import timeit

import numpy as np

from demuskin import _pykernels

try:
    from demuskin import _ckernels
except ImportError:
    _ckernels = None


def howell_case(p, s, rows, cols, seed=0):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, p**s, (rows, cols))
    A[rng.random((rows, cols)) < 0.3] *= p
    return A % p**s


def fold_case(p, s, m, G, length, seed=0):
    rng = np.random.default_rng(seed)
    N = p**s
    B = rng.integers(0, N, (m, m))
    B = (B - B.T) % N
    act = np.array([np.eye(m, dtype=np.int64)] * G)
    z = np.ones(G, dtype=np.int64)
    return (rng.integers(0, G, length), rng.choice([-1, 1], length), act, act, z, z, B,
            rng.integers(0, N, (G, m)), rng.integers(0, N, G), N, (N + 1) // 2)


def bench(label, py_call, c_call, number):
    t_py = min(timeit.repeat(py_call, number=number, repeat=3)) / number
    line = f"{label:<34} python {t_py * 1e3:9.3f} ms"
    if c_call is not None:
        t_c = min(timeit.repeat(c_call, number=number, repeat=3)) / number
        line += f"   cython {t_c * 1e3:9.3f} ms   speedup {t_py / t_c:6.1f}x"
    print(line)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--number", type=int, default=5)
    args = parser.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels unavailable; timing the fallback only")
    for p, s, r, c in [(5, 1, 24, 24), (13, 3, 24, 48), (5, 4, 48, 48)]:
        A = howell_case(p, s, r, c)
        Ai = np.ascontiguousarray(A, dtype=np.int64)
        if _ckernels is not None:
            same = np.array_equal(np.asarray(_pykernels.howell(A.astype(object), p, s), dtype=object),
                                  np.asarray(_ckernels.howell(Ai, p, s), dtype=object))
            assert same, "backends disagree on howell"
        bench(f"howell p={p} s={s} {r}x{c}", lambda: _pykernels.howell(A.astype(object), p, s),
              None if _ckernels is None else (lambda: _ckernels.howell(Ai, p, s)), args.number)
    for p, s, length in [(5, 4, 141), (13, 3, 2213)]:
        case = fold_case(p, s, 4, 6, length)
        if _ckernels is not None:
            a, b = _pykernels.fold_word(*case), _ckernels.fold_word(*case)
            assert [int(v) for v in a[0]] == [int(v) for v in b[0]] and int(a[1]) == int(b[1])
        bench(f"fold_word p={p} s={s} len={length}", lambda: _pykernels.fold_word(*case),
              None if _ckernels is None else (lambda: _ckernels.fold_word(*case)), args.number)


if __name__ == "__main__":
    main()
