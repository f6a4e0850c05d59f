"""Hot loops of the GF(p) linear algebra: modular matmul and row reduction.

Two interchangeable backends are provided. The numba one is used when numba
imports cleanly, unless ``MOTKIT_NO_NUMBA`` is set to a truthy value, in which
case the pure-numpy versions below are bound instead. Both backends must give
bit-identical results; ``benchmarks/bench_kernels.py`` compares their speed.
"""

import os

import numpy as np


def _inv_mod_py(a, p):
    return pow(int(a), p - 2, p)


def matmul_numpy(a, b, p):
    return (a @ b) % p


def rref_numpy(m, p):
    r = np.array(m, dtype=np.int64, copy=True) % p
    nrows, ncols = r.shape
    pivots = []
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + nz[0]
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        inv = _inv_mod_py(r[row, col], p)
        r[row] = (r[row] * inv) % p
        factors = r[:, col].copy()
        factors[row] = 0
        mask = factors != 0
        if mask.any():
            r[mask] = (r[mask] - np.outer(factors[mask], r[row])) % p
        pivots.append(col)
        row += 1
    return r, np.array(pivots, dtype=np.int64)


try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    _HAVE_NUMBA = False


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _inv_mod_nb(a, p):
        # extended Euclid; a is nonzero mod p
        t, new_t = 0, 1
        r, new_r = p, a % p
        while new_r != 0:
            q = r // new_r
            t, new_t = new_t, t - q * new_t
            r, new_r = new_r, r - q * new_r
        if t < 0:
            t += p
        return t

    @numba.njit(cache=True)
    def matmul_numba(a, b, p):
        n, k = a.shape
        m = b.shape[1]
        out = np.zeros((n, m), dtype=np.int64)
        for i in range(n):
            for t in range(k):
                x = a[i, t]
                if x == 0:
                    continue
                for j in range(m):
                    out[i, j] += x * b[t, j]
            for j in range(m):
                out[i, j] %= p
        return out

    @numba.njit(cache=True)
    def _rref_nb(r, p):
        nrows, ncols = r.shape
        pivots = np.empty(min(nrows, ncols), dtype=np.int64)
        npiv = 0
        row = 0
        for col in range(ncols):
            if row >= nrows:
                break
            piv = -1
            for i in range(row, nrows):
                if r[i, col] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != row:
                for j in range(ncols):
                    tmp = r[row, j]
                    r[row, j] = r[piv, j]
                    r[piv, j] = tmp
            inv = _inv_mod_nb(r[row, col], p)
            for j in range(col, ncols):
                r[row, j] = (r[row, j] * inv) % p
            for i in range(nrows):
                if i == row:
                    continue
                f = r[i, col]
                if f == 0:
                    continue
                for j in range(col, ncols):
                    r[i, j] = (r[i, j] - f * r[row, j]) % p
            pivots[npiv] = col
            npiv += 1
            row += 1
        return pivots[:npiv]

    def rref_numba(m, p):
        r = np.array(m, dtype=np.int64, copy=True) % p
        pivots = _rref_nb(r, p)
        return r, pivots


def _numba_disabled():
    return os.environ.get("MOTKIT_NO_NUMBA", "").strip().lower() not in ("", "0", "false", "no")


if _HAVE_NUMBA and not _numba_disabled():
    BACKEND = "numba"
    matmul = matmul_numba
    rref = rref_numba
else:
    BACKEND = "numpy"
    matmul = matmul_numpy
    rref = rref_numpy
