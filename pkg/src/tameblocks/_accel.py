"""Hot GF(2) kernels with an optional numba path.

Set ``TAMEBLOCKS_NUMBA=0`` to force the pure-numpy implementations. Both
paths operate on bit-packed row matrices: a ``uint64`` array of shape
``(rows, words)`` where column ``c`` lives in word ``c >> 6``, bit ``c & 63``.
"""
import os

import numpy as np

_WANT_NUMBA = os.environ.get("TAMEBLOCKS_NUMBA", "1").lower() not in ("0", "false", "no", "off")

try:
    if not _WANT_NUMBA:
        raise ImportError
    from numba import njit

    USING_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag
    USING_NUMBA = False


# -- numpy reference path ----------------------------------------------------

def rref_numpy(a, ncols):
    """Reduce ``a`` in place to reduced row echelon form; return (rank, pivots)."""
    m = a.shape[0]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        wd = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        col = (a[r:, wd] & bit) != 0
        hits = np.flatnonzero(col)
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        mask = (a[:, wd] & bit) != 0
        mask[r] = False
        if mask.any():
            a[mask, wd:] ^= a[r, wd:]
        pivots.append(c)
        r += 1
    return r, np.array(pivots, dtype=np.int64)


def mul_numpy(a, b, acols):
    """Packed product ``a @ b`` over GF(2); ``a`` has ``acols`` columns."""
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint64)
    for c in range(acols):
        bit = np.uint64(1) << np.uint64(c & 63)
        rows = (a[:, c >> 6] & bit) != 0
        if rows.any():
            out[rows] ^= b[c]
    return out


# -- numba path ----------------------------------------------------------------

if USING_NUMBA:

    @njit(cache=True)
    def _rref_jit(a, ncols):
        m, w = a.shape
        pivots = np.empty(min(m, ncols), dtype=np.int64)
        r = 0
        one = np.uint64(1)
        for c in range(ncols):
            if r == m:
                break
            wd = c >> 6
            bit = one << np.uint64(c & 63)
            p = -1
            for i in range(r, m):
                if a[i, wd] & bit:
                    p = i
                    break
            if p < 0:
                continue
            if p != r:
                for k in range(w):
                    tmp = a[r, k]
                    a[r, k] = a[p, k]
                    a[p, k] = tmp
            for i in range(m):
                if i != r and (a[i, wd] & bit):
                    for k in range(wd, w):
                        a[i, k] ^= a[r, k]
            pivots[r] = c
            r += 1
        return r, pivots[:r].copy()

    @njit(cache=True)
    def _mul_jit(a, b, acols):
        m = a.shape[0]
        w = b.shape[1]
        out = np.zeros((m, w), dtype=np.uint64)
        one = np.uint64(1)
        for i in range(m):
            for c in range(acols):
                if a[i, c >> 6] & (one << np.uint64(c & 63)):
                    for k in range(w):
                        out[i, k] ^= b[c, k]
        return out

    def rref(a, ncols):
        r, piv = _rref_jit(a, ncols)
        return int(r), piv

    def mul(a, b, acols):
        return _mul_jit(a, b, acols)

else:
    rref = rref_numpy
    mul = mul_numpy
