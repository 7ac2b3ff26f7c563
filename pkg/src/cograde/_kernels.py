"""Row-reduction kernels over GF(p).

Two interchangeable implementations of in-place reduced row echelon form:
a numba ``@njit`` loop and a vectorised numpy loop.  The numba path is used
unless ``COGRADE_DISABLE_NUMBA`` is set to a truthy value or numba cannot be
imported.  Both return ``(rank, pivots)`` and leave the reduced matrix in the
input array.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("COGRADE_DISABLE_NUMBA", "").strip().lower()
_WANT_NUMBA = _FLAG not in ("1", "true", "yes", "on")

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None


def _modinv_py(a: int, p: int) -> int:
    return pow(int(a), p - 2, p)


def rref_inplace_numpy(a: np.ndarray, p: int) -> tuple[int, np.ndarray]:
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv], c:] = a[[piv, r], c:]
        inv = _modinv_py(a[r, c], p)
        if inv != 1:
            a[r, c:] = (a[r, c:] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit, c:] = (a[hit, c:] - np.outer(col[hit], a[r, c:]) % p) % p
        pivots.append(c)
        r += 1
    return r, np.asarray(pivots, dtype=np.int64)


if njit is not None:

    @njit(cache=True, nogil=True)
    def _modinv_nb(a, p):
        result = 1
        base = a % p
        e = p - 2
        while e > 0:
            if e & 1:
                result = (result * base) % p
            base = (base * base) % p
            e >>= 1
        return result

    @njit(cache=True, nogil=True)
    def rref_inplace_numba(a, p):
        rows, cols = a.shape
        pivots = np.empty(min(rows, cols), dtype=np.int64)
        r = 0
        for c in range(cols):
            if r == rows:
                break
            piv = -1
            for i in range(r, rows):
                if a[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(c, cols):
                    t = a[r, j]
                    a[r, j] = a[piv, j]
                    a[piv, j] = t
            inv = _modinv_nb(a[r, c], p)
            if inv != 1:
                for j in range(c, cols):
                    a[r, j] = (a[r, j] * inv) % p
            for i in range(rows):
                if i == r:
                    continue
                f = a[i, c]
                if f == 0:
                    continue
                for j in range(c, cols):
                    v = a[r, j]
                    if v != 0:
                        w = a[i, j] - (f * v) % p
                        if w < 0:
                            w += p
                        a[i, j] = w
            pivots[r] = c
            r += 1
        return r, pivots[:r].copy()

else:  # pragma: no cover
    rref_inplace_numba = None


USING_NUMBA = _WANT_NUMBA and rref_inplace_numba is not None


def rref_inplace(a: np.ndarray, p: int) -> tuple[int, np.ndarray]:
    """Reduce ``a`` (C-contiguous int64, entries in [0, p)) in place."""
    if USING_NUMBA and a.size:
        return rref_inplace_numba(a, np.int64(p))
    return rref_inplace_numpy(a, p)
