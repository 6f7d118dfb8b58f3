"""Numba-compiled row reduction over F_p."""

import numpy as np
from numba import njit


@njit(cache=True)
def _inv_mod(a, p):
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


@njit(cache=True)
def _rref_inplace(r, p):
    nrows, ncols = r.shape
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    row = 0
    for col in range(ncols):
        if row == nrows:
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
        inv = _inv_mod(r[row, col], p)
        for j in range(col, ncols):
            r[row, j] = (r[row, j] * inv) % p
        for i in range(nrows):
            if i == row:
                continue
            f = r[i, col]
            if f == 0:
                continue
            for j in range(col, ncols):
                v = r[row, j]
                if v != 0:
                    r[i, j] = (r[i, j] - f * v) % p
        pivots[row] = col
        row += 1
    return pivots[:row]


def rref_mod_p(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    r = np.array(a, dtype=np.int64, copy=True) % p
    pivots = _rref_inplace(r, np.int64(p))
    return r, pivots
