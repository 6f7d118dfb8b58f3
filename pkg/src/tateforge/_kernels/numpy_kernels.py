"""Pure-numpy row reduction over F_p (fallback path)."""

import numpy as np


def rref_mod_p(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row echelon form of ``a`` modulo ``p``.

    Returns ``(r, pivots)`` where ``r`` has the nonzero rows first and
    ``pivots`` holds the pivot column of each of those rows.  Requires
    ``p < 2**31`` so that products of residues fit in int64.
    """
    r = np.array(a, dtype=np.int64, copy=True) % p
    nrows, ncols = r.shape
    pivots = []
    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        inv = pow(int(r[row, col]), p - 2, p)
        r[row] = (r[row] * inv) % p
        factors = r[:, col].copy()
        factors[row] = 0
        mask = factors != 0
        if mask.any():
            r[mask] = (r[mask] - np.outer(factors[mask], r[row])) % p
        pivots.append(col)
        row += 1
    return r, np.array(pivots, dtype=np.int64)
