"""Exact row reduction, ranks, kernels and spans.

Over the rationals the elimination runs on sparse rows of Fractions.  Over a
prime field the matrix is reduced modulo ``p`` and handed to the compiled
kernel in :mod:`tateforge._kernels`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .scalars import QQ, Field
from .sparse import SparseMatrix

Vector = dict[int, Fraction]


def _axpy(target: Vector, c: Fraction, src: Mapping[int, Fraction]) -> None:
    """target += c * src, dropping zeros."""
    for k, v in src.items():
        nv = target.get(k, 0) + c * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


class Echelon:
    """Incremental row echelon basis of a span of sparse vectors over Q.

    Each stored row has leading coefficient 1 at its pivot.
    """

    def __init__(self):
        self.rows: dict[int, Vector] = {}

    def reduce(self, vec: Mapping[int, Fraction]) -> Vector:
        row = {k: Fraction(v) for k, v in vec.items() if v}
        done: Vector = {}
        # leading-term elimination; entries left of the current leader are final
        while row:
            c = min(row)
            piv = self.rows.get(c)
            if piv is None:
                done[c] = row.pop(c)
                continue
            _axpy(row, -row[c], piv)
        return done

    def add(self, vec: Mapping[int, Fraction]) -> bool:
        """Insert a vector; returns True if it enlarged the span."""
        row = self._reduce_leading(vec)
        if not row:
            return False
        c = min(row)
        inv = 1 / row[c]
        self.rows[c] = {k: v * inv for k, v in row.items()}
        return True

    def _reduce_leading(self, vec: Mapping[int, Fraction]) -> Vector:
        row = {k: Fraction(v) for k, v in vec.items() if v}
        while row:
            c = min(row)
            piv = self.rows.get(c)
            if piv is None:
                break
            _axpy(row, -row[c], piv)
        return row

    def contains(self, vec: Mapping[int, Fraction]) -> bool:
        return not self._reduce_leading(vec)

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def reduced_rows(self) -> list[Vector]:
        """Reduced echelon rows, ordered by pivot."""
        pivs = sorted(self.rows)
        rows = {c: dict(self.rows[c]) for c in pivs}
        for c in reversed(pivs):
            pr = rows[c]
            for c2 in pivs:
                if c2 < c and c in rows[c2]:
                    _axpy(rows[c2], -rows[c2][c], pr)
        return [rows[c] for c in pivs]


# ---------------------------------------------------------------------------
# matrix-level API


def _dense_mod_p(m: SparseMatrix, field: Field) -> np.ndarray:
    a = np.zeros(m.shape, dtype=np.int64)
    for (i, j), v in m.items():
        a[i, j] = field.reduce(v)
    return a


def rref_rows(m: SparseMatrix, field: Field = QQ) -> tuple[list[Vector], list[int]]:
    """Reduced row echelon form of the row space of ``m``.

    Returns the nonzero rows (as sparse dicts) and their pivot columns.
    Over F_p the entries are canonical residues in ``[0, p)``.
    """
    if field.is_rational:
        ech = Echelon()
        for row in m.rows():
            if row:
                ech.add(row)
        rows = ech.reduced_rows()
        return rows, [min(r) for r in rows]
    if m.nrows == 0 or m.ncols == 0:
        return [], []
    r, piv = _kernels.rref_mod_p(_dense_mod_p(m, field), field.characteristic)
    rows = []
    for i in range(len(piv)):
        nz = np.nonzero(r[i])[0]
        rows.append({int(j): Fraction(int(r[i, j])) for j in nz})
    return rows, [int(c) for c in piv]


def rank(m: SparseMatrix, field: Field = QQ) -> int:
    if m.nnz == 0:
        return 0
    if field.is_rational:
        ech = Echelon()
        # feed from the smaller side
        vecs = m.rows() if m.nrows <= m.ncols else m.columns()
        for v in vecs:
            if v:
                ech.add(v)
        return ech.rank
    return len(rref_rows(m, field)[1])


def kernel(m: SparseMatrix, field: Field = QQ) -> list[Vector]:
    """Basis of the null space ``{v : m v = 0}``, one vector per free column."""
    rows, pivots = rref_rows(m, field)
    p = field.characteristic
    pivset = set(pivots)
    basis = []
    for f in range(m.ncols):
        if f in pivset:
            continue
        v: Vector = {f: Fraction(1)}
        for r, c in zip(rows, pivots):
            a = r.get(f)
            if a:
                v[c] = Fraction((-int(a)) % p) if p else -a
        basis.append(v)
    return basis


def image_basis(m: SparseMatrix, field: Field = QQ) -> list[Vector]:
    """Basis of the column space (reduced echelon form of the transpose)."""
    return rref_rows(m.transpose(), field)[0]


def is_injective(m: SparseMatrix, field: Field = QQ) -> bool:
    return rank(m, field) == m.ncols


def is_surjective(m: SparseMatrix, field: Field = QQ) -> bool:
    return rank(m, field) == m.nrows


def is_invertible(m: SparseMatrix, field: Field = QQ) -> bool:
    return m.nrows == m.ncols and rank(m, field) == m.nrows


def determinant(m: SparseMatrix) -> Fraction:
    """Exact determinant over Q by fraction Gaussian elimination."""
    n = m.nrows
    if n != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    a = m.to_dense()
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, n):
            f = a[i][c]
            if f:
                f *= inv
                ai, ac = a[i], a[c]
                for j in range(c, n):
                    if ac[j]:
                        ai[j] -= f * ac[j]
    return det


def inverse(m: SparseMatrix) -> SparseMatrix:
    """Exact inverse over Q; raises ValueError if singular."""
    n = m.nrows
    if n != m.ncols:
        raise ValueError("inverse of a non-square matrix")
    aug = SparseMatrix.block([[m, SparseMatrix.identity(n)]], [n], [n, n])
    rows, piv = rref_rows(aug)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ValueError("matrix is singular")
    ent = {}
    for i in range(n):
        for j, v in rows[i].items():
            if j >= n:
                ent[(i, j - n)] = v
    return SparseMatrix(n, n, ent)


def solve(m: SparseMatrix, rhs: Mapping[int, Fraction]) -> Vector | None:
    """Some ``x`` with ``m x = rhs`` over Q, or None if inconsistent."""
    n = m.ncols
    aug_cols = m.columns() + [dict(rhs)]
    aug = SparseMatrix.from_columns(m.nrows, aug_cols)
    rows, piv = rref_rows(aug)
    if piv and piv[-1] == n:
        return None
    x: Vector = {}
    for r, c in zip(rows, piv):
        v = r.get(n)
        if v:
            x[c] = v
    return x


def span_rank(vectors: Iterable[Mapping[int, Fraction]]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return ech.rank
