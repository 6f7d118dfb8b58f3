"""Sparse exact matrices.

Entries are stored as a mapping ``(row, col) -> Fraction`` with zeros never
stored.  Matrices act on column vectors, so a map from an ``m``-dimensional
space to an ``n``-dimensional one has shape ``(n, m)``.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping

from .scalars import to_fraction


class SparseMatrix:
    __slots__ = ("nrows", "ncols", "_entries", "_hash")

    def __init__(self, nrows: int, ncols: int, entries: Mapping[tuple[int, int], object] | None = None):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative matrix shape")
        self.nrows = nrows
        self.ncols = ncols
        clean = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < nrows and 0 <= j < ncols):
                    raise IndexError(f"entry ({i}, {j}) outside shape ({nrows}, {ncols})")
                v = to_fraction(v)
                if v:
                    clean[(i, j)] = v
        self._entries = clean
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_dense(cls, rows: Iterable[Iterable[object]], ncols: int | None = None) -> "SparseMatrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        ent = {}
        for i, r in enumerate(rows):
            if len(r) != ncols:
                raise ValueError("ragged dense matrix")
            for j, v in enumerate(r):
                ent[(i, j)] = v
        return cls(len(rows), ncols, ent)

    @classmethod
    def from_triples(cls, nrows: int, ncols: int, triples: Iterable[tuple[int, int, object]]) -> "SparseMatrix":
        acc: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
        for i, j, v in triples:
            acc[(i, j)] += to_fraction(v)
        return cls(nrows, ncols, acc)

    @classmethod
    def from_columns(cls, nrows: int, columns: list[Mapping[int, object]]) -> "SparseMatrix":
        ent = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                ent[(i, j)] = v
        return cls(nrows, len(columns), ent)

    @classmethod
    def block(cls, blocks: list[list["SparseMatrix | None"]], row_sizes: list[int], col_sizes: list[int]) -> "SparseMatrix":
        """Assemble a block matrix; ``None`` blocks are zero."""
        ent = {}
        r0 = 0
        for bi, brow in enumerate(blocks):
            c0 = 0
            for bj, b in enumerate(brow):
                if b is not None:
                    if b.shape != (row_sizes[bi], col_sizes[bj]):
                        raise ValueError(f"block ({bi},{bj}) has shape {b.shape}, expected {(row_sizes[bi], col_sizes[bj])}")
                    for (i, j), v in b._entries.items():
                        ent[(r0 + i, c0 + j)] = v
                c0 += col_sizes[bj]
            r0 += row_sizes[bi]
        return cls(sum(row_sizes), sum(col_sizes), ent)

    # access -------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def items(self):
        return self._entries.items()

    def triples(self) -> list[tuple[int, int, Fraction]]:
        return sorted((i, j, v) for (i, j), v in self._entries.items())

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self._entries.get(key, Fraction(0))

    @property
    def nnz(self) -> int:
        return len(self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self._entries.items():
            out[i][j] = v
        return out

    def rows(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [{} for _ in range(self.nrows)]
        for (i, j), v in self._entries.items():
            out[i][j] = v
        return out

    def columns(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [{} for _ in range(self.ncols)]
        for (i, j), v in self._entries.items():
            out[j][i] = v
        return out

    # algebra ------------------------------------------------------------
    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.ncols, self.nrows, {(j, i): v for (i, j), v in self._entries.items()})

    T = property(transpose)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        orows = other.rows()
        acc: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
        for (i, k), a in self._entries.items():
            for j, b in orows[k].items():
                acc[(i, j)] += a * b
        return SparseMatrix(self.nrows, other.ncols, acc)

    def apply(self, vec: Mapping[int, Fraction]) -> dict[int, Fraction]:
        """Multiply a sparse column vector."""
        out: dict[int, Fraction] = defaultdict(Fraction)
        cols = None
        for j, x in vec.items():
            if not x:
                continue
            if cols is None:
                cols = self.columns()
            for i, a in cols[j].items():
                out[i] += a * x
        return {i: v for i, v in out.items() if v}

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        acc = dict(self._entries)
        for k, v in other._entries.items():
            acc[k] = acc.get(k, Fraction(0)) + v
        return SparseMatrix(self.nrows, self.ncols, acc)

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix(self.nrows, self.ncols, {k: -v for k, v in self._entries.items()})

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def scale(self, c) -> "SparseMatrix":
        c = to_fraction(c)
        return SparseMatrix(self.nrows, self.ncols, {k: c * v for k, v in self._entries.items()})

    def permute(self, row_perm: list[int] | None = None, col_perm: list[int] | None = None) -> "SparseMatrix":
        """Entry (i, j) moves to (row_perm[i], col_perm[j])."""
        rp = row_perm if row_perm is not None else range(self.nrows)
        cp = col_perm if col_perm is not None else range(self.ncols)
        return SparseMatrix(self.nrows, self.ncols, {(rp[i], cp[j]): v for (i, j), v in self._entries.items()})

    def kron(self, other: "SparseMatrix") -> "SparseMatrix":
        ent = {}
        for (i, j), a in self._entries.items():
            for (k, l), b in other._entries.items():
                ent[(i * other.nrows + k, j * other.ncols + l)] = a * b
        return SparseMatrix(self.nrows * other.nrows, self.ncols * other.ncols, ent)

    def submatrix(self, rows: list[int], cols: list[int]) -> "SparseMatrix":
        rmap = {r: a for a, r in enumerate(rows)}
        cmap = {c: b for b, c in enumerate(cols)}
        ent = {}
        for (i, j), v in self._entries.items():
            if i in rmap and j in cmap:
                ent[(rmap[i], cmap[j])] = v
        return SparseMatrix(len(rows), len(cols), ent)

    # comparisons ----------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.shape, frozenset(self._entries.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"
