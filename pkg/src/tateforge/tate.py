"""Window models of Tate vector spaces.

The model space has a basis ``e_i`` for ``i`` in Z.  A lattice is a subspace
``W (+) span{e_i : i >= b}`` with ``W`` inside ``span{e_a, ..., e_{b-1}}``;
it also carries a frame (an ordered basis of ``W``) so that determinant
lines can be trivialised.  The canonical frame is the reduced echelon basis.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .exactalg import ChainComplex, ChainMap, cohomology_dims, dual, dual_map
from .sparse import SparseMatrix


class InvalidTower(ValueError):
    pass


class InvalidLattice(ValueError):
    pass


# ---------------------------------------------------------------------------
# towers


@dataclass(frozen=True)
class Tower:
    """``direction="ind"``: ``maps[k]`` goes stage ``k`` to ``k+1``;
    ``direction="pro"``: ``maps[k]`` goes stage ``k+1`` to ``k``."""

    direction: str
    stages: tuple[ChainComplex, ...]
    maps: tuple[ChainMap, ...]

    def __post_init__(self):
        if self.direction not in ("ind", "pro"):
            raise InvalidTower(f"unknown direction {self.direction!r}")
        if len(self.maps) != max(len(self.stages) - 1, 0):
            raise InvalidTower("a tower with s stages needs s-1 maps")
        for k, f in enumerate(self.maps):
            src, tgt = (k, k + 1) if self.direction == "ind" else (k + 1, k)
            if f.source.dims() != self.stages[src].dims() or f.target.dims() != self.stages[tgt].dims():
                raise InvalidTower(f"map {k} does not match its stages")

    @classmethod
    def from_matrices(cls, direction: str, dims: Sequence[int], matrices: Sequence[SparseMatrix]) -> "Tower":
        """A tower of spaces concentrated in degree 0."""
        stages = tuple(ChainComplex.concentrated([f"s{k}_{i}" for i in range(n)]) for k, n in enumerate(dims))
        maps = []
        for k, m in enumerate(matrices):
            src, tgt = (k, k + 1) if direction == "ind" else (k + 1, k)
            if m.shape != (dims[tgt], dims[src]):
                raise InvalidTower(f"matrix {k} has shape {m.shape}, expected {(dims[tgt], dims[src])}")
            maps.append(ChainMap(stages[src], stages[tgt], {0: m}))
        return cls(direction, stages, tuple(maps))

    def stage_dims(self) -> list[dict[int, int]]:
        return [s.dims() for s in self.stages]

    def stage_cohomology(self) -> list[dict[int, int]]:
        return [cohomology_dims(s) for s in self.stages]

    def map_ranks(self) -> list[dict[int, int]]:
        return [{n: linalg.rank(f.f(n)) for n in sorted(set(f.source.degrees))} for f in self.maps]


def dualize_tower(t: Tower) -> Tower:
    stages = tuple(dual(s) for s in t.stages)
    flip = {"ind": "pro", "pro": "ind"}[t.direction]
    maps = []
    for f in t.maps:
        g = dual_map(f)
        maps.append(ChainMap(dual(f.target), dual(f.source), g.components, check=False))
    return Tower(flip, stages, tuple(maps))


# ---------------------------------------------------------------------------
# lattices


@dataclass(frozen=True)
class TateWindowModel:
    """The Tate space with basis ``e_i`` (``i`` in Z) in a single degree."""

    degree: int = 0

    def standard(self) -> "Lattice":
        return Lattice.shifted(0)

    def window_basis(self, a: int, b: int) -> list[str]:
        return [f"e{i}" for i in range(a, b)]


class Lattice:
    """``W (+) span{e_i : i >= b}`` with an ordered frame of ``W``.

    ``frame`` holds rows indexed by window positions ``0..b-a-1`` standing
    for ``e_a .. e_{b-1}``.
    """

    __slots__ = ("a", "b", "frame", "_rref")

    def __init__(self, a: int, b: int, frame: Sequence[Sequence[object]] | SparseMatrix = ()):
        if a > b:
            raise InvalidLattice("window must satisfy a <= b")
        if isinstance(frame, SparseMatrix):
            m = frame
        else:
            rows = [list(r) for r in frame]
            if any(len(r) != b - a for r in rows):
                raise InvalidLattice(f"frame rows must have {b - a} entries, the window width")
            m = SparseMatrix.from_dense(rows, b - a) if rows else SparseMatrix(0, b - a)
        if m.ncols != b - a:
            raise InvalidLattice(f"frame has {m.ncols} columns, window has width {b - a}")
        if linalg.rank(m) != m.nrows:
            raise InvalidLattice("frame rows are linearly dependent")
        self.a, self.b, self.frame = a, b, m
        self._rref = None

    @classmethod
    def shifted(cls, a: int) -> "Lattice":
        """``L_a = span{e_i : i >= a}``."""
        return cls(a, a)

    @classmethod
    def canonical(cls, a: int, b: int, rows: Sequence[Sequence[object]]) -> "Lattice":
        """Lattice spanned by ``rows``, carrying its reduced echelon frame."""
        m = SparseMatrix.from_dense([list(r) for r in rows], b - a) if rows else SparseMatrix(0, b - a)
        ech, _ = linalg.rref_rows(m)
        return cls(a, b, SparseMatrix.from_columns(b - a, ech).transpose() if ech else SparseMatrix(0, b - a))

    @property
    def dim_w(self) -> int:
        return self.frame.nrows

    def extend(self, a: int, b: int) -> "Lattice":
        """The same framed lattice described in the larger window ``[a, b)``.

        New indices ``self.b .. b-1`` are appended to the frame as standard
        vectors, in increasing order.
        """
        if a > self.a or b < self.b:
            raise InvalidLattice("extend only enlarges the window")
        off = self.a - a
        ent = {(i, j + off): v for (i, j), v in self.frame.items()}
        r = self.frame.nrows
        for k, idx in enumerate(range(self.b, b)):
            ent[(r + k, idx - a)] = 1
        return Lattice(a, b, SparseMatrix(r + (b - self.b), b - a, ent))

    def echelon(self) -> SparseMatrix:
        if self._rref is None:
            rows, _ = linalg.rref_rows(self.frame)
            self._rref = SparseMatrix.from_columns(self.b - self.a, rows).transpose() if rows else SparseMatrix(0, self.b - self.a)
        return self._rref

    def normal_form(self) -> "Lattice":
        """Smallest window, echelon frame (the frame constant is forgotten)."""
        a, b = self.a, self.b
        rows = [dict(r) for r in self.echelon().rows()]
        while b > a:
            top = b - 1 - self.a
            ech = linalg.Echelon()
            for r in rows:
                ech.add(r)
            if not ech.contains({top: 1}):
                break
            # W contains e_{b-1}: move it into the tail
            ech = linalg.Echelon()
            for r in rows:
                ech.add({j: v for j, v in r.items() if j != top})
            rows = ech.reduced_rows()
            b -= 1
        while a < b and all(r.get(a - self.a, 0) == 0 for r in rows):
            a += 1
        off = a - self.a
        m = SparseMatrix(len(rows), b - a, {(i, j - off): v for i, r in enumerate(rows) for j, v in r.items()})
        return Lattice(a, b, m)

    def same_subspace(self, other: "Lattice") -> bool:
        a, b = min(self.a, other.a), max(self.b, other.b)
        return self.extend(a, b).echelon() == other.extend(a, b).echelon()

    def contains(self, other: "Lattice") -> bool:
        a, b = min(self.a, other.a), max(self.b, other.b)
        big = linalg.Echelon()
        for r in self.extend(a, b).frame.rows():
            big.add(r)
        return all(big.contains(r) for r in other.extend(a, b).frame.rows())

    def frame_constant(self) -> Fraction:
        """``det M`` where ``frame = M * echelon``."""
        e = self.echelon()
        if e.nrows == 0:
            return Fraction(1)
        # solve frame row by row in the echelon basis: coefficient = entry at pivot
        pivs = [min(r) for r in e.rows()]
        M = SparseMatrix(e.nrows, e.nrows, {(i, k): row.get(p, 0) for i, row in enumerate(self.frame.rows()) for k, p in enumerate(pivs)})
        return linalg.determinant(M)

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.same_subspace(other)

    def __hash__(self):
        nf = self.normal_form()
        return hash((nf.a, nf.b, nf.frame))

    def __repr__(self):
        return f"Lattice([{self.a},{self.b}), rows={self.frame.to_dense()})"


def common_window(*lats: Lattice) -> tuple[int, int]:
    return min(l.a for l in lats), max(l.b for l in lats)


def lattice_intersect_sum(l1: Lattice, l2: Lattice) -> tuple[Lattice, Lattice]:
    a, b = common_window(l1, l2)
    f1, f2 = l1.extend(a, b).frame, l2.extend(a, b).frame
    stacked = SparseMatrix.block([[f1], [f2]], [f1.nrows, f2.nrows], [b - a])
    s_rows, _ = linalg.rref_rows(stacked)
    total = Lattice(a, b, SparseMatrix.from_columns(b - a, s_rows).transpose() if s_rows else SparseMatrix(0, b - a))
    # x f1 = y f2  <=>  (x, -y) in the left kernel of the stacked matrix
    neg = SparseMatrix.block([[f1], [-f2]], [f1.nrows, f2.nrows], [b - a])
    vecs = []
    for z in linalg.kernel(neg.transpose()):
        x = {i: v for i, v in z.items() if i < f1.nrows}
        vecs.append(f1.transpose().apply(x))
    ech = linalg.Echelon()
    for v in vecs:
        ech.add(v)
    rows = ech.reduced_rows()
    meet = Lattice(a, b, SparseMatrix.from_columns(b - a, rows).transpose() if rows else SparseMatrix(0, b - a))
    return meet, total


def relative_dimension(l1: Lattice, l2: Lattice) -> int:
    """``dim L1/(L1 n L2) - dim L2/(L1 n L2)``, so that ``reldim(L_a, L_b) = b - a``."""
    a, b = common_window(l1, l2)
    return l1.extend(a, b).dim_w - l2.extend(a, b).dim_w


def relative_dimension_via_meet(l1: Lattice, l2: Lattice) -> int:
    meet, _ = lattice_intersect_sum(l1, l2)
    a, b = common_window(l1, l2)
    m = meet.extend(a, b).dim_w
    return (l1.extend(a, b).dim_w - m) - (l2.extend(a, b).dim_w - m)


@dataclass(frozen=True)
class DetLine:
    degree: int
    scalar: Fraction

    def __post_init__(self):
        if not self.scalar:
            raise ValueError("a determinant-line coordinate is never zero")


def det_line(l1: Lattice, l2: Lattice) -> DetLine:
    """Coordinate of ``frame(L1)^* (x) frame(L2)`` against the echelon wedges."""
    a, b = common_window(l1, l2)
    e1, e2 = l1.extend(a, b), l2.extend(a, b)
    return DetLine(e1.dim_w - e2.dim_w, e2.frame_constant() / e1.frame_constant())


def compose(d12: DetLine, d23: DetLine) -> DetLine:
    return DetLine(d12.degree + d23.degree, d12.scalar * d23.scalar)


def scaled(l: Lattice, index: int, c) -> Lattice:
    """Image of ``l`` under ``e_index -> c e_index`` (frame transported)."""
    a, b = min(l.a, index), max(l.b, index + 1)
    e = l.extend(a, b)
    col = index - a
    ent = {(i, j): (v * c if j == col else v) for (i, j), v in e.frame.items()}
    return Lattice(a, b, SparseMatrix(e.frame.nrows, b - a, ent))


def random_lattice(rng: random.Random, lo: int, hi: int, max_entry: int = 3) -> Lattice:
    """A random framed lattice with window inside ``[lo, hi)``."""
    a = rng.randint(lo, hi)
    b = rng.randint(a, hi)
    width = b - a
    r = rng.randint(0, width)
    while True:
        rows = [[Fraction(rng.randint(-max_entry, max_entry), rng.randint(1, 2)) for _ in range(width)] for _ in range(r)]
        m = SparseMatrix.from_dense(rows, width) if rows else SparseMatrix(0, width)
        if linalg.rank(m) == r:
            return Lattice(a, b, m)
