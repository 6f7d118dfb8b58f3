"""Graded vector spaces, cochain complexes and chain-level constructions.

Conventions (fixed once for the whole package):

* differentials raise degree by one;
* ``shift(c, k)`` has components ``c[k]^n = c^{n+k}`` and differential ``(-1)^k d``;
* the dual has ``(c^v)^n = (c^{-n})^v`` and differential ``-(-1)^n d^T``;
* ``cone(f)^n = M^{n+1} (+) N^n`` with ``d(m, x) = (-dm, f(m) + dx)``;
* tensor products use ``d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy``.
"""

from __future__ import annotations

import itertools
import random
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from . import linalg
from .linalg import Echelon, Vector
from .scalars import QQ, Field
from .sparse import SparseMatrix


class InvalidComplex(ValueError):
    pass


class NotChainMap(ValueError):
    pass


class InvalidDiagram(ValueError):
    pass


# ---------------------------------------------------------------------------
# graded vector spaces


class GradedVectorSpace:
    """Finitely many nonzero components, each an ordered list of labels."""

    __slots__ = ("_components",)

    def __init__(self, components: Mapping[int, Sequence[str]] | None = None):
        comps = {}
        for deg, labels in (components or {}).items():
            labels = tuple(labels)
            if not labels:
                continue
            if len(set(labels)) != len(labels):
                raise ValueError(f"duplicate basis labels in degree {deg}")
            comps[int(deg)] = labels
        self._components = dict(sorted(comps.items()))

    @property
    def components(self) -> dict[int, tuple[str, ...]]:
        return dict(self._components)

    def basis(self, deg: int) -> tuple[str, ...]:
        return self._components.get(deg, ())

    def dim(self, deg: int) -> int:
        return len(self._components.get(deg, ()))

    @property
    def degrees(self) -> list[int]:
        return list(self._components)

    def dims(self) -> dict[int, int]:
        return {d: len(b) for d, b in self._components.items()}

    @property
    def total_dim(self) -> int:
        return sum(len(b) for b in self._components.values())

    def __eq__(self, other):
        return isinstance(other, GradedVectorSpace) and self._components == other._components

    def __hash__(self):
        return hash(tuple(self._components.items()))

    def __repr__(self):
        return f"GradedVectorSpace({self.dims()})"


# ---------------------------------------------------------------------------
# complexes and maps


class ChainComplex:
    """A bounded cochain complex of finite-dimensional spaces.

    ``differential[n]`` is the matrix of ``d^n : C^n -> C^{n+1}`` with shape
    ``(dim C^{n+1}, dim C^n)``.  Missing entries are zero maps.
    """

    __slots__ = ("space", "_d")

    def __init__(self, space: GradedVectorSpace, differential: Mapping[int, SparseMatrix] | None = None, check: bool = True):
        self.space = space
        d = {}
        for n, m in (differential or {}).items():
            want = (space.dim(n + 1), space.dim(n))
            if m.shape != want:
                raise InvalidComplex(f"d^{n} has shape {m.shape}, expected {want}")
            if m.nnz:
                d[n] = m
        self._d = d
        if check:
            self.check()

    @classmethod
    def zero(cls) -> "ChainComplex":
        return cls(GradedVectorSpace({}), {})

    @classmethod
    def concentrated(cls, labels: Sequence[str], degree: int = 0) -> "ChainComplex":
        return cls(GradedVectorSpace({degree: labels}), {})

    def d(self, n: int) -> SparseMatrix:
        m = self._d.get(n)
        if m is None:
            return SparseMatrix.zeros(self.space.dim(n + 1), self.space.dim(n))
        return m

    @property
    def differentials(self) -> dict[int, SparseMatrix]:
        return dict(self._d)

    def dim(self, n: int) -> int:
        return self.space.dim(n)

    def basis(self, n: int) -> tuple[str, ...]:
        return self.space.basis(n)

    @property
    def degrees(self) -> list[int]:
        return self.space.degrees

    def dims(self) -> dict[int, int]:
        return self.space.dims()

    def euler_characteristic(self) -> int:
        return sum((-1) ** (n % 2) * k for n, k in self.dims().items())

    def check(self) -> None:
        for n in sorted(self._d):
            nxt = self._d.get(n + 1)
            if nxt is None:
                continue
            prod = nxt @ self._d[n]
            if not prod.is_zero():
                (i, j), v = next(iter(sorted(prod.items())))
                raise InvalidComplex(
                    f"d^{n + 1} d^{n} != 0: coefficient {v} of {self.basis(n + 2)[i]!r} in dd({self.basis(n)[j]!r})"
                )

    def __repr__(self):
        return f"ChainComplex({self.dims()})"


class ChainMap:
    """Degreewise matrices ``f^n : S^n -> T^n``."""

    __slots__ = ("source", "target", "_f")

    def __init__(self, source: ChainComplex, target: ChainComplex, components: Mapping[int, SparseMatrix] | None = None, check: bool = True):
        self.source = source
        self.target = target
        f = {}
        for n, m in (components or {}).items():
            want = (target.dim(n), source.dim(n))
            if m.shape != want:
                raise NotChainMap(f"f^{n} has shape {m.shape}, expected {want}")
            if m.nnz:
                f[n] = m
        self._f = f
        if check:
            self.check()

    def f(self, n: int) -> SparseMatrix:
        m = self._f.get(n)
        if m is None:
            return SparseMatrix.zeros(self.target.dim(n), self.source.dim(n))
        return m

    @property
    def components(self) -> dict[int, SparseMatrix]:
        return dict(self._f)

    def check(self) -> None:
        degs = set(self.source.degrees) | set(self.target.degrees)
        for n in sorted(degs):
            lhs = self.target.d(n) @ self.f(n)
            rhs = self.f(n + 1) @ self.source.d(n)
            if lhs != rhs:
                raise NotChainMap(f"f does not commute with d in degree {n}")

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        """Composite ``self o other``."""
        degs = set(other.source.degrees)
        return ChainMap(other.source, self.target, {n: self.f(n) @ other.f(n) for n in degs}, check=False)

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        degs = set(self._f) | set(other._f)
        return all(self.f(n) == other.f(n) for n in degs) and self.source.dims() == other.source.dims() and self.target.dims() == other.target.dims()

    __hash__ = None

    @classmethod
    def identity(cls, c: ChainComplex) -> "ChainMap":
        return cls(c, c, {n: SparseMatrix.identity(c.dim(n)) for n in c.degrees}, check=False)

    @classmethod
    def zero(cls, s: ChainComplex, t: ChainComplex) -> "ChainMap":
        return cls(s, t, {}, check=False)

    def scale(self, c) -> "ChainMap":
        return ChainMap(self.source, self.target, {n: m.scale(c) for n, m in self._f.items()}, check=False)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        degs = set(self._f) | set(other._f)
        return ChainMap(self.source, self.target, {n: self.f(n) + other.f(n) for n in degs}, check=False)


# ---------------------------------------------------------------------------
# cohomology


@dataclass
class CohomologyGroup:
    dim: int
    representatives: list[dict[str, Fraction]] = field(default_factory=list)


_BASIS_SHUFFLE: ContextVar[random.Random | None] = ContextVar("basis_shuffle", default=None)


@contextmanager
def shuffled_bases(seed: int | None):
    """Within the block, :func:`cohomology_dims` permutes every basis at
    random before reducing.  Used to test independence of basis order."""
    token = _BASIS_SHUFFLE.set(random.Random(seed) if seed is not None else None)
    try:
        yield
    finally:
        _BASIS_SHUFFLE.reset(token)


def cohomology_dims(c: ChainComplex, field: Field = QQ) -> dict[int, int]:
    """``dim H^n`` for every degree with a nonzero group."""
    rng = _BASIS_SHUFFLE.get()
    if rng is not None:
        c = permute_basis(c, {n: rng.sample(range(c.dim(n)), c.dim(n)) for n in c.degrees})
    out = {}
    ranks = {n: linalg.rank(m, field) for n, m in c.differentials.items()}
    for n in c.degrees:
        h = c.dim(n) - ranks.get(n, 0) - ranks.get(n - 1, 0)
        if h < 0:
            raise InvalidComplex(f"negative cohomology in degree {n}; is d^2 = 0?")
        if h:
            out[n] = h
    return out


def cohomology(c: ChainComplex, field: Field = QQ, check: bool = True) -> dict[int, CohomologyGroup]:
    """Cohomology with explicit cocycle representatives in every degree.

    Degrees with zero cohomology are omitted.
    """
    if check:
        c.check()
    out = {}
    for n in c.degrees:
        bnd = Echelon() if field.is_rational else None
        bvecs = linalg.image_basis(c.d(n - 1), field) if c.dim(n - 1) else []
        cyc = linalg.kernel(c.d(n), field)
        reps = []
        if field.is_rational:
            for b in bvecs:
                bnd.add(b)
            for z in cyc:
                if bnd.add(z):
                    reps.append(z)
        else:
            # mod p: rank test through the kernel on stacked rows
            chosen = list(bvecs)
            base_rank = len(chosen)
            for z in cyc:
                trial = chosen + [z]
                m = SparseMatrix.from_columns(c.dim(n), trial).transpose()
                if linalg.rank(m, field) > len(chosen):
                    chosen.append(z)
                    reps.append(z)
            assert len(chosen) - base_rank == len(reps)
        if reps:
            labels = c.basis(n)
            out[n] = CohomologyGroup(len(reps), [{labels[i]: v for i, v in sorted(z.items())} for z in reps])
    return out


def _cycles_plus_boundaries(f: ChainMap, n: int) -> tuple[Echelon, Echelon]:
    """Echelon forms of ``B^n(T)`` and ``f(Z^n(S)) + B^n(T)``."""
    T = f.target
    bnd = Echelon()
    for b in linalg.image_basis(T.d(n - 1)) if T.dim(n - 1) and T.dim(n) else []:
        bnd.add(b)
    img = Echelon()
    img.rows = dict(bnd.rows)
    fn = f.f(n)
    for z in linalg.kernel(f.source.d(n)):
        img.add(fn.apply(z))
    return bnd, img


def induced_rank(f: ChainMap, n: int) -> int:
    """Rank of ``H^n(f)`` over Q."""
    bnd, img = _cycles_plus_boundaries(f, n)
    return img.rank - bnd.rank


def same_cohomology_image(f: ChainMap, g: ChainMap, n: int) -> bool:
    """Whether ``H^n(f)`` and ``H^n(g)`` have the same image (common target)."""
    _, a = _cycles_plus_boundaries(f, n)
    _, b = _cycles_plus_boundaries(g, n)
    if a.rank != b.rank:
        return False
    return all(a.contains(v) for v in b.rows.values())


# ---------------------------------------------------------------------------
# elementary constructions


def _tag(prefix: str, labels: Iterable[str]) -> list[str]:
    return [f"{prefix}{l}" for l in labels]


def relabel(c: ChainComplex, fn: Callable[[int, str], str]) -> ChainComplex:
    space = GradedVectorSpace({n: [fn(n, l) for l in c.basis(n)] for n in c.degrees})
    return ChainComplex(space, c.differentials, check=False)


def permute_basis(c: ChainComplex, perms: Mapping[int, Sequence[int]]) -> ChainComplex:
    """Reorder each degree's basis: old index ``i`` moves to ``perms[n][i]``."""
    comps = {}
    for n in c.degrees:
        p = perms.get(n, range(c.dim(n)))
        labels = [None] * c.dim(n)
        for i, l in enumerate(c.basis(n)):
            labels[p[i]] = l
        comps[n] = labels
    d = {}
    for n, m in c.differentials.items():
        d[n] = m.permute(perms.get(n + 1), perms.get(n))
    return ChainComplex(GradedVectorSpace(comps), d, check=False)


def shift(c: ChainComplex, k: int) -> ChainComplex:
    space = GradedVectorSpace({n - k: c.basis(n) for n in c.degrees})
    sign = -1 if k % 2 else 1
    d = {n - k: m.scale(sign) if sign < 0 else m for n, m in c.differentials.items()}
    return ChainComplex(space, d, check=False)


def shift_map(f: ChainMap, k: int) -> ChainMap:
    return ChainMap(shift(f.source, k), shift(f.target, k), {n - k: m for n, m in f.components.items()}, check=False)


def dual(c: ChainComplex) -> ChainComplex:
    space = GradedVectorSpace({-n: [f"{l}*" for l in c.basis(n)] for n in c.degrees})
    d = {}
    for n, m in c.differentials.items():
        # d^n: C^n -> C^{n+1} dualizes to degree -n-1 -> -n
        deg = -n - 1
        sign = 1 if deg % 2 else -1
        d[deg] = m.transpose().scale(sign)
    return ChainComplex(space, d, check=False)


def dual_map(f: ChainMap) -> ChainMap:
    """Transpose ``T^v -> S^v``."""
    return ChainMap(dual(f.target), dual(f.source), {-n: m.transpose() for n, m in f.components.items()}, check=False)


def direct_sum(complexes: Sequence[ChainComplex], prefixes: Sequence[str] | None = None) -> ChainComplex:
    if prefixes is None:
        prefixes = [f"{i}|" for i in range(len(complexes))]
    degs = sorted(set().union(*(c.degrees for c in complexes))) if complexes else []
    space = GradedVectorSpace({n: [l for c, p in zip(complexes, prefixes) for l in _tag(p, c.basis(n))] for n in degs})
    d = {}
    for n in degs:
        blocks = [[c.d(n) if i == j else None for j, c in enumerate(complexes)] for i, _ in enumerate(complexes)]
        d[n] = SparseMatrix.block(blocks, [c.dim(n + 1) for c in complexes], [c.dim(n) for c in complexes])
    return ChainComplex(space, d, check=False)


def sum_map(maps: Sequence[ChainMap], source: ChainComplex, target: ChainComplex, axis: str) -> ChainMap:
    """``axis="rows"``: (f_1, ..., f_r) into a direct sum target;
    ``axis="cols"``: [f_1 ... f_r] out of a direct sum source."""
    degs = set(source.degrees)
    comps = {}
    for n in degs:
        if axis == "rows":
            comps[n] = SparseMatrix.block([[f.f(n)] for f in maps], [f.target.dim(n) for f in maps], [source.dim(n)])
        else:
            comps[n] = SparseMatrix.block([[f.f(n) for f in maps]], [target.dim(n)], [f.source.dim(n) for f in maps])
    return ChainMap(source, target, comps, check=False)


def cone(f: ChainMap, check: bool = True) -> ChainComplex:
    if check:
        f.check()
    M, N = f.source, f.target
    degs = sorted(set(n - 1 for n in M.degrees) | set(N.degrees))
    space = GradedVectorSpace({n: _tag("s|", M.basis(n + 1)) + _tag("t|", N.basis(n)) for n in degs})
    d = {}
    for n in degs:
        blocks = [[-M.d(n + 1), None], [f.f(n + 1), N.d(n)]]
        d[n] = SparseMatrix.block(blocks, [M.dim(n + 2), N.dim(n + 1)], [M.dim(n + 1), N.dim(n)])
    return ChainComplex(space, d, check=False)


def cone_map(f: ChainMap, g: ChainMap, alpha: ChainMap, beta: ChainMap, check: bool = False) -> ChainMap:
    """Map ``cone(f) -> cone(g)`` induced by a strictly commuting square
    ``g alpha = beta f``."""
    if check and g @ alpha != beta @ f:
        raise NotChainMap("square does not commute")
    src, tgt = cone(f, check=False), cone(g, check=False)
    comps = {}
    for n in src.degrees:
        comps[n] = SparseMatrix.block(
            [[alpha.f(n + 1), None], [None, beta.f(n)]],
            [g.source.dim(n + 1), g.target.dim(n)],
            [f.source.dim(n + 1), f.target.dim(n)],
        )
    return ChainMap(src, tgt, comps, check=False)


def tensor(a: ChainComplex, b: ChainComplex) -> ChainComplex:
    degs = sorted({i + j for i in a.degrees for j in b.degrees})
    # basis of degree n: blocks (i, n-i) for i ascending
    blocks = {n: [(i, n - i) for i in a.degrees if b.dim(n - i)] for n in degs}
    space = GradedVectorSpace({n: [f"{x}(x){y}" for i, j in blocks[n] for x in a.basis(i) for y in b.basis(j)] for n in degs})
    d = {}
    for n in degs:
        src = blocks[n]
        tgt = blocks.get(n + 1, [])
        if not tgt:
            continue
        rows = []
        for (ti, tj) in tgt:
            row = []
            for (si, sj) in src:
                m = None
                if ti == si + 1 and tj == sj:
                    m = a.d(si).kron(SparseMatrix.identity(b.dim(sj)))
                elif ti == si and tj == sj + 1:
                    m = SparseMatrix.identity(a.dim(si)).kron(b.d(sj))
                    if si % 2:
                        m = -m
                row.append(m)
            rows.append(row)
        d[n] = SparseMatrix.block(rows, [a.dim(i) * b.dim(j) for i, j in tgt], [a.dim(i) * b.dim(j) for i, j in src])
    return ChainComplex(space, d, check=False)


def hopullback(f: ChainMap, g: ChainMap) -> ChainComplex:
    """Homotopy fibre product of ``B -f-> A <-g- C``: the fibre of
    ``(f, -g) : B (+) C -> A``."""
    if f.target.dims() != g.target.dims():
        raise NotChainMap("hopullback legs have different targets")
    f.check()
    g.check()
    src = direct_sum([f.source, g.source], ["B|", "C|"])
    h = sum_map([f, g.scale(-1)], src, f.target, axis="cols")
    return shift(cone(h, check=False), -1)


def subcomplex(c: ChainComplex, bases: Mapping[int, list[Vector]], label: str = "v") -> ChainComplex:
    """The subcomplex spanned by the given vectors (must be d-stable)."""
    comps = {n: [f"{label}{n}_{i}" for i in range(len(vs))] for n, vs in bases.items()}
    d = {}
    for n, vs in bases.items():
        tgt = bases.get(n + 1, [])
        if not vs:
            continue
        tmat = SparseMatrix.from_columns(c.dim(n + 1), tgt)
        cols = []
        for v in vs:
            img = c.d(n).apply(v)
            if not img:
                cols.append({})
                continue
            x = linalg.solve(tmat, img)
            if x is None:
                raise InvalidComplex(f"span in degree {n} is not stable under d")
            cols.append(x)
        d[n] = SparseMatrix.from_columns(len(tgt), cols)
    return ChainComplex(GradedVectorSpace(comps), d)


def strict_pullback(f: ChainMap, g: ChainMap) -> ChainComplex:
    """Degreewise kernel of ``(f, -g)``."""
    src = direct_sum([f.source, g.source], ["B|", "C|"])
    h = sum_map([f, g.scale(-1)], src, f.target, axis="cols")
    bases = {n: linalg.kernel(h.f(n)) for n in src.degrees}
    return subcomplex(src, bases, label="k")


# ---------------------------------------------------------------------------
# diagrams over finite posets


class PosetDiagram:
    """A functor from a finite poset to complexes.

    ``arrows`` maps generating pairs ``(x, y)`` with ``x < y`` to chain maps
    ``values[x] -> values[y]``; the order is their transitive closure.
    """

    def __init__(self, nodes: Sequence[Hashable], values: Mapping[Hashable, ChainComplex], arrows: Mapping[tuple, ChainMap], check: bool = True):
        self.nodes = list(nodes)
        if len(set(self.nodes)) != len(self.nodes):
            raise InvalidDiagram("duplicate nodes")
        self.values = dict(values)
        self.arrows = dict(arrows)
        missing = [x for x in self.nodes if x not in self.values]
        if missing:
            raise InvalidDiagram(f"no value for nodes {missing}")
        self._succ = {x: [] for x in self.nodes}
        for (x, y) in self.arrows:
            if x not in self._succ or y not in self._succ:
                raise InvalidDiagram(f"arrow {(x, y)} between unknown nodes")
            self._succ[x].append(y)
        self._above = {x: self._reach(x) for x in self.nodes}
        for x in self.nodes:
            if x in self._above[x]:
                raise InvalidDiagram(f"order relation has a cycle through {x!r}")
        if check:
            self.check()

    def _reach(self, x) -> set:
        seen, stack = set(), list(self._succ[x])
        while stack:
            y = stack.pop()
            if y not in seen:
                seen.add(y)
                stack.extend(self._succ[y])
        return seen

    def less(self, x, y) -> bool:
        return y in self._above[x]

    def _paths(self, x, y):
        if x == y:
            yield []
            return
        for z in self._succ[x]:
            if z == y or y in self._above[z]:
                for rest in self._paths(z, y):
                    yield [(x, z)] + rest

    def map(self, x, y) -> ChainMap:
        if x == y:
            return ChainMap.identity(self.values[x])
        return self._composite(next(self._paths(x, y)))

    def _composite(self, path) -> ChainMap:
        out = self.arrows[path[0]]
        for e in path[1:]:
            out = self.arrows[e] @ out
        return out

    def check(self) -> None:
        for (x, y), f in self.arrows.items():
            if f.source.dims() != self.values[x].dims() or f.target.dims() != self.values[y].dims():
                raise InvalidDiagram(f"arrow {(x, y)} has the wrong source or target")
            try:
                f.check()
            except NotChainMap as exc:
                raise InvalidDiagram(f"arrow {(x, y)} is not a chain map: {exc}") from exc
        for x in self.nodes:
            for y in self._above[x]:
                paths = list(self._paths(x, y))
                first = self._composite(paths[0])
                for p in paths[1:]:
                    if self._composite(p) != first:
                        raise InvalidDiagram(f"composites from {x!r} to {y!r} disagree")

    def chains(self) -> list[tuple]:
        """Nondegenerate chains ``x0 < ... < xk`` in a fixed order."""
        out = []
        frontier = [(x,) for x in self.nodes]
        while frontier:
            out.extend(frontier)
            nxt = []
            for ch in frontier:
                for y in self.nodes:
                    if self.less(ch[-1], y):
                        nxt.append(ch + (y,))
            frontier = nxt
        return out


def hocolim(diagram: PosetDiagram) -> ChainComplex:
    """Bousfield-Kan homotopy colimit as the total complex of the bar
    construction over nondegenerate chains.

    The chain ``x0 < ... < xk`` contributes ``D(x0)[k]``; the simplicial
    differential is ``sum_i (-1)^i d_i`` with ``d_0`` applying ``D(x0 -> x1)``.
    """
    chains = diagram.chains()
    vals = diagram.values
    # summands of total degree n: (chain, internal degree n + k)
    summands: dict[int, list[tuple[tuple, int]]] = {}
    for ch in chains:
        k = len(ch) - 1
        for m in vals[ch[0]].degrees:
            summands.setdefault(m - k, []).append((ch, m))
    space = {}
    offsets: dict[int, dict[tuple, int]] = {}
    for n, items in summands.items():
        labels, off, pos = [], {}, 0
        for ch, m in items:
            off[ch] = pos
            name = "<".join(str(x) for x in ch)
            labels.extend(f"[{name}]{l}" for l in vals[ch[0]].basis(m))
            pos += vals[ch[0]].dim(m)
        space[n] = labels
        offsets[n] = off
    gspace = GradedVectorSpace(space)

    d = {}
    for n, items in summands.items():
        if n + 1 not in offsets:
            continue
        triples = []
        toff = offsets[n + 1]
        for ch, m in items:
            k = len(ch) - 1
            soff = offsets[n][ch]
            # internal differential, sign (-1)^k
            if ch in toff:
                sign = -1 if k % 2 else 1
                for (i, j), v in vals[ch[0]].d(m).items():
                    triples.append((toff[ch] + i, soff + j, sign * v))
            # faces
            for i in (range(k + 1) if k else ()):
                face = ch[:i] + ch[i + 1 :]
                if face not in toff:
                    continue
                sign = -1 if i % 2 else 1
                if i == 0:
                    fm = diagram.map(ch[0], ch[1]).f(m)
                    for (r, c), v in fm.items():
                        triples.append((toff[face] + r, soff + c, sign * v))
                else:
                    for j in range(vals[ch[0]].dim(m)):
                        triples.append((toff[face] + j, soff + j, sign))
        d[n] = SparseMatrix.from_triples(gspace.dim(n + 1), gspace.dim(n), triples)
    return ChainComplex(gspace, d, check=False)


# ---------------------------------------------------------------------------
# cubes


class CubeDiagram:
    """A strictly commuting cube: vertices are subsets of ``directions`` and
    ``edge(E, i)`` is a chain map ``X(E) -> X(E - {i})`` for ``i in E``."""

    def __init__(self, directions: Sequence, vertex: Callable[[frozenset], ChainComplex], edge: Callable[[frozenset, object], ChainMap]):
        self.directions = tuple(directions)
        self._vertex = lru_cache(maxsize=None)(vertex)
        self._edge = lru_cache(maxsize=None)(edge)

    def vertex(self, e: frozenset) -> ChainComplex:
        return self._vertex(frozenset(e))

    def edge(self, e: frozenset, i) -> ChainMap:
        return self._edge(frozenset(e), i)

    def check(self) -> None:
        dirs = self.directions
        for r in range(len(dirs) + 1):
            for e in itertools.combinations(dirs, r):
                e = frozenset(e)
                for i, j in itertools.combinations(sorted(e, key=dirs.index), 2):
                    a = self.edge(e - {i}, j) @ self.edge(e, i)
                    b = self.edge(e - {j}, i) @ self.edge(e, j)
                    if a != b:
                        raise InvalidDiagram(f"cube face at {sorted(e)} in directions {i},{j} does not commute")


def total_cofiber(cube: CubeDiagram) -> ChainComplex:
    """Iterated mapping cone of a cube, one direction at a time."""

    @lru_cache(maxsize=None)
    def tcof(fixed: frozenset, dirs: tuple) -> ChainComplex:
        if not dirs:
            return cube.vertex(fixed)
        return cone(tmap(fixed, dirs[:-1], dirs[-1]), check=False)

    @lru_cache(maxsize=None)
    def tmap(fixed: frozenset, dirs: tuple, i) -> ChainMap:
        # map tcof(fixed + {i}, dirs) -> tcof(fixed, dirs)
        if not dirs:
            return cube.edge(fixed | {i}, i)
        j, rest = dirs[-1], dirs[:-1]
        inner_src = tmap(fixed | {i}, rest, j)
        inner_tgt = tmap(fixed, rest, j)
        alpha = tmap(fixed | {j}, rest, i)
        beta = tmap(fixed, rest, i)
        return cone_map(inner_src, inner_tgt, alpha, beta)

    return tcof(frozenset(), cube.directions)


def punctured_cube_hocolim(cube: CubeDiagram) -> ChainComplex:
    """Homotopy colimit of the cube with its empty vertex removed, computed
    recursively: with the empty vertex replaced by zero, the total cofiber is
    the hocolim shifted by one."""
    directions = cube.directions
    zero = ChainComplex.zero()

    def vertex(e):
        return zero if not e else cube.vertex(e)

    def edge(e, i):
        if e == frozenset({i}):
            return ChainMap.zero(cube.vertex(e), zero)
        return cube.edge(e, i)

    extended = CubeDiagram(directions, vertex, edge)
    return shift(total_cofiber(extended), -1)


def punctured_cube_poset_diagram(cube: CubeDiagram) -> PosetDiagram:
    """The same punctured cube as a poset diagram (reverse inclusion) for
    the bar construction."""
    dirs = cube.directions
    nodes = []
    for r in range(len(dirs), 0, -1):
        for e in itertools.combinations(dirs, r):
            nodes.append(frozenset(e))
    names = {e: "{" + ",".join(str(i) for i in dirs if i in e) + "}" for e in nodes}
    values = {names[e]: cube.vertex(e) for e in nodes}
    arrows = {}
    for e in nodes:
        for i in e:
            if len(e) > 1:
                arrows[(names[e], names[e - {i}])] = cube.edge(e, i)
    return PosetDiagram([names[e] for e in nodes], values, arrows)


# ---------------------------------------------------------------------------
# building complexes from keyed bases


def complex_from_rule(keys: Mapping[int, Sequence[Hashable]], rule: Callable[[Hashable], Mapping[Hashable, object]], label: Callable[[Hashable], str] = str, check: bool = True) -> ChainComplex:
    """Complex on the given keyed basis with ``d(key) = rule(key)``.

    ``rule`` must return keys of the next degree; keys missing from the
    basis are treated as zero (useful for truncated quotients).
    """
    keys = {n: list(ks) for n, ks in keys.items() if ks}
    pos = {n: {k: i for i, k in enumerate(ks)} for n, ks in keys.items()}
    space = GradedVectorSpace({n: [label(k) for k in ks] for n, ks in keys.items()})
    d = {}
    for n, ks in keys.items():
        tgt = pos.get(n + 1)
        if not tgt:
            continue
        ent = {}
        for j, k in enumerate(ks):
            for k2, c in rule(k).items():
                i = tgt.get(k2)
                if i is not None and c:
                    ent[(i, j)] = ent.get((i, j), 0) + c
        d[n] = SparseMatrix(len(keys[n + 1]), len(ks), ent)
    return ChainComplex(space, d, check=check)


def map_from_rule(source: ChainComplex, target: ChainComplex, source_keys: Mapping[int, Sequence[Hashable]], target_keys: Mapping[int, Sequence[Hashable]], rule: Callable[[Hashable], Mapping[Hashable, object]], check: bool = True) -> ChainMap:
    """Degree-0 map defined on keyed bases (the key lists used to build the complexes)."""
    comps = {}
    for n, ks in source_keys.items():
        tpos = {k: i for i, k in enumerate(target_keys.get(n, ()))}
        if not ks or not tpos:
            continue
        ent = {}
        for j, k in enumerate(ks):
            for k2, c in rule(k).items():
                i = tpos.get(k2)
                if i is not None and c:
                    ent[(i, j)] = ent.get((i, j), 0) + c
        comps[n] = SparseMatrix(len(tpos), len(ks), ent)
    return ChainMap(source, target, comps, check=check)
