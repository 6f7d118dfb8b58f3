"""Finite truncations of higher formal loop and bubble spaces.

Coordinates are symbols ``a_alpha`` for multi-indices ``alpha`` in Z^d, all
in degree 0.  Directions are numbered ``1..d`` and subsets of directions are
frozensets.  ``n`` bounds the negative (ind) direction and ``p`` the
non-negative (pro) direction.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from . import linalg
from .cdga import BaseCdga, monomials, restriction_module, square_zero, truncated_polynomial
from .exactalg import (
    ChainComplex,
    ChainMap,
    CubeDiagram,
    GradedVectorSpace,
    InvalidDiagram,
    cohomology_dims,
    direct_sum,
    dual,
    dual_map,
    hocolim,
    hopullback,
    punctured_cube_hocolim,
    punctured_cube_poset_diagram,
)
from .sparse import SparseMatrix

MAX_DIMENSION = 4
MODES = ("nonempty", "all")

Subset = frozenset


class InvalidBounds(ValueError):
    pass


def _subset(e: Iterable[int], d: int) -> Subset:
    s = frozenset(int(i) for i in e)
    if any(i < 1 or i > d for i in s):
        raise InvalidBounds(f"subset {sorted(s)} is not inside 1..{d}")
    return s


def _check_bounds(d: int, n: int, p: int) -> None:
    if d < 1 or d > MAX_DIMENSION:
        raise InvalidBounds(f"d must lie in 1..{MAX_DIMENSION}")
    if n < 0 or p < 0:
        raise InvalidBounds("n and p must be non-negative")


def subset_name(e: Iterable[int]) -> str:
    return "{" + ",".join(str(i) for i in sorted(e)) + "}"


def subsets(d: int, nonempty: bool = False) -> list[Subset]:
    dirs = range(1, d + 1)
    start = 1 if nonempty else 0
    return [frozenset(c) for r in range(start, d + 1) for c in itertools.combinations(dirs, r)]


# ---------------------------------------------------------------------------
# generator windows


@dataclass(frozen=True)
class LoopWindow:
    """Multi-indices with ``-n [i in E] <= alpha_i <= p``."""

    d: int
    E: Subset
    n: int
    p: int

    def ranges(self) -> list[range]:
        return [range(-self.n if i in self.E else 0, self.p + 1) for i in range(1, self.d + 1)]

    def generators(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*self.ranges()))

    def formula(self) -> int:
        k = len(self.E)
        return (self.n + self.p + 1) ** k * (self.p + 1) ** (self.d - k)


@dataclass(frozen=True)
class GeneratorCount:
    count: int
    formula: int
    generators: list[tuple[int, ...]]

    @property
    def agrees(self) -> bool:
        return self.count == self.formula


def count_generators(d: int, E: Iterable[int], n: int, p: int) -> GeneratorCount:
    _check_bounds(d, n, p)
    w = LoopWindow(d, _subset(E, d), n, p)
    gens = w.generators()
    return GeneratorCount(len(gens), w.formula(), gens)


def md_symbols(d: int, D: Iterable[int], p: int, n: int) -> list[tuple[int, ...]]:
    """Multi-indices of ``M_D^{p,n}``: ``-n <= alpha_i < 0`` on ``D`` and
    ``0 <= alpha_i <= p`` elsewhere."""
    D = _subset(D, d)
    ranges = [range(-n, 0) if i in D else range(0, p + 1) for i in range(1, d + 1)]
    return list(itertools.product(*ranges))


def symbol_label(alpha: tuple[int, ...]) -> str:
    return "a(" + ",".join(str(x) for x in alpha) + ")"


def md_complex(d: int, D: Iterable[int], p: int, n: int) -> ChainComplex:
    """The free complex in degree 0 on the symbols of ``M_D^{p,n}``."""
    return ChainComplex.concentrated([symbol_label(a) for a in md_symbols(d, D, p, n)])


def loop_family(d: int, n: int, p: int) -> dict[Subset, ChainComplex]:
    _check_bounds(d, n, p)
    return {D: md_complex(d, D, p, n) for D in subsets(d)}


def random_family(rng: random.Random, d: int, max_dim: int = 2) -> dict[Subset, ChainComplex]:
    """One random two-term complex with components of dim ``<= max_dim`` per subset."""
    fam = {}
    for D in subsets(d):
        lo = rng.choice((-1, 0))
        a, b = rng.randint(0, max_dim), rng.randint(0, max_dim)
        m = SparseMatrix.from_dense([[rng.randint(-2, 2) for _ in range(a)] for _ in range(b)], a) if b else SparseMatrix(0, a)
        comps = {}
        if a:
            comps[lo] = [f"u{i}" for i in range(a)]
        if b:
            comps[lo + 1] = [f"v{i}" for i in range(b)]
        fam[D] = ChainComplex(GradedVectorSpace(comps), {lo: m} if a and b else {})
    return fam


# ---------------------------------------------------------------------------
# the punctured-cube diagram of subsets


def subsets_cube(family: Mapping[Subset, ChainComplex], d: int, mode: str) -> CubeDiagram:
    """``E -> (+)_{D <= E} M_D`` (``D`` nonempty in ``"nonempty"`` mode) with
    the projections ``X(E) -> X(E - {i})``."""
    if mode not in MODES:
        raise InvalidDiagram(f"unknown mode {mode!r}")
    if d < 1 or d > MAX_DIMENSION:
        raise InvalidDiagram(f"d must lie in 1..{MAX_DIMENSION}")
    needed = subsets(d, nonempty=(mode == "nonempty"))
    missing = [subset_name(D) for D in needed if D not in family]
    if missing:
        raise InvalidDiagram(f"family has no complex for {', '.join(missing)}")

    def summands(e: Subset) -> list[Subset]:
        return [D for D in needed if D <= e]

    def vertex(e: Subset) -> ChainComplex:
        ds = summands(e)
        return direct_sum([family[D] for D in ds], [f"D{subset_name(D)}|" for D in ds])

    def edge(e: Subset, i: int) -> ChainMap:
        src, tgt = summands(e), summands(e - {i})
        s, t = vertex(e), vertex(e - {i})
        comps = {}
        for deg in s.degrees:
            blocks = [[SparseMatrix.identity(family[D].dim(deg)) if D == D2 else None for D in src] for D2 in tgt]
            comps[deg] = SparseMatrix.block(blocks, [family[D].dim(deg) for D in tgt], [family[D].dim(deg) for D in src])
        return ChainMap(s, t, comps, check=False)

    return CubeDiagram(tuple(range(1, d + 1)), vertex, edge)


def _expected_dims(family: Mapping[Subset, ChainComplex], d: int, mode: str) -> dict[int, int]:
    out: dict[int, int] = {}
    top = frozenset(range(1, d + 1))
    for deg, v in cohomology_dims(family[top]).items():
        out[deg - (d - 1)] = out.get(deg - (d - 1), 0) + v
    if mode == "all":
        for deg, v in cohomology_dims(family[frozenset()]).items():
            out[deg] = out.get(deg, 0) + v
    return {k: v for k, v in sorted(out.items()) if v}


@dataclass
class ColimReport:
    d: int
    mode: str
    bar_dims: dict[int, int]
    recursive_dims: dict[int, int]
    expected_dims: dict[int, int]
    note: str = ""

    @property
    def implementations_agree(self) -> bool:
        return self.bar_dims == self.recursive_dims

    @property
    def ok(self) -> bool:
        return self.implementations_agree and self.bar_dims == self.expected_dims


def subset_hocolim(family: Mapping[Subset, ChainComplex], d: int, mode: str) -> ChainComplex:
    cube = subsets_cube(family, d, mode)
    return hocolim(punctured_cube_poset_diagram(cube))


def subsets_colim_check(family: Mapping[Subset, ChainComplex], d: int, mode: str = "nonempty") -> ColimReport:
    """Homotopy colimit over nonempty ``E`` of ``(+)_{D <= E} M_D`` against
    ``M_F[d-1]`` (plus ``M_empty`` in ``"all"`` mode)."""
    cube = subsets_cube(family, d, mode)
    bar = hocolim(punctured_cube_poset_diagram(cube))
    rec = punctured_cube_hocolim(cube)
    note = "" if mode == "nonempty" else "all-D mode: the empty summand is constant and contributes M_empty in degree 0"
    clean = lambda h: {k: v for k, v in sorted(h.items()) if v}  # noqa: E731
    return ColimReport(d, mode, clean(cohomology_dims(bar)), clean(cohomology_dims(rec)), _expected_dims(family, d, mode), note)


# ---------------------------------------------------------------------------
# loop tangent and bubble fibre


@dataclass
class DimensionReport:
    d: int
    n: int
    p: int
    dims: dict[int, int]
    expected: dict[int, int]
    parts: dict[str, dict[int, int]] = field(default_factory=dict)
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.dims == self.expected


def _combine(*tables: Mapping[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for t in tables:
        for k, v in t.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in sorted(out.items()) if v}


def loop_tangent(d: int, n: int, p: int) -> DimensionReport:
    """Cotangent dims of the truncated loop space: the subsets colimit in
    all-D mode against ``M_empty^{p,0} (+) M_F^{0,n}[d-1]``."""
    if n < 1 or p < 1:
        raise InvalidBounds("loop_tangent needs n, p >= 1")
    fam = loop_family(d, n, p)
    rep = subsets_colim_check(fam, d, "all")
    parts = {"M_empty": {0: (p + 1) ** d}, "M_F": {-(d - 1): n ** d}}
    return DimensionReport(d, n, p, rep.bar_dims, _combine(*parts.values()), parts, {"recursive_dims": rep.recursive_dims, "implementations_agree": rep.implementations_agree})


def _empty_projection(c: ChainComplex, m_empty: ChainComplex) -> ChainMap:
    """The cocone from the bar hocolim onto the constant ``M_empty`` summand."""
    prefix = f"D{subset_name(())}|"
    comps = {}
    for deg in c.degrees:
        idx = {l: i for i, l in enumerate(m_empty.basis(deg))}
        ent = {}
        for j, lab in enumerate(c.basis(deg)):
            chain, _, inner = lab[1:].partition("]")
            if "<" in chain or not inner.startswith(prefix):
                continue
            ent[(idx[inner[len(prefix):]], j)] = 1
        if idx:
            comps[deg] = SparseMatrix(len(idx), c.dim(deg), ent)
    return ChainMap(c, m_empty, comps)


def bubble_fiber_check(d: int, n: int, p: int) -> DimensionReport:
    """Cotangent dims of ``germs x_loops germs``.

    Tangent complexes pull back: ``T = T_0 x_{T_C} T_0`` along the dual of the
    projection ``C -> M_empty^{p,0}``, where ``C`` is the all-D colimit.  The
    cotangent is the dual of ``T``; expected ``M_empty^{p,0} (+) M_F^{0,n}[d]``.
    """
    if n < 1 or p < 1:
        raise InvalidBounds("bubble_fiber_check needs n, p >= 1")
    fam = loop_family(d, n, p)
    c = subset_hocolim(fam, d, "all")
    m0 = fam[frozenset()]
    pi = _empty_projection(c, m0)
    t = dual_map(pi)
    tangent = hopullback(t, t)
    dims = {k: v for k, v in sorted(cohomology_dims(dual(tangent)).items()) if v}
    parts = {"M_empty": {0: (p + 1) ** d}, "M_F": {-d: n ** d}}
    return DimensionReport(d, n, p, dims, _combine(*parts.values()), parts, {"colimit_dims": {k: v for k, v in sorted(cohomology_dims(c).items()) if v}})


# ---------------------------------------------------------------------------
# formal sphere and the residue pairing


@dataclass
class FormalSphere:
    """``A_p (+) A_n[-d]``; base monomials first, then the module copy."""

    d: int
    n: int
    p: int
    algebra: BaseCdga

    @property
    def base_dim(self) -> int:
        return self.p ** self.d

    @property
    def module_dim(self) -> int:
        return self.n ** self.d

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def module_index(self, exponents: tuple[int, ...]) -> int:
        return self.base_dim + monomials(self.d, self.n).index(tuple(exponents))

    def socle(self) -> int:
        """Index of the top module monomial ``x^{(n-1, ..., n-1)}``."""
        return self.module_index((self.n - 1,) * self.d)

    def residue(self, x: Mapping[int, Fraction]) -> Fraction:
        return Fraction(x.get(self.socle(), 0))


def formal_sphere(d: int, n: int, p: int) -> FormalSphere:
    if n < 1 or p < n:
        raise InvalidBounds(f"the formal sphere needs p >= n >= 1, got n={n}, p={p}")
    if d < 1 or d > MAX_DIMENSION:
        raise InvalidBounds(f"d must lie in 1..{MAX_DIMENSION}")
    a_p, a_n = truncated_polynomial(d, p), truncated_polynomial(d, n)
    idx_n = {m: i for i, m in enumerate(monomials(d, n))}
    hom = {i: {idx_n[m]: 1} for i, m in enumerate(monomials(d, p)) if m in idx_n}
    module = restriction_module(a_n, a_p, hom, shift=d, prefix="u.")
    return FormalSphere(d, n, p, square_zero(a_p, module))


@dataclass(frozen=True)
class SymplecticTarget:
    m: int

    @property
    def omega(self) -> SparseMatrix:
        m = self.m
        ent = {}
        for i in range(m):
            ent[(i, m + i)] = 1
            ent[(m + i, i)] = -1
        return SparseMatrix(2 * m, 2 * m, ent)

    def check(self) -> bool:
        w = self.omega
        return w.transpose() == -w and linalg.is_invertible(w)


@dataclass
class PairingReport:
    d: int
    m: int
    n: int
    p: int
    matrix: SparseMatrix
    cross_block: SparseMatrix
    residue_matrix: SparseMatrix
    degrees: list[int]
    rank: int
    same_degree_blocks_zero: bool
    antisymmetric: bool
    cross_is_residue_tensor_omega: bool

    @property
    def left_kernel_dim(self) -> int:
        return self.cross_block.nrows - self.rank

    @property
    def right_kernel_dim(self) -> int:
        return self.cross_block.ncols - self.rank

    @property
    def invertible(self) -> bool:
        return self.left_kernel_dim == 0 and self.right_kernel_dim == 0

    @property
    def ok(self) -> bool:
        return self.invertible and self.same_degree_blocks_zero and self.antisymmetric and self.cross_is_residue_tensor_omega


def bubble_pairing(d: int, target: SymplecticTarget, n: int, p: int | None = None) -> PairingReport:
    """``<u e_i, v e_j> = omega_ij r_n(u v)`` on ``(A_p (+) A_n[-d]) (x) k^{2m}``.

    With ``p > n`` the pairing is degenerate; the report carries the kernel
    dimensions of the degree-0 / degree-d block.
    """
    p = n if p is None else p
    if not target.check():
        raise ValueError("target form is not symplectic")
    sphere = formal_sphere(d, n, p)
    alg = sphere.algebra
    w = target.omega
    two_m = 2 * target.m
    N = alg.dim
    # residue of basis products
    res = {}
    for b in range(N):
        for c in range(N):
            r = sphere.residue(alg.basis_product(b, c))
            if r:
                res[(b, c)] = r
    ent = {}
    for (b, c), r in res.items():
        for (i, j), o in w.items():
            ent[(b * two_m + i, c * two_m + j)] = o * r
    mat = SparseMatrix(N * two_m, N * two_m, ent)
    degrees = [alg.degrees[b] for b in range(N) for _ in range(two_m)]
    low = [k for k in range(N * two_m) if degrees[k] == 0]
    high = [k for k in range(N * two_m) if degrees[k] == d]
    cross = mat.submatrix(low, high)
    same_zero = mat.submatrix(low, low).is_zero() and mat.submatrix(high, high).is_zero()
    signs = SparseMatrix(mat.nrows, mat.ncols, {(k, l): (v if degrees[k] * degrees[l] % 2 else -v) for (k, l), v in mat.items()})
    anti = mat == signs.transpose()
    nb = sphere.base_dim
    R = SparseMatrix(nb, sphere.module_dim, {(b, c - nb): r for (b, c), r in res.items() if b < nb <= c})
    return PairingReport(d, target.m, n, p, mat, cross, R, degrees, linalg.rank(cross), same_zero, anti, cross == R.kron(w))


# ---------------------------------------------------------------------------
# Hilbert functions of the window algebras


def hilbert_GdE(d: int, E: Iterable[int], n: int, p: int, m: int, degree_cutoff: int) -> list[int]:
    """Monomial counts per total degree ``0..cutoff`` in the generators of the
    window, with ``a_alpha^m = 0`` whenever some ``alpha_i < 0``."""
    if m < 1:
        raise InvalidBounds("m must be positive")
    if degree_cutoff < 0:
        raise InvalidBounds("degree cutoff must be non-negative")
    gens = count_generators(d, E, n, p).generators
    series = [1] + [0] * degree_cutoff
    for alpha in gens:
        cap = m - 1 if any(x < 0 for x in alpha) else degree_cutoff
        new = [0] * (degree_cutoff + 1)
        for k, c in enumerate(series):
            if c:
                for e in range(0, min(cap, degree_cutoff - k) + 1):
                    new[k + e] += c
        series = new
    return series
