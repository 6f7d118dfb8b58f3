"""Koszul complexes on powers of variables, residue pairings and truncated
local cohomology of monomial modules.

Every complex here is multigraded by ``Z^d`` and the differentials preserve
the multidegree, so each computation splits into finite slices.  A Koszul
generator ``xi`` with ``d(xi) = x_i^e`` has cohomological degree -1 and
internal multidegree ``e * u_i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cdga import NotAModule, monomial_label, monomials, truncated_polynomial
from .exactalg import (
    ChainComplex,
    ChainMap,
    cohomology_dims,
    complex_from_rule,
    cone,
    induced_rank,
    map_from_rule,
    same_cohomology_image,
)
from .scalars import QQ, Field
from .sparse import SparseMatrix

Multidegree = tuple[int, ...]


class WindowTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class PolyRing:
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("a polynomial ring needs at least one variable")


@dataclass(frozen=True)
class MonomialModule:
    """The cyclic module ``A/I`` for a monomial ideal ``I`` given by generator
    exponent vectors.  No generators means ``A`` itself."""

    d: int
    ideal: tuple[tuple[int, ...], ...] = ()
    name: str = "A"

    def __post_init__(self):
        for g in self.ideal:
            if len(g) != self.d:
                raise NotAModule(f"ideal generator {g} has {len(g)} exponents, expected {self.d}")
            if any(e < 0 for e in g):
                raise NotAModule(f"ideal generator {g} has a negative exponent")

    @classmethod
    def ring(cls, d: int) -> "MonomialModule":
        return cls(d, (), "A")

    @classmethod
    def residue_field(cls, d: int) -> "MonomialModule":
        return cls(d, tuple(tuple(int(i == j) for j in range(d)) for i in range(d)), "k")

    @classmethod
    def parse(cls, d: int, spec) -> "MonomialModule":
        if spec in (None, "ring", "A"):
            return cls.ring(d)
        if spec in ("residue", "k"):
            return cls.residue_field(d)
        if isinstance(spec, dict) and set(spec) <= {"ideal"}:
            try:
                gens = tuple(tuple(int(e) for e in g) for g in spec.get("ideal", ()))
            except (TypeError, ValueError) as exc:
                raise NotAModule(f"bad ideal generators: {exc}") from None
            return cls(d, gens, "A/I")
        raise NotAModule(f"unrecognised module description {spec!r}")

    def nonzero(self, b: Sequence[int]) -> bool:
        """Whether the monomial ``x^b`` survives in ``A/I``."""
        if any(e < 0 for e in b):
            return False
        return not any(all(bi >= gi for bi, gi in zip(b, g)) for g in self.ideal)

    @property
    def lag(self) -> int:
        return max((max(g) for g in self.ideal), default=0)


# ---------------------------------------------------------------------------
# generic Koszul slices


@dataclass(frozen=True)
class KGen:
    name: str
    var: int
    power: int


def _shift(a: Sequence[int], gens: Sequence[KGen], subset: Iterable[int], sign: int) -> tuple[int, ...]:
    b = list(a)
    for s in subset:
        b[gens[s].var] += sign * gens[s].power
    return tuple(b)


def _gen_label(gens: Sequence[KGen], subset: Sequence[int]) -> str:
    return "".join(gens[s].name for s in subset) or "1"


def koszul_slice(gens: Sequence[KGen], m: Multidegree) -> ChainComplex:
    """Multidegree-``m`` part of ``A (x) Lambda(gens)``."""
    keys: dict[int, list] = {}
    for r in range(len(gens) + 1):
        for S in itertools.combinations(range(len(gens)), r):
            a = _shift(m, gens, S, -1)
            if min(a, default=0) >= 0:
                keys.setdefault(-r, []).append((a, S))

    def rule(key):
        a, S = key
        out = {}
        for j, s in enumerate(S):
            out[(_shift(a, gens, (s,), 1), S[:j] + S[j + 1:])] = -1 if j % 2 else 1
        return out

    return complex_from_rule(keys, rule, lambda k: f"{monomial_label(k[0])}.{_gen_label(gens, k[1])}", check=False)


def _slice_keys(gens, m, module: MonomialModule):
    keys: dict[int, list] = {}
    for r in range(len(gens) + 1):
        for S in itertools.combinations(range(len(gens)), r):
            b = _shift(m, gens, S, 1)
            if module.nonzero(b):
                keys.setdefault(r, []).append((b, S))
    return keys


def hom_slice(gens: Sequence[KGen], m: Multidegree, module: MonomialModule) -> tuple[ChainComplex, dict]:
    """Multidegree-``m`` part of ``Hom_A(A (x) Lambda(gens), M)``.

    The basis element ``(b, S)`` sends ``xi_S`` to ``x^b`` and the other
    basis elements to zero; its multidegree is ``b - sum_{s in S} deg xi_s``.
    The differential is ``d(phi) = -(-1)^{|phi|} phi o d``.
    """
    keys = _slice_keys(gens, m, module)

    def rule(key):
        b, S = key
        out = {}
        for t in range(len(gens)):
            if t in S:
                continue
            T = tuple(sorted(S + (t,)))
            b2 = _shift(b, gens, (t,), 1)
            if not module.nonzero(b2):
                continue
            sign = -1 if T.index(t) % 2 else 1
            if len(S) % 2 == 0:
                sign = -sign
            out[(b2, T)] = sign
        return out

    c = complex_from_rule(keys, rule, lambda k: f"{monomial_label(k[0])}.{_gen_label(gens, k[1])}*", check=False)
    return c, keys


def _gens(d: int, n: int, k: int | None = None, name: str = "xi") -> list[KGen]:
    k = d if k is None else k
    return [KGen(f"{name}{i + 1}", i, n) for i in range(k)]


def _box(lo: Sequence[int], hi: Sequence[int]):
    return itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))


# ---------------------------------------------------------------------------
# Koszul data


@dataclass(frozen=True)
class KoszulData:
    """``A_{n,k}``: the Koszul complex of ``(x_1^n, ..., x_k^n)`` over
    ``k[x_1..x_d]``, restricted to multidegrees in ``[0, window]^d``."""

    ring: PolyRing
    n: int
    k: int
    window: int

    @property
    def gens(self) -> list[KGen]:
        return _gens(self.ring.d, self.n, self.k)

    def multidegrees(self) -> list[Multidegree]:
        return list(_box([0] * self.ring.d, [self.window] * self.ring.d))

    def slice(self, m: Multidegree) -> ChainComplex:
        return koszul_slice(self.gens, tuple(m))

    def cohomology_table(self, field: Field = QQ) -> dict[Multidegree, dict[int, int]]:
        out = {}
        for m in self.multidegrees():
            h = cohomology_dims(self.slice(m), field)
            if h:
                out[m] = h
        return out

    def total_cohomology(self, field: Field = QQ) -> dict[int, int]:
        tot: dict[int, int] = {}
        for h in self.cohomology_table(field).values():
            for deg, v in h.items():
                tot[deg] = tot.get(deg, 0) + v
        return dict(sorted(tot.items()))

    def h0_basis(self) -> list[str]:
        """Monomials spanning ``H^0`` inside the window (one per multidegree)."""
        out = []
        for m, h in sorted(self.cohomology_table().items()):
            if h.get(0):
                out.append(monomial_label(m))
        return out

    def check(self) -> None:
        for m in self.multidegrees():
            self.slice(m).check()


def koszul_complex(ring: PolyRing, n: int, k: int, window: int | None = None) -> KoszulData:
    if n < 1:
        raise ValueError("n must be positive")
    if not 0 <= k <= ring.d:
        raise ValueError(f"k must lie in [0, {ring.d}]")
    if window is None:
        window = 3 * n
    if window < 0 or (k and window < n):
        raise WindowTooSmall(f"window {window} does not reach the differential x^{n}")
    return KoszulData(ring, n, k, window)


def multiplication_map(kd: KoszulData, var: int, m: Multidegree) -> ChainMap:
    """``x_var^n : A_{n,k}`` at ``m - n u_var`` to ``A_{n,k}`` at ``m``."""
    gens = kd.gens
    src_m = tuple(x - kd.n * (i == var) for i, x in enumerate(m))
    src = koszul_slice(gens, src_m)
    tgt = koszul_slice(gens, m)
    src_keys = _koszul_keys(gens, src_m)
    tgt_keys = _koszul_keys(gens, m)

    def rule(key):
        a, S = key
        return {(_bump(a, var, kd.n), S): 1}

    return map_from_rule(src, tgt, src_keys, tgt_keys, rule)


def _bump(a, i, e):
    b = list(a)
    b[i] += e
    return tuple(b)


def _koszul_keys(gens, m):
    keys: dict[int, list] = {}
    for r in range(len(gens) + 1):
        for S in itertools.combinations(range(len(gens)), r):
            a = _shift(m, gens, S, -1)
            if min(a, default=0) >= 0:
                keys.setdefault(-r, []).append((a, S))
    return keys


def koszul_cone_check(kd: KoszulData, field: Field = QQ) -> list[dict]:
    """Compare ``A_{n,k+1}`` with the cone of ``x_{k+1}^n`` on ``A_{n,k}``,
    multidegree by multidegree.  Requires ``k < d``."""
    if kd.k >= kd.ring.d:
        raise ValueError("the cone identity needs k < d")
    bigger = KoszulData(kd.ring, kd.n, kd.k + 1, kd.window)
    rows = []
    for m in kd.multidegrees():
        lhs = cohomology_dims(bigger.slice(m), field)
        rhs = cohomology_dims(cone(multiplication_map(kd, kd.k, m)), field)
        rows.append({"multidegree": m, "koszul": lhs, "cone": rhs, "equal": lhs == rhs})
    return rows


@dataclass
class DualityReport:
    rows: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r["equal"] for r in self.rows)

    def table(self) -> dict[int, tuple[int, int]]:
        """Totals per cohomological degree: (dual side, shifted side)."""
        out: dict[int, list[int]] = {}
        for r in self.rows:
            for deg, v in r["dual"].items():
                out.setdefault(deg, [0, 0])[0] += v
            for deg, v in r["shifted"].items():
                out.setdefault(deg, [0, 0])[1] += v
        return {deg: tuple(v) for deg, v in sorted(out.items())}


def koszul_self_duality_check(kd: KoszulData, field: Field = QQ) -> DualityReport:
    """Compare ``Hom_A(A_{n,k}, A)`` at ``m`` with ``A_{n,k}[-k]`` at
    ``m + n 1_k`` for every ``m`` whose shifted multidegree lies in the window."""
    d, n, k = kd.ring.d, kd.n, kd.k
    if k and kd.window < n:
        raise WindowTooSmall("window too small to close the pairing")
    gens = kd.gens
    A = MonomialModule.ring(d)
    report = DualityReport()
    lo = [-n if i < k else 0 for i in range(d)]
    hi = [kd.window - n if i < k else kd.window for i in range(d)]
    for m in _box(lo, hi):
        dual_c, _ = hom_slice(gens, m, A)
        lhs = cohomology_dims(dual_c, field)
        mm = tuple(x + n * (i < k) for i, x in enumerate(m))
        # (C[-k])^j = C^{j-k}
        rhs = {deg + k: v for deg, v in cohomology_dims(kd.slice(mm), field).items()}
        report.rows.append({"multidegree": m, "dual": lhs, "shifted": rhs, "equal": lhs == rhs})
    return report


# ---------------------------------------------------------------------------
# residue pairing


def residue(n: int, d: int, vec: dict[int, Fraction]) -> Fraction:
    """Coefficient of ``prod x_i^{n-1}`` in an element of ``A_n`` given in the
    lexicographic monomial basis."""
    top = monomials(d, n).index((n - 1,) * d)
    return Fraction(vec.get(top, 0))


def residue_pairing(n: int, d: int) -> SparseMatrix:
    """Gram matrix of ``<x^a, x^b> = r_n(x^a x^b)`` on ``A_n``, computed from
    the multiplication table."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    A = truncated_polynomial(d, n)
    ent = {}
    for i in range(A.dim):
        for j in range(A.dim):
            r = residue(n, d, A.basis_product(i, j))
            if r:
                ent[(i, j)] = r
    return SparseMatrix(A.dim, A.dim, ent)


def is_permutation_matrix(m: SparseMatrix) -> bool:
    if m.nrows != m.ncols or m.nnz != m.nrows:
        return False
    if any(v != 1 for _, v in m.items()):
        return False
    return len({i for (i, _), _ in m.items()}) == m.nrows == len({j for (_, j), _ in m.items()})


# ---------------------------------------------------------------------------
# local cohomology


def transition_map(d: int, n: int, m: Multidegree, module: MonomialModule, gens_extra: Sequence[KGen] = ()) -> ChainMap:
    """``Hom(A_n (x) X, M) -> Hom(A_{n+1} (x) X, M)`` at multidegree ``m``,
    precomposition with ``xi_i -> x_i xi_i`` on the first ``d`` generators."""
    g0 = _gens(d, n) + list(gens_extra)
    g1 = _gens(d, n + 1) + list(gens_extra)
    src, skeys = hom_slice(g0, m, module)
    tgt, tkeys = hom_slice(g1, m, module)

    def rule(key):
        b, S = key
        b2 = list(b)
        for s in S:
            if s < d:
                b2[s] += 1
        b2 = tuple(b2)
        return {(b2, S): 1} if module.nonzero(b2) else {}

    return map_from_rule(src, tgt, skeys, tkeys, rule)


def _compose(maps: list[ChainMap], start: ChainComplex) -> ChainMap:
    out = ChainMap.identity(start)
    for f in maps:
        out = f @ out
    return out


def cech_slice(d: int, m: Multidegree, module: MonomialModule) -> ChainComplex:
    """Multidegree-``m`` part of the Cech complex of ``A/I`` for ``x_1..x_d``."""

    def alive(S):
        if any(m[i] < 0 for i in range(d) if i not in S):
            return False
        return not any(all(m[i] >= g[i] for i in range(d) if i not in S) for g in module.ideal)

    keys: dict[int, list] = {}
    for r in range(d + 1):
        for S in itertools.combinations(range(d), r):
            if alive(S):
                keys.setdefault(r, []).append(S)

    def rule(S):
        out = {}
        for t in range(d):
            if t not in S:
                T = tuple(sorted(S + (t,)))
                out[T] = -1 if T.index(t) % 2 else 1
        return out

    return complex_from_rule(keys, rule, lambda S: "C" + "".join(str(i + 1) for i in S))


@dataclass
class LocalCohomologyTower:
    d: int
    module: MonomialModule
    n_max: int
    window: int
    stages: dict[int, dict[Multidegree, dict[int, int]]] = field(default_factory=dict)
    transitions_injective: dict[int, bool] = field(default_factory=dict)
    persistent: dict[int, dict[int, int]] = field(default_factory=dict)
    cech: dict[Multidegree, dict[int, int]] = field(default_factory=dict)
    cech_agrees: dict[int, bool] = field(default_factory=dict)

    def totals(self, n: int) -> dict[int, int]:
        tot: dict[int, int] = {}
        for h in self.stages[n].values():
            for deg, v in h.items():
                tot[deg] = tot.get(deg, 0) + v
        return dict(sorted(tot.items()))

    @property
    def concentrated(self) -> bool:
        return all(set(self.totals(n)) <= {self.d} for n in self.stages)


def local_cohomology(ring: PolyRing, module: MonomialModule | None = None, n_max: int = 3, window: int = 0, field: Field = QQ) -> LocalCohomologyTower:
    """``H^*(Hom_A(A_n, M))`` for ``n = 1..n_max`` on multidegrees
    ``[-n_max, window]^d`` with the colimit transition maps.

    ``persistent[n]`` is the image of stage ``n`` in stage ``n_max``; the
    Cech comparison is made on stages ``n`` with ``lag <= n <= n_max - lag``
    where ``lag`` is the largest exponent among the ideal generators: below
    that a stage has not yet seen every torsion class, above it classes that
    die later in the tower have not had room to die.
    """
    d = ring.d
    module = module or MonomialModule.ring(d)
    if module.d != d:
        raise NotAModule("module and ring have different numbers of variables")
    if n_max < 1:
        raise ValueError("n_max must be positive")
    if window < 0:
        raise WindowTooSmall("window must be non-negative")
    tower = LocalCohomologyTower(d, module, n_max, window)
    box = list(_box([-n_max] * d, [window] * d))
    slices = {}
    for n in range(1, n_max + 1):
        gens = _gens(d, n)
        tower.stages[n] = {}
        for m in box:
            c, _ = hom_slice(gens, m, module)
            slices[(n, m)] = c
            h = cohomology_dims(c, field)
            if h:
                tower.stages[n][m] = h
    trans = {}
    for n in range(1, n_max):
        inj = True
        for m in box:
            f = transition_map(d, n, m, module)
            trans[(n, m)] = f
            for deg, dim in tower.stages[n].get(m, {}).items():
                if induced_rank(f, deg) != dim:
                    inj = False
        tower.transitions_injective[n] = inj
    for m in box:
        h = cohomology_dims(cech_slice(d, m, module), field)
        if h:
            tower.cech[m] = h
    for n in range(1, n_max + 1):
        per_m = {}
        for m in box:
            src = slices[(n, m)]
            f = _compose([trans[(j, m)] for j in range(n, n_max)], src)
            hm = {}
            for deg in tower.stages[n].get(m, {}):
                r = induced_rank(f, deg)
                if r:
                    hm[deg] = r
            if hm:
                per_m[m] = hm
        tot: dict[int, int] = {}
        for hm in per_m.values():
            for deg, v in hm.items():
                tot[deg] = tot.get(deg, 0) + v
        tower.persistent[n] = dict(sorted(tot.items()))
        if module.lag <= n <= n_max - module.lag:
            inside = [m for m in box if min(m) >= -n]
            tower.cech_agrees[n] = all(per_m.get(m, {}) == tower.cech.get(m, {}) for m in inside)
    return tower


# ---------------------------------------------------------------------------
# cofinality of the product family


@dataclass
class CofinalityReport:
    d: int
    p: int
    n_max: int
    window: int
    target_dims: dict[int, int] = field(default_factory=dict)
    stage_dims: dict[int, dict[int, int]] = field(default_factory=dict)
    image_dims: dict[int, dict[int, int]] = field(default_factory=dict)
    stable: dict[int, bool] = field(default_factory=dict)
    stabilization_index: int | None = None

    @property
    def ok(self) -> bool:
        return self.stabilization_index is not None and self.stabilization_index <= self.p


def _split_sign(S: Sequence[int], T: Sequence[int]) -> int:
    inv = sum(1 for s in S for t in T if s > t)
    return -1 if inv % 2 else 1


def _mu_pullback(d: int, n: int, p: int, m: Multidegree) -> ChainMap:
    """Precomposition with ``A_n (x) A_p -> A_p``, ``xi_i -> x_i^{n-p} zeta_i``
    followed by the product of the exterior algebra."""
    A = MonomialModule.ring(d)
    zeta = _gens(d, p, name="zeta")
    src, skeys = hom_slice(zeta, m, A)
    both = _gens(d, n) + zeta
    tgt, tkeys = hom_slice(both, m, A)

    def rule(key):
        b, U = key
        out = {}
        for r in range(len(U) + 1):
            for S in itertools.combinations(U, r):
                T = tuple(u for u in U if u not in S)
                b2 = list(b)
                for s in S:
                    b2[s] += n - p
                out[(tuple(b2), tuple(S) + tuple(d + t for t in T))] = _split_sign(S, T)
        return out

    return map_from_rule(src, tgt, skeys, tkeys, rule)


def gaitsgory_cofinality_check(ring: PolyRing, p: int, n_max: int = 4, window: int = 2, field: Field = QQ) -> CofinalityReport:
    """Check that ``colim_n H(Hom_A(A_n (x) A_p, A))`` is reached from
    ``H(Hom_A(A_p, A))`` through the multiplication map.

    Stage ``n`` is called stable when its image in stage ``n_max`` equals the
    image of ``H(Hom_A(A_p, A))`` there and, for ``n >= p``, the comparison
    map into stage ``n`` is injective on cohomology.  Stages ``n`` up to
    ``n_max - p`` are examined.
    """
    d = ring.d
    if p < 1:
        raise ValueError("p must be positive")
    if window < 0:
        raise WindowTooSmall("window must be non-negative")
    if n_max < 2 * p:
        raise WindowTooSmall(f"n_max must be at least 2p = {2 * p} to observe stabilization")
    rep = CofinalityReport(d, p, n_max, window)
    A = MonomialModule.ring(d)
    zeta = _gens(d, p, name="zeta")
    box = list(_box([-(n_max + p)] * d, [window] * d))
    top = n_max
    for m in box:
        for deg, v in cohomology_dims(hom_slice(zeta, m, A)[0], field).items():
            rep.target_dims[deg] = rep.target_dims.get(deg, 0) + v
    for n in range(1, n_max + 1):
        tot: dict[int, int] = {}
        for m in box:
            for deg, v in cohomology_dims(hom_slice(_gens(d, n) + zeta, m, A)[0], field).items():
                tot[deg] = tot.get(deg, 0) + v
        rep.stage_dims[n] = dict(sorted(tot.items()))
    psi_top = {m: _mu_pullback(d, top, p, m) for m in box}
    for n in range(1, n_max - p + 1):
        ok = True
        img: dict[int, int] = {}
        for m in box:
            src = hom_slice(_gens(d, n) + zeta, m, A)[0]
            f = _compose([transition_map(d, j, m, A, zeta) for j in range(n, top)], src)
            degs = set(src.degrees) | set(psi_top[m].source.degrees)
            for deg in degs:
                r = induced_rank(f, deg)
                if r:
                    img[deg] = img.get(deg, 0) + r
                if not same_cohomology_image(f, psi_top[m], deg):
                    ok = False
            if n >= p:
                psi = _mu_pullback(d, n, p, m)
                for deg, v in cohomology_dims(psi.source, field).items():
                    if induced_rank(psi, deg) != v:
                        ok = False
        rep.image_dims[n] = dict(sorted(img.items()))
        rep.stable[n] = ok
    last = n_max - p
    idx = None
    for n in range(last, 0, -1):
        if rep.stable[n]:
            idx = n
        else:
            break
    rep.stabilization_index = idx
    return rep
