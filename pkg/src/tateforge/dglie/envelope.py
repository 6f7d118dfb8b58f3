"""Truncated universal envelopes, the PBW symmetrization, and an
independent model of CE homology as ``U(A[eta] (x) L) (x)_{U L} k``.

Both constructions work in the tensor algebra on a Lie basis.  ``U^{<=w}``
is ``T^{<=w}`` modulo the span of ``u (xy - (-1)^{|x||y|} yx - [x, y]) v``
of total weight ``<= w``.  Weights are the Lie weights when brackets add
them, word length otherwise.  Only the field is supported as a base here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .. import linalg
from ..exactalg import ChainComplex, cohomology_dims, complex_from_rule
from ..scalars import QQ, CharDivision, Field
from ..sparse import SparseMatrix
from .free import WeightTooLarge
from .lie import DgLieAlgebra, validate_lie

MAX_ENVELOPE_WEIGHT = 5

Word = tuple[int, ...]


def _acc(out, key, c):
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


class _Letters:
    """A graded Lie algebra on letters ``0..n-1`` with field coefficients."""

    def __init__(self, degrees, weights, brackets, differential, by_length: bool):
        self.degrees = list(degrees)
        self.weights = [1] * len(degrees) if by_length else list(weights)
        self.brackets = brackets  # {(p, q): {r: c}}
        self.differential = differential  # {p: {r: c}}

    @property
    def n(self) -> int:
        return len(self.degrees)

    def wt(self, w: Word) -> int:
        return sum(self.weights[x] for x in w)

    def deg(self, w: Word) -> int:
        return sum(self.degrees[x] for x in w)

    def words(self, weight: int) -> list[Word]:
        out: list[Word] = [()]
        frontier: list[Word] = [()]
        while frontier:
            nxt = []
            for w in frontier:
                base = self.wt(w)
                for x in range(self.n):
                    if base + self.weights[x] <= weight:
                        nxt.append(w + (x,))
            out.extend(nxt)
            frontier = nxt
        return out

    def relation(self, p: int, q: int) -> dict[Word, Fraction]:
        r: dict[Word, Fraction] = {}
        _acc(r, (p, q), Fraction(1))
        s = -1 if self.degrees[p] * self.degrees[q] % 2 else 1
        _acc(r, (q, p), Fraction(-s))
        for k, c in self.brackets.get((p, q), {}).items():
            _acc(r, (k,), -c)
        return r

    def d_word(self, w: Word) -> dict[Word, Fraction]:
        out: dict[Word, Fraction] = {}
        sign = 1
        for pos, x in enumerate(w):
            for y, c in self.differential.get(x, {}).items():
                _acc(out, w[:pos] + (y,) + w[pos + 1:], sign * c)
            if self.degrees[x] % 2:
                sign = -sign
        return out


class _Quotient:
    """``T^{<=w}`` modulo a span of vectors, with a word order that makes
    non-decreasing words the surviving normal forms where possible."""

    def __init__(self, letters: _Letters, weight: int):
        self.letters = letters
        self.weight = weight
        words = letters.words(weight)
        words.sort(key=lambda w: (-len(w), list(w) == sorted(w), w))
        self.words = words
        self.index = {w: i for i, w in enumerate(words)}

    def vec(self, elem: dict[Word, Fraction]) -> dict[int, Fraction]:
        return {self.index[w]: c for w, c in elem.items() if w in self.index}

    def relation_vectors(self) -> list[dict[int, Fraction]]:
        L, w = self.letters, self.weight
        out = []
        for p in range(L.n):
            for q in range(L.n):
                rel = L.relation(p, q)
                room = w - L.weights[p] - L.weights[q]
                if room < 0:
                    continue
                for u in L.words(room):
                    for v in L.words(room - L.wt(u)):
                        out.append(self.vec({u + r + v: c for r, c in rel.items()}))
        return out


def _rank(vectors, ncols: int, field: Field) -> int:
    vectors = [v for v in vectors if v]
    if not vectors:
        return 0
    if field.is_rational:
        return linalg.span_rank(vectors)
    return linalg.rank(SparseMatrix.from_columns(ncols, vectors), field)


def _letters_of(l: DgLieAlgebra) -> _Letters:
    if not l.base.is_field:
        raise ValueError("envelope constructions need the field as base")
    br = {k: {kk: c for (_, kk), c in v.items()} for k, v in l.brackets.items()}
    diff = {k: {kk: c for (_, kk), c in v.items()} for k, v in l.differential.items()}
    return _Letters(l.degrees, l.weights, br, diff, by_length=not l.weight_graded)


# ---------------------------------------------------------------------------
# PBW


def sym_monomials(l: DgLieAlgebra, weight: int) -> list[Word]:
    """Basis of ``Sym^{<=w} L``: non-decreasing words, odd letters at most once."""
    L = _letters_of(l)
    return [w for w in L.words(weight) if list(w) == sorted(w) and not any(a == b and L.degrees[a] % 2 for a, b in zip(w, w[1:]))]


def symmetrize(l: DgLieAlgebra, word: Word, degrees=None) -> dict[Word, Fraction]:
    """``(1/n!) sum_sigma eps(sigma) x_sigma(1) ... x_sigma(n)`` in ``T(L)``."""
    degrees = degrees if degrees is not None else l.degrees
    n = len(word)
    out: dict[Word, Fraction] = {}
    scale = Fraction(1, math.factorial(n))
    for perm in itertools.permutations(range(n)):
        odd = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j] and degrees[word[perm[i]]] % 2 and degrees[word[perm[j]]] % 2)
        _acc(out, tuple(word[k] for k in perm), scale * (-1 if odd % 2 else 1))
    return out


@dataclass
class PBWCertificate:
    weight: int
    weight_graded: bool
    sym_dims: dict[int, int] = field(default_factory=dict)
    envelope_dims: dict[int, int] = field(default_factory=dict)
    bijective: dict[int, bool] = field(default_factory=dict)
    matrix: SparseMatrix | None = None
    normal_forms: list[Word] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.bijective.values())


def pbw_symmetrize(l: DgLieAlgebra, weight: int, field: Field = QQ, validate: bool = True) -> PBWCertificate:
    """Check that symmetrization ``Sym^{<=w'} L -> U^{<=w'} L`` is bijective
    for every ``w' <= weight``.

    ``matrix`` is the top-weight map in quotient coordinates (rationals only).
    """
    if weight > MAX_ENVELOPE_WEIGHT:
        raise WeightTooLarge(f"weight {weight} exceeds {MAX_ENVELOPE_WEIGHT}")
    if not field.is_rational and field.characteristic <= weight:
        raise CharDivision(f"symmetrization divides by {weight}!, which vanishes in characteristic {field.characteristic}")
    if validate:
        validate_lie(l)
    L = _letters_of(l)
    cert = PBWCertificate(weight, l.weight_graded)
    for w in range(weight + 1):
        q = _Quotient(L, w)
        rels = q.relation_vectors()
        n_words = len(q.words)
        r_ideal = _rank(rels, n_words, field)
        mons = sym_monomials(l, w)
        images = [q.vec(symmetrize(l, m)) for m in mons]
        cert.sym_dims[w] = len(mons)
        cert.envelope_dims[w] = n_words - r_ideal
        total = _rank(rels + images, n_words, field)
        cert.bijective[w] = len(mons) == n_words - r_ideal and total == n_words
        if w == weight and field.is_rational:
            ech = linalg.Echelon()
            for r in rels:
                ech.add(r)
            order = {q.index[m]: k for k, m in enumerate(mons)}
            free_cols = sorted((i for i in range(n_words) if i not in ech.rows), key=lambda i: (order.get(i, len(order)), i))
            cert.normal_forms = [q.words[i] for i in free_cols]
            pos = {c: k for k, c in enumerate(free_cols)}
            cols = [{pos[c]: v for c, v in ech.reduce(im).items()} for im in images]
            cert.matrix = SparseMatrix.from_columns(len(free_cols), cols)
    return cert


# ---------------------------------------------------------------------------
# envelope oracle for CE homology


def _eta_extension(l: DgLieAlgebra) -> tuple[_Letters, int]:
    """``A[eta] (x) L`` with ``|eta| = -1``, ``d eta = 1``: letters ``0..n-1``
    are ``x_i`` and ``n..2n-1`` are ``eta x_i``."""
    base = _letters_of(l)
    n = base.n
    degrees = base.degrees + [g - 1 for g in base.degrees]
    weights = base.weights + base.weights
    br: dict = {}
    for (i, j), v in base.brackets.items():
        br[(i, j)] = dict(v)
        br[(n + i, j)] = {n + k: c for k, c in v.items()}
        s = -1 if base.degrees[i] % 2 else 1
        br[(i, n + j)] = {n + k: s * c for k, c in v.items()}
    diff: dict = {}
    for i in range(n):
        diff[i] = dict(base.differential.get(i, {}))
        row = {i: Fraction(1)}
        for k, c in base.differential.get(i, {}).items():
            _acc(row, n + k, -c)
        diff[n + i] = row
    letters = _Letters(degrees, weights, br, {k: v for k, v in diff.items() if v}, by_length=False)
    return letters, n


@dataclass
class OracleResult:
    weight: int
    weight_graded: bool
    dims: dict[int | None, dict[int, int]]
    quotient_dims: dict[int | None, dict[int, int]]

    def totals(self) -> dict[int, int]:
        tot: dict[int, int] = {}
        for h in self.dims.values():
            for deg, v in h.items():
                tot[deg] = tot.get(deg, 0) + v
        return dict(sorted(tot.items()))


def envelope_quotient_oracle(l: DgLieAlgebra, weight: int, field: Field = QQ) -> OracleResult:
    """Cohomology of ``U^{<=w}(A[eta] (x) L) / U^{<=w}(A[eta] (x) L) . L``.

    Weight-graded algebras are split by total weight, as in
    :func:`tateforge.dglie.ce.ce_homology`; otherwise the filtration is by
    word length.
    """
    if weight > MAX_ENVELOPE_WEIGHT:
        raise WeightTooLarge(f"weight {weight} exceeds {MAX_ENVELOPE_WEIGHT}")
    validate_lie(l)
    letters, n = _eta_extension(l)
    q = _Quotient(letters, weight)
    ech = linalg.Echelon()
    for r in q.relation_vectors():
        ech.add(r)
    for w in q.words:
        if w and w[-1] < n:
            ech.add({q.index[w]: 1})
    basis = [w for w in q.words if q.index[w] not in ech.rows]

    def split(w: Word):
        return letters.wt(w) if l.weight_graded else None

    groups: dict = {}
    for w in basis:
        groups.setdefault(split(w), []).append(w)
    dims: dict = {}
    qdims: dict = {}
    for key, ws in sorted(groups.items(), key=lambda kv: (kv[0] is None, kv[0] or 0)):
        keys: dict[int, list[Word]] = {}
        for w in ws:
            keys.setdefault(letters.deg(w), []).append(w)

        def rule(w, _q=q, _ech=ech):
            red = _ech.reduce(_q.vec(letters.d_word(w)))
            return {_q.words[i]: c for i, c in red.items()}

        c = complex_from_rule(keys, rule, label=lambda w: ".".join(map(str, w)) or "1", check=True)
        dims[key] = cohomology_dims(c, field)
        qdims[key] = c.dims()
    return OracleResult(weight, l.weight_graded, dims, qdims)
