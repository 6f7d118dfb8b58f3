"""Free graded Lie algebras, realised inside the tensor algebra.

Weight ``w`` of ``Free(V)`` is spanned by the brackets ``[v, b]`` with ``v``
in ``V`` and ``b`` of weight ``w - 1``.  Those brackets are expanded as
graded commutators in ``T(V)`` and row-reduced per (weight, degree).
"""

from __future__ import annotations

from fractions import Fraction

from ..exactalg import ChainComplex, GradedVectorSpace
from ..linalg import Echelon
from ..sparse import SparseMatrix
from .lie import DgLieAlgebra

MAX_WEIGHT = 8

Word = tuple[int, ...]
TensorElem = dict[Word, Fraction]


class WeightTooLarge(ValueError):
    pass


def _acc(out, key, c):
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _word_degree(w: Word, deg: list[int]) -> int:
    return sum(deg[i] for i in w)


def tensor_product(x: TensorElem, y: TensorElem) -> TensorElem:
    out: TensorElem = {}
    for u, a in x.items():
        for v, b in y.items():
            _acc(out, u + v, a * b)
    return out


def commutator(x: TensorElem, y: TensorElem, deg: list[int]) -> TensorElem:
    """``xy - (-1)^{|x||y|} yx`` for homogeneous ``x, y``."""
    if not x or not y:
        return {}
    dx = _word_degree(next(iter(x)), deg)
    dy = _word_degree(next(iter(y)), deg)
    out = tensor_product(x, y)
    s = -1 if dx * dy % 2 else 1
    for k, v in tensor_product(y, x).items():
        _acc(out, k, -s * v)
    return out


def tensor_d(x: TensorElem, deg: list[int], dv: dict[int, dict[int, Fraction]]) -> TensorElem:
    """The derivation of ``T(V)`` extending ``d`` on ``V``."""
    out: TensorElem = {}
    for w, c in x.items():
        sign = 1
        for pos, letter in enumerate(w):
            for l2, c2 in dv.get(letter, {}).items():
                _acc(out, w[:pos] + (l2,) + w[pos + 1:], sign * c * c2)
            if deg[letter] % 2:
                sign = -sign
    return out


def _as_complex(v) -> tuple[list[str], list[int], dict[int, dict[int, Fraction]]]:
    if isinstance(v, ChainComplex):
        labels, degs, pos = [], [], {}
        for n in v.degrees:
            for i, lab in enumerate(v.basis(n)):
                pos[(n, i)] = len(labels)
                labels.append(lab)
                degs.append(n)
        dv: dict[int, dict[int, Fraction]] = {}
        for n, m in v.differentials.items():
            for (i, j), c in m.items():
                dv.setdefault(pos[(n, j)], {})[pos[(n + 1, i)]] = c
        return labels, degs, dv
    if isinstance(v, GradedVectorSpace):
        labels, degs = [], []
        for n in v.degrees:
            for lab in v.basis(n):
                labels.append(lab)
                degs.append(n)
        return labels, degs, {}
    raise TypeError("free_lie expects a GradedVectorSpace or a ChainComplex")


class FreeLieAlgebra(DgLieAlgebra):
    """``Free(V)`` truncated at a bracket weight; ``realization[k]`` is the
    tensor-algebra polynomial of basis element ``k``."""

    generators: tuple[str, ...]
    realization: list[TensorElem]
    truncation: int


def free_lie(v, weight: int) -> FreeLieAlgebra:
    """``Free(V)`` in weights ``1..weight``; brackets past ``weight`` vanish.

    ``v`` is a graded vector space, or a chain complex whose differential
    is extended to ``Free(V)`` as a derivation.
    """
    if weight < 1:
        raise ValueError("weight must be positive")
    if weight > MAX_WEIGHT:
        raise WeightTooLarge(f"weight {weight} exceeds the configured bound {MAX_WEIGHT}")
    gl, gdeg, dv = _as_complex(v)
    labels: list[str] = []
    degrees: list[int] = []
    weights: list[int] = []
    real: list[TensorElem] = []
    by_weight: dict[int, list[int]] = {}
    for i, lab in enumerate(gl):
        by_weight.setdefault(1, []).append(len(labels))
        labels.append(lab)
        degrees.append(gdeg[i])
        weights.append(1)
        real.append({(i,): Fraction(1)})
    for w in range(2, weight + 1):
        ech: dict[int, Echelon] = {}
        for i in range(len(gl)):
            for k in by_weight.get(w - 1, []):
                c = commutator(real[i], real[k], gdeg)
                if not c:
                    continue
                dg = gdeg[i] + degrees[k]
                e = ech.setdefault(dg, Echelon())
                vec = _to_vec(c, w, len(gl))
                if e.add(vec):
                    by_weight.setdefault(w, []).append(len(labels))
                    labels.append(f"[{gl[i]},{labels[k]}]")
                    degrees.append(dg)
                    weights.append(w)
                    real.append(c)
    # coordinates of a tensor polynomial in the chosen basis, per (weight, degree)
    solver = _Coordinates(real, weights, degrees, len(gl))
    brackets = {}
    for i in range(len(labels)):
        for j in range(len(labels)):
            if weights[i] + weights[j] > weight:
                continue
            c = commutator(real[i], real[j], gdeg)
            if c:
                brackets[(i, j)] = solver.solve(c, weights[i] + weights[j], degrees[i] + degrees[j])
    diff = {}
    if dv:
        for k in range(len(labels)):
            c = tensor_d(real[k], gdeg, dv)
            if c:
                diff[k] = solver.solve(c, weights[k], degrees[k] + 1)
    lie = FreeLieAlgebra(labels, degrees, brackets, diff, weights=weights, name=f"free({','.join(gl)})")
    lie.generators = tuple(gl)
    lie.realization = real
    lie.truncation = weight
    return lie


def _to_vec(x: TensorElem, w: int, n: int) -> dict[int, Fraction]:
    """Index a weight-``w`` word by its base-``n`` value."""
    out = {}
    for word, c in x.items():
        idx = 0
        for letter in word:
            idx = idx * n + letter
        out[idx] = c
    return out


class _Coordinates:
    def __init__(self, real, weights, degrees, n):
        self.groups: dict[tuple[int, int], list[int]] = {}
        for k, (w, dg) in enumerate(zip(weights, degrees)):
            self.groups.setdefault((w, dg), []).append(k)
        self.real, self.n = real, n
        self._cache = {}

    def solve(self, x: TensorElem, w: int, dg: int) -> dict[int, Fraction]:
        from ..linalg import solve

        ks = self.groups.get((w, dg), [])
        if not ks:
            raise ArithmeticError("element outside the span of the free Lie basis")
        key = (w, dg)
        if key not in self._cache:
            cols = [_to_vec(self.real[k], w, self.n) for k in ks]
            size = self.n ** w
            self._cache[key] = SparseMatrix.from_columns(size, cols)
        m = self._cache[key]
        sol = solve(m, _to_vec(x, w, self.n))
        if sol is None:
            raise ArithmeticError("element outside the span of the free Lie basis")
        return {ks[i]: c for i, c in sol.items()}


# ---------------------------------------------------------------------------
# dimension oracles


def _mobius(n: int) -> int:
    res, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            res = -res
        p += 1
    if n > 1:
        res = -res
    return res


def necklace_dims(n: int, weight: int) -> list[int]:
    """Classical dimensions of the free Lie algebra on ``n`` even generators."""
    out = []
    for w in range(1, weight + 1):
        total = sum(_mobius(e) * n ** (w // e) for e in range(1, w + 1) if w % e == 0)
        out.append(total // w)
    return out


def pbw_series_dims(degrees: list[int], weight: int) -> dict[tuple[int, int], int]:
    """Dimensions of ``Free(V)`` per (weight, degree) from the identity
    ``T(V) = U(Free V) ~ Sym(Free V)`` of bigraded series.

    An even element of bidegree ``(w, g)`` contributes ``1/(1 - t^w y^g)``
    and an odd one ``1 + t^w y^g``.
    """
    # series: dict (w, g) -> int, truncated at weight
    tv: dict[tuple[int, int], int] = {(0, 0): 1}
    for w in range(1, weight + 1):
        for (w0, g0), c in list(tv.items()):
            if w0 == w - 1:
                for g in degrees:
                    key = (w, g0 + g)
                    tv[key] = tv.get(key, 0) + c
    prod: dict[tuple[int, int], int] = {(0, 0): 1}
    dims: dict[tuple[int, int], int] = {}
    for w in range(1, weight + 1):
        gs = sorted({g for (ww, g) in tv if ww == w} | {g for (ww, g) in prod if ww == w})
        for g in gs:
            ell = tv.get((w, g), 0) - prod.get((w, g), 0)
            if ell < 0:
                raise ArithmeticError("negative dimension in the series inversion")
            if ell:
                dims[(w, g)] = ell
                prod = _mul_factor(prod, w, g, ell, weight)
    return dims


def _mul_factor(series, w, g, ell, weight):
    """Multiply by ``(1 - t^w y^g)^{-ell}`` (even ``g``) or ``(1 + t^w y^g)^ell``."""
    out = dict(series)
    for _ in range(ell):
        new = {}
        for (w0, g0), c in out.items():
            k = 0
            while w0 + k * w <= weight:
                if g % 2 == 0:
                    coef = 1
                elif k <= 1:
                    coef = 1
                else:
                    break
                key = (w0 + k * w, g0 + k * g)
                new[key] = new.get(key, 0) + c * coef
                k += 1
        out = new
    return out
