"""Finite-dimensional commutative dg-algebras given by structure constants,
their modules, and trivial square-zero extensions."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Mapping, Sequence

from .sparse import SparseMatrix

Elem = dict[int, Fraction]


class CdgaAxiomViolation(ValueError):
    pass


class NotAModule(ValueError):
    pass


def _add_into(acc: Elem, c: Fraction, src: Mapping[int, Fraction]) -> None:
    for k, v in src.items():
        nv = acc.get(k, 0) + c * v
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)


def _clean(table: Mapping) -> dict:
    out = {}
    for key, val in table.items():
        val = {k: Fraction(v) for k, v in val.items() if v}
        if val:
            out[key] = val
    return out


class BaseCdga:
    """Graded-commutative dg-algebra on a finite basis.

    ``mult[(i, j)]`` is the product of basis elements ``i`` and ``j``;
    missing pairs multiply to zero.  ``differential[i]`` is ``d`` of basis
    element ``i``.
    """

    def __init__(self, labels: Sequence[str], degrees: Sequence[int], unit: int, mult: Mapping[tuple[int, int], Mapping[int, object]], differential: Mapping[int, Mapping[int, object]] | None = None):
        self.labels = tuple(labels)
        self.degrees = tuple(int(x) for x in degrees)
        if len(self.labels) != len(self.degrees):
            raise CdgaAxiomViolation("labels and degrees differ in length")
        if len(set(self.labels)) != len(self.labels):
            raise CdgaAxiomViolation("duplicate basis labels")
        self.unit = unit
        self.mult = _clean(mult)
        self.differential = _clean(differential or {})

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def is_field(self) -> bool:
        return self.dim == 1

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def basis_product(self, i: int, j: int) -> Elem:
        return self.mult.get((i, j), {})

    def multiply(self, a: Mapping[int, Fraction], b: Mapping[int, Fraction]) -> Elem:
        out: Elem = {}
        for i, x in a.items():
            for j, y in b.items():
                p = self.mult.get((i, j))
                if p:
                    _add_into(out, x * y, p)
        return out

    def d(self, a: Mapping[int, Fraction]) -> Elem:
        out: Elem = {}
        for i, x in a.items():
            di = self.differential.get(i)
            if di:
                _add_into(out, x, di)
        return out

    def degree_of(self, a: Mapping[int, Fraction]) -> int:
        degs = {self.degrees[i] for i, v in a.items() if v}
        if len(degs) != 1:
            raise CdgaAxiomViolation(f"element {a} is not homogeneous")
        return degs.pop()

    def differential_matrix(self) -> SparseMatrix:
        return SparseMatrix(self.dim, self.dim, {(k, i): v for i, col in self.differential.items() for k, v in col.items()})

    @classmethod
    def field(cls) -> "BaseCdga":
        return cls(["1"], [0], 0, {(0, 0): {0: 1}})

    # validation -------------------------------------------------------------
    def validate(self, require_nonpositive: bool = False) -> None:
        n = self.dim
        deg = self.degrees
        if require_nonpositive and any(x > 0 for x in deg):
            raise CdgaAxiomViolation("base cdga must be concentrated in non-positive degrees")
        if not (0 <= self.unit < n) or deg[self.unit] != 0:
            raise CdgaAxiomViolation("unit must be a degree-0 basis element")
        for (i, j), p in self.mult.items():
            for k in p:
                if deg[k] != deg[i] + deg[j]:
                    raise CdgaAxiomViolation(f"product {self.labels[i]}*{self.labels[j]} is not homogeneous of degree {deg[i] + deg[j]}")
        for i, di in self.differential.items():
            for k in di:
                if deg[k] != deg[i] + 1:
                    raise CdgaAxiomViolation(f"d({self.labels[i]}) has wrong degree")
        e = {self.unit: Fraction(1)}
        for i in range(n):
            x = {i: Fraction(1)}
            if self.multiply(e, x) != x or self.multiply(x, e) != x:
                raise CdgaAxiomViolation(f"unit law fails on {self.labels[i]}")
        for i, j in itertools.product(range(n), repeat=2):
            s = -1 if deg[i] * deg[j] % 2 else 1
            lhs = self.basis_product(i, j)
            rhs = {k: s * v for k, v in self.basis_product(j, i).items()}
            if lhs != rhs:
                raise CdgaAxiomViolation(f"graded commutativity fails on ({self.labels[i]}, {self.labels[j]})")
        for i, j, k in itertools.product(range(n), repeat=3):
            a, b, c = {i: Fraction(1)}, {j: Fraction(1)}, {k: Fraction(1)}
            if self.multiply(self.multiply(a, b), c) != self.multiply(a, self.multiply(b, c)):
                raise CdgaAxiomViolation(f"associativity fails on ({self.labels[i]}, {self.labels[j]}, {self.labels[k]})")
        for i in range(n):
            if self.d(self.d({i: Fraction(1)})):
                raise CdgaAxiomViolation(f"d^2 != 0 on {self.labels[i]}")
        for i, j in itertools.product(range(n), repeat=2):
            a, b = {i: Fraction(1)}, {j: Fraction(1)}
            lhs = self.d(self.multiply(a, b))
            rhs = self.multiply(self.d(a), b)
            s = -1 if deg[i] % 2 else 1
            _add_into(rhs, Fraction(s), self.multiply(a, self.d(b)))
            if lhs != rhs:
                raise CdgaAxiomViolation(f"Leibniz rule fails on ({self.labels[i]}, {self.labels[j]})")

    def __repr__(self):
        return f"BaseCdga(dim={self.dim}, degrees={sorted(set(self.degrees))})"


class CdgaModule:
    """A dg-module over a :class:`BaseCdga` on a finite basis.

    ``action[(i, j)]`` is base element ``i`` acting on module element ``j``.
    """

    def __init__(self, base: BaseCdga, labels: Sequence[str], degrees: Sequence[int], action: Mapping[tuple[int, int], Mapping[int, object]], differential: Mapping[int, Mapping[int, object]] | None = None):
        self.base = base
        self.labels = tuple(labels)
        self.degrees = tuple(int(x) for x in degrees)
        if len(self.labels) != len(self.degrees):
            raise NotAModule("labels and degrees differ in length")
        self.action = _clean(action)
        self.differential = _clean(differential or {})

    @property
    def dim(self) -> int:
        return len(self.labels)

    def act(self, a: Mapping[int, Fraction], m: Mapping[int, Fraction]) -> Elem:
        out: Elem = {}
        for i, x in a.items():
            for j, y in m.items():
                p = self.action.get((i, j))
                if p:
                    _add_into(out, x * y, p)
        return out

    def d(self, m: Mapping[int, Fraction]) -> Elem:
        out: Elem = {}
        for j, y in m.items():
            dj = self.differential.get(j)
            if dj:
                _add_into(out, y, dj)
        return out

    def validate(self) -> None:
        A = self.base
        deg, bdeg = self.degrees, A.degrees
        for (i, j), p in self.action.items():
            if not (0 <= i < A.dim and 0 <= j < self.dim):
                raise NotAModule(f"action entry {(i, j)} out of range")
            for k in p:
                if deg[k] != bdeg[i] + deg[j]:
                    raise NotAModule(f"{A.labels[i]}.{self.labels[j]} has the wrong degree")
        for j, dj in self.differential.items():
            for k in dj:
                if deg[k] != deg[j] + 1:
                    raise NotAModule(f"d({self.labels[j]}) has the wrong degree")
        unit = {A.unit: Fraction(1)}
        for j in range(self.dim):
            m = {j: Fraction(1)}
            if self.act(unit, m) != m:
                raise NotAModule(f"unit does not act as identity on {self.labels[j]}")
            if self.d(self.d(m)):
                raise NotAModule(f"d^2 != 0 on {self.labels[j]}")
        for i, k, j in itertools.product(range(A.dim), range(A.dim), range(self.dim)):
            a, b, m = {i: Fraction(1)}, {k: Fraction(1)}, {j: Fraction(1)}
            if self.act(A.multiply(a, b), m) != self.act(a, self.act(b, m)):
                raise NotAModule(f"({A.labels[i]}{A.labels[k]}).{self.labels[j]} != {A.labels[i]}.({A.labels[k]}.{self.labels[j]})")
        for i, j in itertools.product(range(A.dim), range(self.dim)):
            a, m = {i: Fraction(1)}, {j: Fraction(1)}
            lhs = self.d(self.act(a, m))
            rhs = self.act(A.d(a), m)
            s = -1 if bdeg[i] % 2 else 1
            _add_into(rhs, Fraction(s), self.act(a, self.d(m)))
            if lhs != rhs:
                raise NotAModule(f"Leibniz rule fails on {A.labels[i]}.{self.labels[j]}")


def square_zero(base: BaseCdga, module: CdgaModule, validate: bool = True) -> BaseCdga:
    """Trivial square-zero extension ``A (+) M`` with ``M.M = 0``.

    Module basis elements come after the base ones.  The graded-commutative
    right action is ``m.a = (-1)^{|m||a|} a.m``.
    """
    if validate:
        module.validate()
    nA = base.dim
    labels = list(base.labels) + list(module.labels)
    degrees = list(base.degrees) + list(module.degrees)
    mult = {key: dict(v) for key, v in base.mult.items()}
    for (i, j), p in module.action.items():
        shifted = {nA + k: v for k, v in p.items()}
        mult[(i, nA + j)] = shifted
        s = -1 if base.degrees[i] * module.degrees[j] % 2 else 1
        mult[(nA + j, i)] = {k: s * v for k, v in shifted.items()}
    diff = {i: dict(v) for i, v in base.differential.items()}
    for j, dj in module.differential.items():
        diff[nA + j] = {nA + k: v for k, v in dj.items()}
    out = BaseCdga(labels, degrees, base.unit, mult, diff)
    if validate:
        out.validate()
        _check_augmentation(out, nA)
    return out


def _check_augmentation(ext: BaseCdga, n_base: int) -> None:
    """The projection ``A (+) M -> A`` is an algebra map commuting with d."""

    def proj(x):
        return {k: v for k, v in x.items() if k < n_base}

    for i, j in itertools.product(range(ext.dim), repeat=2):
        a, b = {i: Fraction(1)}, {j: Fraction(1)}
        lhs = proj(ext.multiply(a, b))
        rhs = ext.multiply(proj(a), proj(b))
        if lhs != proj(rhs):
            raise CdgaAxiomViolation("augmentation is not multiplicative")
    for i in range(ext.dim):
        a = {i: Fraction(1)}
        if proj(ext.d(a)) != proj(ext.d(proj(a))):
            raise CdgaAxiomViolation("augmentation does not commute with d")


# ---------------------------------------------------------------------------
# truncated polynomial algebras


def monomials(d: int, n: int) -> list[tuple[int, ...]]:
    """Exponent vectors of ``k[x_1..x_d]/(x_i^n)`` in lexicographic order."""
    return list(itertools.product(range(n), repeat=d))


def monomial_label(a: tuple[int, ...]) -> str:
    if not any(a):
        return "1"
    return "*".join(f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}" for i, e in enumerate(a) if e)


def truncated_polynomial(d: int, n: int, degree: int = 0) -> BaseCdga:
    """``A_n = k[x_1..x_d]/(x_1^n, ..., x_d^n)`` with every ``x_i`` in the
    given cohomological degree (zero by default)."""
    if d < 1 or n < 1:
        raise ValueError("need d >= 1 and n >= 1")
    if degree % 2 and n > 2:
        raise ValueError("odd generators square to zero; use n <= 2")
    mons = monomials(d, n)
    index = {a: i for i, a in enumerate(mons)}
    mult = {}
    for a in mons:
        for b in mons:
            c = tuple(x + y for x, y in zip(a, b))
            if c in index:
                # odd generators anticommute: sign of moving b's letters past a's
                swaps = sum(a[i] * b[j] for j in range(d) for i in range(j + 1, d)) if degree % 2 else 0
                mult[(index[a], index[b])] = {index[c]: -1 if swaps % 2 else 1}
    return BaseCdga([monomial_label(a) for a in mons], [degree * sum(a) for a in mons], index[(0,) * d], mult)


def restriction_module(target: BaseCdga, source: BaseCdga, hom: Mapping[int, Mapping[int, object]], shift: int = 0, prefix: str = "") -> CdgaModule:
    """``target`` viewed as a ``source``-module along an algebra map
    ``hom: source -> target`` and shifted so that ``(M[-shift])`` sits
    ``shift`` degrees higher."""
    hom = _clean(hom)
    action = {}
    for i in range(source.dim):
        img = hom.get(i, {})
        for j in range(target.dim):
            p = target.multiply(img, {j: Fraction(1)})
            if p:
                action[(i, j)] = p
    labels = [f"{prefix}{l}" for l in target.labels]
    degrees = [x + shift for x in target.degrees]
    diff = {j: dict(v) for j, v in target.differential.items()}
    return CdgaModule(source, labels, degrees, action, diff)
