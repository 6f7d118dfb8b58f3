"""dg-Lie algebras free of finite rank over a finite-dimensional cdga.

An element is a dict ``{(a, k): c}`` meaning ``sum c * A_a * e_k`` where
``A_a`` runs over the base basis and ``e_k`` over the Lie basis.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Mapping, Sequence

from ..cdga import BaseCdga, CdgaAxiomViolation
from ..scalars import to_fraction

Elem = dict[tuple[int, int], Fraction]


class LieAxiomViolation(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def _acc(out: Elem, key, c) -> None:
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _normalize_table(table, base: BaseCdga, index) -> dict:
    """Accept ``{k: c}`` (field coefficients) or ``{(a, k): c}`` values."""
    out = {}
    for key, val in (table or {}).items():
        key = index(key)
        row = {}
        for t, c in val.items():
            if isinstance(t, tuple):
                a, k = t
            else:
                a, k = base.unit, t
            c = to_fraction(c)
            if c:
                row[(a, k)] = row.get((a, k), 0) + c
        row = {t: c for t, c in row.items() if c}
        if row:
            out[key] = row
    return out


class DgLieAlgebra:
    """Structure constants of a dg-Lie algebra ``L`` free over ``base``.

    ``brackets[(i, j)]`` and ``differential[i]`` are elements.  Pairs missing
    from ``brackets`` are filled in by graded antisymmetry when their mirror is
    present, and are otherwise zero.

    ``weights`` attaches a positive weight to each basis element.  When
    brackets add weights and ``d`` preserves them the algebra is weight
    graded and Chevalley-Eilenberg complexes split by total weight; otherwise
    truncations use word length.
    """

    def __init__(self, labels: Sequence[str], degrees: Sequence[int], brackets: Mapping | None = None, differential: Mapping | None = None, base: BaseCdga | None = None, weights: Sequence[int] | None = None, name: str = ""):
        self.labels = tuple(labels)
        self.degrees = tuple(int(x) for x in degrees)
        if len(self.labels) != len(self.degrees):
            raise LieAxiomViolation("labels and degrees differ in length")
        if len(set(self.labels)) != len(self.labels):
            raise LieAxiomViolation("duplicate basis labels")
        self.base = base or BaseCdga.field()
        self.name = name
        self.weights = tuple(int(w) for w in weights) if weights is not None else (1,) * len(self.labels)
        if len(self.weights) != len(self.labels) or any(w < 1 for w in self.weights):
            raise LieAxiomViolation("weights must be positive, one per basis element")
        br = _normalize_table(brackets, self.base, lambda k: (int(k[0]), int(k[1])))
        for (i, j), v in list(br.items()):
            if (j, i) not in br:
                s = -1 if self.degrees[i] * self.degrees[j] % 2 else 1
                mirrored = {}
                for (a, k), c in v.items():
                    mirrored[(a, k)] = -s * c
                br[(j, i)] = mirrored
        self.brackets = br
        self.differential = _normalize_table(differential, self.base, int)
        self.weight_graded = self._detect_weight_grading()

    # basics -----------------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def basis(self, k: int) -> Elem:
        return {(self.base.unit, k): Fraction(1)}

    def elem_degree(self, x: Elem) -> int:
        degs = {self.base.degrees[a] + self.degrees[k] for (a, k), c in x.items() if c}
        if len(degs) != 1:
            raise LieAxiomViolation(f"inhomogeneous element {x}")
        return degs.pop()

    def _detect_weight_grading(self) -> bool:
        w = self.weights
        for (i, j), v in self.brackets.items():
            if any(w[k] != w[i] + w[j] for (_, k) in v):
                return False
        for i, v in self.differential.items():
            if any(w[k] != w[i] for (_, k) in v):
                return False
        return True

    # arithmetic -------------------------------------------------------------
    def scale_by_base(self, a: Mapping[int, Fraction], x: Elem) -> Elem:
        """``a . x`` for ``a`` in the base and ``x`` in ``L``."""
        out: Elem = {}
        A = self.base
        for (b, k), c in x.items():
            for ai, ca in a.items():
                for p, cp in A.basis_product(ai, b).items():
                    _acc(out, (p, k), ca * c * cp)
        return out

    def bracket(self, x: Elem, y: Elem) -> Elem:
        A = self.base
        out: Elem = {}
        for (a, i), c in x.items():
            for (b, j), e in y.items():
                br = self.brackets.get((i, j))
                if not br:
                    continue
                # [a e_i, b e_j] = (-1)^{|e_i||b|} a b [e_i, e_j]
                s = -1 if self.degrees[i] * A.degrees[b] % 2 else 1
                ab = A.basis_product(a, b)
                if not ab:
                    continue
                for (a3, k), c3 in br.items():
                    for p, cp in ab.items():
                        for q, cq in A.basis_product(p, a3).items():
                            _acc(out, (q, k), s * c * e * cp * c3 * cq)
        return out

    def d(self, x: Elem) -> Elem:
        A = self.base
        out: Elem = {}
        for (a, i), c in x.items():
            for a2, c2 in A.d({a: Fraction(1)}).items():
                _acc(out, (a2, i), c * c2)
            s = -1 if A.degrees[a] % 2 else 1
            for (b, k), c3 in self.differential.get(i, {}).items():
                for p, cp in A.basis_product(a, b).items():
                    _acc(out, (p, k), s * c * c3 * cp)
        return out

    def add(self, *xs: Elem, coeffs: Sequence = ()) -> Elem:
        out: Elem = {}
        coeffs = list(coeffs) + [1] * (len(xs) - len(coeffs))
        for x, c in zip(xs, coeffs):
            for key, v in x.items():
                _acc(out, key, c * v)
        return out

    def format(self, x: Elem) -> str:
        if not x:
            return "0"
        parts = []
        for (a, k), c in sorted(x.items()):
            coef = "" if c == 1 else f"{c}*"
            pre = "" if a == self.base.unit else f"{self.base.labels[a]}*"
            parts.append(f"{coef}{pre}{self.labels[k]}")
        return " + ".join(parts)

    def __repr__(self):
        return f"DgLieAlgebra({self.name or 'unnamed'}, dim={self.dim})"


# ---------------------------------------------------------------------------
# validation


def _mult_elements(l: DgLieAlgebra) -> list[tuple[str, Elem]]:
    """``A_a e_k`` for all base and Lie basis elements."""
    out = []
    for a in range(l.base.dim):
        for k in range(l.dim):
            lab = l.labels[k] if a == l.base.unit else f"{l.base.labels[a]}*{l.labels[k]}"
            out.append((lab, {(a, k): Fraction(1)}))
    return out


def validate_lie(l: DgLieAlgebra) -> dict:
    """Check degrees, ``d^2 = 0``, antisymmetry, Jacobi and Leibniz exactly.

    Raises :class:`LieAxiomViolation` naming the first failing element tuple.
    """
    A = l.base
    try:
        A.validate(require_nonpositive=True)
    except CdgaAxiomViolation as exc:
        raise LieAxiomViolation(f"base: {exc}") from None
    deg = l.degrees
    for (i, j), v in l.brackets.items():
        for (a, k) in v:
            if A.degrees[a] + deg[k] != deg[i] + deg[j]:
                raise LieAxiomViolation(f"[{l.labels[i]},{l.labels[j]}] has the wrong degree", ("degree", l.labels[i], l.labels[j]))
    for i, v in l.differential.items():
        for (a, k) in v:
            if A.degrees[a] + deg[k] != deg[i] + 1:
                raise LieAxiomViolation(f"d({l.labels[i]}) has the wrong degree", ("degree", l.labels[i]))
    elems = _mult_elements(l)
    for lab, x in elems:
        if l.d(l.d(x)):
            raise LieAxiomViolation(f"d^2 != 0 on {lab}", ("d2", lab))
    pairs = 0
    for (lx, x), (ly, y) in itertools.product(elems, repeat=2):
        dx, dy = l.elem_degree(x), l.elem_degree(y)
        s = -1 if dx * dy % 2 else 1
        if l.bracket(x, y) != {k: -s * v for k, v in l.bracket(y, x).items()}:
            raise LieAxiomViolation(f"antisymmetry fails on ({lx}, {ly})", ("antisymmetry", lx, ly))
        lhs = l.d(l.bracket(x, y))
        sx = -1 if dx % 2 else 1
        rhs = l.add(l.bracket(l.d(x), y), l.bracket(x, l.d(y)), coeffs=[1, sx])
        if lhs != rhs:
            raise LieAxiomViolation(f"Leibniz rule fails on ({lx}, {ly})", ("leibniz", lx, ly))
        pairs += 1
    triples = 0
    for (lx, x), (ly, y), (lz, z) in itertools.product(elems, repeat=3):
        dx, dy = l.elem_degree(x), l.elem_degree(y)
        lhs = l.bracket(x, l.bracket(y, z))
        s = -1 if dx * dy % 2 else 1
        rhs = l.add(l.bracket(l.bracket(x, y), z), l.bracket(y, l.bracket(x, z)), coeffs=[1, s])
        if lhs != rhs:
            raise LieAxiomViolation(f"Jacobi identity fails on ({lx}, {ly}, {lz})", ("jacobi", lx, ly, lz))
        triples += 1
    return {"ok": True, "pairs": pairs, "triples": triples, "weight_graded": l.weight_graded}


# ---------------------------------------------------------------------------
# fixtures


def sl2() -> DgLieAlgebra:
    e, h, f = 0, 1, 2
    br = {(h, e): {e: 2}, (h, f): {f: -2}, (e, f): {h: 1}}
    return DgLieAlgebra(["e", "h", "f"], [0, 0, 0], br, name="sl2")


def corrupted_sl2() -> DgLieAlgebra:
    """sl2 with ``[e, f] = h + e``; fails the Jacobi identity."""
    e, h, f = 0, 1, 2
    br = {(h, e): {e: 2}, (h, f): {f: -2}, (e, f): {h: 1, e: 1}}
    return DgLieAlgebra(["e", "h", "f"], [0, 0, 0], br, name="sl2-corrupted")


def abelian(degrees: Sequence[int], differential: Mapping | None = None, base: BaseCdga | None = None) -> DgLieAlgebra:
    labels = [f"a{i + 1}" for i in range(len(degrees))]
    return DgLieAlgebra(labels, degrees, {}, differential, base=base, name=f"abelian{tuple(degrees)}")


def base_change(l: DgLieAlgebra, base: BaseCdga) -> DgLieAlgebra:
    """``base (x)_k l`` for ``l`` defined over the field."""
    if not l.base.is_field:
        raise ValueError("base change starts from an algebra over the field")
    u = base.unit

    def move(t):
        return {k: {(u, kk): c for (_, kk), c in v.items()} for k, v in t.items()}

    return DgLieAlgebra(l.labels, l.degrees, move(l.brackets), move(l.differential), base=base, weights=l.weights, name=f"{l.name}@{base.dim}")


def from_document(doc: Mapping) -> DgLieAlgebra:
    """Build a Lie algebra over the field from a JSON-style document.

    ``{"basis": [...], "degrees": [...], "brackets": [[x, y, {z: "p/q"}], ...],
    "differential": {x: {y: "p/q"}}, "weights": [...]}``
    """
    labels = list(doc["basis"])
    idx = {l: i for i, l in enumerate(labels)}
    try:
        br = {}
        for x, y, val in doc.get("brackets", []):
            br[(idx[x], idx[y])] = {idx[z]: to_fraction(c) for z, c in val.items()}
        diff = {idx[x]: {idx[z]: to_fraction(c) for z, c in val.items()} for x, val in doc.get("differential", {}).items()}
    except KeyError as exc:
        raise LieAxiomViolation(f"unknown basis label {exc}") from None
    return DgLieAlgebra(labels, doc["degrees"], br, diff, weights=doc.get("weights"), name=doc.get("name", ""))


def to_document(l: DgLieAlgebra) -> dict:
    from ..scalars import format_scalar

    if not l.base.is_field:
        raise ValueError("only algebras over the field serialise")
    br = []
    for (i, j), v in sorted(l.brackets.items()):
        if i < j or (i == j):
            br.append([l.labels[i], l.labels[j], {l.labels[k]: format_scalar(c) for (_, k), c in sorted(v.items())}])
    diff = {l.labels[i]: {l.labels[k]: format_scalar(c) for (_, k), c in sorted(v.items())} for i, v in sorted(l.differential.items())}
    doc = {"name": l.name, "basis": list(l.labels), "degrees": list(l.degrees), "brackets": br, "differential": diff}
    if any(w != 1 for w in l.weights):
        doc["weights"] = list(l.weights)
    return doc
