"""Chevalley-Eilenberg chains ``Sym_A(L[1])`` and cochains with coefficients.

A word is a sorted tuple of Lie basis indices standing for the monomial
``eta.x_1 ... eta.x_n``; ``eta.x`` has degree ``|x| - 1``.  A chain basis
element is a pair ``(a, word)`` with ``a`` a base basis index.

The chain differential is

    d(eta.x_1 ... eta.x_n) = sum_{i<j} (-1)^{T_ij} eta.[x_i, x_j] (rest)
                             - sum_i (-1)^{S_i} eta.x_1 ... eta.dx_i ... eta.x_n

with ``S_i`` the total degree of ``eta.x_1 ... eta.x_{i-1}`` and
``T_ij = |eta x_i| S_i + |eta x_j| S_j + |eta x_i||eta x_j|``, the Koszul
sign of moving the pair to the front.  ``convention="shifted"`` adds
``|x_i|`` to ``T_ij``; ``convention="plain"`` does not.  Only the shifted
rule is symmetric in the pair, and only it squares to zero in general (see
:func:`convention_report`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from ..cdga import BaseCdga
from ..exactalg import ChainComplex, InvalidComplex, cohomology_dims, complex_from_rule
from ..scalars import QQ, Field
from .lie import DgLieAlgebra, LieAxiomViolation, validate_lie

Word = tuple[int, ...]
Key = tuple[int, Word]

CONVENTIONS = ("shifted", "plain")
DEFAULT_CONVENTION = "shifted"


class NotARepresentation(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def _acc(out, key, c):
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _odd(n: int) -> bool:
    return n % 2 == 1


class SymWords:
    """Sorting words of ``Sym(L[1])`` with Koszul signs."""

    def __init__(self, lie: DgLieAlgebra):
        self.lie = lie
        self.sdeg = [g - 1 for g in lie.degrees]

    def degree(self, w: Sequence[int]) -> int:
        return sum(self.sdeg[i] for i in w)

    def weight(self, w: Sequence[int]) -> int:
        return sum(self.lie.weights[i] for i in w)

    def normalize(self, w: Sequence[int]) -> tuple[int, Word]:
        """Sign and sorted word; sign 0 when an odd letter repeats."""
        w = list(w)
        sign = 1
        # insertion sort, tracking odd-odd transpositions
        for i in range(1, len(w)):
            j = i
            while j > 0 and w[j - 1] > w[j]:
                if _odd(self.sdeg[w[j]]) and _odd(self.sdeg[w[j - 1]]):
                    sign = -sign
                w[j - 1], w[j] = w[j], w[j - 1]
                j -= 1
        for a, b in zip(w, w[1:]):
            if a == b and _odd(self.sdeg[a]):
                return 0, ()
        return sign, tuple(w)

    def words(self, max_len: int | None = None, weight: int | None = None, exact_weight: int | None = None) -> list[Word]:
        """Basis words, bounded by length and/or total weight."""
        n = self.lie.dim
        wts = self.lie.weights
        out: list[Word] = []

        def rec(start, cur, tot):
            out.append(tuple(cur))
            if max_len is not None and len(cur) >= max_len:
                return
            for i in range(start, n):
                if weight is not None and tot + wts[i] > weight:
                    continue
                if cur and cur[-1] == i and _odd(self.sdeg[i]):
                    continue
                cur.append(i)
                rec(i, cur, tot + wts[i])
                cur.pop()

        if max_len is None and weight is None:
            raise ValueError("need a length or weight bound")
        rec(0, [], 0)
        if exact_weight is not None:
            out = [w for w in out if self.weight(w) == exact_weight]
        return out


class CEChains:
    """The chain differential on ``A (x) Sym(L[1])``."""

    def __init__(self, lie: DgLieAlgebra, convention: str = DEFAULT_CONVENTION):
        if convention not in CONVENTIONS:
            raise ValueError(f"unknown sign convention {convention!r}")
        self.lie = lie
        self.base: BaseCdga = lie.base
        self.sym = SymWords(lie)
        self.convention = convention
        self._word_cache: dict[Word, dict[Key, Fraction]] = {}

    def key_degree(self, key: Key) -> int:
        a, w = key
        return self.base.degrees[a] + self.sym.degree(w)

    def d_word(self, w: Word) -> dict[Key, Fraction]:
        """Differential of ``1 (x) w``."""
        cached = self._word_cache.get(w)
        if cached is not None:
            return cached
        lie, A, sd = self.lie, self.base, self.sym.sdeg
        out: dict[Key, Fraction] = {}
        prefix = [0]
        for x in w:
            prefix.append(prefix[-1] + sd[x])
        n = len(w)
        for i in range(n):
            for j in range(i + 1, n):
                xi, xj = w[i], w[j]
                br = lie.brackets.get((xi, xj))
                if not br:
                    continue
                Si, Sj = prefix[i], prefix[j]
                T = sd[xi] * Si + sd[xj] * Sj + sd[xi] * sd[xj]
                if self.convention == "shifted":
                    T += lie.degrees[xi]
                rest = w[:i] + w[i + 1:j] + w[j + 1:]
                for (a, k), c in br.items():
                    # eta.(a e_k) = (-1)^{|a|} a eta.e_k
                    s0 = -1 if (T + A.degrees[a]) % 2 else 1
                    s1, nw = self.sym.normalize((k,) + rest)
                    if s1:
                        _acc(out, (a, nw), s0 * s1 * c)
        for i in range(n):
            xi = w[i]
            dx = lie.differential.get(xi)
            if not dx:
                continue
            Si = prefix[i]
            for (a, k), c in dx.items():
                s0 = -1 if (Si + 1 + A.degrees[a] * (1 + Si)) % 2 else 1
                s1, nw = self.sym.normalize(w[:i] + (k,) + w[i + 1:])
                if s1:
                    _acc(out, (a, nw), s0 * s1 * c)
        self._word_cache[w] = out
        return out

    def d(self, key: Key) -> dict[Key, Fraction]:
        a, w = key
        A = self.base
        out: dict[Key, Fraction] = {}
        for a2, c in A.d({a: Fraction(1)}).items():
            _acc(out, (a2, w), c)
        s = -1 if A.degrees[a] % 2 else 1
        for (b, w2), c in self.d_word(w).items():
            for p, cp in A.basis_product(a, b).items():
                _acc(out, (p, w2), s * c * cp)
        return out

    def complex(self, words: Sequence[Word]) -> ChainComplex:
        keys: dict[int, list[Key]] = {}
        for w in words:
            for a in range(self.base.dim):
                key = (a, w)
                keys.setdefault(self.key_degree(key), []).append(key)
        return complex_from_rule(keys, self.d, self._label, check=False)

    def _label(self, key: Key) -> str:
        a, w = key
        body = ".".join(f"eta{self.lie.labels[i]}" for i in w) or "1"
        return body if a == self.base.unit else f"{self.base.labels[a]}*{body}"

    # truncations ------------------------------------------------------------
    def blocks(self, weight: int) -> dict[int | None, ChainComplex]:
        """Weight-graded algebras: one complex per total weight ``0..weight``.
        Otherwise a single complex on words of length ``<= weight``."""
        if self.lie.weight_graded:
            words = self.sym.words(weight=weight)
            by_w: dict[int, list[Word]] = {}
            for w in words:
                by_w.setdefault(self.sym.weight(w), []).append(w)
            return {wt: self.complex(ws) for wt, ws in sorted(by_w.items())}
        return {None: self.complex(self.sym.words(max_len=weight))}

    def coproduct(self, w: Word) -> dict[tuple[int, Word, Word], Fraction]:
        """Unshuffle coproduct of ``1 (x) w`` (keys carry the base index)."""
        out: dict = {}
        sd = self.sym.sdeg
        n = len(w)
        for r in range(n + 1):
            for P in itertools.combinations(range(n), r):
                Pset = set(P)
                left = tuple(w[p] for p in P)
                right = tuple(w[q] for q in range(n) if q not in Pset)
                inv = sum(1 for q in range(n) if q not in Pset for p in P if q < p and _odd(sd[w[q]]) and _odd(sd[w[p]]))
                _acc(out, (self.base.unit, left, right), -1 if inv % 2 else 1)
        return out

    def coderivation_defect(self, w: Word) -> dict:
        """``Delta d - (d (x) 1 + 1 (x) d) Delta`` on ``1 (x) w``."""
        A = self.base
        lhs: dict = {}
        for (a, w2), c in self.d_word(w).items():
            for (_, l, r), c2 in self.coproduct(w2).items():
                _acc(lhs, (a, l, r), c * c2)
        rhs: dict = {}
        for (_, l, r), c in self.coproduct(w).items():
            for (a, l2), c2 in self.d_word(l).items():
                _acc(rhs, (a, l2, r), c * c2)
            sl = self.sym.degree(l)
            for (a, r2), c2 in self.d_word(r).items():
                s = -1 if (sl + A.degrees[a] * sl) % 2 else 1
                _acc(rhs, (a, l, r2), s * c * c2)
        for k, v in rhs.items():
            _acc(lhs, k, -v)
        return lhs


# ---------------------------------------------------------------------------
# homology


@dataclass
class CEResult:
    lie: str
    weight: int
    weight_graded: bool
    convention: str
    dims: dict[int | None, dict[int, int]] = field(default_factory=dict)

    def totals(self) -> dict[int, int]:
        tot: dict[int, int] = {}
        for h in self.dims.values():
            for deg, v in h.items():
                tot[deg] = tot.get(deg, 0) + v
        return dict(sorted(tot.items()))

    def homological(self) -> dict[int, int]:
        """Totals indexed by homological degree ``-n``."""
        return {-deg: v for deg, v in sorted(self.totals().items(), reverse=True)}


def check_square_zero(c: ChainComplex, what: str) -> None:
    try:
        c.check()
    except InvalidComplex as exc:
        raise InvalidComplex(f"{what}: {exc}") from None


def ce_homology(lie: DgLieAlgebra, weight: int, field: Field = QQ, convention: str = DEFAULT_CONVENTION, validate: bool = True) -> CEResult:
    if validate:
        validate_lie(lie)
    ce = CEChains(lie, convention)
    res = CEResult(lie.name, weight, lie.weight_graded, convention)
    for wt, c in ce.blocks(weight).items():
        check_square_zero(c, f"CE chains of {lie.name or 'L'} (weight {wt})")
        res.dims[wt] = cohomology_dims(c, field)
    return res


def convention_report(lie: DgLieAlgebra, weight: int) -> dict[str, dict]:
    """For each sign rule: does the differential square to zero, and is the
    bracket term symmetric under swapping a pair of letters."""
    out = {}
    for conv in CONVENTIONS:
        ce = CEChains(lie, conv)
        ok = True
        witness = None
        for wt, c in ce.blocks(weight).items():
            try:
                c.check()
            except InvalidComplex as exc:
                ok, witness = False, f"weight {wt}: {exc}"
                break
        sym = _pair_symmetry(lie, conv)
        out[conv] = {"d_squared_zero": ok, "witness": witness, "pair_symmetric": sym}
    return out


def _pair_symmetry(lie: DgLieAlgebra, conv: str) -> bool:
    """Is ``eta.x eta.y -> +-eta.[x, y]`` compatible with ``eta.x eta.y =
    (-1)^{|eta x||eta y|} eta.y eta.x``?"""
    for i, j in itertools.product(range(lie.dim), repeat=2):
        si, sj = lie.degrees[i] - 1, lie.degrees[j] - 1
        q_ij = lie.bracket(lie.basis(i), lie.basis(j))
        q_ji = lie.bracket(lie.basis(j), lie.basis(i))
        if conv == "shifted":
            q_ij = {k: (-v if lie.degrees[i] % 2 else v) for k, v in q_ij.items()}
            q_ji = {k: (-v if lie.degrees[j] % 2 else v) for k, v in q_ji.items()}
        s = -1 if si * sj % 2 else 1
        if q_ij != {k: s * v for k, v in q_ji.items()}:
            return False
    return True


# ---------------------------------------------------------------------------
# representations and cochains


class Representation:
    """A dg-module ``M`` over ``L``, free over the base with basis ``m_j``.

    ``action[(i, j)]`` is ``e_i . m_j`` and ``differential[j]`` is ``d m_j``,
    both as ``{(a, k): c}``.
    """

    def __init__(self, lie: DgLieAlgebra, labels: Sequence[str], degrees: Sequence[int], action: Mapping | None = None, differential: Mapping | None = None, name: str = ""):
        self.lie = lie
        self.labels = tuple(labels)
        self.degrees = tuple(int(x) for x in degrees)
        self.name = name
        u = lie.base.unit

        def norm(t):
            out = {}
            for key, val in (t or {}).items():
                row = {}
                for tk, c in val.items():
                    tk = tk if isinstance(tk, tuple) else (u, tk)
                    row[tk] = Fraction(c)
                row = {k: v for k, v in row.items() if v}
                if row:
                    out[key] = row
            return out

        self.action = norm(action)
        self.differential = norm(differential)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def is_trivial(self) -> bool:
        return not self.action

    @classmethod
    def trivial(cls, lie: DgLieAlgebra) -> "Representation":
        return cls(lie, ["1"], [0], {}, {}, name="trivial")

    @classmethod
    def adjoint(cls, lie: DgLieAlgebra) -> "Representation":
        return cls(lie, lie.labels, lie.degrees, dict(lie.brackets), dict(lie.differential), name="adjoint")

    def act(self, i: int, m: Mapping[tuple[int, int], Fraction]) -> dict:
        """``e_i . m`` for ``m = {(a, j): c}``."""
        A = self.lie.base
        out: dict = {}
        for (a, j), c in m.items():
            s = -1 if self.lie.degrees[i] * A.degrees[a] % 2 else 1
            for (b, k), c2 in self.action.get((i, j), {}).items():
                for p, cp in A.basis_product(a, b).items():
                    _acc(out, (p, k), s * c * c2 * cp)
        return out

    def act_elem(self, x: Mapping[tuple[int, int], Fraction], m) -> dict:
        A = self.lie.base
        out: dict = {}
        for (a, i), c in x.items():
            for (b, k), c2 in self.act(i, m).items():
                for p, cp in A.basis_product(a, b).items():
                    _acc(out, (p, k), c * c2 * cp)
        return out

    def d(self, m) -> dict:
        A = self.lie.base
        out: dict = {}
        for (a, j), c in m.items():
            for a2, c2 in A.d({a: Fraction(1)}).items():
                _acc(out, (a2, j), c * c2)
            s = -1 if A.degrees[a] % 2 else 1
            for (b, k), c3 in self.differential.get(j, {}).items():
                for p, cp in A.basis_product(a, b).items():
                    _acc(out, (p, k), s * c * c3 * cp)
        return out

    def validate(self) -> None:
        lie, A = self.lie, self.lie.base
        for (i, j), v in self.action.items():
            for (a, k) in v:
                if A.degrees[a] + self.degrees[k] != lie.degrees[i] + self.degrees[j]:
                    raise NotARepresentation(f"{lie.labels[i]}.{self.labels[j]} has the wrong degree", ("degree", lie.labels[i], self.labels[j]))
        for j, v in self.differential.items():
            for (a, k) in v:
                if A.degrees[a] + self.degrees[k] != self.degrees[j] + 1:
                    raise NotARepresentation(f"d({self.labels[j]}) has the wrong degree", ("degree", self.labels[j]))
        u = A.unit
        for j in range(self.dim):
            m = {(u, j): Fraction(1)}
            if self.d(self.d(m)):
                raise NotARepresentation(f"d^2 != 0 on {self.labels[j]}", ("d2", self.labels[j]))
            for i in range(lie.dim):
                x = lie.basis(i)
                lhs = self.d(self.act(i, m))
                s = -1 if lie.degrees[i] % 2 else 1
                rhs = self.act_elem(lie.d(x), m)
                for key, c in self.act(i, self.d(m)).items():
                    _acc(rhs, key, s * c)
                if lhs != rhs:
                    raise NotARepresentation(f"d is not compatible with the action on ({lie.labels[i]}, {self.labels[j]})", ("leibniz", lie.labels[i], self.labels[j]))
                for i2 in range(lie.dim):
                    y = lie.basis(i2)
                    lhs = self.act_elem(lie.bracket(x, y), m)
                    s = -1 if lie.degrees[i] * lie.degrees[i2] % 2 else 1
                    rhs = self.act(i, self.act(i2, m))
                    for key, c in self.act(i2, self.act(i, m)).items():
                        _acc(rhs, key, -s * c)
                    if lhs != rhs:
                        raise NotARepresentation(f"[{lie.labels[i]},{lie.labels[i2]}] does not act as the commutator on {self.labels[j]}", ("bracket", lie.labels[i], lie.labels[i2], self.labels[j]))


class CECochains:
    """``Hom_A(A (x) Sym(L[1]), M)`` on a finite set of words.

    A basis cochain ``(w, a, j)`` sends ``1 (x) w`` to ``a m_j``.  The
    differential is ``D phi = d_M phi - (-1)^{|phi|} phi o d + theta(phi)``
    where ``theta(phi)(eta.x_1 ... eta.x_n)`` sums
    ``(-1)^{|eta x_i| S_i + |phi||eta x_i|} x_i . phi(rest)``.
    """

    def __init__(self, rep: Representation, words: Sequence[Word], convention: str = DEFAULT_CONVENTION):
        self.rep = rep
        self.lie = rep.lie
        self.base = rep.lie.base
        self.chains = CEChains(self.lie, convention)
        self.sym = self.chains.sym
        self.words = list(words)
        wordset = set(self.words)
        # phi o d: which longer/equal words w' have d(1 (x) w') touching w
        self._preimage: dict[Word, list[tuple[Word, int, Fraction]]] = {}
        for w2 in self.words:
            for (b, w), c in self.chains.d_word(w2).items():
                if w in wordset:
                    self._preimage.setdefault(w, []).append((w2, b, c))
        # theta: which words extend w by one letter
        self._extend: dict[Word, list[tuple[Word, int, int]]] = {}
        sd = self.sym.sdeg
        for w2 in self.words:
            pre = 0
            for pos, x in enumerate(w2):
                rest = w2[:pos] + w2[pos + 1:]
                if rest in wordset:
                    self._extend.setdefault(rest, []).append((w2, x, pre))
                pre += sd[x]

    def key_degree(self, key) -> int:
        w, a, j = key
        return self.base.degrees[a] + self.rep.degrees[j] - self.sym.degree(w)

    def D(self, key) -> dict:
        w, a, j = key
        A, rep = self.base, self.rep
        deg_phi = self.key_degree(key)
        out: dict = {}
        val = {(a, j): Fraction(1)}
        for (a2, k), c in rep.d(val).items():
            _acc(out, (w, a2, k), c)
        s_phi = -1 if deg_phi % 2 else 1
        for w2, b, c in self._preimage.get(w, ()):
            # phi(b (x) w) = (-1)^{|phi||b|} b phi(1 (x) w)
            s = -s_phi * (-1 if deg_phi * A.degrees[b] % 2 else 1)
            for p, cp in A.basis_product(b, a).items():
                _acc(out, (w2, p, j), s * c * cp)
        sd = self.sym.sdeg
        for w2, x, pre in self._extend.get(w, ()):
            s = (-1 if (sd[x] * pre + deg_phi * sd[x]) % 2 else 1)
            for (a2, k), c in rep.act(x, val).items():
                _acc(out, (w2, a2, k), s * c)
        return out

    def complex(self) -> ChainComplex:
        keys: dict[int, list] = {}
        for w in self.words:
            for a in range(self.base.dim):
                for j in range(self.rep.dim):
                    key = (w, a, j)
                    keys.setdefault(self.key_degree(key), []).append(key)
        return complex_from_rule(keys, self.D, self._label, check=False)

    def _label(self, key) -> str:
        w, a, j = key
        body = ".".join(f"eta{self.lie.labels[i]}" for i in w) or "1"
        val = self.rep.labels[j] if a == self.base.unit else f"{self.base.labels[a]}*{self.rep.labels[j]}"
        return f"({body})*->{val}"


def ce_cohomology(lie: DgLieAlgebra, weight: int, rep: Representation | None = None, field: Field = QQ, convention: str = DEFAULT_CONVENTION, validate: bool = True) -> CEResult:
    """Cohomology of ``Hom_A(Sym_A(L[1]), M)`` truncated at ``weight``.

    With trivial coefficients and a weight-graded ``L`` the complex splits by
    the weight of the words; otherwise words of length ``<= weight`` are used
    (a quotient complex, since the chain truncation is a subcomplex).
    """
    rep = rep or Representation.trivial(lie)
    if validate:
        validate_lie(lie)
        rep.validate()
    ce = CEChains(lie, convention)
    res = CEResult(lie.name, weight, lie.weight_graded and rep.is_trivial, convention)
    if lie.weight_graded and rep.is_trivial:
        groups: dict[int, list[Word]] = {}
        for w in ce.sym.words(weight=weight):
            groups.setdefault(ce.sym.weight(w), []).append(w)
    else:
        groups = {None: ce.sym.words(max_len=weight)}
    for wt, words in sorted(groups.items(), key=lambda kv: (kv[0] is None, kv[0] or 0)):
        c = CECochains(rep, words, convention).complex()
        check_square_zero(c, f"CE cochains of {lie.name or 'L'} with {rep.name or 'M'} coefficients (weight {wt})")
        res.dims[wt] = cohomology_dims(c, field)
    return res


def coalgebra_check(lie: DgLieAlgebra, weight: int, convention: str = DEFAULT_CONVENTION) -> dict:
    """Generators are primitive and ``d`` is a coderivation on all words of
    length ``<= weight``."""
    ce = CEChains(lie, convention)
    u = lie.base.unit
    for i in range(lie.dim):
        cop = ce.coproduct((i,))
        if cop != {(u, (i,), ()): 1, (u, (), (i,)): 1}:
            return {"ok": False, "witness": f"eta{lie.labels[i]} is not primitive"}
    for w in ce.sym.words(max_len=weight):
        defect = ce.coderivation_defect(w)
        if defect:
            return {"ok": False, "witness": "d is not a coderivation on " + ".".join(lie.labels[i] for i in w)}
    return {"ok": True, "witness": None}
