"""Named Lie algebras used by the test battery and the command line."""

from __future__ import annotations

import itertools
import random

from ..exactalg import ChainComplex, GradedVectorSpace, complex_from_rule
from .free import free_lie
from .lie import DgLieAlgebra, abelian, corrupted_sl2, sl2


def graded_space(degrees) -> GradedVectorSpace:
    comps: dict[int, list[str]] = {}
    for i, g in enumerate(degrees):
        comps.setdefault(int(g), []).append("xyzuvw"[i] if i < 6 else f"g{i}")
    return GradedVectorSpace(comps)


def acyclic_pair(degree: int = -1) -> ChainComplex:
    """``u -> v`` with ``|u| = degree``."""
    return complex_from_rule({degree: ["u"], degree + 1: ["v"]}, lambda k: {"v": 1} if k == "u" else {})


def lie_fixtures(weight: int = 4) -> dict[str, DgLieAlgebra]:
    """Abelian algebras up to dimension 3, sl2 and free Lie algebras on at
    most two generators (truncated at ``weight``)."""
    out = {
        "abelian(0)": abelian([0]),
        "abelian(1)": abelian([1]),
        "abelian(0,1)": abelian([0, 1]),
        "abelian(1,1)": abelian([1, 1]),
        "abelian(-1,0) d": abelian([-1, 0], {0: {1: 1}}),
        "abelian(0,0,1)": abelian([0, 0, 1]),
        "abelian(-1,0,1) d": abelian([-1, 0, 1], {0: {1: 1}}),
        "sl2": sl2(),
    }
    for degs in ([0], [1], [0, 0], [0, 1], [1, 1], [-1, 0]):
        out[f"free{tuple(degs)}"] = free_lie(graded_space(degs), weight)
    out["free(u->v)"] = free_lie(acyclic_pair(), weight)
    return out


def graded_spaces(max_dim: int = 3, degrees=(-1, 0, 1)) -> list[tuple[int, ...]]:
    """Degree multisets of every graded space of total dim ``1..max_dim``."""
    out = []
    for n in range(1, max_dim + 1):
        out.extend(itertools.combinations_with_replacement(degrees, n))
    return out


def permute_lie(l: DgLieAlgebra, perm) -> DgLieAlgebra:
    """The same algebra with basis element ``i`` moved to position ``perm[i]``."""
    inv = {p: i for i, p in enumerate(perm)}
    order = [inv[k] for k in range(l.dim)]

    def move(row):
        return {(a, perm[k]): c for (a, k), c in row.items()}

    brackets = {(perm[i], perm[j]): move(v) for (i, j), v in l.brackets.items()}
    diff = {perm[i]: move(v) for i, v in l.differential.items()}
    return DgLieAlgebra(
        [l.labels[i] for i in order],
        [l.degrees[i] for i in order],
        brackets,
        diff,
        base=l.base,
        weights=[l.weights[i] for i in order],
        name=l.name,
    )


def shuffled_lie(l: DgLieAlgebra, rng: random.Random) -> DgLieAlgebra:
    return permute_lie(l, rng.sample(range(l.dim), l.dim))


def builtin_lie(name: str) -> DgLieAlgebra:
    """``sl2``, ``sl2-corrupted``, ``abelian:<deg,...>`` or
    ``free:<deg,...>:<weight>``."""
    if name == "sl2":
        return sl2()
    if name == "sl2-corrupted":
        return corrupted_sl2()
    kind, _, rest = name.partition(":")
    try:
        if kind == "abelian":
            return abelian([int(x) for x in rest.split(",") if x])
        if kind == "free":
            degs, _, w = rest.partition(":")
            return free_lie(graded_space([int(x) for x in degs.split(",") if x]), int(w or 3))
    except ValueError as exc:
        raise ValueError(f"bad built-in Lie algebra {name!r}: {exc}") from None
    raise ValueError(f"unknown built-in Lie algebra {name!r}")
