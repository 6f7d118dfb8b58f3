"""Command-line driver.

Every operation has a JSON schema for its parameters.  A report echoes the
job that produced it (``inputs`` is itself a valid job document), so
``tateforge run`` on a report's inputs reproduces the report byte-for-byte.

Exit codes: 0 when every verdict passes, 1 when some invariant fails (the
report is still written), 2 when the input does not parse or validate (no
report).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable

import jsonschema

from . import __version__, koszul, loopspace, tate
from .dglie import (
    CONVENTIONS,
    DEFAULT_CONVENTION,
    LieAxiomViolation,
    NotARepresentation,
    Representation,
    WeightTooLarge,
    ce_cohomology,
    ce_homology,
    convention_report,
    envelope_quotient_oracle,
    free_lie,
    from_document,
    pbw_series_dims,
    pbw_symmetrize,
    to_document,
    validate_lie,
)
from .dglie.fixtures import builtin_lie, graded_space
from .exactalg import InvalidComplex
from .scalars import Field, FieldError, format_scalar, to_fraction
from .sparse import SparseMatrix

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    """Raised for documents that are well-formed JSON but cannot be used."""


# Failures of the mathematical input itself: reported with a witness, exit 1.
INVARIANT_ERRORS = (LieAxiomViolation, NotARepresentation, InvalidComplex)
# Everything else raised while reading or bounding the input: exit 2.
INPUT_ERRORS = (
    InputError,
    FieldError,
    jsonschema.ValidationError,
    json.JSONDecodeError,
    OSError,
    WeightTooLarge,
    koszul.WindowTooSmall,
    koszul.NotAModule,
    tate.InvalidLattice,
    loopspace.InvalidBounds,
)


# ---------------------------------------------------------------------------
# serialization


def scalar(x) -> str:
    return format_scalar(Fraction(x))


def matrix_rows(m: SparseMatrix) -> list[list[str]]:
    return [[scalar(v) for v in row] for row in m.to_dense()]


def dims(h) -> dict[str, int]:
    return {str(k): v for k, v in sorted(h.items()) if v}


def filled(h) -> dict[str, int]:
    """Dimensions on the full degree range, zeros included."""
    nz = [k for k, v in h.items() if v]
    if not nz:
        return {}
    return {str(k): h.get(k, 0) for k in range(min(nz), max(nz) + 1)}


def weighted(table) -> dict[str, dict[str, int]]:
    return {("all" if w is None else str(w)): dims(h) for w, h in sorted(table.items(), key=lambda kv: (kv[0] is None, kv[0] or 0))}


def totals(table) -> dict[int, int]:
    out: dict[int, int] = {}
    for h in table.values():
        for k, v in h.items():
            out[k] = out.get(k, 0) + v
    return out


def verdict(check: str, ok: bool, witness=None) -> dict:
    return {"check": check, "ok": bool(ok), "witness": None if ok else witness}


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# schemas

SCALAR = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}]}


def _int(lo: int, hi: int, doc: str = "") -> dict:
    s = {"type": "integer", "minimum": lo, "maximum": hi}
    if doc:
        s["description"] = doc
    return s


LIE_DOCUMENT = {
    "type": "object",
    "additionalProperties": False,
    "required": ["basis", "degrees"],
    "properties": {
        "name": {"type": "string"},
        "basis": {"type": "array", "items": {"type": "string", "minLength": 1}, "minItems": 1, "maxItems": 12, "uniqueItems": True},
        "degrees": {"type": "array", "items": _int(-6, 6), "minItems": 1, "maxItems": 12},
        "weights": {"type": "array", "items": _int(1, 8), "maxItems": 12},
        "brackets": {
            "type": "array",
            "items": {
                "type": "array",
                "prefixItems": [{"type": "string"}, {"type": "string"}, {"type": "object", "additionalProperties": SCALAR}],
                "minItems": 3,
                "maxItems": 3,
            },
        },
        "differential": {"type": "object", "additionalProperties": {"type": "object", "additionalProperties": SCALAR}},
    },
}
LIE = {"oneOf": [{"type": "string", "minLength": 1}, LIE_DOCUMENT], "description": "built-in name, path to a JSON document, or the document"}

D = _int(1, loopspace.MAX_DIMENSION, "number of variables")
N = _int(1, 8, "truncation order")
P = _int(1, 8, "pole order")
N0 = _int(0, 8, "truncation order")
P0 = _int(0, 8, "pole order")
WINDOW = _int(0, 12, "multidegree window")
SUBSET = {"type": "array", "items": _int(1, loopspace.MAX_DIMENSION, "direction, numbered from 1"), "uniqueItems": True, "maxItems": loopspace.MAX_DIMENSION}
MODULE = {
    "oneOf": [
        {"enum": ["A", "k"]},
        {"type": "object", "additionalProperties": False, "required": ["ideal"], "properties": {"ideal": {"type": "array", "items": {"type": "array", "items": _int(0, 12)}, "maxItems": 8}}},
    ]
}
LATTICE = {
    "type": "object",
    "additionalProperties": False,
    "required": ["window"],
    "properties": {
        "window": {"type": "array", "items": _int(-12, 12), "minItems": 2, "maxItems": 2},
        "rows": {"type": "array", "items": {"type": "array", "items": SCALAR, "maxItems": 12}, "maxItems": 12},
    },
}


def _params(props: dict, required=(), **defaults) -> dict:
    return {"type": "object", "additionalProperties": False, "required": list(required), "properties": props, "defaults": defaults}


@dataclass(frozen=True)
class Operation:
    name: str
    summary: str
    schema: dict
    run: Callable  # (params, field) -> (result, verdicts)
    rational_only: bool = False

    @property
    def defaults(self) -> dict:
        return self.schema.get("defaults", {})

    def validator_schema(self) -> dict:
        return {k: v for k, v in self.schema.items() if k != "defaults"}


OPERATIONS: dict[str, Operation] = {}


def operation(name: str, summary: str, schema: dict, rational_only: bool = False):
    def register(fn):
        OPERATIONS[name] = Operation(name, summary, schema, fn, rational_only)
        return fn

    return register


# ---------------------------------------------------------------------------
# Lie algebra input


def resolve_lie(spec):
    """Return ``(algebra, document)``; the document is what gets echoed."""
    if isinstance(spec, dict):
        doc = spec
    else:
        path = Path(spec)
        if path.suffix == ".json" or path.exists():
            doc = json.loads(path.read_text())
            jsonschema.Draft202012Validator(LIE_DOCUMENT).validate(doc)
        else:
            try:
                l = builtin_lie(spec)
            except ValueError as exc:
                raise InputError(str(exc)) from None
            return l, to_document(l)
    if len(doc["degrees"]) != len(doc["basis"]):
        raise InputError("basis and degrees differ in length")
    if "weights" in doc and len(doc["weights"]) != len(doc["basis"]):
        raise InputError("basis and weights differ in length")
    try:
        return from_document(doc), doc
    except (TypeError, LieAxiomViolation) as exc:
        # malformed structure constants, not a failed axiom
        raise InputError(str(exc)) from None


def _lie_param(params):
    l, doc = resolve_lie(params["lie"])
    params["lie"] = doc
    return l


# ---------------------------------------------------------------------------
# Koszul side


@operation("residue-pairing", "residue pairing on k[x_1..x_d]/(x_i^n)", _params({"d": D, "n": N}, ["d", "n"]))
def op_residue_pairing(params, field):
    m = koszul.residue_pairing(params["n"], params["d"])
    return {"size": m.nrows, "matrix": matrix_rows(m)}, [verdict("permutation matrix", koszul.is_permutation_matrix(m), "pairing matrix is not a permutation")]


KOSZUL = _params({"d": D, "n": N, "k": _int(0, loopspace.MAX_DIMENSION, "number of Koszul generators"), "window": WINDOW}, ["d", "n", "k"])


def _koszul_data(params):
    if params["k"] > params["d"]:
        raise InputError("k must not exceed d")
    window = params.get("window", 3 * params["n"])
    params["window"] = window
    return koszul.koszul_complex(koszul.PolyRing(params["d"]), params["n"], params["k"], window)


@operation("koszul", "cohomology of the Koszul complex on a multidegree window", KOSZUL)
def op_koszul(params, field):
    kd = _koszul_data(params)
    try:
        kd.check()
        ok, witness = True, None
    except InvalidComplex as exc:
        ok, witness = False, str(exc)
    table = kd.cohomology_table(field)
    rows = [{"multidegree": list(m), "dims": dims(h)} for m, h in sorted(table.items())]
    return {"totals": dims(totals(table)), "multidegrees": rows, "h0_monomials": kd.h0_basis()}, [verdict("d^2 = 0", ok, witness)]


@operation("koszul-duality", "dual Koszul complex against the shifted one", KOSZUL)
def op_koszul_duality(params, field):
    rep = koszul.koszul_self_duality_check(_koszul_data(params), field)
    bad = [r["multidegree"] for r in rep.rows if not r["equal"]]
    table = {str(k): {"dual": v[0], "shifted": v[1]} for k, v in rep.table().items()}
    return {"totals": table, "multidegrees_compared": len(rep.rows)}, [verdict("dual = shifted", rep.ok, f"multidegrees {bad[:5]}")]


@operation(
    "local-cohomology",
    "Koszul stages of local cohomology with transition maps and the Cech oracle",
    _params({"d": _int(1, 3), "n_max": _int(1, 5), "window": WINDOW, "module": MODULE}, ["d"], n_max=3, window=0, module="A"),
)
def op_local_cohomology(params, field):
    d = params["d"]
    module = koszul.MonomialModule.parse(d, params["module"])
    tower = koszul.local_cohomology(koszul.PolyRing(d), module, params["n_max"], params["window"], field)
    result = {
        "stages": {str(n): dims(tower.totals(n)) for n in sorted(tower.stages)},
        "transitions_injective": {str(k): v for k, v in sorted(tower.transitions_injective.items())},
        "persistent": {str(n): dims(h) for n, h in sorted(tower.persistent.items())},
        "cech_agrees": {str(k): v for k, v in sorted(tower.cech_agrees.items())},
    }
    checks = [verdict("Cech oracle agrees", all(tower.cech_agrees.values()), f"stages {[k for k, v in tower.cech_agrees.items() if not v]}")]
    if not module.ideal:
        checks.append(verdict("transitions injective", all(tower.transitions_injective.values()), "a transition map has a kernel"))
        checks.append(verdict(f"concentrated in degree {d}", tower.concentrated, str({n: tower.totals(n) for n in tower.stages})))
    return result, checks


@operation(
    "cofinality",
    "stabilization of the product family of Koszul stages",
    _params({"d": _int(1, 3), "p": _int(1, 4), "n_max": _int(1, 6), "window": WINDOW}, ["d", "p"], n_max=4, window=2),
)
def op_cofinality(params, field):
    if params["n_max"] < params["p"]:
        raise InputError("n_max must be at least p")
    rep = koszul.gaitsgory_cofinality_check(koszul.PolyRing(params["d"]), params["p"], params["n_max"], params["window"], field)
    result = {
        "target": dims(rep.target_dims),
        "stages": {str(n): dims(h) for n, h in sorted(rep.stage_dims.items())},
        "images": {str(n): dims(h) for n, h in sorted(rep.image_dims.items())},
        "stable": {str(n): v for n, v in sorted(rep.stable.items())},
        "stabilization_index": rep.stabilization_index,
    }
    return result, [verdict(f"stable by n = {params['p']}", rep.ok, f"stabilization index {rep.stabilization_index}")]


# ---------------------------------------------------------------------------
# Tate lattices


def _lattice(spec) -> tate.Lattice:
    a, b = spec["window"]
    rows = spec.get("rows", [])
    if any(len(r) != b - a for r in rows):
        raise InputError(f"rows of a lattice on window [{a}, {b}) need {b - a} entries")
    return tate.Lattice(a, b, [[to_fraction(c) for c in r] for r in rows])


@operation(
    "tate",
    "relative dimensions and determinant lines of framed lattices",
    _params({"lattices": {"type": "array", "items": LATTICE, "minItems": 1, "maxItems": 8}}, ["lattices"]),
    rational_only=True,
)
def op_tate(params, field):
    lats = [_lattice(s) for s in params["lattices"]]
    k = len(lats)
    reldim = [[tate.relative_dimension(x, y) for y in lats] for x in lats]
    det = [[tate.det_line(x, y) for y in lats] for x in lats]
    checks = [
        verdict("reldim antisymmetric", all(reldim[i][j] == -reldim[j][i] for i in range(k) for j in range(k)), "reldim(L_i, L_j) != -reldim(L_j, L_i)"),
        verdict("reldim via intersection", all(tate.relative_dimension_via_meet(x, y) == reldim[i][j] for i, x in enumerate(lats) for j, y in enumerate(lats)), "index and intersection formulas differ"),
    ]
    bad = []
    for i in range(k):
        for j in range(k):
            for m in range(k):
                c = tate.compose(det[i][j], det[j][m])
                if reldim[i][j] + reldim[j][m] != reldim[i][m] or c.degree != det[i][m].degree or c.scalar != det[i][m].scalar:
                    bad.append([i, j, m])
    checks.append(verdict("reldim and det-line cocycles", not bad, f"triples {bad[:5]}"))
    result = {
        "reldim": reldim,
        "det_degree": [[x.degree for x in row] for row in det],
        "det_scalar": [[scalar(x.scalar) for x in row] for row in det],
        "standard_reldim": [tate.relative_dimension(x, tate.Lattice.shifted(0)) for x in lats],
    }
    return result, checks


@operation(
    "tate-laws",
    "index and determinant laws on random lattice triples",
    _params({"trials": _int(1, 1000), "width": _int(1, 12), "seed": _int(0, 2**31 - 1)}, [], trials=50, width=6, seed=0),
    rational_only=True,
)
def op_tate_laws(params, field):
    rng = random.Random(params["seed"])
    lo = -(params["width"] // 2)
    hi = lo + params["width"]
    bad = []
    for t in range(params["trials"]):
        l1, l2, l3 = (tate.random_lattice(rng, lo, hi) for _ in range(3))
        r12, r23, r13 = tate.relative_dimension(l1, l2), tate.relative_dimension(l2, l3), tate.relative_dimension(l1, l3)
        c = tate.compose(tate.det_line(l1, l2), tate.det_line(l2, l3))
        d13 = tate.det_line(l1, l3)
        if tate.relative_dimension(l2, l1) != -r12 or r12 + r23 != r13 or c.scalar != d13.scalar or c.degree != d13.degree:
            bad.append(t)
    return {"trials": params["trials"], "failed_trials": bad}, [verdict("index laws", not bad, f"trials {bad[:5]}")]


# ---------------------------------------------------------------------------
# Lie algebras

CONVENTION = {"enum": list(CONVENTIONS)}


@operation("validate-lie", "check the dg-Lie axioms exactly", _params({"lie": LIE}, ["lie"]))
def op_validate_lie(params, field):
    rep = validate_lie(_lie_param(params))
    return {"pairs_checked": rep["pairs"], "triples_checked": rep["triples"], "weight_graded": rep["weight_graded"]}, [verdict("dg-Lie axioms", True)]


@operation(
    "free-lie",
    "free graded Lie algebra with the bigraded series oracle",
    _params({"generators": {"type": "array", "items": _int(-4, 4), "minItems": 1, "maxItems": 4}, "weight": _int(1, 6)}, ["generators", "weight"]),
)
def op_free_lie(params, field):
    degs, weight = params["generators"], params["weight"]
    l = free_lie(graded_space(degs), weight)
    got: dict[tuple[int, int], int] = {}
    for w, g in zip(l.weights, l.degrees):
        got[(w, g)] = got.get((w, g), 0) + 1
    oracle = pbw_series_dims(degs, weight)
    table = {str(w): {str(g): v for (ww, g), v in sorted(got.items()) if ww == w} for w in range(1, weight + 1)}
    return {"dims": table, "basis": list(l.labels)}, [verdict("dims match the series oracle", got == oracle, f"oracle {sorted(oracle.items())}")]


@operation("ce-homology", "Chevalley-Eilenberg chains", _params({"lie": LIE, "weight": _int(0, 6), "convention": CONVENTION}, ["lie", "weight"], convention=DEFAULT_CONVENTION))
def op_ce_homology(params, field):
    res = ce_homology(_lie_param(params), params["weight"], field, params["convention"])
    return {"weight_graded": res.weight_graded, "dims": weighted(res.dims), "totals": filled(res.totals())}, [verdict("d^2 = 0", True)]


@operation(
    "ce-cohomology",
    "Chevalley-Eilenberg cochains with trivial or adjoint coefficients",
    _params({"lie": LIE, "weight": _int(0, 6), "coefficients": {"enum": ["trivial", "adjoint"]}, "convention": CONVENTION}, ["lie", "weight"], coefficients="trivial", convention=DEFAULT_CONVENTION),
)
def op_ce_cohomology(params, field):
    l = _lie_param(params)
    rep = Representation.adjoint(l) if params["coefficients"] == "adjoint" else Representation.trivial(l)
    res = ce_cohomology(l, params["weight"], rep, field, params["convention"])
    return {"weight_graded": res.weight_graded, "dims": weighted(res.dims), "totals": filled(res.totals())}, [verdict("d^2 = 0", True)]


@operation("ce-conventions", "compare the CE sign rules on one algebra", _params({"lie": LIE, "weight": _int(1, 5)}, ["lie", "weight"]))
def op_ce_conventions(params, field):
    rep = convention_report(_lie_param(params), params["weight"])
    ok = rep[DEFAULT_CONVENTION]
    return {"conventions": rep, "default": DEFAULT_CONVENTION}, [verdict(f"{DEFAULT_CONVENTION} convention squares to zero", ok["d_squared_zero"], ok["witness"])]


@operation("pbw", "symmetrization Sym L -> U L weight by weight", _params({"lie": LIE, "weight": _int(0, 5)}, ["lie", "weight"]))
def op_pbw(params, field):
    cert = pbw_symmetrize(_lie_param(params), params["weight"], field)
    result = {
        "sym_dims": {str(w): v for w, v in sorted(cert.sym_dims.items())},
        "envelope_dims": {str(w): v for w, v in sorted(cert.envelope_dims.items())},
        "bijective": {str(w): v for w, v in sorted(cert.bijective.items())},
        "weight_graded": cert.weight_graded,
    }
    if cert.matrix is not None:
        result["matrix"] = matrix_rows(cert.matrix)
        result["normal_forms"] = [list(w) for w in cert.normal_forms]
    bad = [w for w, b in sorted(cert.bijective.items()) if not b]
    return result, [verdict("symmetrization bijective", cert.ok, f"weights {bad}")]


@operation("envelope-oracle", "CE homology through the enveloping algebra, against the CE complex", _params({"lie": LIE, "weight": _int(0, 4)}, ["lie", "weight"]))
def op_envelope_oracle(params, field):
    l = _lie_param(params)
    o = envelope_quotient_oracle(l, params["weight"], field)
    h = ce_homology(l, params["weight"], field, validate=False)
    result = {"dims": weighted(o.dims), "quotient_dims": weighted(o.quotient_dims), "ce_dims": weighted(h.dims)}
    return result, [verdict("oracle = CE homology", o.dims == h.dims, "dimension tables differ")]


# ---------------------------------------------------------------------------
# loop spaces

LOOP = _params({"d": D, "n": N, "p": P}, ["d", "n", "p"])


@operation("loop-generators", "polynomial generators of a truncated loop window", _params({"d": D, "E": SUBSET, "n": N0, "p": P0}, ["d", "n", "p"], E=[]), rational_only=True)
def op_loop_generators(params, field):
    g = loopspace.count_generators(params["d"], params["E"], params["n"], params["p"])
    return {"count": g.count, "formula": g.formula, "generators": [loopspace.symbol_label(a) for a in g.generators]}, [verdict("count = formula", g.agrees, f"{g.count} != {g.formula}")]


@operation(
    "subsets-colim",
    "homotopy colimit over nonempty subsets, bar and recursive-cone models",
    _params({"d": _int(1, 3), "mode": {"enum": list(loopspace.MODES)}, "source": {"enum": ["loop", "random"]}, "n": N, "p": P, "seed": _int(0, 2**31 - 1)}, ["d"], mode="nonempty", source="loop", n=1, p=1, seed=0),
    rational_only=True,
)
def op_subsets_colim(params, field):
    d = params["d"]
    if params["source"] == "loop":
        fam = loopspace.loop_family(d, params["n"], params["p"])
    else:
        fam = loopspace.random_family(random.Random(params["seed"]), d)
    rep = loopspace.subsets_colim_check(fam, d, params["mode"])
    result = {"bar": dims(rep.bar_dims), "recursive": dims(rep.recursive_dims), "expected": dims(rep.expected_dims), "note": rep.note}
    return result, [
        verdict("bar and recursive models agree", rep.implementations_agree, f"{rep.bar_dims} vs {rep.recursive_dims}"),
        verdict("colimit = M_F[d-1]", rep.bar_dims == rep.expected_dims, f"{rep.bar_dims} vs {rep.expected_dims}"),
    ]


def _dimension_report(rep) -> tuple[dict, list]:
    result = {"dims": dims(rep.dims), "expected": dims(rep.expected), "parts": {k: dims(v) for k, v in rep.parts.items()}}
    for k, v in rep.detail.items():
        result[k] = dims(v) if isinstance(v, dict) else v
    return result, [verdict("dimension identity", rep.ok, f"{rep.dims} != {rep.expected}")]


@operation("loop-tangent", "tangent complex dimensions of the truncated loop space", LOOP, rational_only=True)
def op_loop_tangent(params, field):
    return _dimension_report(loopspace.loop_tangent(params["d"], params["n"], params["p"]))


@operation("bubble-fiber", "tangent of the bubble space as a homotopy fibre product", _params({"d": _int(1, 3), "n": N, "p": P}, ["d", "n", "p"]), rational_only=True)
def op_bubble_fiber(params, field):
    return _dimension_report(loopspace.bubble_fiber_check(params["d"], params["n"], params["p"]))


@operation("formal-sphere", "the square-zero algebra A_p + A_n[-d]", LOOP, rational_only=True)
def op_formal_sphere(params, field):
    s = loopspace.formal_sphere(params["d"], params["n"], params["p"])
    degs: dict[int, int] = {}
    for g in s.algebra.degrees:
        degs[g] = degs.get(g, 0) + 1
    socle = s.socle()
    return {"base_dim": s.base_dim, "module_dim": s.module_dim, "dims": dims(degs), "basis": list(s.algebra.labels), "socle": s.algebra.labels[socle]}, [
        verdict("residue of the socle is 1", s.residue({socle: Fraction(1)}) == 1)
    ]


@operation(
    "bubble-pairing",
    "residue (x) omega pairing on the formal sphere",
    _params({"d": D, "m": _int(1, 4), "n": N, "p": P}, ["d", "m", "n"]),
    rational_only=True,
)
def op_bubble_pairing(params, field):
    r = loopspace.bubble_pairing(params["d"], loopspace.SymplecticTarget(params["m"]), params["n"], params.get("p"))
    result = {
        "p": r.p,
        "cross_block": matrix_rows(r.cross_block),
        "rank": r.rank,
        "left_kernel_dim": r.left_kernel_dim,
        "right_kernel_dim": r.right_kernel_dim,
    }
    return result, [
        verdict("same-degree blocks vanish", r.same_degree_blocks_zero),
        verdict("graded antisymmetric", r.antisymmetric),
        verdict("cross block = residue (x) omega", r.cross_is_residue_tensor_omega),
        verdict("nondegenerate", r.invertible, f"kernel dimensions {r.left_kernel_dim}, {r.right_kernel_dim}"),
    ]


@operation(
    "hilbert",
    "monomial counts per degree in a loop window algebra",
    _params({"d": D, "E": SUBSET, "n": N0, "p": P0, "m": _int(1, 8), "cutoff": _int(0, 12)}, ["d", "n", "p", "m", "cutoff"], E=[]),
    rational_only=True,
)
def op_hilbert(params, field):
    counts = loopspace.hilbert_GdE(params["d"], params["E"], params["n"], params["p"], params["m"], params["cutoff"])
    gens = loopspace.count_generators(params["d"], params["E"], params["n"], params["p"]).count
    # with m = 1 the negative generators are zero, leaving the E = {} window
    live = gens if params["m"] > 1 else loopspace.count_generators(params["d"], [], params["n"], params["p"]).count
    checks = [verdict("degree-1 count = surviving generator count", len(counts) < 2 or counts[1] == live, f"{counts[1] if len(counts) > 1 else None} != {live}")]
    return {"counts": counts, "generators": gens}, checks


# ---------------------------------------------------------------------------
# jobs

JOB = {
    "type": "object",
    "additionalProperties": False,
    "required": ["operation"],
    "properties": {
        "operation": {"enum": sorted(OPERATIONS)},
        "params": {"type": "object"},
        "field": {"type": "string", "pattern": r"^(rational|fp:\d+)$"},
        "out": {"type": "string"},
    },
}
JOB_FILE = {"oneOf": [JOB, {"type": "object", "additionalProperties": False, "required": ["jobs"], "properties": {"jobs": {"type": "array", "items": JOB, "minItems": 1, "maxItems": 256}}}]}


def normalize_job(job: dict) -> dict:
    """Validate a job and fill in defaults; raises on invalid input."""
    jsonschema.Draft202012Validator(JOB).validate(job)
    op = OPERATIONS[job["operation"]]
    params = {**op.defaults, **job.get("params", {})}
    jsonschema.Draft202012Validator(op.validator_schema()).validate(params)
    field = Field.parse(job.get("field", "rational"))
    if op.rational_only and not field.is_rational:
        raise InputError(f"{op.name} works over the rationals only")
    return {"operation": op.name, "params": params, "field": field.spec()}


def execute(job: dict, timing: bool = False) -> tuple[dict, int]:
    """Run a job; returns ``(report, exit code)``.  Input errors propagate."""
    job = normalize_job(job)
    op = OPERATIONS[job["operation"]]
    params = json.loads(json.dumps(job["params"]))
    t0 = time.perf_counter()
    try:
        result, checks = op.run(params, Field.parse(job["field"]))
    except INVARIANT_ERRORS as exc:
        witness = getattr(exc, "witness", None)
        result = {"error": type(exc).__name__}
        checks = [verdict("input satisfies the axioms", False, str(exc) if witness is None else f"{exc} {list(witness)}")]
    # resolved inputs, e.g. a Lie document loaded from a path
    job["params"] = params
    report = {
        "tool": "tateforge",
        "version": __version__,
        "inputs": job,
        "result": result,
        "verdicts": checks,
        "ok": all(c["ok"] for c in checks),
    }
    if timing:
        report["seconds"] = round(time.perf_counter() - t0, 3)
    return report, EXIT_OK if report["ok"] else EXIT_INVARIANT


def _execute_quiet(args):
    job, timing = args
    try:
        return execute(job, timing)
    except INPUT_ERRORS + (ValueError,) as exc:
        return {"error": f"{type(exc).__name__}: {_message(exc)}", "inputs": job}, EXIT_INPUT


def run_jobs(jobs: list[dict], parallel: int = 1, timing: bool = False) -> list[tuple[dict, int]]:
    """Fan jobs out to worker processes; results come back in job order."""
    work = [(j, timing) for j in jobs]
    if parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(_execute_quiet, work))
    return [_execute_quiet(w) for w in work]


# ---------------------------------------------------------------------------
# argument parsing


def _flag_type(name: str, schema: dict):
    if schema.get("type") == "integer":
        return int
    if schema.get("type") == "array":
        return lambda s: [int(x) for x in s.split(",") if x.strip()]
    if name == "module":
        return lambda s: s if s in ("A", "k") else json.loads(s)
    return str


def _common(parser: argparse.ArgumentParser, *, window: bool = True, weight: bool = True) -> None:
    g = parser.add_argument_group("common options")
    g.add_argument("--field", default="rational", help="rational or fp:<prime>")
    if window:
        g.add_argument("--window", type=int, help="multidegree window")
    if weight:
        g.add_argument("--weight", type=int, help="weight truncation")
    g.add_argument("--parallel", type=int, default=1, help="worker processes for job fan-out")
    g.add_argument("--out", help="write the report here instead of stdout")
    g.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tateforge", description="Exact computations in homological algebra, Tate lattices and dg-Lie algebras.")
    parser.add_argument("--version", action="version", version=f"tateforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, op in OPERATIONS.items():
        p = sub.add_parser(name, help=op.summary, description=op.summary)
        _common(p)
        p.add_argument("--params", metavar="FILE", help="JSON parameter document; explicit flags override it")
        for key, schema in op.schema["properties"].items():
            if key in ("window", "weight"):
                continue
            flag = "--" + key.replace("_", "-")
            p.add_argument(flag, dest=f"param_{key}", type=_flag_type(key, schema), help=schema.get("description"))
    r = sub.add_parser("run", help="run a job document (one job or {'jobs': [...]})")
    r.add_argument("job", help="path to the job document, or - for stdin")
    _common(r, window=False, weight=False)
    s = sub.add_parser("suite", help="run a named test battery")
    s.add_argument("name", choices=["acceptance"])
    s.add_argument("--seed", type=int, help="shuffle bases and fixtures with this seed")
    s.add_argument("--convention", choices=CONVENTIONS, default=DEFAULT_CONVENTION, help="CE sign rule under test")
    _common(s, window=False, weight=False)
    return parser


def _message(exc: BaseException) -> str:
    if isinstance(exc, jsonschema.ValidationError):
        where = "/".join(str(p) for p in exc.absolute_path) or "document"
        return f"{where}: {exc.message}"
    return str(exc)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_json(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return json.loads(text)


def _operation_job(args) -> dict:
    op = OPERATIONS[args.command]
    params = _read_json(args.params) if args.params else {}
    if not isinstance(params, dict):
        raise InputError("the parameter document must be a JSON object")
    for key in op.schema["properties"]:
        if key in ("window", "weight"):
            value = getattr(args, key)
        else:
            value = getattr(args, f"param_{key}")
        if value is not None:
            params[key] = value
    return {"operation": op.name, "params": params, "field": args.field}


def _run_command(args) -> int:
    doc = _read_json(args.job)
    jsonschema.Draft202012Validator(JOB_FILE).validate(doc)
    jobs = doc["jobs"] if "jobs" in doc else [doc]
    if args.field != "rational":
        jobs = [{**j, "field": j.get("field", args.field)} for j in jobs]
    for j in jobs:
        normalize_job(j)  # reject the whole file before running anything
    results = run_jobs(jobs, args.parallel, args.timing)
    code = max(c for _, c in results)
    for job, (report, c) in zip(jobs, results):
        if c == EXIT_INPUT:
            print(f"error: {report['error']}", file=sys.stderr)
        elif "out" in job:
            Path(job["out"]).write_text(dumps(report))
    if "jobs" in doc:
        _emit(dumps({"reports": [r for r, _ in results], "ok": code == EXIT_OK}), args.out)
    elif code != EXIT_INPUT and "out" not in doc:
        _emit(dumps(results[0][0]), args.out)
    for i, (report, c) in enumerate(results):
        if c == EXIT_INVARIANT:
            for v in report["verdicts"]:
                if not v["ok"]:
                    print(f"job {i}: FAIL {v['check']}: {v['witness']}", file=sys.stderr)
    return code


def _suite_command(args) -> int:
    from .acceptance import SuiteOptions, run_suite

    rep = run_suite(parallel=args.parallel, opts=SuiteOptions(args.seed, args.convention))
    for line in rep.lines():
        print(line)
    if args.out:
        doc = {"tool": "tateforge", "version": __version__, "suite": "acceptance", "ok": rep.ok, "failures": rep.failures(), "tables": rep.tables()}
        Path(args.out).write_text(dumps(doc))
    if not rep.ok:
        print("failures:", file=sys.stderr)
        for f in rep.failures():
            print(f"  {f}", file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_INVARIANT


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        Field.parse(args.field)
        if args.parallel < 1:
            raise InputError("--parallel must be positive")
        if args.command == "run":
            return _run_command(args)
        if args.command == "suite":
            return _suite_command(args)
        report, code = execute(_operation_job(args), args.timing)
    except INPUT_ERRORS as exc:
        print(f"error: {_message(exc)}", file=sys.stderr)
        return EXIT_INPUT
    _emit(dumps(report), args.out)
    if code:
        for v in report["verdicts"]:
            if not v["ok"]:
                print(f"FAIL {v['check']}: {v['witness']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
