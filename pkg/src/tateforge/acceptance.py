"""The acceptance battery: twelve criteria, each with a runtime budget.

Every criterion returns a JSON-ready table of the dimensions it computed;
criterion 12 reruns the others with shuffled bases and a process pool and
demands byte-identical tables.
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import koszul, loopspace, tate
from .dglie import (
    ce_cohomology,
    ce_homology,
    DEFAULT_CONVENTION,
    convention_report,
    envelope_quotient_oracle,
    free_lie,
    pbw_symmetrize,
    validate_lie,
)
from .dglie.fixtures import graded_space, graded_spaces, lie_fixtures, shuffled_lie
from .exactalg import InvalidComplex, shuffled_bases
from .linalg import determinant
from .sparse import SparseMatrix

SUITE_BUDGET = 300.0


@dataclass(frozen=True)
class SuiteOptions:
    """``seed``: shuffle bases and fixture orders; ``convention``: CE sign rule."""

    seed: int | None = None
    convention: str = DEFAULT_CONVENTION


@dataclass
class CriterionResult:
    number: int
    title: str
    budget: float
    ok: bool
    seconds: float
    table: object
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.ok and self.seconds < self.budget

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        extra = "" if self.passed else ("; " + "; ".join(self.failures[:3]) if self.failures else "; over budget")
        return f"criterion {self.number:2d} {verdict}  {self.title}  ({self.seconds:.2f}s, budget {self.budget:g}s){extra}"


def _dims(h: dict) -> dict[str, int]:
    return {str(k): v for k, v in sorted(h.items()) if v}


def _weighted(dims: dict) -> dict[str, dict[str, int]]:
    return {("all" if w is None else str(w)): _dims(h) for w, h in dims.items()}


# ---------------------------------------------------------------------------
# criteria; each takes SuiteOptions and returns (ok, table, failures)


def c1_residue(opts):
    rng = random.Random(opts.seed)
    table, fails = {}, []
    for n in range(1, 5):
        for d in range(1, 4):
            m = koszul.residue_pairing(n, d)
            if opts.seed is not None:
                perm = rng.sample(range(m.nrows), m.nrows)
                m = m.permute(perm, perm)
            ok = koszul.is_permutation_matrix(m)
            table[f"n={n},d={d}"] = m.nrows
            if not ok:
                fails.append(f"residue pairing n={n} d={d} is not a permutation")
    return not fails, table, fails


def c2_self_duality(opts):
    table, fails = {}, []
    for d in range(1, 4):
        for k in range(0, d + 1):
            for n in range(1, 4):
                rep = koszul.koszul_self_duality_check(koszul.koszul_complex(koszul.PolyRing(d), n, k, window=3 * n))
                table[f"d={d},k={k},n={n}"] = {str(deg): list(v) for deg, v in rep.table().items()}
                if not rep.ok:
                    fails.append(f"dual and shifted Koszul tables differ at d={d} k={k} n={n}")
    return not fails, table, fails


def c3_local_cohomology(opts):
    table, fails = {}, []
    for d in (1, 2):
        tower = koszul.local_cohomology(koszul.PolyRing(d), n_max=3, window=0)
        table[f"d={d}"] = {str(n): _dims(tower.totals(n)) for n in range(1, 4)}
        for n in range(1, 4):
            if tower.totals(n) != {d: n ** d}:
                fails.append(f"d={d} n={n}: totals {tower.totals(n)}")
        if not all(tower.transitions_injective.values()):
            fails.append(f"d={d}: a transition map is not injective")
        if d == 1 and not (tower.cech_agrees and all(tower.cech_agrees.values())):
            fails.append("Cech oracle disagrees for d=1")
    return not fails, table, fails


def c4_cofinality(opts):
    table, fails = {}, []
    for d in (1, 2):
        for p in (1, 2):
            rep = koszul.gaitsgory_cofinality_check(koszul.PolyRing(d), p, n_max=4, window=2)
            table[f"d={d},p={p}"] = {"index": rep.stabilization_index, "target": _dims(rep.target_dims)}
            if not rep.ok:
                fails.append(f"no stabilization by n={p} for d={d} p={p}")
    return not fails, table, fails


def _reframe(l: tate.Lattice, rng: random.Random) -> tate.Lattice:
    """Same subspace, frame changed by a random invertible matrix."""
    r = l.dim_w
    if not r:
        return l
    while True:
        g = SparseMatrix.from_dense([[rng.randint(-2, 2) for _ in range(r)] for _ in range(r)], r)
        if determinant(g):
            return tate.Lattice(l.a, l.b, g @ l.frame)


def c5_tate(opts):
    rng = random.Random(20240)
    shuffle = random.Random(opts.seed) if opts.seed is not None else None
    table, fails = [], []
    one = Fraction(1)
    for t in range(50):
        lats = [tate.random_lattice(rng, -3, 3) for _ in range(3)]
        if shuffle is not None:
            lats = [_reframe(l, shuffle) for l in lats]
        l1, l2, l3 = lats
        r12, r23, r13 = tate.relative_dimension(l1, l2), tate.relative_dimension(l2, l3), tate.relative_dimension(l1, l3)
        table.append([r12, r23, r13])
        if tate.relative_dimension(l2, l1) != -r12:
            fails.append(f"triple {t}: reldim not antisymmetric")
        if r12 + r23 != r13:
            fails.append(f"triple {t}: reldim cocycle fails")
        if tate.relative_dimension_via_meet(l1, l2) != r12:
            fails.append(f"triple {t}: reldim via the intersection disagrees")
        d12, d23, d13 = tate.det_line(l1, l2), tate.det_line(l2, l3), tate.det_line(l1, l3)
        comp = tate.compose(d12, d23)
        if comp.degree != d13.degree or comp.scalar / d13.scalar != one:
            fails.append(f"triple {t}: determinant cocycle scalar {comp.scalar / d13.scalar}")
        back = tate.compose(d12, tate.det_line(l2, l1))
        if back.degree != 0 or back.scalar != one:
            fails.append(f"triple {t}: det(L1,L2) det(L2,L1) != 1")
    return not fails, table, fails


def _fixtures(seed, weight=4):
    fx = lie_fixtures(weight)
    if seed is None:
        return fx
    rng = random.Random(seed)
    return {k: shuffled_lie(v, rng) for k, v in fx.items()}


def c6_ce_signs(opts):
    table, fails = {}, []
    for name, l in _fixtures(opts.seed).items():
        validate_lie(l)
        rep = convention_report(l, 4)[opts.convention]
        if not rep["d_squared_zero"]:
            fails.append(f"{name}: d^2 != 0 ({rep['witness']})")
            continue
        h = ce_homology(l, 3, convention=opts.convention)
        o = envelope_quotient_oracle(l, 3)
        table[name] = _weighted(h.dims)
        if h.dims != o.dims:
            fails.append(f"{name}: CE {h.dims} vs envelope oracle {o.dims}")
    return not fails, table, fails


def c7_free_cohomology(opts):
    rng = random.Random(opts.seed)
    table, fails = {}, []
    for degs in graded_spaces(3):
        l = free_lie(graded_space(degs), 3)
        if opts.seed is not None:
            l = shuffled_lie(l, rng)
        try:
            res = ce_cohomology(l, 3, convention=opts.convention)
        except InvalidComplex as exc:
            fails.append(f"V degrees {degs}: {exc}")
            continue
        expected = {0: {0: 1}, 1: {}}
        for g in degs:
            expected[1][1 - g] = expected[1].get(1 - g, 0) + 1
        got = {w: {k: v for k, v in h.items() if v} for w, h in res.dims.items()}
        table[",".join(map(str, degs))] = _weighted(res.dims)
        got = {w: got.get(w, {}) for w in range(4)}
        want = {w: expected.get(w, {}) for w in range(4)}
        if got != want:
            fails.append(f"V degrees {degs}: {got} != {want}")
    return not fails, table, fails


def c8_pbw(opts):
    table, fails = {}, []
    for name, l in _fixtures(opts.seed).items():
        cert = pbw_symmetrize(l, 4)
        table[name] = {str(w): v for w, v in cert.envelope_dims.items()}
        if not cert.ok:
            bad = [w for w, b in cert.bijective.items() if not b]
            fails.append(f"{name}: symmetrization not bijective at weights {bad}")
    return not fails, table, fails


def c9_subsets_colim(opts):
    rng = random.Random(7)
    table, fails = [], []
    for t in range(20):
        d = 1 + t % 3
        fam = loopspace.random_family(rng, d)
        rep = loopspace.subsets_colim_check(fam, d, "nonempty")
        table.append({"d": d, "dims": _dims(rep.bar_dims)})
        if not rep.implementations_agree:
            fails.append(f"family {t}: bar {rep.bar_dims} vs recursive {rep.recursive_dims}")
        elif not rep.ok:
            fails.append(f"family {t}: {rep.bar_dims} != M_F[d-1] {rep.expected_dims}")
    return not fails, table, fails


def c10_loop_bubble(opts):
    table, fails = {}, []
    for d in (1, 2, 3):
        for n in (1, 2):
            for p in (1, 2):
                r = loopspace.loop_tangent(d, n, p)
                table[f"tangent d={d},n={n},p={p}"] = _dims(r.dims)
                if not r.ok:
                    fails.append(f"tangent d={d} n={n} p={p}: {r.dims} != {r.expected}")
                if d <= 2:
                    b = loopspace.bubble_fiber_check(d, n, p)
                    table[f"bubble d={d},n={n},p={p}"] = _dims(b.dims)
                    if not b.ok:
                        fails.append(f"bubble d={d} n={n} p={p}: {b.dims} != {b.expected}")
    return not fails, table, fails


def c11_pairing(opts):
    table, fails = {}, []
    for d in (1, 2):
        for m in (1, 2):
            for n in (1, 2, 3):
                r = loopspace.bubble_pairing(d, loopspace.SymplecticTarget(m), n)
                table[f"d={d},m={m},n={n}"] = r.rank
                if not r.invertible:
                    fails.append(f"d={d} m={m} n={n}: pairing is degenerate")
                if not r.same_degree_blocks_zero:
                    fails.append(f"d={d} m={m} n={n}: same-degree block is nonzero")
                if not (r.antisymmetric and r.cross_is_residue_tensor_omega):
                    fails.append(f"d={d} m={m} n={n}: pairing is not residue (x) omega")
    return not fails, table, fails


CRITERIA: dict[int, tuple[str, float, Callable]] = {
    1: ("residue perfection", 1.0, c1_residue),
    2: ("Koszul self-duality", 10.0, c2_self_duality),
    3: ("local cohomology concentration", 20.0, c3_local_cohomology),
    4: ("cofinality stabilization", 10.0, c4_cofinality),
    5: ("Tate index laws", 5.0, c5_tate),
    6: ("CE sign soundness and envelope oracle", 60.0, c6_ce_signs),
    7: ("free Lie cohomology", 30.0, c7_free_cohomology),
    8: ("PBW symmetrization", 30.0, c8_pbw),
    9: ("subsets colimit", 20.0, c9_subsets_colim),
    10: ("loop tangent and bubble fibre", 20.0, c10_loop_bubble),
    11: ("bubble symplectic pairing", 5.0, c11_pairing),
}
DETERMINISM = (12, "determinism under shuffles and parallelism", 120.0)


def run_criterion(number: int, opts: SuiteOptions = SuiteOptions()) -> CriterionResult:
    title, budget, fn = CRITERIA[number]
    t0 = time.perf_counter()
    try:
        with shuffled_bases(opts.seed):
            ok, table, fails = fn(opts)
    except Exception as exc:  # a crash is a failed criterion, reported with its message
        ok, table, fails = False, None, [f"{type(exc).__name__}: {exc}"]
    return CriterionResult(number, title, budget, ok, time.perf_counter() - t0, table, fails)


def _run_job(args) -> CriterionResult:
    return run_criterion(*args)


def run_tables(numbers, opts: SuiteOptions, parallel: int) -> list[CriterionResult]:
    jobs = [(n, opts) for n in numbers]
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(_run_job, jobs))
    return [_run_job(j) for j in jobs]


def canonical_tables(results: list[CriterionResult]) -> str:
    return json.dumps({str(r.number): r.table for r in results}, sort_keys=True, separators=(",", ":"))


def determinism_check(reference: list[CriterionResult], opts: SuiteOptions = SuiteOptions(), variants=((11, 2), (23, 3))) -> CriterionResult:
    """Rerun ``reference`` with other shuffle seeds and pool sizes."""
    number, title, budget = DETERMINISM
    t0 = time.perf_counter()
    ref = canonical_tables(reference)
    fails = []
    numbers = [r.number for r in reference]
    for seed, par in variants:
        other = run_tables(numbers, SuiteOptions(seed, opts.convention), par)
        if canonical_tables(other) != ref:
            diff = [r.number for r, o in zip(reference, other) if json.dumps(r.table, sort_keys=True) != json.dumps(o.table, sort_keys=True)]
            fails.append(f"shuffle seed {seed} with {par} workers changes criteria {diff}")
    return CriterionResult(number, title, budget, not fails, time.perf_counter() - t0, {"variants": [list(v) for v in variants]}, fails)


@dataclass
class SuiteReport:
    results: list[CriterionResult]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        return [r.line() for r in self.results]

    def failures(self) -> list[str]:
        return [f"criterion {r.number}: {f}" for r in self.results if not r.passed for f in (r.failures or ["over budget"])]

    def tables(self) -> dict:
        return {str(r.number): r.table for r in self.results if r.number in CRITERIA}


def run_suite(parallel: int = 1, opts: SuiteOptions = SuiteOptions(), numbers=None) -> SuiteReport:
    """Run the listed criteria (all by default); 12 reruns the others."""
    wanted = sorted(set(numbers) if numbers else set(CRITERIA) | {DETERMINISM[0]})
    results = run_tables([n for n in wanted if n in CRITERIA], opts, parallel)
    if DETERMINISM[0] in wanted:
        results.append(determinism_check(results, opts))
    return SuiteReport(results)
