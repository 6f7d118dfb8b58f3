import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from tateforge.exactalg import ChainComplex, ChainMap, GradedVectorSpace, direct_sum
from tateforge.linalg import inverse
from tateforge.sparse import SparseMatrix

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


@pytest.fixture(scope="session")
def acceptance_log(request):
    return request.config.stash[ACCEPTANCE]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])


# ---------------------------------------------------------------------------
# strategies


small_ints = st.integers(min_value=-3, max_value=3)
fractions = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 9))


def unipotent(draw, n: int) -> SparseMatrix:
    """A random invertible integer matrix: lower times upper unitriangular."""
    lo = {(i, j): draw(small_ints) for i in range(n) for j in range(i)}
    up = {(i, j): draw(small_ints) for i in range(n) for j in range(i + 1, n)}
    for i in range(n):
        lo[(i, i)] = up[(i, i)] = 1
    return SparseMatrix(n, n, lo) @ SparseMatrix(n, n, up)


@st.composite
def complexes_with_cohomology(draw, degrees=(-2, -1, 0, 1, 2), max_pieces=5):
    """A complex built from copies of ``k`` and acyclic ``k -> k`` pieces,
    hidden behind random changes of basis; returns it with its known
    cohomology dimensions."""
    pieces = draw(st.lists(st.tuples(st.sampled_from(degrees), st.booleans()), max_size=max_pieces))
    labels: dict[int, list[str]] = {}
    edges = []
    expected: dict[int, int] = {}
    for k, (deg, acyclic) in enumerate(pieces):
        labels.setdefault(deg, []).append(f"p{k}")
        if acyclic:
            labels.setdefault(deg + 1, []).append(f"q{k}")
            edges.append((deg, len(labels[deg]) - 1, len(labels[deg + 1]) - 1))
        else:
            expected[deg] = expected.get(deg, 0) + 1
    dim = {n: len(v) for n, v in labels.items()}
    ent: dict[int, dict] = {}
    for n, i, j in edges:
        ent.setdefault(n, {})[(j, i)] = 1
    change = {n: unipotent(draw, m) for n, m in dim.items()}
    inv = {n: inverse(m) for n, m in change.items()}
    d = {}
    for n, e in ent.items():
        raw = SparseMatrix(dim[n + 1], dim[n], e)
        d[n] = change[n + 1] @ raw @ inv[n]
    return ChainComplex(GradedVectorSpace(labels), d), expected


@st.composite
def chain_maps(draw, max_pieces=4):
    """``c`` times the inclusion ``M -> M (+) N`` of random complexes."""
    m, _ = draw(complexes_with_cohomology(max_pieces=max_pieces))
    n, _ = draw(complexes_with_cohomology(max_pieces=max_pieces))
    c = draw(st.sampled_from([0, 1, -2]))
    target = direct_sum([m, n], ["m|", "n|"])
    comps = {}
    for deg in m.degrees:
        comps[deg] = SparseMatrix.block([[SparseMatrix.identity(m.dim(deg)).scale(c)], [None]], [m.dim(deg), n.dim(deg)], [m.dim(deg)])
    return ChainMap(m, target, comps)
