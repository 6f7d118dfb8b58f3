import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tateforge import tate
from tateforge.exactalg import cohomology_dims
from tateforge.sparse import SparseMatrix

L = tate.Lattice.shifted


@st.composite
def lattices(draw, lo=-3, hi=3):
    return tate.random_lattice(random.Random(draw(st.integers(0, 10**9))), lo, hi)


def test_intersect_sum_examples():
    meet, join = tate.lattice_intersect_sum(L(0), L(0))
    assert meet.same_subspace(L(0)) and join.same_subspace(L(0))
    meet, join = tate.lattice_intersect_sum(L(1), L(3))
    assert meet.same_subspace(L(3)) and join.same_subspace(L(1))


def test_relative_dimension_examples():
    assert tate.relative_dimension(L(2), L(2)) == 0
    assert tate.relative_dimension(L(1), L(3)) == 2
    assert tate.relative_dimension(L(3), L(1)) == -2


def test_det_line_examples():
    d = tate.det_line(L(0), L(0))
    assert (d.degree, d.scalar) == (0, 1)
    d = tate.det_line(L(0), L(2))
    assert (d.degree, d.scalar) == (2, 1)
    d = tate.det_line(L(0), tate.scaled(L(0), 0, 5))
    assert (d.degree, d.scalar) == (0, 5)


def test_lattice_validation():
    with pytest.raises(tate.InvalidLattice):
        tate.Lattice(2, 1)
    with pytest.raises(tate.InvalidLattice):
        tate.Lattice(0, 2, [[1, 1], [2, 2]])
    with pytest.raises(tate.InvalidLattice):
        tate.Lattice(0, 2, [[1, 1, 1]])


def test_canonical_form_is_reduced_echelon():
    l = tate.Lattice.canonical(0, 3, [[2, 4, 0], [0, 1, 1]])
    assert l.frame.to_dense() == [[1, 0, -2], [0, 1, 1]]


@given(lattices(), lattices())
def test_intersect_sum_containments(l1, l2):
    meet, join = tate.lattice_intersect_sum(l1, l2)
    for x in (l1, l2):
        assert x.contains(meet)
        assert join.contains(x)


@given(lattices(), lattices(), lattices())
def test_index_laws(l1, l2, l3):
    r12 = tate.relative_dimension(l1, l2)
    assert tate.relative_dimension(l2, l1) == -r12
    assert r12 + tate.relative_dimension(l2, l3) == tate.relative_dimension(l1, l3)
    assert tate.relative_dimension_via_meet(l1, l2) == r12


@given(lattices(), lattices(), lattices())
def test_det_line_cocycle(l1, l2, l3):
    c = tate.compose(tate.det_line(l1, l2), tate.det_line(l2, l3))
    d13 = tate.det_line(l1, l3)
    assert (c.degree, c.scalar) == (d13.degree, d13.scalar)
    assert tate.det_line(l1, l2).degree == tate.relative_dimension(l1, l2)


@given(lattices(), lattices(), st.integers(0, 4), st.integers(0, 4))
def test_window_extension_invariance(l1, l2, left, right):
    a, b = min(l1.a, l2.a) - left, max(l1.b, l2.b) + right
    e1, e2 = l1.extend(a, b), l2.extend(a, b)
    assert e1.same_subspace(l1)
    assert tate.relative_dimension(e1, e2) == tate.relative_dimension(l1, l2)
    d, de = tate.det_line(l1, l2), tate.det_line(e1, e2)
    assert (d.degree, d.scalar) == (de.degree, de.scalar)


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))
def test_shift_lattice_cocycle(a, b, c):
    assert tate.relative_dimension(L(a), L(b)) == b - a
    assert tate.relative_dimension(L(a), L(b)) + tate.relative_dimension(L(b), L(c)) == tate.relative_dimension(L(a), L(c))


def test_dualize_tower_example():
    inc = [SparseMatrix.from_dense([[1], [0]]), SparseMatrix.from_dense([[1, 0], [0, 1], [0, 0]])]
    t = tate.Tower.from_matrices("ind", [1, 2, 3], inc)
    dt = tate.dualize_tower(t)
    assert dt.direction == "pro"
    assert [s.dims() for s in dt.stages] == [{0: 1}, {0: 2}, {0: 3}]
    assert dt.map_ranks() == t.map_ranks()
    assert tate.dualize_tower(tate.Tower.from_matrices("pro", [], [])).stages == ()


@st.composite
def towers(draw):
    dims = draw(st.lists(st.integers(0, 4), min_size=1, max_size=4))
    mats = []
    for k in range(len(dims) - 1):
        mats.append(SparseMatrix.from_dense([[draw(st.integers(-2, 2)) for _ in range(dims[k])] for _ in range(dims[k + 1])], dims[k]))
    return tate.Tower.from_matrices("ind", dims, mats)


@given(towers())
def test_double_dual_tower(t):
    dd = tate.dualize_tower(tate.dualize_tower(t))
    assert dd.direction == t.direction
    assert dd.stage_dims() == t.stage_dims()
    assert dd.map_ranks() == t.map_ranks()
    assert [cohomology_dims(s) for s in dd.stages] == t.stage_cohomology()


def test_tower_shape_mismatch():
    with pytest.raises(tate.InvalidTower):
        tate.Tower.from_matrices("ind", [1, 2], [SparseMatrix.from_dense([[1, 0]])])
    with pytest.raises(tate.InvalidTower):
        tate.Tower.from_matrices("sideways", [1], [])


def test_frame_change_scales_det_by_the_determinant():
    base = tate.Lattice(0, 2, [[1, 0], [0, 1]])
    other = tate.Lattice(0, 2, [[2, 1], [0, 3]])
    assert tate.det_line(base, other).scalar == Fraction(6)
