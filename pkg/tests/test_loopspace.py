import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tateforge import loopspace as L
from tateforge.exactalg import ChainComplex
from tateforge.koszul import is_permutation_matrix, residue_pairing
from tateforge.linalg import rank

subsets_of_three = [list(s) for r in range(4) for s in itertools.combinations((1, 2, 3), r)]


# ---------------------------------------------------------------------------
# generator counts


def test_generator_count_examples():
    assert L.count_generators(2, [1], 1, 1).count == 6
    assert L.count_generators(1, [1], 2, 0).generators == [(-2,), (-1,), (0,)]


@given(st.integers(1, 4), st.integers(0, 3), st.integers(0, 3))
def test_empty_window_is_a_box(d, n, p):
    assert L.count_generators(d, [], n, p).count == (p + 1) ** d


@given(st.sampled_from(subsets_of_three), st.integers(0, 3), st.integers(0, 3))
def test_product_formula_matches_enumeration(E, n, p):
    c = L.count_generators(3, E, n, p)
    assert c.agrees
    # independent count: brute force over the bounding box
    box = itertools.product(range(-n, p + 1), repeat=3)
    assert c.count == sum(1 for a in box if all(a[i - 1] >= 0 for i in (1, 2, 3) if i not in E))


def test_generator_bounds():
    with pytest.raises(L.InvalidBounds):
        L.count_generators(5, [], 1, 1)
    with pytest.raises(L.InvalidBounds):
        L.count_generators(2, [3], 1, 1)
    with pytest.raises(L.InvalidBounds):
        L.count_generators(2, [], -1, 1)


# ---------------------------------------------------------------------------
# subsets colimit


def k0():
    return ChainComplex.concentrated(["1"], 0)


def test_colim_single_direction_is_the_top_piece():
    fam = {frozenset(): ChainComplex.zero(), frozenset({1}): k0()}
    rep = L.subsets_colim_check(fam, 1)
    assert rep.ok and rep.bar_dims == {0: 1}


def test_colim_square_of_lines():
    fam = {frozenset(s): k0() for s in L.subsets(2)}
    rep = L.subsets_colim_check(fam, 2)
    assert rep.ok and rep.bar_dims == {-1: 1}


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3), st.sampled_from(L.MODES))
def test_colim_on_random_families(seed, d, mode):
    fam = L.random_family(random.Random(seed), d)
    rep = L.subsets_colim_check(fam, d, mode)
    assert rep.implementations_agree
    assert rep.ok


# ---------------------------------------------------------------------------
# tangent and bubble


@pytest.mark.parametrize(
    "args,dims",
    [((1, 2, 1), {0: 4}), ((2, 1, 1), {0: 4, -1: 1}), ((2, 2, 1), {0: 4, -1: 4})],
)
def test_loop_tangent_examples(args, dims):
    rep = L.loop_tangent(*args)
    assert rep.dims == dims and rep.ok


@pytest.mark.parametrize("d,n,p", list(itertools.product((1, 2, 3), (1, 2), (1, 2))))
def test_loop_tangent_dimension_identity(d, n, p):
    rep = L.loop_tangent(d, n, p)
    want = {0: (p + 1) ** d}
    want[-(d - 1)] = want.get(-(d - 1), 0) + n**d
    assert rep.dims == want


@pytest.mark.parametrize(
    "args,dims",
    [((1, 1, 1), {0: 2, -1: 1}), ((2, 1, 1), {0: 4, -2: 1}), ((2, 2, 2), {0: 9, -2: 4})],
)
def test_bubble_fiber_examples(args, dims):
    rep = L.bubble_fiber_check(*args)
    assert rep.dims == dims and rep.ok


@pytest.mark.parametrize("d,n,p", list(itertools.product((1, 2), (1, 2), (1, 2))))
def test_bubble_fiber_identity(d, n, p):
    assert L.bubble_fiber_check(d, n, p).dims == {0: (p + 1) ** d, -d: n**d}


def test_tangent_needs_positive_bounds():
    with pytest.raises(L.InvalidBounds):
        L.loop_tangent(1, 0, 1)


# ---------------------------------------------------------------------------
# formal sphere and pairing


@pytest.mark.parametrize("args,dim", [((1, 2, 2), 4), ((2, 1, 1), 2), ((1, 1, 3), 4)])
def test_formal_sphere_dimensions(args, dim):
    s = L.formal_sphere(*args)
    s.algebra.validate()
    assert s.dim == dim


def test_formal_sphere_module_squares_to_zero():
    s = L.formal_sphere(1, 2, 2)
    top = range(s.base_dim, s.dim)
    assert all(not s.algebra.basis_product(i, j) for i in top for j in top)


def test_formal_sphere_truncates_the_action():
    s = L.formal_sphere(1, 1, 3)
    x = 1  # x in A_3
    assert s.algebra.basis_product(x, s.module_index((0,))) == {}


def test_formal_sphere_needs_p_at_least_n():
    with pytest.raises(L.InvalidBounds):
        L.formal_sphere(1, 2, 1)


def test_pairing_on_a_point_is_omega():
    t = L.SymplecticTarget(1)
    rep = L.bubble_pairing(1, t, 1)
    assert rep.ok
    assert rep.cross_block == t.omega


def test_pairing_cross_block_is_residue_tensor_omega():
    t = L.SymplecticTarget(1)
    rep = L.bubble_pairing(1, t, 2)
    assert rep.ok
    assert rep.residue_matrix == residue_pairing(2, 1)
    assert rep.cross_block == residue_pairing(2, 1).kron(t.omega)


@pytest.mark.parametrize("d,m,n", list(itertools.product((1, 2), (1, 2), (1, 2, 3))))
def test_pairing_is_perfect(d, m, n):
    rep = L.bubble_pairing(d, L.SymplecticTarget(m), n)
    assert rep.invertible and rep.same_degree_blocks_zero and rep.antisymmetric
    assert is_permutation_matrix(rep.residue_matrix)
    assert rank(rep.cross_block) == 2 * m * n**d


def test_pairing_with_a_larger_pro_index_has_a_kernel():
    rep = L.bubble_pairing(1, L.SymplecticTarget(1), 1, p=2)
    assert not rep.invertible
    assert rep.left_kernel_dim == 2 and rep.right_kernel_dim == 0


# ---------------------------------------------------------------------------
# Hilbert functions


def test_hilbert_examples():
    assert L.hilbert_GdE(1, [1], 1, 1, 2, 2) == [1, 3, 5]
    assert L.hilbert_GdE(1, [1], 2, 0, 2, 1) == [1, 3]


@given(st.sampled_from(subsets_of_three), st.integers(0, 2), st.integers(0, 2), st.integers(0, 3))
@settings(max_examples=25, deadline=None)
def test_hilbert_order_one_kills_negative_generators(E, n, p, cutoff):
    assert L.hilbert_GdE(3, E, n, p, 1, cutoff) == L.hilbert_GdE(3, [], n, p, 1, cutoff)


@given(st.integers(1, 2), st.sampled_from([[], [1]]), st.integers(0, 2), st.integers(0, 2), st.integers(2, 3))
@settings(max_examples=25, deadline=None)
def test_hilbert_degree_one_counts_generators(d, E, n, p, m):
    h = L.hilbert_GdE(d, E, n, p, m, 1)
    assert h == [1, L.count_generators(d, E, n, p).count]


def test_hilbert_without_negative_generators_is_polynomial():
    # k[a_0, a_1]: degree j has j + 1 monomials
    assert L.hilbert_GdE(1, [], 3, 1, 2, 4) == [1, 2, 3, 4, 5]
