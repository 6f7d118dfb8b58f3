from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tateforge.cdga import (
    BaseCdga,
    CdgaAxiomViolation,
    CdgaModule,
    NotAModule,
    monomials,
    restriction_module,
    square_zero,
    truncated_polynomial,
)
from tateforge.dglie import (
    LieAxiomViolation,
    WeightTooLarge,
    abelian,
    corrupted_sl2,
    free_lie,
    from_document,
    necklace_dims,
    pbw_series_dims,
    sl2,
    to_document,
    validate_lie,
)
from tateforge.dglie.fixtures import acyclic_pair, builtin_lie, graded_space, lie_fixtures, shuffled_lie


def weight_dims(l, top):
    return [sum(1 for w in l.weights if w == k) for k in range(1, top + 1)]


# ---------------------------------------------------------------------------
# validation


def test_sl2_validates():
    rep = validate_lie(sl2())
    assert rep["ok"] and rep["triples"] == 27


def test_abelian_with_differential_validates():
    l = abelian([-1, 0], {0: {1: 1}})
    assert validate_lie(l)["ok"]


def test_corrupted_sl2_names_the_jacobi_triple():
    with pytest.raises(LieAxiomViolation) as info:
        validate_lie(corrupted_sl2())
    assert info.value.witness[0] == "jacobi"
    assert "Jacobi" in str(info.value)


def test_wrong_degree_bracket():
    l = from_document({"basis": ["x", "y"], "degrees": [0, 1], "brackets": [["x", "y", {"x": "1/1"}]]})
    with pytest.raises(LieAxiomViolation) as info:
        validate_lie(l)
    assert info.value.witness[0] == "degree"


def test_differential_must_square_to_zero():
    l = abelian([0, 1, 2], {0: {1: 1}, 1: {2: 1}})
    with pytest.raises(LieAxiomViolation) as info:
        validate_lie(l)
    assert info.value.witness[0] == "d2"


def test_leibniz_failure():
    # [x, y] = z and d z = w, while x and y are cycles
    doc = {"basis": ["x", "y", "z", "w"], "degrees": [0, 0, 0, 1], "brackets": [["x", "y", {"z": 1}]], "differential": {"z": {"w": 1}}}
    with pytest.raises(LieAxiomViolation) as info:
        validate_lie(from_document(doc))
    assert info.value.witness[0] == "leibniz"


def test_document_round_trip():
    for l in lie_fixtures(3).values():
        doc = to_document(l)
        back = from_document(doc)
        assert back.brackets == l.brackets
        assert back.differential == l.differential
        assert back.weight_graded == l.weight_graded


def test_unknown_label_in_document():
    with pytest.raises(LieAxiomViolation):
        from_document({"basis": ["x"], "degrees": [0], "brackets": [["x", "q", {"x": 1}]]})


def test_builtin_names():
    assert builtin_lie("sl2").dim == 3
    assert builtin_lie("abelian:0,1").degrees == (0, 1)
    assert builtin_lie("free:0,0:3").dim == 5
    with pytest.raises(ValueError):
        builtin_lie("nonsense")


# ---------------------------------------------------------------------------
# free Lie algebras


def test_free_on_two_even_generators():
    assert weight_dims(free_lie(graded_space([0, 0]), 4), 4) == [2, 1, 2, 3]


def test_free_on_one_even_generator():
    assert weight_dims(free_lie(graded_space([0]), 4), 4) == [1, 0, 0, 0]


def test_free_on_one_odd_generator_has_its_square():
    l = free_lie(graded_space([1]), 3)
    assert weight_dims(l, 3) == [1, 1, 0]
    assert l.degrees == (1, 2)


def test_weight_bound():
    with pytest.raises(WeightTooLarge):
        free_lie(graded_space([0]), 99)


@given(st.lists(st.sampled_from([-1, 0, 1]), min_size=1, max_size=2), st.integers(1, 5))
def test_free_lie_matches_series_oracle(degrees, weight):
    l = free_lie(graded_space(degrees), weight)
    got = {}
    for w, g in zip(l.weights, l.degrees):
        got[(w, g)] = got.get((w, g), 0) + 1
    assert got == pbw_series_dims(degrees, weight)


@given(st.integers(1, 3), st.integers(1, 5))
def test_free_lie_matches_necklace_formula(n, weight):
    if n == 3 and weight > 4:
        weight = 4
    l = free_lie(graded_space([0] * n), weight)
    assert weight_dims(l, weight) == necklace_dims(n, weight)


def test_series_oracle_agrees_with_necklace_on_even_generators():
    for n in (1, 2, 3):
        series = pbw_series_dims([0] * n, 6)
        assert [series.get((w, 0), 0) for w in range(1, 7)] == necklace_dims(n, 6)


@given(st.lists(st.sampled_from([-1, 0, 1]), min_size=1, max_size=2))
def test_free_lie_validates(degrees):
    validate_lie(free_lie(graded_space(degrees), 3))


def test_free_lie_on_a_complex_carries_the_differential():
    l = free_lie(acyclic_pair(), 3)
    validate_lie(l)
    assert l.differential


def test_shuffled_lie_validates():
    import random

    l = shuffled_lie(sl2(), random.Random(3))
    validate_lie(l)
    assert sorted(l.labels) == ["e", "f", "h"]


# ---------------------------------------------------------------------------
# base cdgas and square-zero extensions


def test_square_zero_dual_numbers():
    k = BaseCdga.field()
    eps = CdgaModule(k, ["eps"], [1], {(0, 0): {0: 1}})
    a = square_zero(k, eps)
    assert a.degrees == (0, 1)
    assert a.basis_product(1, 1) == {}


def test_square_zero_on_k2():
    k = BaseCdga.field()
    m = CdgaModule(k, ["u", "v"], [0, 0], {(0, 0): {0: 1}, (0, 1): {1: 1}})
    a = square_zero(k, m)
    a.validate()
    assert a.dim == 3
    assert all(not a.basis_product(i, j) for i in (1, 2) for j in (1, 2))


def test_square_zero_formal_sphere_piece():
    a2, a1 = truncated_polynomial(1, 2), truncated_polynomial(1, 1)
    mod = restriction_module(a1, a2, {0: {0: 1}}, shift=1, prefix="u.")
    ext = square_zero(a2, mod)
    top = [i for i, g in enumerate(ext.degrees) if g == 1]
    assert all(not ext.basis_product(i, j) for i in top for j in top)


def test_module_axioms_checked():
    k = BaseCdga.field()
    bad = CdgaModule(k, ["u"], [0], {(0, 0): {0: 2}})  # the unit must act as 1
    with pytest.raises((NotAModule, CdgaAxiomViolation)):
        square_zero(k, bad)


@given(st.integers(1, 3), st.integers(1, 3))
def test_truncated_polynomials_validate(d, n):
    a = truncated_polynomial(d, n)
    a.validate()
    assert a.dim == len(monomials(d, n)) == n**d


def test_odd_truncated_polynomial_is_graded_commutative():
    a = truncated_polynomial(2, 2, degree=-1)
    a.validate()
    with pytest.raises(ValueError):
        truncated_polynomial(1, 3, degree=1)


def test_leibniz_checked_for_base():
    bad = BaseCdga(["1", "e", "f"], [0, -1, 0], 0, {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (0, 2): {2: 1}, (2, 0): {2: 1}, (2, 2): {2: 1}}, {1: {2: Fraction(1)}})
    with pytest.raises(CdgaAxiomViolation):
        bad.validate()
