import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tateforge.cdga import truncated_polynomial
from tateforge.dglie import (
    CEChains,
    NotARepresentation,
    Representation,
    WeightTooLarge,
    abelian,
    base_change,
    ce_cohomology,
    ce_homology,
    coalgebra_check,
    convention_report,
    envelope_quotient_oracle,
    free_lie,
    pbw_symmetrize,
    sl2,
)
from tateforge.dglie.fixtures import acyclic_pair, graded_space, lie_fixtures
from tateforge.exactalg import InvalidComplex
from tateforge.scalars import CharDivision, Field

from conftest import complexes_with_cohomology


def shifted_down(dims):
    return {deg - 1: v for deg, v in dims.items()}


# ---------------------------------------------------------------------------
# chains


def test_sl2_homology_is_that_of_a_three_sphere():
    res = ce_homology(sl2(), 3)
    assert res.homological() == {0: 1, 3: 1}


def test_abelian_odd_line_has_trivial_reduced_homology():
    res = ce_homology(abelian([1]), 4)
    assert all(res.dims[w] == {0: 1} for w in range(5))


def test_abelian_even_plane_gives_symmetric_powers():
    res = ce_homology(abelian([1, 1]), 3)
    assert res.dims == {0: {0: 1}, 1: {0: 2}, 2: {0: 3}, 3: {0: 4}}


def test_free_lie_on_two_generators():
    res = ce_homology(free_lie(graded_space([0, 0]), 4), 4)
    assert res.totals() == {-1: 2, 0: 1}
    assert res.dims[1] == {-1: 2}
    assert all(res.dims[w] == {} for w in (2, 3, 4))


def test_free_lie_on_an_acyclic_complex():
    assert ce_homology(free_lie(acyclic_pair(), 3), 3).totals() == {0: 1}


@settings(max_examples=15, deadline=None)
@given(complexes_with_cohomology(degrees=(-1, 0, 1), max_pieces=2))
def test_free_lie_homology_is_unit_plus_shifted_generators(pair):
    v, hv = pair
    res = ce_homology(free_lie(v, 3), 3)
    want = shifted_down(hv)
    want[0] = want.get(0, 0) + 1
    assert res.totals() == want


def test_homology_over_a_cdga_base():
    # A = k[e]/e^2 with |e| = -1 is free of rank two, so H(A (x) sl2) = A (x) H(sl2)
    res = ce_homology(base_change(sl2(), truncated_polynomial(1, 2, degree=-1)), 3)
    assert res.totals() == {-4: 1, -3: 1, -1: 1, 0: 1}


def test_homology_over_a_prime_field():
    assert ce_homology(sl2(), 3, field=Field(5)).homological() == {0: 1, 3: 1}


@pytest.mark.parametrize("name", sorted(lie_fixtures(3)))
def test_coalgebra_structure(name):
    assert coalgebra_check(lie_fixtures(3)[name], 3)["ok"]


# ---------------------------------------------------------------------------
# sign conventions


def test_plain_convention_fails_on_odd_letters():
    rep = convention_report(free_lie(graded_space([1, 1]), 4), 4)
    assert rep["shifted"]["d_squared_zero"] and rep["shifted"]["pair_symmetric"]
    assert not rep["plain"]["d_squared_zero"]
    assert "eta[x,[x,[x,y]]]" in rep["plain"]["witness"]


def test_plain_convention_raises_through_the_api():
    with pytest.raises(InvalidComplex):
        ce_homology(free_lie(graded_space([1, 1]), 4), 4, convention="plain")


def test_conventions_agree_on_even_algebras():
    rep = convention_report(sl2(), 3)
    assert all(r["d_squared_zero"] for r in rep.values())


@pytest.mark.parametrize("name", sorted(lie_fixtures(3)))
def test_shifted_chains_square_to_zero(name):
    l = lie_fixtures(3)[name]
    for c in CEChains(l).blocks(3).values():
        c.check()


# ---------------------------------------------------------------------------
# cochains


def test_sl2_trivial_cochains():
    assert ce_cohomology(sl2(), 3).totals() == {0: 1, 3: 1}


def test_sl2_adjoint_cochains_vanish():
    assert ce_cohomology(sl2(), 3, Representation.adjoint(sl2())).totals() == {}


def test_free_lie_cochains_are_unit_plus_dual_generators():
    assert ce_cohomology(free_lie(graded_space([0, 0]), 4), 4).totals() == {0: 1, 1: 2}


@pytest.mark.parametrize("degrees", [[1], [1, 1], [0], [0, 1]])
def test_abelian_cochains_dual_to_chains(degrees):
    l = abelian(degrees)
    chains, cochains = ce_homology(l, 3), ce_cohomology(l, 3)
    for w, h in chains.dims.items():
        assert cochains.dims[w] == {-deg: v for deg, v in h.items()}


def test_bad_representation_rejected():
    l = sl2()
    h = l.labels.index("h")
    # every generator acts by zero except h, which breaks [e, f] = h
    bad = Representation(l, ["m"], [0], {(h, 0): {0: 1}})
    with pytest.raises(NotARepresentation):
        bad.validate()
    with pytest.raises(NotARepresentation):
        ce_cohomology(l, 2, bad)


def test_adjoint_representation_validates():
    for l in lie_fixtures(3).values():
        Representation.adjoint(l).validate()


# ---------------------------------------------------------------------------
# envelopes


def test_pbw_for_sl2():
    cert = pbw_symmetrize(sl2(), 2)
    assert cert.ok
    assert cert.sym_dims == cert.envelope_dims == {0: 1, 1: 4, 2: 10}


def test_pbw_matrix_is_identity_for_abelian():
    cert = pbw_symmetrize(abelian([0, 1]), 3)
    n = cert.matrix.nrows
    assert cert.ok and cert.matrix.to_dense() == [[int(i == j) for j in range(n)] for i in range(n)]


@pytest.mark.parametrize("name", sorted(lie_fixtures(3)))
def test_pbw_holds_for_fixtures(name):
    assert pbw_symmetrize(lie_fixtures(3)[name], 3).ok


def test_pbw_needs_large_characteristic():
    with pytest.raises(CharDivision):
        pbw_symmetrize(sl2(), 3, field=Field(3))
    assert pbw_symmetrize(sl2(), 2, field=Field(5)).ok


def test_envelope_weight_bound():
    with pytest.raises(WeightTooLarge):
        pbw_symmetrize(sl2(), 6)
    with pytest.raises(WeightTooLarge):
        envelope_quotient_oracle(sl2(), 6)


@pytest.mark.parametrize("name", sorted(lie_fixtures(3)))
def test_envelope_oracle_matches_chains(name):
    l = lie_fixtures(3)[name]
    assert envelope_quotient_oracle(l, 3).dims == ce_homology(l, 3).dims


@given(st.lists(st.sampled_from([-1, 0, 1]), min_size=1, max_size=2), st.integers(1, 3))
@settings(max_examples=15, deadline=None)
def test_envelope_oracle_on_free_algebras(degrees, weight):
    l = free_lie(graded_space(degrees), weight)
    assert envelope_quotient_oracle(l, weight).totals() == ce_homology(l, weight).totals()


def test_plain_convention_fails_the_sign_criterion():
    from tateforge.acceptance import SuiteOptions, run_criterion

    res = run_criterion(6, SuiteOptions(convention="plain"))
    assert not res.passed
    assert any("eta[x,[x,[x,y]]]" in f for f in res.failures)
