from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tateforge import linalg
from tateforge._kernels import numpy_kernels
from tateforge.scalars import QQ, CharDivision, Field, FieldError, format_scalar, parse_scalar, to_fraction
from tateforge.sparse import SparseMatrix

from conftest import fractions


# ---------------------------------------------------------------------------
# scalars


@given(fractions)
def test_scalar_round_trip(q):
    text = format_scalar(q)
    assert "/" in text
    assert parse_scalar(text) == q


def test_scalar_format_always_has_denominator():
    assert format_scalar(Fraction(3)) == "3/1"
    assert format_scalar(Fraction(-2, 4)) == "-1/2"


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        to_fraction(0.5)
    with pytest.raises(TypeError):
        to_fraction(True)


def test_field_parse():
    assert Field.parse("rational").is_rational
    assert Field.parse("fp:7").characteristic == 7
    assert Field.parse("fp:7").spec() == "fp:7"
    for bad in ("fp:8", "fp:x", "complex"):
        with pytest.raises(FieldError):
            Field.parse(bad)


def test_char_division():
    with pytest.raises(CharDivision):
        Field(3).check_invertible(6)


# ---------------------------------------------------------------------------
# sparse matrices and elimination


@st.composite
def matrices(draw, max_dim=6):
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    rows = [[draw(st.integers(-3, 3)) for _ in range(c)] for _ in range(r)]
    return SparseMatrix.from_dense(rows, c)


def numpy_rank(m: SparseMatrix) -> int:
    if not m.nrows or not m.ncols:
        return 0
    return int(np.linalg.matrix_rank(np.array([[float(x) for x in row] for row in m.to_dense()])))


@given(matrices())
def test_rank_matches_floating_oracle_on_small_integer_matrices(m):
    assert linalg.rank(m) == numpy_rank(m)


@given(matrices())
def test_rank_nullity(m):
    assert linalg.rank(m) + len(linalg.kernel(m)) == m.ncols
    for v in linalg.kernel(m):
        assert not m.apply(v)


@given(matrices())
def test_transpose_rank(m):
    assert linalg.rank(m) == linalg.rank(m.transpose())


@given(matrices(), st.sampled_from([2, 3, 5, 7, 101]))
def test_rank_mod_p_bounded_by_rational_rank(m, p):
    assert linalg.rank(m, Field(p)) <= linalg.rank(m)


def test_rank_mod_p_drops():
    m = SparseMatrix.from_dense([[1, 1], [1, -1]])
    assert linalg.rank(m) == 2
    assert linalg.rank(m, Field(2)) == 1


@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_determinant_matches_invertibility(rows):
    m = SparseMatrix.from_dense(rows)
    det = linalg.determinant(m)
    assert (det != 0) == linalg.is_invertible(m)
    if det:
        assert linalg.inverse(m) @ m == SparseMatrix.identity(m.nrows)


def test_solve():
    m = SparseMatrix.from_dense([[1, 2], [3, 4]])
    x = linalg.solve(m, {0: Fraction(5), 1: Fraction(11)})
    assert x == {0: 1, 1: 2}
    assert linalg.solve(SparseMatrix.from_dense([[1], [1]]), {0: 1}) is None


def test_echelon_membership():
    e = linalg.Echelon()
    assert e.add({0: 1, 1: 1})
    assert not e.add({0: 2, 1: 2})
    assert e.contains({0: -1, 1: -1})
    assert not e.contains({1: 1})


@given(matrices(), st.sampled_from([2, 3, 7, 32003]))
def test_fp_kernels_agree(m, p):
    a = np.array([[int(x) for x in row] for row in m.to_dense()], dtype=np.int64).reshape(m.nrows, m.ncols)
    r1, p1 = numpy_kernels.rref_mod_p(a, p)
    try:
        from tateforge._kernels import numba_kernels
    except ImportError:
        pytest.skip("numba unavailable")
    r2, p2 = numba_kernels.rref_mod_p(a, p)
    assert np.array_equal(r1, r2)
    assert np.array_equal(p1, p2)


def test_kron_and_permute():
    a = SparseMatrix.from_dense([[0, 1], [1, 0]])
    b = SparseMatrix.identity(2)
    k = a.kron(b)
    assert k.shape == (4, 4)
    assert linalg.rank(k) == 4
    assert a.permute([1, 0], None) == SparseMatrix.identity(2)


def test_sparse_rejects_out_of_range():
    with pytest.raises(IndexError):
        SparseMatrix(1, 1, {(1, 0): 1})


def test_field_rank_default_is_rational():
    m = SparseMatrix.from_dense([[2]])
    assert linalg.rank(m, QQ) == 1
    assert linalg.rank(m, Field(2)) == 0


@pytest.mark.parametrize("flag,backend", [("0", "numpy"), ("1", "numba")])
def test_backend_follows_environment(flag, backend):
    import os
    import subprocess
    import sys

    env = {**os.environ, "TATEFORGE_NUMBA": flag}
    code = "from tateforge._kernels import BACKEND; from tateforge import linalg; from tateforge.scalars import Field; from tateforge.sparse import SparseMatrix; print(BACKEND, linalg.rank(SparseMatrix.from_dense([[1, 1], [1, -1]]), Field(2)))"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout.split()
    assert out == [backend, "1"]
