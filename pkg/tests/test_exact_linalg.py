from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blform import DimensionError, ExactMatrix, IntegerEchelon, determinant, format_rational, rank, rref, to_rational
from blform.exact_linalg import primitive_integer_vector

from oracles import cofactor_det, sympy_rank

small = st.integers(-4, 4)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return draw(st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))


def test_to_rational_accepts_strings_and_ints():
    assert to_rational("3") == 3
    assert to_rational("-2/7") == Fraction(-2, 7)
    assert to_rational("0.25") == Fraction(1, 4)
    assert to_rational(Fraction(5, 3)) == Fraction(5, 3)


@pytest.mark.parametrize("bad", [0.5, True, None])
def test_to_rational_refuses_floats_and_bools(bad):
    with pytest.raises((TypeError, ValueError)):
        to_rational(bad)


def test_format_rational():
    assert format_rational(Fraction(3, 1)) == "3"
    assert format_rational(Fraction(-1, 2)) == "-1/2"


def test_rref_identity():
    I = ExactMatrix.identity(2)
    assert rref(I) == (I, 2, [0, 1])


def test_rank_examples():
    assert rank(ExactMatrix.from_rows([[1, 0], [0, 1], [1, 1]])) == 2
    assert rank(ExactMatrix.from_rows([[1, 0, 0], [1, -1, 0], [1, -1, 1]])) == 3


def test_determinant_examples():
    for n in (1, 3, 6):
        assert determinant(ExactMatrix.identity(n)) == 1
    assert determinant(ExactMatrix.from_rows([[1, 0, 0], [1, -1, 0], [1, -1, 1]])) == -1
    assert determinant(ExactMatrix.from_rows([[2, 0], [0, 1]])) == 2


def test_determinant_non_square():
    with pytest.raises(DimensionError):
        determinant(ExactMatrix.from_rows([[1, 2, 3], [4, 5, 6]]))


def test_determinant_rational_entries():
    m = ExactMatrix.from_rows([["1/2", "1/3"], ["1/4", "1/5"]])
    assert determinant(m) == Fraction(1, 10) - Fraction(1, 12)


def test_matrix_is_immutable():
    m = ExactMatrix.identity(2)
    with pytest.raises(AttributeError):
        m.rows = 3


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(square))
def test_determinant_matches_cofactor_expansion(rows):
    assert determinant(ExactMatrix.from_rows(rows)) == cofactor_det(rows)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5).flatmap(square), st.data())
def test_determinant_alternates_under_row_swap(rows, data):
    i, j = data.draw(st.lists(st.integers(0, len(rows) - 1), min_size=2, max_size=2, unique=True))
    swapped = list(rows)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    assert determinant(ExactMatrix.from_rows(swapped)) == -determinant(ExactMatrix.from_rows(rows))


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_transpose_and_sympy(rows):
    m = ExactMatrix.from_rows(rows)
    r = rank(m)
    assert r == rank(m.transpose())
    assert r == sympy_rank(rows, list(range(len(rows))))


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rref_shape(rows):
    R, r, piv = rref(ExactMatrix.from_rows(rows))
    assert len(piv) == r
    for i, c in enumerate(piv):
        assert R[i, c] == 1
        assert all(R[j, c] == 0 for j in range(R.rows) if j != i)
    assert all(R[i, c] == 0 for i in range(r, R.rows) for c in range(R.cols))


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_integer_echelon_rank(rows):
    ech = IntegerEchelon(len(rows[0]))
    for r in rows:
        ech.add(r)
    assert ech.rank == rank(ExactMatrix.from_rows(rows))


def test_primitive_integer_vector():
    assert primitive_integer_vector(["1/2", "1/3"]) == (3, 2)
    assert primitive_integer_vector([4, -6]) == (2, -3)
