from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from ncdef.linalg import (
    EchelonBasis,
    Matrix,
    NoSolution,
    as_fraction,
    format_fraction,
    inverse,
    kernel_basis,
    rank,
    rref,
    solve,
    span_rank,
    subspace_equal,
)

small = st.integers(-3, 3)


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return Matrix.from_rows([[draw(small) for _ in range(c)] for _ in range(r)], c)


def test_rref_of_rank_one():
    m, piv = rref(Matrix.from_rows([[1, 2], [2, 4]]))
    assert m.to_rows() == [[1, 2], [0, 0]]
    assert piv == [0]


def test_kernel_and_solve_small():
    assert kernel_basis(Matrix.from_rows([[1, 1]])) == [[-1, 1]]
    x = solve(Matrix.from_rows([[1, 1], [0, 1]]), [2, 0])
    assert x == [2, 0]
    with pytest.raises(NoSolution):
        solve(Matrix.from_rows([[1, 1], [1, 1]]), [1, 2])


def test_fraction_strings_round_trip():
    for text in ["0", "3", "-1/2", "7/9"]:
        assert format_fraction(as_fraction(text)) == text
    assert as_fraction("2/4") == Fraction(1, 2)


@given(matrices())
def test_rank_matches_sympy(m):
    assert rank(m) == sympy.Matrix(m.to_rows()).rank()


@given(matrices())
def test_rank_nullity(m):
    ker = kernel_basis(m)
    assert rank(m) + len(ker) == m.cols
    for v in ker:
        assert not any(m.apply(v))


@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_solve_reproduces_consistent_rhs(m, x):
    b = m.apply(x[: m.cols])
    y = solve(m, b)
    assert m.apply(y) == b


@given(st.integers(1, 4), st.data())
def test_inverse_is_two_sided(n, data):
    m = Matrix.from_rows([[data.draw(small) for _ in range(n)] for _ in range(n)], n)
    if rank(m) < n:
        with pytest.raises(ValueError):
            inverse(m)
        return
    inv = inverse(m)
    assert m @ inv == Matrix.identity(n)
    assert inv @ m == Matrix.identity(n)


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=6))
def test_echelon_basis_rank(rows):
    ech = EchelonBasis()
    for r in rows:
        ech.add({i: Fraction(x) for i, x in enumerate(r) if x})
    assert len(ech) == span_rank(rows, 4)
    for r in rows:
        assert ech.contains({i: Fraction(x) for i, x in enumerate(r) if x})


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=4))
def test_subspace_equal_under_recombination(rows):
    mixed = [[a + b for a, b in zip(rows[0], r)] for r in rows[1:]] + [rows[0]]
    assert subspace_equal(rows, mixed)
