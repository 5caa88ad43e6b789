from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from src.catalog import build_entry
from src.errors import InputError
from src.hol_solver import resolve_backend, tangent_algebra_constraints
from src.numeric_kernel import (
    EXACT,
    NUMERIC,
    Matrix,
    annihilator,
    char_poly_and_eigs,
    coordinates,
    faddeev_leverrier,
    format_scalar,
    in_span,
    nullspace,
    parse_scalar,
    poly_at_matrix,
    rank,
    rational_roots,
    row_basis,
    solve,
)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("3", Fraction(3)),
        ("-2/6", Fraction(-1, 3)),
        (" 7/2 ", Fraction(7, 2)),
        (5, Fraction(5)),
        ("0.25", 0.25),
        ("1e-3", 0.001),
    ],
)
def test_parse_scalar(text, expected):
    value = parse_scalar(text)
    assert value == expected
    assert type(value) is type(expected)


@pytest.mark.parametrize("bad", ["abc", "1/0", True])
def test_parse_scalar_rejects(bad):
    with pytest.raises(InputError):
        parse_scalar(bad)


def test_format_scalar():
    assert format_scalar(Fraction(-4, 6)) == "-2/3"
    assert format_scalar(1 / 3) == pytest.approx(0.333333333333)


def test_exact_nullspace_and_rank():
    m = Matrix.exact([[1, 2, 3], [2, 4, 6]])
    kernel = nullspace(m)
    assert len(kernel) == 2
    assert rank(m) == 1
    for v in kernel:
        assert all(isinstance(x, Fraction) for x in v)
        assert m.apply(v) == (0, 0)


def test_numeric_nullspace_matches_exact():
    rows = [[1, 2, 3], [0, 1, 1]]
    exact = nullspace(Matrix.exact(rows))
    numeric = nullspace(Matrix.numeric(rows))
    assert len(exact) == len(numeric) == 1
    assert in_span(exact, numeric[0], NUMERIC)


def test_row_basis_exact():
    m = Matrix.exact([[1, 1, 0], [2, 2, 0], [0, 0, 1]])
    assert row_basis(m).rows == 2


def test_solve_consistent_and_inconsistent():
    m = Matrix.exact([[1, 1], [1, -1]])
    assert solve(m, (Fraction(2), Fraction(0))) == (1, 1)
    singular = Matrix.exact([[1, 1], [2, 2]])
    assert solve(singular, (Fraction(1), Fraction(3))) is None
    assert solve(singular.as_numeric(), (1.0, 3.0)) is None


def test_annihilator_and_coordinates():
    basis = [(Fraction(1), Fraction(0), Fraction(1))]
    ann = annihilator(basis, 3, EXACT)
    assert len(ann) == 2
    assert all(sum(a * b for a, b in zip(y, basis[0])) == 0 for y in ann)
    assert coordinates(basis, (Fraction(3), Fraction(0), Fraction(3)), EXACT) == (3,)
    assert coordinates(basis, (Fraction(1), Fraction(1), Fraction(1)), EXACT) is None


def test_faddeev_leverrier_diagonal():
    assert faddeev_leverrier(Matrix.exact([[2, 0], [0, 3]])) == [1, -5, 6]


def test_faddeev_leverrier_rotation():
    assert faddeev_leverrier(Matrix.exact([[0, -1, 0], [1, 0, 0], [0, 0, 1]])) == [1, -1, 1, -1]


def test_rational_roots():
    assert rational_roots([Fraction(1), Fraction(-5), Fraction(6)]) == [2, 3]
    assert rational_roots([Fraction(1), Fraction(0), Fraction(1)]) is None
    assert rational_roots([Fraction(1), Fraction(-2), Fraction(1)]) == [1, 1]


def test_char_poly_and_eigs_complex_spectrum():
    coeffs, eigs = char_poly_and_eigs(Matrix.exact([[0, -1, 0], [1, 0, 0], [0, 0, 1]]))
    assert coeffs == [1, -1, 1, -1]
    assert eigs[0] == pytest.approx(-1j)
    assert eigs[1] == pytest.approx(1j)
    assert eigs[2] == pytest.approx(1)


def test_char_poly_rejects_non_square():
    with pytest.raises(InputError):
        char_poly_and_eigs(Matrix.exact([[1, 2, 3], [4, 5, 6]]))


@settings(max_examples=50, deadline=None, derandomize=True)
@given(st.lists(st.integers(min_value=-5, max_value=5), min_size=9, max_size=9))
def test_cayley_hamilton(entries):
    m = Matrix.exact([entries[0:3], entries[3:6], entries[6:9]])
    assert poly_at_matrix(faddeev_leverrier(m), m).is_zero()


@settings(max_examples=50, deadline=None, derandomize=True)
@given(st.lists(st.integers(min_value=-4, max_value=4), min_size=12, max_size=12))
def test_rank_nullity(entries):
    m = Matrix.exact([entries[0:4], entries[4:8], entries[8:12]])
    assert rank(m) + len(nullspace(m)) == 4
    assert rank(m) == np.linalg.matrix_rank(np.array(entries, dtype=float).reshape(3, 4))


CATALOG_SYSTEMS = [
    ("EI", {}),
    ("EY", {"alpha": Fraction(2)}),
    ("EZ", {}),
    ("EX", {"alpha": Fraction(-3)}),
    ("EB", {"alpha": Fraction(2)}),
    ("EB", {"alpha": Fraction(3)}),
]


@pytest.mark.parametrize("tol", [1e-10, 1e-8, 1e-6])
@pytest.mark.parametrize("name, params", CATALOG_SYSTEMS)
def test_numeric_nullspace_matches_exact_on_catalog_systems(name, params, tol):
    p = build_entry(name, params).presentation
    exact = nullspace(tangent_algebra_constraints(p, resolve_backend(p)))
    numeric = nullspace(tangent_algebra_constraints(p, "numeric", tol), tol)
    assert len(numeric) == len(exact)
