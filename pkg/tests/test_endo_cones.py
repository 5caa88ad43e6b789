from fractions import Fraction

import pytest

from src.endo_cones import (
    EndoCone,
    cr_dimension,
    cyclic_vectors_equivalent,
    du_condition,
    endocone_report,
    eo_linearized,
    is_cyclic,
    predicted_hol,
)
from src.errors import InconsistencyError, InputError, NotApplicable
from src.numeric_kernel import Matrix

ROTATION = Matrix.exact([[0, -1, 0], [1, 0, 0], [0, 0, 1]])
BASE = (Fraction(1), Fraction(0), Fraction(1))


@pytest.mark.parametrize(
    "values, expected",
    [
        ([Fraction(-1), Fraction(0), Fraction(1)], False),
        ([1j, -1j, 1], True),
        ([1j, -1j, 0], False),
        ([Fraction(-2), Fraction(0), Fraction(1)], True),
        ([Fraction(-3, 2), Fraction(0), Fraction(1)], True),
    ],
)
def test_du_condition(values, expected):
    assert du_condition(values, 1) is expected


def test_du_condition_repeated_eigenvalue():
    with pytest.raises(InconsistencyError):
        du_condition([Fraction(0), Fraction(0), Fraction(1)], 1)


def test_du_condition_range():
    with pytest.raises(InputError):
        du_condition([Fraction(0), Fraction(1), Fraction(2)], 3)


def test_endocone_validates_shape():
    with pytest.raises(InputError):
        EndoCone(ROTATION, 2, BASE)


def test_cyclic_vectors():
    assert is_cyclic(ROTATION, BASE)
    assert not is_cyclic(ROTATION, (Fraction(0), Fraction(0), Fraction(1)))


def test_predicted_hol_rotation():
    prediction = predicted_hol(EndoCone(ROTATION, 1, BASE))
    assert prediction.applicable
    assert prediction.dims == {-1: 3, 0: 2}
    assert prediction.total == 5
    assert prediction.aut_trivial


def test_predicted_hol_boost_fails_condition():
    boost = Matrix.exact([[0, 0, 0], [0, 0, 1], [0, 1, 0]])
    prediction = predicted_hol(EndoCone(boost, 1, BASE))
    assert not prediction.applicable
    assert prediction.reason == "condition DU fails"


def test_predicted_hol_needs_cyclic_vector():
    prediction = predicted_hol(EndoCone(ROTATION, 1, (Fraction(0), Fraction(0), Fraction(1))))
    assert not prediction.applicable
    assert "cyclic" in prediction.reason


def test_cr_dimension():
    assert cr_dimension(EndoCone(ROTATION, 1, BASE)) == 2
    with pytest.raises(NotApplicable):
        cr_dimension(EndoCone(ROTATION, 1, (Fraction(0), Fraction(0), Fraction(1))))


def test_eo_linearized_rotation():
    ec = EndoCone(ROTATION, 1, BASE)
    assert eo_linearized(ec, ec.powers()) == "holds_infinitesimally"


def test_cyclic_vectors_equivalent():
    other = (Fraction(1), Fraction(1), Fraction(1))
    assert cyclic_vectors_equivalent(ROTATION, 1, BASE, other)
    with pytest.raises(NotApplicable):
        cyclic_vectors_equivalent(ROTATION, 1, BASE, (Fraction(0), Fraction(0), Fraction(1)))


def test_endocone_report():
    report = endocone_report(EndoCone(ROTATION, 1, BASE))
    assert report["cyclic"]
    assert report["du_condition"] is True
    assert report["predicted_hol"]["status"] == "predicted"
    assert report["cr_dimension"] == 2


def test_endocone_report_repeated_eigenvalues():
    shear = Matrix.exact([[0, 0, 0], [1, 0, 0], [0, 0, 1]])
    report = endocone_report(EndoCone(shear, 1, BASE))
    assert report["du_condition"] is None
    assert "du_error" in report
