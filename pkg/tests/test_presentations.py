from fractions import Fraction

import pytest

from src.errors import InputError, PresentationError
from src.numeric_kernel import EXACT, in_span
from src.presentations import (
    AffineField,
    LevelSetPresentation,
    OrbitPresentation,
    PolynomialSurface,
    is_conical,
    levi_form,
    minimality_report,
    presentation_from_dict,
    sample_level_set_points,
    sample_points,
    second_fundamental_form,
    tangent_space,
)
from src.catalog import build_entry


def test_affine_bracket():
    x = AffineField.build([[0, 1], [0, 0]], [1, 0])
    y = AffineField.build([[1, 0], [0, -1]], [0, 2])
    z = x.bracket(y)
    # [Ax + b, Cx + d] = (CA - AC) x + (C b - A d)
    assert z.linear.entries == ((0, 2), (0, 0))
    assert z.constant == (-1, 0)


def test_lightcone_levelset(lightcone):
    assert isinstance(lightcone, LevelSetPresentation)
    assert lightcone.degree == 2
    assert lightcone.dimension == 2
    basis = tangent_space(lightcone)
    assert len(basis) == 2
    assert in_span(basis, (Fraction(1), Fraction(0), Fraction(1)), EXACT)
    assert is_conical(lightcone)


def test_lightcone_second_form_radical(lightcone):
    sf = second_fundamental_form(lightcone)
    assert sf.codimension == 1
    radical = sf.radical()
    assert len(radical) == 1
    assert in_span(radical, lightcone.base_point, EXACT)
    assert levi_form(lightcone).kernel_dimension() == 1


def test_orbit_tangent_space(ey1):
    assert isinstance(ey1, OrbitPresentation)
    assert ey1.dimension == 2
    basis = tangent_space(ey1)
    assert in_span(basis, (Fraction(1), Fraction(0), Fraction(1)), EXACT)
    assert in_span(basis, (Fraction(0), Fraction(1), Fraction(1)), EXACT)
    assert second_fundamental_form(ey1).is_symmetric()


def test_twisted_cubic_tangent_space():
    ev = build_entry("EV").presentation
    for v in tangent_space(ev):
        assert v[2] == 0


def test_sampled_orbit_points_stay_on_cone():
    ei = build_entry("EI").presentation
    for x in sample_points(ei, 10):
        assert x[0] ** 2 + x[1] ** 2 - x[2] ** 2 == pytest.approx(0.0, abs=1e-9)


def test_sampled_levelset_points(lightcone):
    for x in sample_level_set_points(lightcone, 10):
        assert abs(float(lightcone.value(x))) <= 1e-9


def test_not_on_level_set():
    terms = (((2, 0, 0), Fraction(1)), ((0, 2, 0), Fraction(1)), ((0, 0, 2), Fraction(-1)))
    with pytest.raises(PresentationError):
        LevelSetPresentation(3, terms, (Fraction(1), Fraction(1), Fraction(1)))


def test_level_set_must_be_homogeneous():
    terms = (((2, 0, 0), Fraction(1)), ((0, 1, 0), Fraction(-1)))
    with pytest.raises(InputError):
        LevelSetPresentation(3, terms, (Fraction(0), Fraction(0), Fraction(0)))


def test_generators_must_close():
    shift = AffineField.build([[0, 0], [0, 0]], [1, 0])
    shear = AffineField.build([[0, 0], [1, 0]])
    with pytest.raises(PresentationError):
        OrbitPresentation((shift, shear), (Fraction(0), Fraction(0)))


def test_hyperplane_is_nonminimal(hyperplane_orbit):
    assert is_conical(hyperplane_orbit)
    assert minimality_report(hyperplane_orbit).verdict == "nonminimal"


def test_paraboloid_is_minimal_not_conical(paraboloid):
    assert not is_conical(paraboloid)
    assert minimality_report(paraboloid).verdict == "minimal"


def test_lightcone_minimal(lightcone):
    report = minimality_report(lightcone)
    assert report.not_in_hyperplane
    assert report.verdict == "minimal"


@pytest.mark.parametrize(
    "data",
    [
        {"kind": "orbit", "base_point": ["1", "0", "1"]},
        {"kind": "orbit", "n": 3, "base_point": ["1", "0"], "generators": []},
        {"kind": "orbit", "n": 3, "base_point": ["1", "0", "1"], "generators": [{"const": ["0", "0", "0"]}]},
        {"kind": "levelset", "n": 2, "base_point": ["1", "1"], "poly": [{"exps": [2, 0], "coeff": "0.5"}]},
        {"kind": "sphere", "n": 2, "base_point": ["1", "1"]},
        [],
    ],
)
def test_malformed_presentations(data):
    with pytest.raises(InputError):
        presentation_from_dict(data)


def test_round_trip_dict(ey1):
    again = presentation_from_dict(ey1.to_dict())
    assert again.to_dict() == ey1.to_dict()


def test_polynomial_surface_allows_mixed_degrees():
    # y = x^2 as x^2 - y
    s = PolynomialSurface(2, (((2, 0), Fraction(1)), ((0, 1), Fraction(-1))))
    assert s.value((Fraction(3), Fraction(9))) == 0
    assert s.gradient((Fraction(3), Fraction(9))) == (6, -1)
    assert s.value((1.5, 2.25)) == pytest.approx(0.0)
    with pytest.raises(InputError):
        LevelSetPresentation(2, s.terms, (Fraction(3), Fraction(9)))
    with pytest.raises(InputError):
        PolynomialSurface(2, (((1, 0, 0), Fraction(1)),))
