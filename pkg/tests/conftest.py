from fractions import Fraction

import pytest

from src.config import Paths
from src.presentations import AffineField, LevelSetPresentation, OrbitPresentation, load_presentation


@pytest.fixture(scope="session")
def paths() -> Paths:
    return Paths()


@pytest.fixture(scope="session")
def lightcone(paths):
    return load_presentation(paths.lightcone_json)


@pytest.fixture(scope="session")
def ey1(paths):
    return load_presentation(paths.ey1_json)


@pytest.fixture(scope="session")
def ex_m2(paths):
    return load_presentation(paths.ex_m2_json)


@pytest.fixture(scope="session")
def paraboloid():
    # x3 = x1^2 + x2^2 as the orbit of two commuting translations
    g1 = AffineField.build([[0, 0, 0], [0, 0, 0], [2, 0, 0]], [1, 0, 0])
    g2 = AffineField.build([[0, 0, 0], [0, 0, 0], [0, 2, 0]], [0, 1, 0])
    return OrbitPresentation((g1, g2), (Fraction(0), Fraction(0), Fraction(0)))


@pytest.fixture(scope="session")
def hyperplane_orbit():
    zero = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
    return OrbitPresentation(
        (AffineField.build(zero, [1, 0, 0]), AffineField.build(zero, [0, 1, 0])),
        (Fraction(0), Fraction(0), Fraction(0)),
    )


@pytest.fixture(scope="session")
def hyperplane_levelset():
    return LevelSetPresentation(3, (((0, 0, 1), Fraction(1)),), (Fraction(1), Fraction(0), Fraction(0)))
