from fractions import Fraction

import numpy as np
import pytest

from src.catalog import build_entry
from src.errors import BackendError, InputError, RefusedInput
from src.hol_solver import (
    PolyField,
    VectorField,
    assemble_hol,
    bracket,
    bracket_field,
    check_euler_grading,
    euler_field,
    field_keys,
    graded_profile,
    isotropy_dimension,
    locally_homogeneous_possible,
    multiplicity,
    parity_ok,
    resolve_backend,
    solve_graded_component,
    verify_termination,
)
from src.presentations import AffineField


def unit_field(degree: int, key_index: int, n: int = 3) -> PolyField:
    coeffs = [0] * len(field_keys(n, degree))
    coeffs[key_index] = 1
    return PolyField(degree, n, tuple(Fraction(c) for c in coeffs))


@pytest.fixture(scope="module")
def lightcone_hol(lightcone):
    return assemble_hol(lightcone)


@pytest.fixture(scope="module")
def ey1_hol(ey1):
    return assemble_hol(ey1)


def test_field_keys():
    assert len(field_keys(3, -1)) == 3
    assert len(field_keys(3, 0)) == 9
    assert len(field_keys(3, 1)) == 18
    assert multiplicity((0, 0, 2)) == 3
    assert multiplicity((0, 1, 2)) == 6


@pytest.mark.parametrize("degree, imaginary", [(-1, True), (0, False), (1, True), (2, False)])
def test_parity(degree, imaginary):
    assert unit_field(degree, 0).imaginary is imaginary


def test_poly_field_rejects_bad_shapes():
    with pytest.raises(InputError):
        PolyField(0, 3, (Fraction(1),))
    with pytest.raises(InputError):
        PolyField(-2, 3, ())


def test_translation_bracket_with_euler():
    # [i d/dz1, delta] = i d/dz1
    coeffs = bracket_field(unit_field(-1, 0), euler_field(3)).coefficients()
    assert coeffs == {("im", 0, (0, 0, 0)): 1}


def test_euler_acts_by_degree():
    q = unit_field(1, 0)  # i z1^2 d/dz1
    assert bracket_field(euler_field(3), q).coefficients() == q.vector_field().coefficients()


def test_imaginary_units_multiply():
    f = VectorField.constant([1, 0, 0], imaginary=True)
    g = VectorField.from_affine(AffineField.build([[0, 0, 0], [0, 0, 0], [0, 0, 0]]), imaginary=True)
    assert not f.bracket(f).coefficients()
    assert not f.bracket(g).imaginary


def test_lightcone_components(lightcone):
    assert len(solve_graded_component(lightcone, -1)) == 3
    assert len(solve_graded_component(lightcone, 0)) == 4
    assert len(solve_graded_component(lightcone, 1)) == 3
    assert solve_graded_component(lightcone, 2) == []


def test_lightcone_hol(lightcone_hol):
    G = lightcone_hol
    assert G.graded_dims == {-1: 3, 0: 4, 1: 3}
    assert G.dim == 10
    assert G.backend == "exact-levelset"
    assert G.euler_index == 3
    assert check_euler_grading(G)
    assert parity_ok(G)
    assert G.evidence["stopped_at"] == 2


def test_lightcone_bracket_lands_in_g0(lightcone_hol):
    G = lightcone_hol
    coords = bracket(G.basis[0], G.basis[G.block(1).start], G)
    outside = [c for i, c in enumerate(coords) if i not in G.block(0)]
    assert all(c == 0 for c in outside)
    assert any(coords[i] != 0 for i in G.block(0))


def test_lightcone_termination(lightcone, lightcone_hol):
    assert verify_termination(lightcone, lightcone_hol) == {"2": 0, "3": 0}


def test_lightcone_isotropy(lightcone, lightcone_hol):
    report = isotropy_dimension(lightcone_hol, lightcone)
    assert report.dim_m == 5
    assert report.transitive
    assert report.isotropy_dim == 5
    assert locally_homogeneous_possible(lightcone_hol, lightcone)
    assert graded_profile(lightcone_hol) == {"1": {"dim": 3, "dim_minus": 3, "exceeds": False}}


def test_ey_hol(ey1, ey1_hol):
    assert ey1_hol.graded_dims == {-1: 3, 0: 2}
    assert ey1_hol.backend == "exact-jet"
    assert parity_ok(ey1_hol)
    assert verify_termination(ey1, ey1_hol) == {"1": 0, "2": 0}


def test_eb_cubic_is_rigid():
    p = build_entry("EB", {"alpha": Fraction(3)}).presentation
    G = assemble_hol(p)
    assert G.graded_dims == {-1: 3, 0: 1}
    assert not locally_homogeneous_possible(G, p)
    assert not isotropy_dimension(G, p).locally_homogeneous_possible


@pytest.mark.parametrize("fixture_name", ["lightcone", "ey1", "ex_m2"])
def test_numeric_backend_agrees(request, fixture_name):
    p = request.getfixturevalue(fixture_name)
    for k in (0, 1):
        exact = solve_graded_component(p, k)
        numeric = solve_graded_component(p, k, backend="numeric")
        assert len(numeric) == len(exact)


@pytest.mark.parametrize(
    "name, params, dims",
    [
        ("EY", {"alpha": Fraction(1)}, (2, 0)),
        ("EZ", {}, (2, 0)),
        ("EX", {"alpha": Fraction(-2)}, (2, 0)),
        ("EB", {"alpha": Fraction(2)}, (4, 3)),
        ("EB", {"alpha": Fraction(3)}, (1, 0)),
    ],
)
def test_numeric_backend_agrees_on_catalog(name, params, dims):
    p = build_entry(name, params).presentation
    for k, expected in zip((0, 1), dims):
        assert len(solve_graded_component(p, k)) == expected
        assert len(solve_graded_component(p, k, backend="numeric")) == expected


def test_eb_cubic_termination():
    p = build_entry("EB", {"alpha": Fraction(3)}).presentation
    assert verify_termination(p, assemble_hol(p)) == {"1": 0, "2": 0}


def test_numeric_component_is_tangent(ey1):
    basis = solve_graded_component(ey1, 0, backend="numeric")
    phi = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 1]], dtype=float)
    for f in basis:
        a = np.array(f.coeffs, dtype=float).reshape(3, 3)
        # g_0 of this cone is spanned by the identity and phi
        stacked = np.stack([np.eye(3).ravel(), phi.ravel(), a.ravel()])
        assert np.linalg.matrix_rank(stacked, tol=1e-6) == 2


def test_non_conical_input_is_refused(paraboloid):
    with pytest.raises(RefusedInput):
        assemble_hol(paraboloid)


def test_twisted_cubic_is_refused():
    with pytest.raises(RefusedInput):
        assemble_hol(build_entry("EV").presentation)


def test_degenerate_input_is_refused(hyperplane_orbit):
    with pytest.raises(RefusedInput):
        assemble_hol(hyperplane_orbit)


def test_backend_selection(lightcone, ey1):
    assert resolve_backend(lightcone) == "exact-levelset"
    assert resolve_backend(ey1) == "exact-jet"
    with pytest.raises(BackendError):
        resolve_backend(ey1, "exact-levelset")
    with pytest.raises(BackendError):
        resolve_backend(lightcone, "exact-jet")
    with pytest.raises(InputError):
        resolve_backend(ey1, "symbolic")
