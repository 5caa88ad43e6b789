from fractions import Fraction

import pytest

from src.catalog import build_entry
from src.errors import InputError, UndecidedError
from src.nondegeneracy import conical_corollary, kernel_chain, levi_kernel, nondegeneracy_order, uniformity_check


def test_ey_kernel_chain(ey1):
    chain = kernel_chain(ey1)
    assert chain.dims == (2, 1, 0)
    assert chain.terminal == "zero"
    assert chain.order == 2
    # K^1 is the line through the base point
    assert chain.spaces[1][0][0] == chain.spaces[1][0][2]


@pytest.mark.parametrize("name", ["EI", "EY", "EZ", "EX", "EV"])
def test_kernel_chain_is_monotone(name):
    dims = kernel_chain(build_entry(name).presentation).dims
    assert all(a >= b for a, b in zip(dims, dims[1:]))
    assert dims[-1] == 0


def test_paraboloid_is_levi_nondegenerate(paraboloid):
    verdict = nondegeneracy_order(paraboloid)
    assert verdict.status == "order"
    assert verdict.order == 1
    assert verdict.chain.dims == (2, 0)


def test_hyperplane_orbit_is_degenerate(hyperplane_orbit):
    chain = kernel_chain(hyperplane_orbit)
    assert chain.terminal == "stabilized_nonzero"
    assert chain.order is None
    assert nondegeneracy_order(hyperplane_orbit).status == "holomorphically_degenerate"


def test_lightcone_conical_corollary(lightcone):
    assert conical_corollary(lightcone)
    verdict = nondegeneracy_order(lightcone)
    assert verdict.order == 2
    assert verdict.certificate == "conical_corollary"


def test_levi_flat_level_set(hyperplane_levelset):
    verdict = nondegeneracy_order(hyperplane_levelset)
    assert verdict.status == "holomorphically_degenerate"
    assert verdict.certificate == "levi_flat"


def test_kernel_chain_needs_orbit(lightcone):
    with pytest.raises(UndecidedError):
        kernel_chain(lightcone)


def test_kernel_chain_rejects_small_max_k(ey1):
    with pytest.raises(InputError):
        kernel_chain(ey1, max_k=1)


def test_uniform_kernel_dims(ey1):
    report = uniformity_check(ey1, samples=6)
    assert report.uniform
    assert set(report.dims) == {(2, 1, 0)}


def test_eb_kernel_jumps_at_zero_coordinates():
    entry = build_entry("EB", {"alpha": Fraction(3)})
    p = entry.presentation
    assert len(levi_kernel(p)) == 1
    for point, expected in entry.witnesses:
        assert len(levi_kernel(p, point)) == expected
