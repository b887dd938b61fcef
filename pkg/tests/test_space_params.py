"""
Space Parameter Tests
Derived constants, parameter validation and the spectral lattices.
"""

import math

import numpy as np
import pytest

from app.core.exceptions import (
    DimensionOdd, EmptyWeights, InvalidParameter, InvalidWeights, NotHalfInteger, RhoMismatch,
)
from app.core.space_params import (
    build_space_params, compute_c_sigma, dual_lattice_points, epsilon_sigma, lattice_points,
    trivial_singularity_factor,
)
from app.models.schemas import SigmaData

FOUR_PI = 4 * math.pi


def h2(weights=((2, 1),), n=2, T=2.0, rho=1.0, dim_chi=1):
    return build_space_params(n, T, rho, FOUR_PI, FOUR_PI, dim_chi, weights)


def test_genus_two_constants():
    """Gauss-Bonnet for genus 2 against the sphere gives euler_ratio = -1 and K = -pi."""
    params = h2()
    assert params.euler_ratio == pytest.approx(-1.0)
    assert params.d_Y == 1
    assert params.K == pytest.approx(-math.pi)


def test_rho_mismatch():
    with pytest.raises(RhoMismatch):
        h2(weights=((2, 2),))


def test_odd_dimension():
    with pytest.raises(DimensionOdd):
        h2(n=3)


def test_weights_must_be_roots():
    with pytest.raises(InvalidWeights):
        h2(weights=((3, 1),), rho=1.5)
    with pytest.raises(EmptyWeights):
        h2(weights=())


def test_non_positive_parameter_is_named():
    with pytest.raises(InvalidParameter, match="dim_chi"):
        h2(dim_chi=0)


def test_two_root_weights():
    """Root system {alpha/2, alpha}: complex hyperbolic plane, n = 4."""
    params = build_space_params(4, 2.0, 2.0, 1.0, 2.0, 1, [(1.0, 2), (2.0, 1)])
    assert params.euler_ratio == pytest.approx(0.5)
    assert params.d_Y == -1
    assert params.basis_weights == [1.0, 1.0, 2.0]


@pytest.mark.parametrize("rho,T,eps_alpha,expected", [
    (1.0, 2.0, 0.0, 0.5),
    (2.0, 1.0, 0.0, 0.0),
    (1.0, 2.0, 0.5, 0.0),
])
def test_epsilon_sigma(rho, T, eps_alpha, expected):
    assert epsilon_sigma(rho, T, eps_alpha) == expected


def test_epsilon_sigma_rejects_non_half_integer():
    with pytest.raises(NotHalfInteger):
        epsilon_sigma(1.0, 3.0, 0.0)
    with pytest.raises(InvalidParameter):
        epsilon_sigma(1.0, 2.0, 0.25)


@pytest.mark.parametrize("eps,T,bound,expected", [
    (0.5, 2.0, 6.0, [1.0, 3.0, 5.0]),
    (0.0, 1.0, 3.5, [1.0, 2.0, 3.0]),
    (0.5, 2.0, 0.5, []),
])
def test_lattice_points(eps, T, bound, expected):
    sigma = SigmaData(eps_sigma=eps, coeffs=(1.0,))
    assert lattice_points(sigma, T, bound) == pytest.approx(expected)


def test_lattice_gaps_are_T():
    sigma = SigmaData(eps_sigma=0.5, coeffs=(1.0,))
    points = lattice_points(sigma, 0.7, 20.0)
    assert np.allclose(np.diff(points), 0.7)
    assert points[0] > 0


def test_dual_lattice_points():
    sigma = SigmaData(eps_sigma=0.5, coeffs=(1.0,))
    assert dual_lattice_points(sigma, 2.0, 3) == pytest.approx([1.0, 3.0, 5.0])
    sigma = SigmaData(eps_sigma=0.0, coeffs=(1.0,))
    assert dual_lattice_points(sigma, 1.0, 2) == pytest.approx([1.0, 2.0])


@pytest.mark.parametrize("norms,expected", [
    ((1, 0, 0), 1),
    ((1, 0.5, 0.5), 1),
    ((2, 1, 3), -4),
])
def test_compute_c_sigma(norms, expected):
    assert compute_c_sigma(*norms) == pytest.approx(expected)


def test_sign_chain(h2_config, h4_config):
    for params in (h2_config.params, h4_config.params):
        assert params.K * params.T / (2 * math.pi * params.dim_chi) == pytest.approx(params.euler_ratio)
        assert params.d_Y * params.euler_ratio < 0


def test_trivial_singularity_factor(h2_config, h4_config):
    assert trivial_singularity_factor(h2_config.params) == pytest.approx(2.0)
    assert trivial_singularity_factor(h4_config.params) == pytest.approx(-2.0)
