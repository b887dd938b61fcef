"""
Functional-Equation Factor Tests
Trigonometric kernel, the contour quadrature for phi, its asymptotics and
the functional-equation residual.
"""

import math

import numpy as np
import pytest

from app.config.space_config import parse_space_config
from app.core.exceptions import (
    NonNegativeSigma1, PoleOnPath, TooCloseToRealAxis, ValidationFailure,
)
from app.core.fe_factor import (
    branch_poles_near, fe_integrand, fe_residual, phi_asymptotic, phi_path, phi_quadrature,
    phi_segment, reduce_phase, trig_asymptotic, trig_kernel, trig_residual, trig_residual_bound,
)
from app.models.schemas import Branch


@pytest.fixture
def h2(h2_config):
    return h2_config.sigma, h2_config.params.K, h2_config.params.T


@pytest.fixture
def h2_cot(h2_text):
    config = parse_space_config(h2_text + "eps_alpha = 1/2\n")
    return config.sigma, config.params.K, config.params.T


# ------------------ kernel ------------------
def test_trig_asymptotic_examples():
    assert trig_asymptotic(Branch.tan, -1.0, 3.0) == 1j
    assert trig_asymptotic(Branch.cot, 0.3, -2.0) == 1j
    with pytest.raises(TooCloseToRealAxis):
        trig_asymptotic(Branch.tan, 0.0, 0.5)


def test_tan_residual_example():
    value = trig_kernel(Branch.tan, math.pi * complex(-1, 3))
    assert abs(value - 1j) <= 5 * math.exp(-6 * math.pi)


def test_kernel_matches_numpy():
    rng = np.random.default_rng(2)
    z = rng.uniform(-4, 4, 50) + 1j * rng.uniform(-5, 5, 50)
    assert np.allclose(trig_kernel(Branch.tan, z), np.tan(z), rtol=1e-10)
    assert np.allclose(trig_kernel(Branch.cot, z), -1 / np.tan(z), rtol=1e-10)


def test_kernel_is_finite_far_from_axis():
    z = np.array([0.3 + 400j, -2.0 - 900j])
    for branch in Branch:
        values = trig_kernel(branch, z)
        assert np.all(np.isfinite(values))


@pytest.mark.parametrize("branch", list(Branch))
def test_trig_residual_within_envelope(branch):
    for sigma1 in np.linspace(-3, 3, 13):
        for t in (1.0, -1.0, 2.5, -4.0, 8.0):
            assert abs(trig_residual(branch, sigma1, t)) <= trig_residual_bound(t)


def test_branch_poles_near():
    poles = branch_poles_near(Branch.tan, 0j, 3 + 0j, 2.0, 0.1)
    assert sorted(poles.tolist()) == pytest.approx([1.0, 3.0])
    assert branch_poles_near(Branch.cot, -0.5 + 0j, 0.5 + 0j, 2.0, 0.1).size == 0


# ------------------ integrand ------------------
def test_cot_integrand_limit_at_zero(h2_cot):
    sigma, K, T = h2_cot
    at_zero = fe_integrand(0j, sigma, K, T)
    assert at_zero == pytest.approx(-K * T / math.pi * sigma.coeffs[-1])
    assert fe_integrand(1e-7 + 0j, sigma, K, T) == pytest.approx(at_zero, rel=1e-9)


# ------------------ phi ------------------
def test_phi_at_zero(h2):
    assert phi_quadrature(0j, *h2) == 0


def test_phi_on_imaginary_axis(h2):
    value = phi_quadrature(10j, *h2)
    assert abs(value.imag - 50 * math.pi) <= 1.0


def test_conjugate_symmetry_and_oddness(h2):
    for s in (1.3 + 2.7j, -0.4 + 0.8j, 5.2 + 0.3j):
        value = phi_quadrature(s, *h2)
        assert phi_quadrature(s.conjugate(), *h2) == pytest.approx(value.conjugate(), rel=1e-9)
        assert phi_quadrature(-s, *h2) == pytest.approx(-value, rel=1e-9)


def test_path_independence(h2):
    sigma, K, T = h2
    s = 1.3 + 2.7j
    corner = complex(0, s.imag)
    broken = phi_segment(0j, corner, sigma, K, T) + phi_segment(corner, s, sigma, K, T)
    assert broken == pytest.approx(phi_quadrature(s, sigma, K, T), rel=1e-9)


def test_detour_near_poles(h2):
    sigma, _, T = h2
    assert phi_path(0.95 + 0.1j, sigma, T) == [0j, 1j, 0.95 + 1j, 0.95 + 0.1j]
    assert phi_path(0.95 - 0.1j, sigma, T) == [0j, -1j, 0.95 - 1j, 0.95 - 0.1j]
    assert phi_path(0.5 + 3j, sigma, T) == [0j, 0.5 + 3j]


@pytest.fixture
def h4(h4_config):
    return h4_config.sigma, h4_config.params.K, h4_config.params.T


@pytest.mark.parametrize("branch_set", ["h4", "h2_cot"])
def test_derivative_matches_integrand(request, branch_set):
    sigma, K, T = request.getfixturevalue(branch_set)
    h = 1e-5
    rng = np.random.default_rng(9)
    for _ in range(100):
        s = complex(rng.uniform(-2, 2), rng.choice([-1, 1]) * rng.uniform(0.5, 2))
        derivative = (phi_quadrature(s + h, sigma, K, T, 1e-13) - phi_quadrature(s - h, sigma, K, T, 1e-13)) / (2 * h)
        exact = fe_integrand(s, sigma, K, T)
        assert abs(derivative - exact) <= 1e-6 * max(1.0, abs(exact))


def test_real_axis_boundary_value(h2):
    below_pole = phi_quadrature(0.5 + 0j, *h2)
    assert abs(below_pole.imag) <= 1e-12 * max(1.0, abs(below_pole))

    boundary = phi_quadrature(2.0 + 0j, *h2)
    from_above = phi_quadrature(2.0 + 1e-7j, *h2)
    assert abs(boundary - from_above) <= 1e-5


def test_pole_on_path(h2, h2_cot):
    with pytest.raises(PoleOnPath):
        phi_quadrature(1.0 + 0j, *h2)
    with pytest.raises(PoleOnPath):
        phi_quadrature(-2.0 + 0j, *h2_cot)


def test_rel_tol_range(h2):
    with pytest.raises(ValidationFailure):
        phi_quadrature(1j, *h2, rel_tol=1e-3)


# ------------------ asymptotics ------------------
@pytest.mark.parametrize("name", ["h2_config", "h4_config"])
def test_phi_asymptotic_tracks_quadrature(request, name):
    config = request.getfixturevalue(name)
    sigma, K, T, n = config.sigma, config.params.K, config.params.T, config.params.n
    peak = 0.0
    for t in np.linspace(5.0, 50.0, 91):
        im_part, re_part = phi_asymptotic(-1.0, t, sigma, K, T, n)
        value = phi_quadrature(complex(-1.0, t), sigma, K, T)
        assert abs(value - complex(-re_part, -im_part)) <= 2.0
        peak = max(peak, abs(value))
    assert peak > 1e3


def test_phi_asymptotic_parity(h4_config):
    sigma, K, T, n = h4_config.sigma, h4_config.params.K, h4_config.params.T, h4_config.params.n
    im_pos, re_pos = phi_asymptotic(-0.7, 6.0, sigma, K, T, n)
    im_neg, re_neg = phi_asymptotic(-0.7, -6.0, sigma, K, T, n)
    assert im_neg == pytest.approx(-im_pos)
    assert re_neg == pytest.approx(re_pos)


def test_phi_asymptotic_preconditions(h2_config):
    sigma, K, T, n = h2_config.sigma, h2_config.params.K, h2_config.params.T, h2_config.params.n
    with pytest.raises(NonNegativeSigma1):
        phi_asymptotic(0.0, 5.0, sigma, K, T, n)
    with pytest.raises(TooCloseToRealAxis):
        phi_asymptotic(-1.0, 0.5, sigma, K, T, n)


# ------------------ residual ------------------
def test_fe_residual(h2):
    assert fe_residual(lambda s: 0j, 0j, *h2) == 0.0

    s = 0.7 + 2.1j
    phi = phi_quadrature(s, *h2)
    synthetic = fe_residual(lambda z: -0.5 * phi_quadrature(z, *h2), s, *h2)
    assert synthetic <= 1e-8 * max(1.0, abs(phi))

    even = fe_residual(lambda z: z * z, s, *h2)
    assert even == pytest.approx(abs(reduce_phase(-phi)), rel=1e-9)


def test_reduce_phase():
    value = reduce_phase(complex(1.5, 7.0))
    assert value.real == 1.5
    assert -math.pi < value.imag <= math.pi
    assert value.imag == pytest.approx(7.0 - 2 * math.pi)
