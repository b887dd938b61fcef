"""
Model Zeta Tests
Catalog construction, evaluation of the rational model, region counts and
growth diagnostics.
"""

import logging
import math

import numpy as np
import pytest

from app.core.exceptions import BoundaryHit, NonIntegerOrder, OnSingularity, RegionNotCovered
from app.core.model_zeta import (
    build_model_spectrum, catalog_from_spectra, count_catalog_in_region, fit_growth_exponent,
    growth_envelope_constant, log_modulus_growth_scan, merge_items, model_eval, model_log,
    model_logderiv, validate_region_coverage,
)
from app.core.space_params import build_space_params
from app.models.schemas import Rectangle


def catalog(*items):
    return merge_items((complex(z), order) for z, order in items)


def test_lattice_orders_on_h2(h2_config):
    ms = build_model_spectrum(h2_config.params, lattice_cutoff=3)
    assert ms.q == 2
    cat = catalog_from_spectra(ms, h2_config.sigma, h2_config.params.T)
    assert [(item.re, item.im, item.order) for item in cat.items] == [
        (-5.0, 0.0, 10), (-3.0, 0.0, 6), (-1.0, 0.0, 2),
    ]


def test_lattice_orders_on_h4(h4_config, caplog):
    ms = build_model_spectrum(h4_config.params, lattice_cutoff=3)
    assert ms.q == -2
    with caplog.at_level(logging.WARNING, logger="app.core.model_zeta"):
        cat = catalog_from_spectra(ms, h4_config.sigma, h4_config.params.T)
    # P(0.5) = 0 drops out
    assert [(item.re, item.order) for item in cat.items] == [(-2.5, -30), (-1.5, -6)]
    assert "vanishes at lattice point 0.5" in caplog.text


def test_spectral_points_and_zero(h2_config):
    ms = build_model_spectrum(h2_config.params, ay_eigs=[(0.0, 1)])
    cat = catalog_from_spectra(ms, h2_config.sigma, h2_config.params.T)
    assert [(item.re, item.im, item.order) for item in cat.items] == [(0.0, 0.0, 2)]

    ms = build_model_spectrum(h2_config.params, ay_eigs=[(1.0, 1), (1.0, 2)], include_zero=True, zero_mult=1)
    cat = catalog_from_spectra(ms, h2_config.sigma, h2_config.params.T)
    assert [(item.re, item.im, item.order) for item in cat.items] == [
        (0.0, -1.0, 3), (0.0, 0.0, 2), (0.0, 1.0, 3),
    ]


def test_catalog_is_conjugation_closed(h2_model):
    locations = {(item.re, item.im, item.order) for item in h2_model.catalog.items}
    assert locations == {(re, -im, order) for re, im, order in locations}


def test_non_integer_q():
    params = build_space_params(2, 2.0, 1.0, 1.0, 3.0, 1, [(2.0, 1)])
    with pytest.raises(NonIntegerOrder):
        build_model_spectrum(params)


def test_merge_cancels_orders():
    cat = catalog((1j, 2), (1j, -2), (2.0, 1))
    assert [(item.re, item.order) for item in cat.items] == [(2.0, 1)]


def test_model_eval_examples():
    pair = catalog((1j, 1), (-1j, 1))
    log_modulus, available = model_eval(pair, 1 + 0j)
    assert log_modulus == pytest.approx(math.log(2))
    assert available

    pole = catalog((-1.0, -2))
    assert model_eval(pole, 0j)[0] == pytest.approx(0.0)
    assert model_logderiv(pole, 0j) == pytest.approx(-2.0)


def test_logderiv_is_vectorized():
    cat = catalog((1j, 1), (-1j, 1), (-3.0, -2))
    s = np.array([0.5 + 0.5j, 2.0 - 1.0j])
    values = model_logderiv(cat, s)
    assert values.shape == (2,)
    for point, value in zip(s, values):
        assert value == pytest.approx(1 / (point - 1j) + 1 / (point + 1j) - 2 / (point + 3))


def test_model_log_matches_modulus():
    cat = catalog((1j, 1), (-1j, 1), (-3.0, -2))
    s = 0.4 + 2.2j
    assert model_log(cat, s).real == pytest.approx(model_eval(cat, s)[0])


def test_on_singularity():
    with pytest.raises(OnSingularity):
        model_eval(catalog((1j, 1)), 1j)


def test_count_catalog_in_region():
    pair = catalog((1j, 1), (-1j, 1))
    assert count_catalog_in_region(pair, Rectangle(re_min=-2, re_max=2, im_min=0.5, im_max=2)) == 1
    assert count_catalog_in_region(catalog(), Rectangle(re_min=0, re_max=1, im_min=0, im_max=1)) == 0
    assert count_catalog_in_region(catalog((0.5 + 0.5j, -3)), Rectangle(re_min=0, re_max=1, im_min=0, im_max=1)) == -3
    with pytest.raises(BoundaryHit):
        count_catalog_in_region(pair, Rectangle(re_min=-2, re_max=2, im_min=1, im_max=2))


def test_region_coverage(h2_model):
    ms, sigma = h2_model.model, h2_model.config.sigma
    validate_region_coverage(Rectangle(re_min=-0.5, re_max=0.5, im_min=0.002, im_max=4.0), ms, sigma, 2.0)
    with pytest.raises(RegionNotCovered):
        validate_region_coverage(Rectangle(re_min=-0.5, re_max=0.5, im_min=0.002, im_max=6.0), ms, sigma, 2.0)


def test_growth_fit_recovers_power_law():
    ts = np.linspace(2, 40, 30)
    exponent, constant = fit_growth_exponent(ts, 3.0 * ts ** 1.5)
    assert exponent == pytest.approx(1.5)
    assert constant == pytest.approx(3.0)
    assert all(math.isnan(v) for v in fit_growth_exponent([1.0], [1.0]))


def test_growth_envelope(h2_model):
    ts = np.linspace(2, 30, 15)
    scan = log_modulus_growth_scan(h2_model.catalog, -0.5, ts)
    values = [v for _, v in scan]
    envelope = growth_envelope_constant(ts, values, 2)
    assert np.all(np.abs(values) <= envelope * ts * np.log(ts) * (1 + 1e-12))
