"""
Shared fixtures: the two reference parameter sets, a model built on the H^2
set and a Schottky group with well separated generators.
"""

import math

import pytest

from app.config.space_config import parse_space_config
from app.services.model_service import ModelService

H2_CONFIG_TEXT = """\
# genus-2 surface, trivial sigma
n = 2
T = 2
rho = 1
vol_Y = 12.566370614359172
vol_Xd = 12.566370614359172
dim_chi = 1
weights = 2:1
p_coeffs = 1
"""

H4_CONFIG_TEXT = """\
n = 4
T = 1
rho = 1.5
vol_Y = 1
vol_Xd = 1
dim_chi = 1
weights = 1:3
p_coeffs = 1, -0.25
"""


@pytest.fixture
def h2_text():
    return H2_CONFIG_TEXT


@pytest.fixture
def h4_text():
    return H4_CONFIG_TEXT


@pytest.fixture
def h2_config():
    return parse_space_config(H2_CONFIG_TEXT)


@pytest.fixture
def h4_config():
    return parse_space_config(H4_CONFIG_TEXT)


@pytest.fixture
def h2_model(h2_config):
    """Spectral points 1.5 and 2.25 (double) plus three lattice points."""
    return ModelService().build(h2_config, eigs=[(1.5, 1), (2.25, 2)], lattice_cutoff=3)


@pytest.fixture
def h2_config_file(tmp_path):
    path = tmp_path / "h2.cfg"
    path.write_text(H2_CONFIG_TEXT)
    return path


@pytest.fixture
def schottky_generators():
    """diag(e^3, e^-3) and its rotation by pi/4: a free group, every element hyperbolic."""
    lam = math.exp(3)
    c, s = math.cosh(3), math.sinh(3)
    return [(lam, 0.0, 0.0, 1 / lam), (c, s, s, c)]


@pytest.fixture
def h4_config_file(tmp_path):
    path = tmp_path / "h4.cfg"
    path.write_text(H4_CONFIG_TEXT)
    return path
