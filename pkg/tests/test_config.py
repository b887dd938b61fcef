"""
Configuration Tests
Space configuration parsing, key-level error reporting and settings.
"""

import math

import pytest

from app.config.settings import Settings, format_float, relative_close
from app.config.space_config import load_space_config, parse_space_config
from app.core.exceptions import ConfigError, ParseError
from app.core.validation import parse_key_value_text, parse_real, parse_weight_list
from app.models.schemas import Branch


def replace_line(text, key, new_line):
    lines = [new_line if line.replace(" ", "").startswith(f"{key}=") else line for line in text.splitlines()]
    return "\n".join(lines) + "\n"


def test_h2_config(h2_config):
    assert h2_config.params.n == 2
    assert h2_config.params.K == pytest.approx(-math.pi)
    assert h2_config.sigma.eps_sigma == 0.5
    assert h2_config.sigma.branch == Branch.tan
    assert h2_config.sigma.coeffs == (1.0,)


def test_h4_config(h4_config):
    assert h4_config.params.K == pytest.approx(2 * math.pi)
    assert h4_config.params.d_Y == -1
    assert h4_config.sigma.coeffs == pytest.approx((1.0, -0.25))


def test_heat_coeffs_replace_p_coeffs(h4_text):
    text = replace_line(h4_text, "p_coeffs", "heat_coeffs = 0.5, -0.125")
    config = parse_space_config(text)
    assert config.sigma.coeffs == pytest.approx((1.0, -0.25))


def test_eps_alpha_switches_branch(h2_text):
    config = parse_space_config(h2_text + "eps_alpha = 1/2\n")
    assert config.sigma.eps_sigma == 0.0
    assert config.sigma.branch == Branch.cot


@pytest.mark.parametrize("key,line", [
    ("rho", "rho = 2"),
    ("n", "n = 3"),
    ("weights", "weights = 3:1"),
    ("T", "T = abc"),
    ("dim_chi", "dim_chi = 0"),
    ("p_coeffs", "p_coeffs = 2"),
    ("p_coeffs", "p_coeffs = 1, 0.5"),
])
def test_failing_key_is_named(h2_text, key, line):
    with pytest.raises(ConfigError) as info:
        parse_space_config(replace_line(h2_text, key, line))
    assert info.value.key == key
    assert str(info.value).startswith(f"{key}:")


def test_missing_and_unknown_keys(h2_text):
    with pytest.raises(ConfigError) as info:
        parse_space_config(replace_line(h2_text, "vol_Y", "# vol_Y removed"))
    assert info.value.key == "vol_Y"

    with pytest.raises(ConfigError, match="not a recognised key"):
        parse_space_config(h2_text + "colour = blue\n")


def test_eps_alpha_not_half_integer(h2_text):
    with pytest.raises(ConfigError) as info:
        parse_space_config(h2_text + "eps_alpha = 0.25\n")
    assert info.value.key == "eps_alpha"


def test_malformed_lines_report_line_numbers():
    with pytest.raises(ParseError, match="line 2"):
        parse_key_value_text("n = 2\nthis is not a pair\n")
    with pytest.raises(ParseError, match="duplicate"):
        parse_key_value_text("n = 2\nn = 4\n")


def test_load_space_config(h2_config_file, tmp_path):
    assert load_space_config(h2_config_file).params.rho == 1.0
    with pytest.raises(ConfigError):
        load_space_config(tmp_path / "missing.cfg")


def test_value_parsers():
    assert parse_real("1/4") == 0.25
    assert parse_weight_list("1:2, 2:1") == [(1.0, 2), (2.0, 1)]
    with pytest.raises(ValueError):
        parse_real("inf")
    with pytest.raises(ValueError):
        parse_weight_list("2")


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("ZETA_QUAD_REL_TOL", "1e-8")
    monkeypatch.setenv("ZETA_K_MAX_DEFAULT", "40")
    fresh = Settings()
    assert fresh.QUAD_REL_TOL == 1e-8
    assert fresh.K_MAX_DEFAULT == 40
    assert fresh.validate_rel_tol(1e-8)
    assert not fresh.validate_rel_tol(1e-3)


def test_settings_from_env_file(tmp_path, monkeypatch):
    for name in ("ZETA_TAIL_THRESHOLD", "ZETA_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    env_file = tmp_path / ".env"
    env_file.write_text("ZETA_TAIL_THRESHOLD=1e-4\nZETA_LOG_LEVEL=DEBUG\n")
    fresh = Settings(_env_file=env_file)
    assert fresh.TAIL_THRESHOLD == 1e-4
    assert fresh.LOG_LEVEL == "DEBUG"


def test_float_helpers():
    assert format_float(1 / 3) == "0.333333333333333"
    assert relative_close(1.0, 1.0 + 1e-12)
    assert not relative_close(1.0, 1.0 + 1e-6)
    assert relative_close(0.0, 0.0)


def test_root_datum_file(h4_text, tmp_path):
    (tmp_path / "h4.rd").write_text("# lambda (lambda^2 - 1/4)\n1 0 1\n1 1/2 1\n1 -1/2 1\n")
    path = tmp_path / "h4.cfg"
    path.write_text(replace_line(h4_text, "p_coeffs", "root_datum = h4.rd"))
    assert load_space_config(path).sigma.coeffs == pytest.approx((1.0, -0.25))

    path.write_text(replace_line(h4_text, "p_coeffs", "root_datum = absent.rd"))
    with pytest.raises(ConfigError) as info:
        load_space_config(path)
    assert info.value.key == "root_datum"


def test_coefficient_sources_are_exclusive(h4_text):
    with pytest.raises(ConfigError, match="excludes heat_coeffs"):
        parse_space_config(h4_text + "heat_coeffs = 0.5, -0.125\n")
