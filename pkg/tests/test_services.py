"""
Service Tests
Output rendering, model files, scans and the identity suites.
"""

import json
import logging
import math

import pytest

from app.core.exceptions import ParseError, RegionNotCovered, ValidationFailure
from app.models.schemas import LengthSpectrum, OutputFormat, SpectrumEntry
from app.services.identity_service import IDENTITY_SUITES, IdentityService, scan_heights, spectrum_mismatches
from app.services.model_service import ModelService
from app.services.output_service import OutputService
from app.services.scan_service import COUNT_COLUMNS, ScanService, t_grid


# ------------------ output ------------------
def test_csv_rendering():
    rows = [{"t": 1.0, "value": 1 / 3, "count": 2}, {"t": 1.5, "value": math.nan, "count": -1}]
    text = OutputService(OutputFormat.csv).render(rows, ["t", "value", "count"])
    assert text == "t,value,count\n1,0.333333333333333,2\n1.5,,-1\n"


def test_json_lines_rendering():
    rows = [{"t": 1.0, "passed": True}, {"t": 2.0, "passed": False}]
    text = OutputService("json").render(rows, ["t", "passed"])
    lines = text.splitlines()
    assert [json.loads(line) for line in lines] == rows
    assert OutputService("json").render([], ["t"]) == ""


def test_write_to_file(tmp_path):
    out = tmp_path / "nested" / "rows.csv"
    text = OutputService().write([{"a": 1}], ["a"], out)
    assert out.read_text() == text == "a\n1\n"


# ------------------ model files ------------------
def test_model_roundtrip(h2_model, tmp_path):
    service = ModelService()
    path = tmp_path / "model.json"
    service.save(h2_model, path)
    loaded = service.load(path)
    assert loaded.catalog == h2_model.catalog
    assert loaded.config.params.K == pytest.approx(h2_model.config.params.K)


def test_model_load_errors(tmp_path):
    service = ModelService()
    with pytest.raises(ParseError):
        service.load(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text('{"config": {}}')
    with pytest.raises(ParseError, match="invalid model file"):
        service.load(broken)


def test_parse_eigs():
    assert ModelService.parse_eigs("1.5:1, 2.25:2") == [(1.5, 1), (2.25, 2)]
    assert ModelService.parse_eigs("") == []
    with pytest.raises(ParseError, match="--eigs"):
        ModelService.parse_eigs("1.5")


def test_catalog_jsonl(h2_model):
    lines = ModelService().catalog_jsonl(h2_model.catalog).splitlines()
    assert len(lines) == len(h2_model.catalog.items)
    assert json.loads(lines[0]) == {"re": -5.0, "im": 0.0, "order": 10}


# ------------------ scans ------------------
def test_t_grid():
    assert t_grid(1.0, 2.0, 0.5) == [1.0, 1.5, 2.0]
    assert t_grid(0.1, 0.3, 0.1) == pytest.approx([0.1, 0.2, 0.3])
    with pytest.raises(ValidationFailure):
        t_grid(1.0, 2.0, 0.0)
    with pytest.raises(ValidationFailure):
        t_grid(2.0, 1.0, 0.5)


def test_phi_scan(h2_config):
    rows = ScanService(h2_config).phi_scan(-1.0, 5.0, 6.0, 0.5)
    assert [row["t"] for row in rows] == [5.0, 5.5, 6.0]
    for row in rows:
        assert abs(complex(row["re_phi"], row["im_phi"]) - complex(row["re_asym"], row["im_asym"])) <= 2.0

    # asymptotics undefined off the left half-plane
    rows = ScanService(h2_config).phi_scan(0.5, 5.0, 5.0, 1.0)
    assert math.isnan(rows[0]["re_asym"])


def test_count_scan(h2_model):
    rows = ScanService(h2_model.config).count_scan(h2_model, 3.0, 1.0)
    assert list(rows[0]) == COUNT_COLUMNS
    assert [row["winding"] for row in rows] == [0, 1, 3]
    for row in rows:
        assert row["residual"] == pytest.approx(row["winding"] - row["n_main"] - row["s_over_pi"])


def test_count_scan_stays_inside_the_lattice(h2_model):
    with pytest.raises(RegionNotCovered):
        ScanService(h2_model.config).count_scan(h2_model, 6.0, 1.0)


def test_diagnostics_are_reported(h2_model):
    rows = ScanService(h2_model.config).diagnostics(h2_model, 2.0, 4.0, 0.5)
    names = [row["diagnostic"] for row in rows]
    assert names[0] == "s_growth_exponent"
    assert "log_modulus_envelope_C" in names
    assert dict((row["diagnostic"], row["value"]) for row in rows)["s_expected_exponent_max"] == 1.0


def test_check_fe(h2_config, h2_model):
    rows = ScanService(h2_config).check_fe(4, seed=3, model_file=h2_model)
    assert [row["check"] for row in rows] == ["phi_odd", "synthetic_fe_residual", "model_fe_residual"]
    assert all(row["passed"] for row in rows)


# ------------------ identities ------------------
def test_identity_suites_pass():
    reports = IdentityService(seed=4).run(["leading", "heat", "trig"], 10)
    assert [r.suite for r in reports] == ["leading_coefficient", "heat_roundtrip", "trig_grid"]
    assert all(r.passed for r in reports)


def test_counter_suite():
    report = IdentityService(seed=1).counter(2, rectangles=5)
    assert report.passed
    assert report.max_error == 0.0


def test_identity_suites_are_reproducible():
    first = IdentityService(seed=9).run(["leading", "heat"], 5)
    second = IdentityService(seed=9).run(["leading", "heat"], 5)
    assert first == second


def test_scan_heights_step_half_from_5_to_50():
    heights = scan_heights()
    assert len(heights) == 91
    assert heights[0] == 5.0 and heights[-1] == 50.0
    assert heights[1] - heights[0] == pytest.approx(0.5)


def test_phi_reference_suites():
    service = IdentityService(seed=2)
    asymptotic = service.asymptotic_envelope(1)
    assert asymptotic.suite == "phi_asymptotic"
    assert asymptotic.trials == 182
    assert asymptotic.passed

    main_term = service.main_term_consistency(1)
    assert main_term.trials == 182
    assert main_term.passed
    assert main_term.max_error <= 0.5


def test_derivative_suite_covers_both_branches():
    report = IdentityService(seed=3).derivative_identity(10)
    assert report.trials == 20
    assert report.passed


def test_ruelle_suite_on_short_words(caplog):
    with caplog.at_level(logging.WARNING, logger="app.services.identity_service"):
        report = IdentityService(seed=5, word_len=4).ruelle_factorization(20)
    assert report.passed
    assert report.max_error <= 1e-8
    assert "complete only below" in caplog.text


def test_spectrum_stability_suite():
    report = IdentityService(word_len=4).spectrum_stability(1)
    assert report.suite == "spectrum_stability"
    assert report.max_error == 0.0
    assert report.passed


def test_spectrum_mismatches():
    def spectrum(records, l_max):
        entries = tuple(SpectrumEntry(length=length, mult=mult) for length, mult in records)
        return LengthSpectrum(entries=entries, l_max=l_max, growth_const=1.0)

    lower = spectrum([(1.0, 2), (2.0, 1)], 3.0)
    assert spectrum_mismatches(lower, spectrum([(1.0, 2), (2.0, 1), (3.5, 7)], 4.0)) == 0
    # multiplicity change and a new record below 3.0
    assert spectrum_mismatches(lower, spectrum([(1.0, 3), (2.0, 1), (2.5, 1)], 4.0)) == 3


def test_identities_cli_lists_every_suite():
    assert {"phi-asymptotic", "phi-derivative", "main-term", "ruelle", "spectrum-stability"} <= set(IDENTITY_SUITES)
