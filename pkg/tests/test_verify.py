import json
from importlib import resources

import jsonschema
import pytest

from stekloff.blockop.model import builtin_model, make_model, neumann_frequencies, with_omega
from stekloff.blockop.pencil import Eigenvalue
from stekloff.blockop.verify import compare_spectra, verify_model
from stekloff.serialize import to_json

SCHEMA = json.loads(resources.files("stekloff").joinpath("schemas/model_verify.schema.json").read_text())
KEYS = {"model", "eigenvalues", "gap", "audits", "penalty", "agreement"}


def _e(x, k=1):
    return Eigenvalue(x, k, "t", Eigenvalue.side_of(x))


def test_compare_spectra():
    assert compare_spectra([_e(1.0)], [_e(1.0 + 1e-10)])["passed"]
    assert not compare_spectra([_e(1.0)], [_e(1.0 + 1e-6)])["passed"]
    assert not compare_spectra([_e(1.0)], [])["passed"]
    assert not compare_spectra([_e(1.0, 2)], [_e(1.0)])["passed"]
    assert compare_spectra([], [])["passed"]


@pytest.mark.parametrize("seed", [0, 1])
def test_report_shape_and_schema(seed):
    rep = verify_model(make_model((12, 10, 4), seed=seed))
    assert KEYS <= set(rep)
    jsonschema.validate(json.loads(to_json(rep)), SCHEMA)
    assert not rep["status"]["oracle_disagreement"]
    assert rep["agreement"]["fixedpoint_W1"]["passed"] and rep["agreement"]["fixedpoint_V"]["passed"]
    assert rep["agreement"]["abstract_lemma"]["passed"]
    assert rep["gap"]["passed"]


def test_golden_report():
    rep = verify_model(builtin_model("golden"))
    assert [e["lambda"] for e in rep["eigenvalues"]] == pytest.approx([(1 - 5**0.5) / 2, (1 + 5**0.5) / 2])
    assert rep["gap"]["passed"] and not rep["gap"]["literal_c_infty_passed"]
    assert not rep["status"]["oracle_disagreement"]


def test_no_neumann_skips_dependent_checks():
    m = make_model((12, 10, 4), seed=2)
    rep = verify_model(with_omega(m, float(neumann_frequencies(m)[0])))
    assert "NoNeumann" in rep["status"]["audit_failures"]
    assert rep["gap"]["skipped"]
    assert "fixedpoint-V" in rep["status"]["skipped"]
    assert not rep["status"]["oracle_disagreement"]
    jsonschema.validate(json.loads(to_json(rep)), SCHEMA)
