import json

import numpy as np
import pytest
from hypothesis import given, settings

from maxconf import io, optimizer
from maxconf.confidence import baseline_mcm_measurement
from maxconf.errors import ParseError, ValidationError

from conftest import ensemble_a, small_ensembles


def test_round_trip_ensemble_a(tmp_path):
    path = tmp_path / "a.json"
    io.save_ensemble(ensemble_a(), path)
    assert io.load_ensemble(path).allclose(ensemble_a(), atol=1e-12)


def test_document_shape():
    doc = io.ensemble_to_document(ensemble_a())
    assert doc["schema"] == "mcd-ensemble/1" and doc["kind"] == "ensemble" and doc["dim"] == 2
    assert doc["states"][1]["matrix"][1][1] == [0.5, 0.0]


def test_complex_entries_round_trip():
    rho = np.array([[0.5, 0.25j], [-0.25j, 0.5]])
    e = io.ensemble_from_document(json.loads(io.dump_document(io.ensemble_to_document(
        ensemble_a().__class__(np.array([1.0]), (rho,))))))
    np.testing.assert_array_equal(e.states[0], rho)


def test_non_square_matrix_is_parse_error():
    doc = io.ensemble_to_document(ensemble_a())
    doc["states"][0]["matrix"][1] = [[0, 0]]
    with pytest.raises(ParseError) as info:
        io.ensemble_from_document(doc)
    assert info.value.field == "states[0].matrix[1]"
    assert "states[0].matrix[1]" in str(info.value)


def test_trace_point_nine_is_validation_error():
    doc = io.ensemble_to_document(ensemble_a())
    doc["states"][1]["matrix"] = [[[0.45, 0], [0, 0]], [[0, 0], [0.45, 0]]]
    with pytest.raises(ValidationError) as info:
        io.ensemble_from_document(doc)
    assert "state 1" in str(info.value)
    assert info.value.violations[0].kind == "TraceViolation"


def test_bad_json_reports_line():
    with pytest.raises(ParseError) as info:
        io.parse_document('{\n"schema": "mcd-ensemble/1",\n oops}')
    assert info.value.line == 3
    assert str(info.value).startswith("[line 3")


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda d: d.pop("dim"), "dim"),
        (lambda d: d.update(dim=True), "dim"),
        (lambda d: d.update(schema="other/2"), "schema"),
        (lambda d: d.update(kind="mystery"), "kind"),
        (lambda d: d["states"][0].pop("prior"), "states[0].prior"),
        (lambda d: d["states"][0]["matrix"][0].__setitem__(0, [1, "x"]), "states[0].matrix[0][0]"),
        (lambda d: d["states"][0]["matrix"][0].__setitem__(0, 1.0), "states[0].matrix[0][0]"),
        (lambda d: d.update(dim=3), "states[0].matrix"),
    ],
)
def test_parse_errors_carry_field(mutate, field):
    doc = io.ensemble_to_document(ensemble_a())
    mutate(doc)
    with pytest.raises(ParseError) as info:
        io.ensemble_from_document(io.parse_document(json.dumps(doc)))
    assert info.value.field == field


def test_wrong_kind_rejected(tmp_path):
    path = tmp_path / "m.json"
    io.save_measurement(baseline_mcm_measurement(ensemble_a()), path)
    with pytest.raises(ParseError):
        io.load_ensemble(path)
    m = io.load_measurement(path)
    np.testing.assert_allclose(m.outcomes[1], np.diag([0, 0.75]), atol=1e-12)


def test_certificate_round_trip(tmp_path):
    cert = optimizer.certify(ensemble_a())
    path = tmp_path / "c.json"
    io.write_document(io.certificate_to_document(cert), path)
    m, h = io.load_certificate(path)
    np.testing.assert_array_equal(h, cert.dual.certificate)
    for a, b in zip(m.outcomes, cert.primal.measurement.outcomes):
        np.testing.assert_array_equal(a, b)
    doc = io.read_document(path, "certificate")
    assert doc["certified"] is True and doc["tolerances"] == {"gap": 1e-6, "slack": 1e-6}


@settings(max_examples=40, deadline=None)
@given(small_ensembles())
def test_round_trip_property(e):
    back = io.ensemble_from_document(io.parse_document(io.dump_document(io.ensemble_to_document(e))))
    assert back.allclose(e, atol=1e-12)
