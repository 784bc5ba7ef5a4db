"""JSON documents for ensembles, measurements, certificates and reports.

Every document carries ``"schema": "mcd-ensemble/1"`` and a ``"kind"``
discriminator. Complex matrices are row-major lists of rows, each entry an
``[re, im]`` pair. Example ensemble::

    {"schema": "mcd-ensemble/1", "kind": "ensemble", "dim": 2,
     "states": [{"prior": 0.5, "matrix": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]},
                {"prior": 0.5, "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}]}
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .confidence import Measurement
from .ensemble import Ensemble, validate
from .errors import ParseError, ValidationError

SCHEMA = "mcd-ensemble/1"
KINDS = ("ensemble", "measurement", "certificate", "certificate-check", "optimization-report",
         "factorization-report", "confidence-report")


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(obj, dim: int | None, field: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ParseError("matrix must be a non-empty list of rows", field)
    rows = len(obj)
    if dim is not None and rows != dim:
        raise ParseError(f"expected {dim} rows, found {rows}", field)
    out = np.zeros((rows, rows), dtype=complex)
    for r, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != rows:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise ParseError(f"matrix is not square: row has {got} entries, expected {rows}", f"{field}[{r}]")
        for c, entry in enumerate(row):
            where = f"{field}[{r}][{c}]"
            if not (isinstance(entry, list) and len(entry) == 2):
                raise ParseError("entry must be an [re, im] pair", where)
            re, im = entry
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re, im)):
                raise ParseError("entry components must be numbers", where)
            if not (math.isfinite(re) and math.isfinite(im)):
                raise ParseError("entry is not finite", where)
            out[r, c] = complex(re, im)
    return out


def _require(doc: dict, key: str, types, field: str | None = None):
    name = field or key
    if key not in doc:
        raise ParseError("missing required field", name)
    val = doc[key]
    if not isinstance(val, types) or isinstance(val, bool):
        raise ParseError(f"wrong type {type(val).__name__}", name)
    return val


def parse_document(text: str, kind: str | None = None) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    schema = doc.get("schema")
    if schema != SCHEMA:
        raise ParseError(f"unsupported schema {schema!r}, expected {SCHEMA!r}", "schema")
    got = doc.get("kind")
    if got not in KINDS:
        raise ParseError(f"unknown kind {got!r}", "kind")
    if kind is not None and got != kind:
        raise ParseError(f"expected kind {kind!r}, found {got!r}", "kind")
    return doc


def read_document(path, kind: str | None = None) -> dict:
    return parse_document(Path(path).read_text(), kind)


def dump_document(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def write_document(doc: dict, path) -> None:
    Path(path).write_text(dump_document(doc))


# ensembles

def ensemble_to_document(e: Ensemble) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "ensemble",
        "dim": e.dim,
        "states": [{"prior": float(p), "matrix": encode_matrix(s)} for p, s in zip(e.priors, e.states)],
    }


def ensemble_from_document(doc: dict, check: bool = True) -> Ensemble:
    dim = _require(doc, "dim", int)
    if dim < 1:
        raise ParseError("dim must be positive", "dim")
    states = _require(doc, "states", list)
    if not states:
        raise ParseError("at least one state required", "states")
    priors, mats = [], []
    for i, entry in enumerate(states):
        where = f"states[{i}]"
        if not isinstance(entry, dict):
            raise ParseError("state entry must be an object", where)
        priors.append(float(_require(entry, "prior", (int, float), f"{where}.prior")))
        mats.append(decode_matrix(_require(entry, "matrix", list, f"{where}.matrix"), dim, f"{where}.matrix"))
    e = Ensemble(np.array(priors), tuple(mats))
    if check:
        problems = validate(e)
        if problems:
            raise ValidationError("invalid ensemble: " + "; ".join(map(str, problems)), problems)
    return e


def save_ensemble(e: Ensemble, path) -> None:
    write_document(ensemble_to_document(e), path)


def load_ensemble(path) -> Ensemble:
    return ensemble_from_document(read_document(path, "ensemble"))


# measurements

def measurement_to_document(m: Measurement, embedded: bool = False) -> dict:
    body = {
        "dim": m.dim,
        "inconclusive": encode_matrix(m.inconclusive),
        "outcomes": [encode_matrix(x) for x in m.outcomes],
    }
    if embedded:
        return body
    return {"schema": SCHEMA, "kind": "measurement", **body}


def measurement_from_document(doc: dict, prefix: str = "") -> Measurement:
    dim = _require(doc, "dim", int, prefix + "dim")
    inc = decode_matrix(_require(doc, "inconclusive", list, prefix + "inconclusive"), dim, prefix + "inconclusive")
    outs = _require(doc, "outcomes", list, prefix + "outcomes")
    mats = [decode_matrix(x, dim, f"{prefix}outcomes[{i}]") for i, x in enumerate(outs)]
    return Measurement(inc, tuple(mats))


def save_measurement(m: Measurement, path) -> None:
    write_document(measurement_to_document(m), path)


def load_measurement(path) -> Measurement:
    return measurement_from_document(read_document(path, "measurement"))


# certificates

def certificate_to_document(cert, tolerances: dict | None = None) -> dict:
    m = cert.primal.measurement
    return {
        "schema": SCHEMA,
        "kind": "certificate",
        "dim": m.dim,
        "measurement": measurement_to_document(m, embedded=True),
        "dual_operator": encode_matrix(cert.dual.certificate),
        "primal_value": cert.primal.value,
        "dual_value": cert.dual.value,
        "gap": cert.gap,
        "slackness": list(cert.slackness),
        "certified": bool(cert.certified),
        "tolerances": dict(tolerances or {"gap": cert.gap_tol, "slack": cert.slack_tol}),
    }


def certificate_from_document(doc: dict) -> tuple[Measurement, np.ndarray]:
    """The measurement and dual operator stored in a certificate; the recorded numbers are ignored."""
    dim = _require(doc, "dim", int)
    mdoc = _require(doc, "measurement", dict)
    m = measurement_from_document(mdoc, "measurement.")
    h = decode_matrix(_require(doc, "dual_operator", list), dim, "dual_operator")
    return m, h


def load_certificate(path) -> tuple[Measurement, np.ndarray]:
    return certificate_from_document(read_document(path, "certificate"))
