from __future__ import annotations

import json
from pathlib import Path

import pytest

jsonschema = pytest.importorskip("jsonschema")
referencing = pytest.importorskip("referencing")

from regfrac.cli import main  # noqa: E402

SCHEMAS = Path(__file__).resolve().parents[1] / "docs" / "schemas"


@pytest.fixture(scope="module")
def registry():
    res = []
    for p in SCHEMAS.glob("*.json"):
        doc = json.loads(p.read_text())
        res.append((doc["$id"], referencing.Resource.from_contents(doc)))
    return referencing.Registry().with_resources(res)


def validate(doc, name, registry):
    schema = json.loads((SCHEMAS / name).read_text())
    jsonschema.Draft202012Validator(schema, registry=registry).validate(doc)


CASES = [
    (["exponents", "--s", "0.6", "--k", "2"], "exponent_table.schema.json"),
    (["eigen", "--s", "0.6", "--n", "64"], "angular_spectrum.schema.json"),
    (["solve1d", "--bc", "neumann", "--s", "0.5", "--n", "128"], "solve1d.schema.json"),
    (["disk", "--s", "0.75", "--n", "64"], "curvature_report.schema.json"),
    (["disk", "--s", "0.9", "--n", "256", "--study"], "curvature_study.schema.json"),
]


@pytest.mark.parametrize("argv,name", CASES, ids=[c[0][0] + ("-study" if "--study" in c[0] else "") for c in CASES])
def test_output_matches_schema(argv, name, registry, capsys):
    assert main(argv) == 0
    doc = json.loads(capsys.readouterr().out)
    validate(doc, "run.schema.json", registry)
    validate(doc["result"], name, registry)


def test_schemas_are_valid():
    for p in SCHEMAS.glob("*.json"):
        jsonschema.Draft202012Validator.check_schema(json.loads(p.read_text()))
