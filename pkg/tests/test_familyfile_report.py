import json

import jsonschema
import pytest

from detcert import report
from detcert.certify import certify_finite_determinacy, cm2_check, eq1_check, generic_sample, lift_eq1
from detcert.familyfile import FamilyFileError, dumps, fixture_path, load_fixture, loads

FIXTURES = sorted(p.stem for p in fixture_path("square").parent.glob("*.fam"))


def test_loads_example():
    F = loads("""
        # comment line
        2 1 2   # N m n
        w: 1 1
        x1^2 ; x1*x2 - x2^2
    """)
    assert (F.N, F.m, F.n) == (2, 1, 2)
    assert F.to_strings() == [["x1^2", "x1*x2 - x2^2"]]


def test_vars_u():
    L = loads("2 1 1\nvars: u\nu1 - u2\n")
    assert L.letter == "u" and L.to_strings() == [["u1 - u2"]]


@pytest.mark.parametrize("text,line", [
    ("", None),
    ("2 2\nx1\n", 1),
    ("0 1 1\n1\n", 1),
    ("2 1 1\nw: 1\nx1\n", 2),
    ("2 1 1\nvars: y\nx1\n", 2),
    ("2 1 2\nx1\n", 2),
    ("2 2 1\nx1\n", None),
    ("2 1 1\nx1\nw: 1 1\n", 3),
])
def test_file_errors(text, line):
    with pytest.raises(FamilyFileError) as info:
        loads(text)
    assert info.value.line == line


def test_parse_error_points_at_column():
    with pytest.raises(FamilyFileError) as info:
        loads("2 1 2\nx1 ; x2 + + x1\n")
    assert info.value.line == 2
    assert info.value.column == 11


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_roundtrip(name):
    F = load_fixture(name)
    assert loads(dumps(F, comment="round trip")) == F


def test_missing_fixture():
    with pytest.raises(FileNotFoundError):
        fixture_path("no_such_family")


def _docs():
    sq = load_fixture("square")
    yield certify_finite_determinacy(sq, with_codimension=True)
    yield certify_finite_determinacy(load_fixture("coords_d2"), level_bound=4)
    yield eq1_check(load_fixture("sumdiff_linear"))
    yield eq1_check(load_fixture("coords_linear"), 2)
    yield lift_eq1(eq1_check(load_fixture("circulant3_linear")), 2)
    yield generic_sample(3, 2, 2, 1, 3, seed=1)
    yield cm2_check(load_fixture("cm2_twisted"))


@pytest.mark.parametrize("obj", list(_docs()), ids=lambda o: type(o).__name__)
def test_json_roundtrip_and_schema(obj):
    text = report.dump_document(obj)
    doc = json.loads(text)
    jsonschema.validate(doc, report.load_schema())
    again = report.load_document(text)
    assert again == obj
    assert report.dump_document(again) == text


def test_validation_document_schema():
    sq = load_fixture("square")
    from detcert.matrix_family import validate_whomog

    doc = {"schema": report.SCHEMA_ID, "kind": "validate",
           "certificate": report.validation_to_dict(sq, validate_whomog(sq), None)}
    jsonschema.validate(doc, report.load_schema())


def test_unknown_schema_rejected():
    with pytest.raises(ValueError):
        report.load_document('{"schema": "other/9", "kind": "eq1", "certificate": {}}')


def test_cells_are_one_based():
    cert = eq1_check(load_fixture("coords_linear"), 1)
    doc = json.loads(report.dump_document(cert))
    assert doc["certificate"]["obstructions"][0]["target"]["cell"] == [1, 1]
