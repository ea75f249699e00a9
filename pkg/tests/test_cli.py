import json
import os
import subprocess
import sys

import pytest

from beilinson.cli import main, run_command
from beilinson.dircat import fixture, validate_category
from beilinson.errors import FieldParseError
from beilinson.exactlin import Field
from beilinson.interchange import (
    SchemaError, category_equal, module_equal, parse_document, parse_field, serialize,
)
from beilinson.modcat import check_module, hom_complex, identity, projective, random_module, twist
from beilinson.mutate import Collection

HERE = os.path.dirname(__file__)


def test_ss_example():
    code, text = run_command(["ss", "catA2", "S2", "S1", "--format", "table"])
    assert code == 0
    assert text.rstrip().endswith("E∞ total dims = Hom dims: OK")
    assert "E1 identification: OK" in text
    e1 = text.split("E1:\n")[1].split("E2:")[0]
    assert sum(int(x) for line in e1.splitlines()[1:] for x in line.split()[1:] if x.isdigit()) == 1


@pytest.mark.parametrize("argv,want", [
    (["maslov", "triangle", "0", "3/10", "-3/10"], "-1"),
    (["maslov", "triangle", "0", "-3/10", "3/10"], "0"),
    (["halftwist", "3"], "s2 s1 s2"),
    (["maslov", "minus-mu", "3", "2"], "-2"),
])
def test_single_line_outputs(argv, want):
    assert run_command(argv) == (0, want + "\n")


def test_struct_output_is_json():
    code, text = run_command(["hom", "catA2", "S2", "S1", "--format", "struct"])
    assert code == 0 and json.loads(text)["hom_dims"] == {"1": 1}


def test_exit_codes(capsys):
    assert run_command(["nosuchcommand"])[0] == 2
    assert run_command([])[0] == 2
    assert run_command(["maslov", "index", "0", "1"])[0] == 2
    assert run_command(["hom", "catA2", "Q7", "S1"])[0] == 2
    assert run_command(["hom", "catA2", "S1", "S1", "--field", "GF(2)"])[0] == 2
    assert main(["halftwist", "2"]) == 0
    assert capsys.readouterr().out == "s1\n"
    assert main(["bogus"]) == 2
    assert "usage error" in capsys.readouterr().err


def test_certification_commands_succeed():
    for argv in (["halftwist", "4", "--category", "A4mu3"], ["yoneda", "A4mu3", "T(P2,P4)", "2"],
                 ["tower", "triangular(3)", "P3"], ["validate", "triangular(4)", "T(P1,P4)"],
                 ["edge", "triangular(3)", "P3", "P3"]):
        code, text = run_command(argv)
        assert code == 0, text


def test_validate_reports_failure(tmp_path):
    # one product rescaled; with four objects associativity then breaks
    doc = json.loads(serialize(fixture("triangular(4)")))
    doc["mu"][0]["coeff"] = 2
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    code, text = run_command(["validate", str(p)])
    assert code == 1 and "FAIL" in text


# ----------------------------------------------------------------------
# interchange documents


@pytest.mark.parametrize("name", ["A2", "triangular(3)", "triangular(4)", "A4mu3"])
@pytest.mark.parametrize("F", [Field.prime(5), Field.rational()], ids=lambda F: F.name)
def test_category_round_trip_is_byte_stable(name, F):
    A = fixture(name, F)
    text = serialize(A)
    B = parse_document(text).value
    assert category_equal(A, B)
    assert validate_category(B).passed
    assert serialize(B) == text


def test_module_and_morphism_round_trip():
    import random
    A = fixture("A4mu3", Field.rational())
    rng = random.Random(1)
    for M in (projective(A, 4), twist(projective(A, 1), projective(A, 4)), random_module(A, rng)):
        text = serialize(M)
        N = parse_document(text).value
        assert module_equal(M, N) and check_module(N).passed
        assert serialize(N) == text
    M = projective(A, 3)
    phi = identity(M)
    doc = parse_document(serialize(phi)).value
    assert doc.comps == phi.comps and doc.degree == 0
    coll = Collection([projective(A, k) for k in range(1, 5)])
    back = parse_document(serialize(coll)).value
    assert all(module_equal(x, y) for x, y in zip(coll, back))


def test_p2_document_passes_check_module(tmp_path):
    A = fixture("A2")
    p = tmp_path / "p2.json"
    p.write_text(serialize(projective(A, 2)))
    M = parse_document(p.read_text()).value
    assert check_module(M).passed
    assert hom_complex(M, M).dims() == {0: 1}
    code, text = run_command(["validate", str(p)])
    assert code == 0 and text.startswith("module: PASS")


def test_field_parse_errors():
    with pytest.raises(FieldParseError):
        parse_field("GF(2)")
    with pytest.raises(FieldParseError):
        parse_field("GF(6)")
    assert parse_field({"prime": 2, "allow_char2": True}).p == 2
    doc = json.loads(serialize(fixture("triangular(4)")))
    doc["mu"][0]["coeff"] = "1/2"
    doc["field"] = {"prime": 2, "allow_char2": True}
    with pytest.raises(FieldParseError):
        parse_document(json.dumps(doc))
    doc["field"] = "GF(2)"
    with pytest.raises(FieldParseError):
        parse_document(json.dumps(doc))
    doc["field"] = "QQ"
    A = parse_document(json.dumps(doc)).value
    assert not validate_category(A).passed


def test_schema_errors_name_the_path():
    with pytest.raises(SchemaError):
        parse_document("[1, 2]")
    with pytest.raises(SchemaError):
        parse_document('{"kind": "widget"}')
    doc = json.loads(serialize(fixture("A2")))
    doc["version"] = 99
    with pytest.raises(SchemaError):
        parse_document(json.dumps(doc))


def test_cli_suite_is_deterministic_across_processes():
    script = os.path.join(HERE, "cli_suite.py")
    env = dict(os.environ, PYTHONHASHSEED="random")
    runs = [subprocess.run([sys.executable, script], capture_output=True, env=env, check=True).stdout
            for _ in range(2)]
    assert runs[0] == runs[1] and runs[0]
