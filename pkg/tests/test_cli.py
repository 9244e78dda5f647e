import json

import jsonschema
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diagbieb.charmatrix import GenMatrix
from diagbieb.cli import load_schema, main
from diagbieb.examples import EXAMPLES, get_example
from diagbieb.matrixfile import MatrixFileError, parse_matrix, serialize_matrix


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_text(capsys):
    code, out, _ = run(capsys, "validate", "example:min.19.1.1.7")
    assert code == 0
    assert out.strip() == "torsion-free: yes, faithful: yes, holonomy: C2^2, dim 4"


def test_validate_failure_exit(capsys, tmp_path):
    f = tmp_path / "t.txt"
    f.write_text("2 2\n1 2\n2 1\n")
    code, out, _ = run(capsys, "validate", str(f))
    assert code == 1 and "torsion-free: no" in out


def test_closure_text(capsys):
    code, out, _ = run(capsys, "closure", "example:deltaP")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 3 and lines[-1].endswith("3 2 1")


def test_vasquez_text(capsys):
    code, out, _ = run(capsys, "vasquez", "--k", "2")
    assert code == 0 and out.splitlines()[0] == "n_d(C2^2) = 3 (exact)"


def test_reduce_and_certify(capsys):
    code, out, _ = run(capsys, "reduce", "example:min.19.1.1.7")
    assert code == 0 and "delete column 2" in out and "minimal (certified)" in out
    code, out, _ = run(capsys, "certify-min", "example:min.72.1.1.502")
    assert code == 0
    code, out, _ = run(capsys, "certify-min", "example:min.19.1.1.7")
    assert code == 1


def test_diffuse_commands(capsys):
    code, out, _ = run(capsys, "classify", "example:min.19.1.1.7")
    assert code == 0 and out.startswith("NonDiffuse")
    code, out, _ = run(capsys, "witness", "example:deltaP")
    assert code == 0 and "rank 3" in out
    code, out, _ = run(capsys, "pipeline", "example:min.72.1.1.502")
    assert code == 0 and "0 3 2 1 2\n3 3 1 3 3" in out


def test_enumerate_and_guard(capsys):
    code, out, _ = run(capsys, "enumerate", "--k", "2", "--n", "3")
    assert code == 0 and out.strip().endswith("# 10 matrices")
    code, _, err = run(capsys, "enumerate", "--k", "4", "--n", "5")
    assert code == 2 and "k <= 3" in err
    code, out, _ = run(capsys, "enumerate", "--k", "2", "--n", "4", "--digest")
    assert code == 0 and "irreducible_found: 0" in out


def test_example_stable(capsys):
    code, out1, _ = run(capsys, "example", "min.72.1.1.502")
    _, out2, _ = run(capsys, "example", "example:min.72.1.1.502")
    assert code == 0 and out1 == out2
    assert out1 == "# min.72.1.1.502\n3 5\n0 3 2 1 2\n2 2 1 1 1\n1 1 0 2 2\n"
    code, out, _ = run(capsys, "example")
    assert out.split() == list(EXAMPLES)


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "validate", "example:nope")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "validate", str(tmp_path / "missing"))[0] == 2
    f = tmp_path / "bad.txt"
    f.write_text("2 3\n1 2 2\n2 x 3\n")
    code, _, err = run(capsys, "validate", str(f))
    assert code == 2 and "line 3, column 3" in err


COMMANDS = [
    ("validate", "example:min.19.1.1.7"), ("closure", "example:deltaP"),
    ("reduce", "example:min.19.1.1.7"), ("certify-min", "example:lower:k4"),
    ("classify", "example:min.72.1.1.502"), ("witness", "example:deltaP"),
    ("pipeline", "example:min.72.1.1.502"), ("vasquez", "--k", "5"),
    ("enumerate", "--k", "2", "--n", "3"), ("example", "deltaP"), ("example",),
]


@pytest.mark.parametrize("argv", COMMANDS)
def test_json_schema(capsys, argv):
    code, out, _ = run(capsys, *argv, "--json")
    doc = json.loads(out)
    jsonschema.validate(doc, load_schema())
    assert code == 0 and all(c["pass"] for c in doc["checks"])


def test_matrixfile_errors():
    with pytest.raises(MatrixFileError):
        parse_matrix("")
    with pytest.raises(MatrixFileError) as e:
        parse_matrix("2 3\n1 2 2\n")
    assert e.value.line == 3
    with pytest.raises(MatrixFileError) as e:
        parse_matrix("# c\n1 3\n1 2\n")
    assert (e.value.line, e.value.column) == (3, 4)
    with pytest.raises(MatrixFileError) as e:
        parse_matrix("1 2\n1 4\n")
    assert (e.value.line, e.value.column) == (2, 3)
    with pytest.raises(MatrixFileError):
        parse_matrix("0 2\n")
    with pytest.raises(MatrixFileError):
        parse_matrix("1 1\n1\n2\n")
    assert parse_matrix("# comment\n1 2\n# inner\n1 2\n") == GenMatrix.of([[1, 2]])


mats = st.integers(1, 4).flatmap(lambda k: st.integers(1, 8).flatmap(
    lambda n: st.lists(st.lists(st.sampled_from((0, 1, 2, 3)), min_size=n, max_size=n),
                       min_size=k, max_size=k))).map(GenMatrix.of)


@given(mats)
def test_roundtrip(A):
    assert parse_matrix(serialize_matrix(A)) == A


def test_examples_roundtrip():
    for name in EXAMPLES:
        A = get_example(name)
        assert parse_matrix(serialize_matrix(A)) == A
