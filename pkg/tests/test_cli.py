import json
import subprocess
import sys

import jsonschema
import pytest

from qcoha.cli import main
from qcoha.schemas import SCHEMAS, validate


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_info_three_loop(capsys):
    code, out, _ = run(capsys, "info", "three_loop")
    assert code == 0
    assert "B          [[-2]]" in out
    assert "symmetric  true" in out
    assert "cut        {x} valid" in out
    assert "p_x        yz - zy" in out


def test_info_genus2_relations(capsys):
    code, out, _ = run(capsys, "info", "genus2", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["relations"] == {"a": "lgf - jgd", "b": "jhd - khe", "c": "kie - lif"}
    assert doc["symmetric"] is False


def test_malformed_json_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": ["1"],\n  "arrows": [oops]}')
    code, _, err = run(capsys, "info", str(bad))
    assert code == 2
    assert "line 2, column" in err


def test_mul_examples(capsys):
    assert run(capsys, "mul", "no_arrow", "1", "1", "1", "p[1,1]")[1].splitlines()[2] == "product  1"
    code, out, _ = run(capsys, "mul", "one_loop", "1", "1", "1", "1", "--format", "json")
    assert code == 0 and json.loads(out)["product"] == "2"


@pytest.mark.parametrize("argv", [
    ["mul", "no_arrow", "1", "p[2,1]", "1", "1"],
    ["mul", "no_arrow", "1", "p[1,1", "1", "1"],
    ["mul", "no_arrow", "1,1", "1", "1", "1"],
    ["mul", "no_arrow", "1", "x[1]", "1", "1"],
    ["delta", "no_arrow", "1", "1", "--split", "2"],
    ["info", "no_such_spec"],
    ["dt", "genus2"],
    ["count", "three_loop", "--gamma", "2", "--primes", "5", "--budget", "10"],
])
def test_input_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("qcoha: error:")


def test_check_exit_codes(capsys):
    code, out, _ = run(capsys, "check", "one_loop", "--bialgebra", "--trials", "10")
    assert code == 0 and out.splitlines()[1].startswith("PASS bialgebra")
    code, out, _ = run(capsys, "check", "one_loop", "--bialgebra", "--trials", "10", "--sign-rule", "l0")
    assert code == 1
    assert "FAIL bialgebra" in out and "lhs: 2" in out and "rhs: 0" in out


def test_dt_no_arrow(capsys):
    code, out, _ = run(capsys, "dt", "no_arrow", "--gamma-max", "3", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["omega"] == {"(1)": "t", "(2)": "0", "(3)": "0"}


def test_count_interpolation(capsys):
    code, out, _ = run(capsys, "count", "three_loop", "--gamma", "1", "--primes", "2,3,5",
                       "--holdout", "7", "--interpolate", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["polynomial"] == "q^2" and doc["holdout_ok"] is True


SCHEMA_RUNS = [
    ["info", "genus2"],
    ["info", "jordan_cubic"],
    ["mul", "sym2v", "1,0", "p[1,1]", "0,1", "1"],
    ["delta", "two_loop", "2", "p[1,2]"],
    ["check", "no_arrow", "--trials", "4"],
    ["check", "one_loop", "--bialgebra", "--trials", "2", "--sign-rule", "l0"],
    ["dt", "two_loop", "--gamma-max", "2", "--variable", "q-"],
    ["count", "three_loop", "--gamma", "1", "--primes", "2,3"],
    ["count", "three_loop", "--gamma", "1", "--primes", "2,3,5", "--interpolate"],
]


@pytest.mark.parametrize("argv", SCHEMA_RUNS)
def test_json_matches_schema_and_is_deterministic(capsys, argv):
    _, first, _ = run(capsys, *argv, "--format", "json", "--seed", "17")
    _, second, _ = run(capsys, *argv, "--format", "json", "--seed", "17")
    assert first == second
    doc = json.loads(first)
    assert doc["seed"] == 17
    validate(doc)


def test_schema_rejects_bad_documents():
    with pytest.raises(jsonschema.ValidationError):
        validate({"command": "mul", "seed": 0, "gamma": "(1)"})
    with pytest.raises(jsonschema.ValidationError):
        validate({"command": "nope", "seed": 0})
    assert set(SCHEMAS) == {"info", "mul", "delta", "check", "dt", "count"}


def test_table_output_echoes_seed(capsys):
    _, out, _ = run(capsys, "dt", "one_loop", "--gamma-max", "2", "--seed", "5")
    assert out.startswith("# seed: 5\n")


def test_global_flags_before_subcommand(capsys):
    code, out, _ = run(capsys, "--format", "json", "--seed", "3", "info", "one_loop")
    assert code == 0 and json.loads(out)["seed"] == 3


def test_worker_count_does_not_change_output(capsys):
    argv = ["check", "two_loop", "--coassoc", "--trials", "6", "--format", "json"]
    _, a, _ = run(capsys, *argv, "--workers", "1")
    _, b, _ = run(capsys, *argv, "--workers", "2")
    assert a == b


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qcoha", "mul", "one_loop", "1", "1", "1", "1"],
                         capture_output=True, text=True, check=True)
    assert "product  2" in res.stdout
