import json

import pytest

from gatecalc.cli import main
from gatecalc.datagen import read_records


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_eval(capsys):
    code, out, err = run_cli(capsys, "eval", "3 5 +")
    assert code == 0
    assert out == "8\n"
    assert err == ""


def test_eval_decimal(capsys):
    code, out, _ = run_cli(capsys, "eval", "10 4 /")
    assert code == 0
    assert out == "2.5\n"


def test_eval_trace(capsys):
    code, out, _ = run_cli(capsys, "eval", "3 5 2 * +", "--trace")
    assert code == 0
    payload = json.loads(out)
    assert payload["result"] == "13"
    assert len(payload["trace"]["steps"]) == 2
    assert payload["trace"]["final"] == 13.0


@pytest.mark.parametrize("expression", ["", "3 +", "3 5", "+ +"])
def test_eval_malformed_exits_one(capsys, expression):
    code, out, err = run_cli(capsys, "eval", expression)
    assert code == 1
    assert out == ""
    assert err.startswith("error:")


def test_eval_division_by_zero_exits_one(capsys):
    code, _, err = run_cli(capsys, "eval", "3 0 /")
    assert code == 1
    assert "zero" in err


def test_convert(capsys):
    code, out, _ = run_cli(capsys, "convert", "3 5 +")
    assert code == 0
    assert json.loads(out) == {
        "valid": [1, 1, 1],
        "dense": [3.0, 5.0, 0.0],
        "ops": ["none", "none", "+"],
    }


def test_convert_malformed_number(capsys):
    code, _, err = run_cli(capsys, "convert", "1.2.3")
    assert code == 1
    assert "error" in err


def test_to_postfix(capsys):
    code, out, _ = run_cli(capsys, "to-postfix", "3 + 5 * 2 = ?")
    assert code == 0
    assert out == "3 5 2 * +\n"


def test_to_postfix_parse_error(capsys):
    code, _, err = run_cli(capsys, "to-postfix", "3 +")
    assert code == 1
    assert "position" in err


def test_render(capsys):
    code, out, _ = run_cli(capsys, "render", "8.0")
    assert code == 0
    assert out == "8\n"


def test_render_rejects_junk(capsys):
    code, _, err = run_cli(capsys, "render", "abc")
    assert code == 1
    assert "abc" in err


def test_unknown_verb_is_usage_error(capsys):
    code, _, _ = run_cli(capsys, "frobnicate")
    assert code == 2


def test_missing_argument_is_usage_error(capsys):
    code, _, _ = run_cli(capsys, "eval")
    assert code == 2


def test_gen_dot_place(capsys, tmp_path):
    out_path = tmp_path / "dot.txt"
    code, out, _ = run_cli(
        capsys, "gen", "dot-place", "--count", "8", "--seed", "0", "--out", str(out_path)
    )
    assert code == 0
    assert json.loads(out) == {"written": 8, "path": str(out_path)}
    lines = out_path.read_text().splitlines()
    assert len(lines) == 8
    assert all("." in line for line in lines)


def test_gen_numbers_ops(capsys, tmp_path):
    out_path = tmp_path / "ops.txt"
    code, out, _ = run_cli(
        capsys, "gen", "numbers-ops", "--count", "30", "--out", str(out_path)
    )
    assert code == 0
    assert len(out_path.read_text().splitlines()) == 30


def test_gen_qa_jsonl(capsys, tmp_path):
    out_path = tmp_path / "qa.jsonl"
    code, out, _ = run_cli(
        capsys, "gen", "qa", "--count", "5", "--seed", "3", "--out", str(out_path)
    )
    assert code == 0
    records = read_records(out_path)
    assert len(records) == 5
    for record in records:
        assert list(record.keys()) == ["instruction", "input", "output", "swift_express"]


def test_gen_qa_array(capsys, tmp_path):
    out_path = tmp_path / "qa.json"
    code, _, _ = run_cli(
        capsys, "gen", "qa", "--count", "3", "--array", "--out", str(out_path)
    )
    assert code == 0
    assert out_path.read_text().lstrip().startswith("[")
    assert len(read_records(out_path)) == 3


def test_gen_mix(capsys, tmp_path):
    arith = tmp_path / "arith.jsonl"
    other = tmp_path / "other.jsonl"
    mixed = tmp_path / "mixed.jsonl"
    run_cli(capsys, "gen", "qa", "--count", "60", "--out", str(arith))
    other.write_text(
        "\n".join(
            json.dumps({"instruction": f"q{i}", "input": "", "output": "a"})
            for i in range(40)
        )
        + "\n"
    )
    code, out, _ = run_cli(
        capsys,
        "gen", "mix",
        "--arith", str(arith),
        "--other", str(other),
        "--fraction", "0.6",
        "--out", str(mixed),
    )
    assert code == 0
    records = read_records(mixed)
    assert len(records) == 100
    assert sum(1 for r in records if "swift_express" in r) == 60


def test_gen_mix_empty_input_fails(capsys, tmp_path):
    arith = tmp_path / "arith.jsonl"
    other = tmp_path / "other.jsonl"
    run_cli(capsys, "gen", "qa", "--count", "5", "--out", str(arith))
    other.write_text("")
    code, _, err = run_cli(
        capsys, "gen", "mix", "--arith", str(arith), "--other", str(other),
        "--out", str(tmp_path / "m.jsonl"),
    )
    assert code == 1
    assert "error" in err


@pytest.fixture()
def tiny_gates_file(capsys, tmp_path):
    corpus = tmp_path / "corpus.txt"
    gates = tmp_path / "gates.json"
    run_cli(capsys, "gen", "dot-place", "--count", "30", "--out", str(corpus))
    code, out, _ = run_cli(
        capsys,
        "train-gates", "--data", str(corpus), "--out", str(gates),
        "--epoch-size", "20", "--repeats", "2",
    )
    assert code == 0
    assert "epoch 0 mean_loss" in out
    return gates


def test_train_gates_writes_params(tiny_gates_file):
    payload = json.loads(tiny_gates_file.read_text())
    assert payload["format_version"] == 1
    assert len(payload["digit_w"]) == 10


def test_convert_with_learned_gates(capsys, tiny_gates_file):
    code, out, _ = run_cli(
        capsys, "convert", "1.5", "--gates", str(tiny_gates_file)
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["valid"] == [1]
    assert abs(payload["dense"][0] - 1.5) < 1e-9


def test_verify_gates_reports_mismatches_for_undertrained(capsys, tmp_path):
    from gatecalc.gates import GateParams, save_params

    gates = tmp_path / "zero.json"
    save_params(GateParams.zeros(), gates)
    code, out, _ = run_cli(capsys, "verify-gates", "--gates", str(gates))
    assert code == 1
    assert "MISMATCH" in out
    assert "agreement" in out


def test_verify_gates_missing_file(capsys, tmp_path):
    code, _, err = run_cli(capsys, "verify-gates", "--gates", str(tmp_path / "nope.json"))
    assert code == 1
    assert "error" in err


def test_train_gates_freeze_keeps_zero_params(capsys, tmp_path):
    corpus = tmp_path / "corpus.txt"
    gates = tmp_path / "gates.json"
    run_cli(capsys, "gen", "dot-place", "--count", "10", "--out", str(corpus))
    code, _, _ = run_cli(
        capsys, "train-gates", "--data", str(corpus), "--out", str(gates), "--freeze"
    )
    assert code == 0
    payload = json.loads(gates.read_text())
    assert all(v == 0.0 for row in payload["digit_w"] for v in row)


def test_run_arithmetic(capsys):
    code, out, _ = run_cli(capsys, "run", "3 + 5 = ?")
    assert code == 0
    payload = json.loads(out)
    assert payload["answer"] == "8"
    assert payload["injected"] is True
    assert payload["expression"] == "3 5 +"


def test_run_general(capsys):
    code, out, _ = run_cli(capsys, "run", "Design a logo for a food store.")
    assert code == 0
    payload = json.loads(out)
    assert payload["answer"] == "Design a logo for a food store."
    assert payload["injected"] is False


def test_run_contains_division_by_zero(capsys):
    code, out, _ = run_cli(capsys, "run", "12 / 0 = ?")
    assert code == 0
    payload = json.loads(out)
    assert payload["injected"] is False
    assert "DivisionByZero" in payload["diagnostic"]


def test_run_with_inject_len(capsys):
    code, out, _ = run_cli(capsys, "run", "1 / 813 = ?", "--inject-len", "32")
    assert code == 0
    payload = json.loads(out)
    assert payload["injected"] is True
    assert payload["answer"].startswith("0.00123")
