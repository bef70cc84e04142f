from __future__ import annotations

import json
import logging
from pathlib import Path

import pytest

from main import run
from qualtensor.linalg import RationalMatrix
from qualtensor.qualitative import SignTensor, sign_pattern
from qualtensor.tensor import Shape, make_unit, matrix_tensor, shao_product
from qualtensor.tensor_io import load_tensor
from settings import ENV_PREFIX


@pytest.fixture(autouse=True)
def isolated_run(monkeypatch):
    for name in ("RESTARTS", "ITERATIONS", "TOL", "SEED", "TRIALS", "SAMPLES", "LOG_DIR"):
        monkeypatch.delenv(ENV_PREFIX + name, raising=False)
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    for handler in list(root.handlers):
        root.removeHandler(handler)
        if isinstance(handler, logging.FileHandler):
            handler.close()
    for handler in handlers:
        root.addHandler(handler)
    root.setLevel(level)


def invoke(capsys, *argv: str) -> tuple[int, str]:
    code = run(list(argv))
    return code, capsys.readouterr().out


class TestPatternCommands:
    def test_termrank(self, capsys, tensor_file, example41_tensor):
        code, out = invoke(capsys, "termrank", tensor_file("ex.json", example41_tensor))
        assert code == 0
        assert out == '{"term_rank":2,"witness":[[1,1,1],[2,2,2]]}\n'

    def test_mr1(self, capsys, tensor_file, all_plus_222):
        code, out = invoke(capsys, "mr1", tensor_file("plus.json", all_plus_222))
        assert code == 0
        assert out == '{"mr1":true}\n'

    def test_condense(self, capsys, tensor_file):
        path = tensor_file("checker.json", SignTensor.from_nested([[1, -1], [-1, 1]]))
        code, out = invoke(capsys, "condense", path)
        assert json.loads(out) == {
            "shape": [1, 1],
            "condensed": {"shape": [1, 1], "entries": [{"idx": [1, 1], "val": "1"}]},
        }

    def test_pattern_commands_read_any_tensor(self, capsys, tensor_file, remark_tensor):
        code, out = invoke(capsys, "mr1", tensor_file("remark.json", remark_tensor))
        assert code == 0
        assert json.loads(out) == {"mr1": False}

    def test_strict_false_predicate(self, capsys, tensor_file, example41_tensor):
        code, out = invoke(capsys, "mr1", "--strict", tensor_file("ex.json", example41_tensor))
        assert code == 1
        assert json.loads(out) == {"mr1": False}

    def test_pretty(self, capsys, tensor_file, example41_tensor):
        code, out = invoke(capsys, "termrank", "--pretty", tensor_file("ex.json", example41_tensor))
        assert code == 0
        assert out.startswith("{\n  ")
        assert json.loads(out)["term_rank"] == 2


class TestExactCommands:
    def test_det2(self, capsys, tensor_file, remark_tensor):
        code, out = invoke(capsys, "det2", tensor_file("remark.json", remark_tensor))
        assert code == 0
        assert out == '{"det":"54"}\n'

    def test_rank222(self, capsys, tensor_file, example41_tensor):
        code, out = invoke(capsys, "rank222", tensor_file("ex.json", example41_tensor))
        assert json.loads(out) == {"rank": 3, "hyperdet": "-7", "multilinear_rank": [2, 2, 2]}

    def test_product(self, capsys, tensor_file):
        a = tensor_file("m.json", matrix_tensor(RationalMatrix([[2, 0], [0, 3]])))
        b = tensor_file("unit.json", make_unit(2, 3))
        code, out = invoke(capsys, "product", a, b)
        assert code == 0
        assert json.loads(out)["product"] == {
            "shape": [2, 2, 2],
            "entries": [{"idx": [1, 1, 1], "val": "2"}, {"idx": [2, 2, 2], "val": "3"}],
        }

    def test_apply(self, capsys, tensor_file):
        code, out = invoke(capsys, "apply", tensor_file("unit.json", make_unit(2, 3)), "--x", "2,1/3")
        assert code == 0
        assert json.loads(out) == {"result": ["4", "1/9"]}

    def test_sign_inverse_right(self, capsys, tensor_file):
        A = shao_product(make_unit(2, 3), matrix_tensor(RationalMatrix([[0, 2], [3, 0]])))
        code, out = invoke(capsys, "sign-inverse", tensor_file("q.json", A), "--side", "right")
        assert code == 0
        assert json.loads(out) == {
            "side": "right",
            "decision": True,
            "reason": "accepted",
            "permutation": [2, 1],
            "signing": [1, 1],
            "probe_inverse": [["0", "1"], ["1", "0"]],
        }

    def test_sign_inverse_left_strict(self, capsys, tensor_file, remark_tensor):
        code, out = invoke(capsys, "sign-inverse", "--strict", "--side", "left", tensor_file("r.json", remark_tensor))
        assert code == 1
        assert json.loads(out) == {"side": "left", "decision": False, "reason": "structure"}


class TestSearchCommands:
    def test_sns_check(self, capsys, tensor_file, remark_tensor):
        code, out = invoke(capsys, "sns-check", "--strict", "--trials", "50", tensor_file("r.json", remark_tensor))
        assert code == 0
        report = json.loads(out)
        assert report["sns_necessary"]["overall"] is True
        assert report["sample"]["refuted"] is False
        assert report["sample"]["trials"] == 50
        assert report["seed"] == 0
        assert report["options"]["sampling"]["trials"] == 50

    def test_sns_check_refuted(self, capsys, tensor_file):
        code, out = invoke(capsys, "sns-check", "--strict", tensor_file("p.json", SignTensor.from_nested([[1, 1], [1, 1]])))
        assert code == 1
        assert json.loads(out)["sample"]["counterexample"]["entries"][0] == {"idx": [1, 1], "val": "1"}

    def test_rank_bounds(self, capsys, tensor_file):
        S = SignTensor.from_nested([[1, 0, 0], [-1, 1, 0], [0, 1, -1]])
        code, out = invoke(capsys, "rank-bounds", tensor_file("sns.json", S), "--restarts", "3", "--seed", "5")
        assert code == 0
        report = json.loads(out)
        assert report["mr_low"] == 3
        assert report["Mr_high"] == 3
        assert report["certificates"]["mr_low"]["justification"] == "sns-matrix"
        assert report["options"]["search"]["seed"] == 5
        assert report["options"]["search"]["restarts"] == 3
        assert report["options"]["sampling"]["seed"] == 5

    def test_analyze(self, capsys, tensor_file, example41_tensor):
        path = tensor_file("ex.json", example41_tensor)
        code, out = invoke(capsys, "analyze", path, "--restarts", "3", "--iterations", "200", "--samples", "10")
        assert code == 0
        report = json.loads(out)
        assert report["term_rank"] == 2
        assert report["mr1"] is False
        assert report["condensed_shape"] == [2, 2, 2]
        assert report["bounds"]["mr_low"] == 2
        assert report["bounds"]["Mr_low"] == 3
        assert report["options"]["search"]["restarts"] == 3
        assert report["options"]["sampling"]["samples"] == 10

    def test_sample(self, capsys, tmp_path, tensor_file, example41_tensor):
        path = tensor_file("ex.json", example41_tensor)
        code, out = invoke(capsys, "sample", path, "--count", "3", "--out", str(tmp_path / "members"), "--seed", "9")
        assert code == 0
        report = json.loads(out)
        assert len(report["files_written"]) == 3
        assert report["files_failed"] == []
        assert Path(report["files_written"][0]).name == "ex_member_001.json"
        for written in report["files_written"]:
            assert sign_pattern(load_tensor(written)) == sign_pattern(example41_tensor)


class TestErrors:
    def test_missing_file(self, capsys, tmp_path):
        code, out = invoke(capsys, "termrank", str(tmp_path / "nope.json"))
        assert code == 2
        assert json.loads(out)["type"] == "FileNotFoundError"

    def test_malformed_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"shape":[2,2],"entries":[{"idx":[3,1],"val":"1"}]}', encoding="utf-8")
        code, out = invoke(capsys, "termrank", str(path))
        assert code == 2
        assert json.loads(out)["type"] == "IndexOutOfRangeError"

    def test_unsupported_shape(self, capsys, tensor_file):
        code, out = invoke(capsys, "det2", tensor_file("u3.json", make_unit(3, 3)))
        assert code == 2
        assert json.loads(out)["type"] == "UnsupportedShapeError"

    def test_bad_vector(self, capsys, tensor_file):
        code, out = invoke(capsys, "apply", tensor_file("u.json", make_unit(2, 3)), "--x", "1,,2")
        assert code == 2
        assert json.loads(out)["type"] == "TensorFormatError"

    def test_bad_arguments(self, capsys):
        assert run(["termrank"]) == 2
        assert run(["rank-bounds", "x.json", "--restarts", "0"]) == 2
        capsys.readouterr()

    def test_bad_environment(self, capsys, monkeypatch, tensor_file, example41_tensor):
        monkeypatch.setenv("SIGRANK_SEED", "abc")
        code, out = invoke(capsys, "termrank", tensor_file("ex.json", example41_tensor))
        assert code == 2
        assert "SIGRANK_SEED" in json.loads(out)["error"]

    def test_negative_seed(self, capsys, tensor_file, example41_tensor):
        path = tensor_file("ex.json", example41_tensor)
        assert run(["rank-bounds", path, "--seed", "-1"]) == 2
        assert run(["sample", path, "--count", "1", "--out", "unused", "--seed", "-3"]) == 2
        capsys.readouterr()

    def test_negative_seed_from_environment(self, capsys, monkeypatch, tensor_file, example41_tensor):
        monkeypatch.setenv("SIGRANK_SEED", "-1")
        code, out = invoke(capsys, "sns-check", tensor_file("ex.json", example41_tensor))
        assert code == 2
        assert "seed" in json.loads(out)["error"]

    def test_log_dir(self, capsys, tmp_path, tensor_file, example41_tensor):
        path = tensor_file("ex.json", example41_tensor)
        code, _ = invoke(capsys, "termrank", path, "--log-dir", str(tmp_path / "logs"))
        assert code == 0
        logs = list((tmp_path / "logs").glob("signrank_*.log"))
        assert len(logs) == 1
        assert "command.complete" in logs[0].read_text(encoding="utf-8")


def test_every_route_has_a_command(capsys):
    from manager import Manager

    for name in Manager().routes:
        assert run([name, "--help"]) == 0, name
    assert run(["no-such-command"]) == 2
    capsys.readouterr()
