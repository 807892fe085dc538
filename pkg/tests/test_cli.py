import json
from pathlib import Path

import pytest

from zdi import __version__
from zdi.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture(name):
    return str(FIXTURES / f"{name}.json")


def run_json(capsys, *argv):
    code = main([*argv, "--format", "json", "--no-timestamp"])
    out = capsys.readouterr().out
    return code, json.loads(out) if code == 0 else out


def write(tmp_path, obj, name="m.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(p)


class TestCompute:
    def test_diag001(self, capsys):
        code, rep = run_json(capsys, "compute", fixture("diag001"))
        assert code == 0 and rep["d"] == 2 and rep["name"] == "diag001"
        assert rep["command"] == "compute" and "timestamp" not in rep

    def test_text_format(self, capsys):
        assert main(["compute", fixture("shift5")]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert any(line.split()[:2] == ["d", "2"] for line in lines)

    def test_timestamp_default(self, capsys):
        main(["compute", fixture("jordan2"), "--format", "json"])
        assert "timestamp" in json.loads(capsys.readouterr().out)

    def test_byte_identical(self, capsys):
        outs = []
        for _ in range(2):
            main(["analyze", fixture("shift5"), "--format", "json", "--no-timestamp"])
            outs.append(capsys.readouterr().out)
        assert outs[0] == outs[1]

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0
        assert __version__ in capsys.readouterr().out


class TestErrors:
    def test_missing_file(self, capsys, tmp_path):
        assert main(["compute", str(tmp_path / "nope.json")]) == 1
        assert "zdi: error" in capsys.readouterr().err

    def test_bad_json(self, capsys, tmp_path):
        assert main(["compute", write(tmp_path, "{not json")]) == 1

    def test_shape(self, capsys, tmp_path):
        p = write(tmp_path, {"n": 3, "entries": [[[0, 0]]]})
        assert main(["compute", p]) == 1

    def test_hint_mismatch(self, capsys, tmp_path):
        p = write(tmp_path, {"n": 2, "entries": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]],
                             "class_hint": "hermitian"})
        assert main(["analyze", p]) == 1

    def test_negative_tol(self, capsys):
        assert main(["compute", fixture("diag001"), "--tol", "-1"]) == 1

    def test_bad_k(self, capsys):
        assert main(["range", fixture("jordan2"), "--k", "3"]) == 1

    def test_search_failure(self, capsys, tmp_path):
        p = write(tmp_path, {"n": 2, "entries": [[[1, 0], [0, 0]], [[0, 0], [2, 0]]]})
        assert main(["certify", p, "--k", "1"]) == 2
        assert "search failed" in capsys.readouterr().err

    def test_nothing_to_certify(self, capsys, tmp_path):
        p = write(tmp_path, {"n": 2, "entries": [[[1, 0], [0, 0]], [[0, 0], [2, 0]]]})
        assert main(["certify", p]) == 1


class TestAnalyze:
    def test_shift5(self, capsys):
        code, rep = run_json(capsys, "analyze", fixture("shift5"))
        assert code == 0 and rep["d"] == 2
        assert rep["fast_paths"] == {"weighted-permutation": 2, "normal": 2}
        assert rep["deflation"]["applied"] is False
        assert rep["certificate"]["verified"] and rep["certificate"]["k"] == 2
        assert rep["characterization"]["holds"] is False

    def test_diag001(self, capsys):
        code, rep = run_json(capsys, "analyze", fixture("diag001"))
        assert code == 0
        assert list(rep["fast_paths"]) == ["hermitian", "weighted-permutation", "normal"]
        assert rep["characterization"]["holds"] and rep["boundary"]["extreme"]
        assert rep["boundary"]["d_exact"] == 2 == rep["certificate"]["k"]

    def test_jordan2(self, capsys):
        code, rep = run_json(capsys, "analyze", fixture("jordan2"))
        assert code == 0 and rep["d"] == 1 and rep["fast_paths"] == {"weighted-permutation": 1}
        assert "characterization" not in rep
        assert rep["boundary"]["on_boundary"] is False


class TestRange:
    def test_outputs(self, capsys, tmp_path):
        svg, csv = tmp_path / "w.svg", tmp_path / "w.csv"
        code, rep = run_json(capsys, "range", fixture("jordan2"), "--svg", str(svg),
                             "--csv", str(csv))
        assert code == 0 and rep["contains_zero"]
        assert abs(rep["area"] - 0.7853981) < 1e-4
        assert svg.read_text().startswith("<?xml")
        assert csv.read_text().startswith("theta,support\n")

    def test_k2_of_diag001(self, capsys):
        code, rep = run_json(capsys, "range", fixture("diag001"), "--k", "2", "--points", "64")
        assert code == 0 and rep["contains_zero"] and rep["diameter"] < 1e-9


class TestCertifyOracle:
    def test_certify_writes_document(self, capsys, tmp_path):
        out = tmp_path / "cert.json"
        code, rep = run_json(capsys, "certify", fixture("shift5"), "--output", str(out))
        assert code == 0 and rep["verified"] and rep["k"] == 2
        from zdi.certificates import verify
        from zdi.io import parse_certificate
        A, V = parse_certificate(out.read_text())
        assert verify(A, V).ok

    def test_oracle(self, capsys):
        code, rep = run_json(capsys, "oracle", fixture("diag001"))
        assert code == 0 and rep["d"] == 2 and rep["agree"]
