import json

import numpy as np
import pytest

from lassokit import __version__
from lassokit.cli import dumps, fmt_float, main, path_from_document
from lassokit.instances import generate
from lassokit.larspath import lars_path, solution_at


@pytest.fixture
def fixture_file(tmp_path):
    path = tmp_path / "dup.json"
    assert main(["gen", "--kind", "duplicated", "--n", "1", "--p", "2", "--seed", "0",
                 "--out", str(path)]) == 0
    return path


@pytest.fixture
def averaged_file(tmp_path):
    path = tmp_path / "avg.json"
    assert main(["gen", "--kind", "averaged-column", "--n", "5", "--p", "10", "--seed", "3",
                 "--lambda", "1", "--out", str(path)]) == 0
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


class TestSerialization:
    def test_seventeen_digits(self):
        assert fmt_float(0.1) == "0.10000000000000001"
        assert float(fmt_float(1 / 3)) == 1 / 3
        assert fmt_float(float("nan")) == "null"

    def test_round_trip(self):
        v = np.random.default_rng(0).standard_normal(20)
        back = json.loads(dumps({"v": v, "ok": np.bool_(True), "k": np.int64(3)}))
        assert back["ok"] is True and back["k"] == 3
        assert np.array_equal(np.array(back["v"]), v)


class TestGen:
    def test_fixture(self, fixture_file):
        doc = json.loads(fixture_file.read_text())
        assert doc["X"] == [[1.0, 1.0]] and doc["y"] == [2.0]
        assert doc["version"] == __version__

    def test_byte_identical(self, tmp_path):
        files = []
        for name in ("a", "b"):
            x, y = tmp_path / f"{name}x.csv", tmp_path / f"{name}y.csv"
            assert main(["gen", "--kind", "averaged-column", "--n", "5", "--p", "10",
                         "--seed", "42", "--x-out", str(x), "--y-out", str(y)]) == 0
            files.append((x.read_bytes(), y.read_bytes()))
        assert files[0] == files[1]
        X = np.loadtxt(tmp_path / "ax.csv", delimiter=",")
        np.testing.assert_array_equal(X, generate("averaged-column", 5, 10, 42)[0])
        assert np.linalg.matrix_rank(X[:, :4]) == 3

    def test_bad_kind(self, capsys):
        code, _, err = run(capsys, "gen", "--kind", "cauchy", "--n", 2, "--p", 2, "--seed", 0)
        assert code == 1 and json.loads(err)["error"] == "usage"

    def test_bad_dims(self, capsys):
        code, _, _ = run(capsys, "gen", "--kind", "gaussian", "--n", 0, "--p", 2, "--seed", 0)
        assert code == 1


class TestPath:
    def test_fixture(self, capsys, fixture_file):
        code, doc, _ = run(capsys, "path", "--instance", fixture_file)
        assert code == 0
        assert [k["lambda"] for k in doc["knots"]] == [2.0, 2.0]
        assert {k["event"]["index"] for k in doc["knots"]} == {1, 2}
        assert all(k["event"]["type"] == "join" for k in doc["knots"])
        assert doc["terminal_lambda"] == 0.0

    def test_reingest_passes_check(self, capsys, tmp_path):
        X, y = generate("duplicated", 8, 10, 6)
        inst = tmp_path / "inst.json"
        inst.write_text(dumps({"X": X, "y": y}))
        code, doc, _ = run(capsys, "path", "--instance", inst)
        assert code == 0
        path = path_from_document(doc)
        direct = lars_path(X, y)
        rng = np.random.default_rng(0)
        for lam in rng.uniform(0.01, 1.0, 20) * doc["knots"][0]["lambda"]:
            beta = solution_at(path, lam)
            np.testing.assert_array_equal(beta, solution_at(direct, lam))
            bfile = tmp_path / "beta.json"
            bfile.write_text(dumps(beta))
            code, rep, _ = run(capsys, "check", "--instance", inst, "--lambda", lam,
                               "--beta", bfile)
            assert code == 0 and rep["passed"]

    def test_lambda_min(self, capsys, fixture_file):
        code, doc, _ = run(capsys, "path", "--instance", fixture_file, "--lambda-min", 0.5)
        assert code == 0 and doc["terminal_lambda"] == 0.5


class TestBounds:
    def test_fixture(self, capsys, fixture_file):
        code, doc, _ = run(capsys, "bounds", "--instance", fixture_file, "--lambda", 0.5)
        assert code == 0
        assert doc["E"] == [1, 2] and doc["s"] == [1, 1]
        assert doc["l1_norm"] == pytest.approx(1.5)
        for i, row in enumerate(doc["rows"], start=1):
            assert row["i"] == i and row["class"] == "dispensable"
            assert row["lower"] == pytest.approx(0.0, abs=1e-9)
            assert row["lars"] == pytest.approx(0.75)
            assert row["upper"] == pytest.approx(1.5)

    def test_table_layout(self, capsys, averaged_file):
        code, doc, _ = run(capsys, "bounds", "--instance", averaged_file)
        assert code == 0
        assert doc["E"] == [1, 2, 3, 4] and doc["s"] == [-1, 1, 1, 1]
        assert [r["class"] for r in doc["rows"]] == ["indispensable"] * 2 + ["dispensable"] * 2

    def test_missing_lambda(self, capsys, fixture_file):
        code, _, err = run(capsys, "bounds", "--instance", fixture_file)
        assert code == 1 and "lambda" in json.loads(err)["message"]


class TestEnumerate:
    def test_fixture(self, capsys, fixture_file):
        code, doc, _ = run(capsys, "enumerate", "--instance", fixture_file, "--lambda", 0.5)
        assert code == 0
        assert doc["active_sets"] == [[1], [2], [1, 2]]
        assert doc["subspace_equivalent"] is True

    def test_cap(self, capsys, averaged_file):
        code, _, err = run(capsys, "enumerate", "--instance", averaged_file, "--cap", 2)
        assert code == 2 and json.loads(err)["error"] == "CapabilityError"


class TestCheck:
    def test_zero_above_lambda_max(self, capsys, fixture_file, tmp_path):
        beta = tmp_path / "b.csv"
        beta.write_text("0\n0\n")
        code, doc, _ = run(capsys, "check", "--instance", fixture_file, "--lambda", 10,
                           "--beta", beta)
        assert code == 0 and doc["passed"]

    def test_failure_exit(self, capsys, fixture_file, tmp_path):
        beta = tmp_path / "b.csv"
        beta.write_text("1\n0\n")
        code, doc, _ = run(capsys, "check", "--instance", fixture_file, "--lambda", 0.5,
                           "--beta", beta)
        assert code == 3 and not doc["passed"]

    def test_length_mismatch(self, capsys, fixture_file, tmp_path):
        beta = tmp_path / "b.csv"
        beta.write_text("1\n")
        code, _, _ = run(capsys, "check", "--instance", fixture_file, "--lambda", 0.5,
                         "--beta", beta)
        assert code == 1


class TestSolve:
    def test_methods(self, capsys, fixture_file):
        code, doc, _ = run(capsys, "solve", "--instance", fixture_file, "--lambda", 0.5)
        assert code == 0 and sum(doc["solution"]) == pytest.approx(1.5)
        code, doc, _ = run(capsys, "solve", "--instance", fixture_file, "--lambda", 0.5,
                           "--method", "en", "--lambda2", 1e-8)
        assert code == 0
        np.testing.assert_allclose(doc["solution"], [0.75, 0.75], atol=1e-4)

    def test_proxgrad_needs_loss(self, capsys, fixture_file):
        code, _, _ = run(capsys, "solve", "--instance", fixture_file, "--lambda", 0.5,
                         "--method", "proxgrad")
        assert code == 1

    def test_response_range(self, capsys, fixture_file):
        args = ["solve", "--instance", fixture_file, "--lambda", 0.5, "--method", "proxgrad",
                "--loss", "logistic"]
        assert run(capsys, *args)[0] == 1
        # y = 2 makes the logistic objective unbounded below
        assert run(capsys, *args, "--allow-any-response")[0] == 2

    def test_allow_any_response(self, capsys, tmp_path):
        inst = tmp_path / "inst.json"
        inst.write_text('{"X": [[1, 1]], "y": [1.2], "lambda": 0.5}')
        code, doc, _ = run(capsys, "solve", "--instance", inst, "--method", "proxgrad",
                           "--loss", "logistic", "--allow-any-response")
        assert code == 0
        u = sum(doc["solution"])
        assert 1 / (1 + np.exp(-u)) == pytest.approx(0.7, abs=1e-9)

    def test_lambda_zero_is_numerical_failure(self, capsys, fixture_file):
        code, _, err = run(capsys, "solve", "--instance", fixture_file, "--lambda", 0)
        assert code == 2 and "UnsupportedError" in err


class TestInputErrors:
    def test_csv_line_number(self, capsys, tmp_path):
        x = tmp_path / "x.csv"
        x.write_text("1,2\n3,oops\n")
        y = tmp_path / "y.csv"
        y.write_text("1\n2\n")
        code, _, err = run(capsys, "path", "--x", x, "--y", y)
        assert code == 1 and f"{x}:2" in json.loads(err)["message"]

    def test_ragged_csv(self, capsys, tmp_path):
        x = tmp_path / "x.csv"
        x.write_text("1,2\n3\n")
        y = tmp_path / "y.csv"
        y.write_text("1\n2\n")
        code, _, err = run(capsys, "path", "--x", x, "--y", y)
        assert code == 1 and f"{x}:2" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "path", "--instance", tmp_path / "nope.json")
        assert code == 1 and "nope.json" in err

    def test_malformed_json(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"X": [[1, 2]],\n "y": [1,}')
        code, _, err = run(capsys, "path", "--instance", bad)
        assert code == 1 and f"{bad}:2" in err

    def test_csv_instance(self, capsys, tmp_path):
        x = tmp_path / "x.csv"
        x.write_text("1,1\n")
        y = tmp_path / "y.csv"
        y.write_text("2\n")
        code, doc, _ = run(capsys, "bounds", "--x", x, "--y", y, "--lambda", 0.5)
        assert code == 0 and doc["rows"][0]["upper"] == pytest.approx(1.5)

    def test_no_instance(self, capsys):
        assert run(capsys, "path")[0] == 1

    def test_no_command(self, capsys):
        assert run(capsys)[0] == 1
