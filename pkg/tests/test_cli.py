import json
import math
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest
from referencing import Registry, Resource

from erwalk.cli import main

SCHEMAS = {
    name: json.loads(resources.files("erwalk").joinpath("schemas", name).read_text())
    for name in ("hitting_report.schema.json", "analyze.schema.json", "simulate.schema.json")
}
REGISTRY = Registry().with_resources((k, Resource.from_contents(v)) for k, v in SCHEMAS.items())


def validate(doc, name):
    jsonschema.Draft202012Validator(SCHEMAS[name], registry=REGISTRY).validate(doc)


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {
        "k2": "n 2\n0 1\n",
        "k3": "n 3\n0 1\n0 2\n1 2\n",
        "path": "n 3\n0 1\n1 2\n",
        "split": "n 4\n0 1\n2 3\n",
        "bad": "n 3\n0 3\n",
    }.items():
        p = tmp_path / f"{name}.txt"
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestGen:
    def test_k3(self, capsys):
        code, out, _ = run(capsys, "gen", "--nodes", "3", "--prob", "1", "--seed", "7")
        assert code == 0 and out == "n 3\n0 1\n0 2\n1 2\n"

    def test_empty(self, capsys):
        assert run(capsys, "gen", "--nodes", "5", "--prob", "0", "--seed", "7")[1] == "n 5\n"

    def test_deterministic(self, capsys):
        argv = ("gen", "--nodes", "60", "--prob", "0.2", "--seed", "3")
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]

    def test_out_file(self, capsys, tmp_path):
        out = tmp_path / "g.txt"
        run(capsys, "gen", "--nodes", "4", "--prob", "1", "--seed", "1", "--out", str(out))
        assert out.read_text().startswith("n 4\n0 1\n")

    @pytest.mark.parametrize(
        "argv",
        [
            ["gen", "--nodes", "3", "--prob", "2", "--seed", "1"],
            ["gen", "--nodes", "0", "--prob", "0.5", "--seed", "1"],
            ["gen", "--nodes", "3", "--prob", "0.5", "--seed", "-4"],
            ["gen", "--prob", "0.5", "--seed", "1"],
            ["nope"],
            [],
        ],
    )
    def test_flag_errors(self, capsys, argv):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
        err = capsys.readouterr().err
        assert len(err.strip().splitlines()) == 1


class TestAnalyze:
    def test_k3(self, capsys):
        code, out, _ = run(capsys, "analyze", "--nodes", "3", "--prob", "1", "--seed", "1", "--target", "0", "--json")
        assert code == 0
        doc = json.loads(out)
        validate(doc, "analyze.schema.json")
        assert doc["report"]["H_target"] == pytest.approx(4 / 3, abs=1e-10)
        assert doc["H_start"] == pytest.approx(4 / 3, abs=1e-10)
        assert doc["gap"] == pytest.approx(0.5, abs=1e-10)
        assert doc["ratio_max_dev"] == pytest.approx(0.0, abs=1e-12)

    def test_path_file(self, capsys, files):
        code, out, _ = run(capsys, "analyze", "--graph", files["path"], "--target", "2", "--json")
        doc = json.loads(out)
        validate(doc, "analyze.schema.json")
        assert doc["report"]["H_target"] == pytest.approx(2.5, abs=1e-10)
        assert doc["report"]["upper"] is None
        assert doc["lambda2_relation"]["p_used"] == pytest.approx(2 / 3)

    def test_all_targets_and_pairs(self, capsys):
        argv = ("analyze", "--nodes", "30", "--prob", "0.4", "--seed", "2", "--all-targets", "--pairs", "5", "--json")
        code, out, _ = run(capsys, *argv)
        doc = json.loads(out)
        validate(doc, "analyze.schema.json")
        assert [r["target"] for r in doc["reports"]] == list(range(30))
        assert len(doc["pairs"]) == 5
        for pr in doc["pairs"]:
            assert pr["i"] != pr["j"]
            assert pr["commute"] == pytest.approx(pr["h_ij"] + pr["h_ji"], rel=1e-10)
            assert pr["lower"] <= pr["commute"] <= pr["upper"]
        assert run(capsys, *argv)[1] == out

    def test_text_output(self, capsys):
        code, out, _ = run(capsys, "analyze", "--nodes", "3", "--prob", "1", "--seed", "1")
        assert code == 0 and "target 0: H = 1.333333333" in out

    def test_disconnected(self, capsys, files):
        code, _, err = run(capsys, "analyze", "--graph", files["split"], "--json")
        assert code == 3 and err.strip() == "graph is disconnected"

    def test_bad_file(self, capsys, files):
        assert run(capsys, "analyze", "--graph", files["bad"])[0] == 2
        assert run(capsys, "analyze", "--graph", files["bad"] + ".missing")[0] == 2

    def test_conflicting_sources(self, capsys, files):
        assert run(capsys, "analyze", "--graph", files["k3"], "--nodes", "3")[0] == 2
        assert run(capsys, "analyze", "--nodes", "3")[0] == 2

    def test_target_range(self, capsys, files):
        assert run(capsys, "analyze", "--graph", files["k3"], "--target", "3")[0] == 2


class TestSimulate:
    def test_k2(self, capsys, files):
        code, out, _ = run(capsys, "simulate", "--graph", files["k2"], "--source", "0", "--target", "1",
                           "--samples", "10", "--seed", "1")
        doc = json.loads(out)
        validate(doc, "simulate.schema.json")
        assert (doc["mean"], doc["std_error"], doc["z_score"]) == (1.0, 0.0, 0.0)

    def test_k3(self, capsys, files):
        code, out, _ = run(capsys, "simulate", "--graph", files["k3"], "--source", "0", "--target", "1",
                           "--samples", "100000", "--seed", "42")
        doc = json.loads(out)
        validate(doc, "simulate.schema.json")
        assert doc["h_spectral"] == pytest.approx(2.0, abs=1e-10)
        assert abs(doc["z_score"]) <= 4

    def test_worker_invariance(self, capsys, files):
        base = ("simulate", "--graph", files["path"], "--source", "0", "--target", "2", "--samples", "30000", "--seed", "8")
        one = run(capsys, *base, "--workers", "1")[1]
        three = run(capsys, *base, "--workers", "3")[1]
        assert one == three

    def test_errors(self, capsys, files):
        same = ("simulate", "--graph", files["k3"], "--source", "1", "--target", "1", "--samples", "5", "--seed", "1")
        assert run(capsys, *same)[0] == 2
        split = ("simulate", "--graph", files["split"], "--source", "0", "--target", "1", "--samples", "5", "--seed", "1")
        assert run(capsys, *split)[0] == 3


class TestSweep:
    def test_rows(self, capsys, tmp_path):
        out = tmp_path / "s.csv"
        code, _, err = run(capsys, "sweep", "--n-grid", "100,200", "--p-rule", "polylog:2", "--replicates", "2",
                           "--seed", "1", "--out", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 5
        assert len(err.strip().splitlines()) == 4

    def test_threshold_rule(self, capsys, tmp_path):
        out = tmp_path / "s.csv"
        # the n = 10000 value is checked on PRule itself; a connected n = 10000 row
        # would need a dense 10^4 x 10^4 eigensolve
        run(capsys, "sweep", "--n-grid", "200", "--p-rule", "threshold:1.5", "--replicates", "1",
            "--seed", "1", "--out", str(out))
        header, row = out.read_text().splitlines()
        p = float(row.split(",")[header.split(",").index("p")])
        assert p == 1.5 * math.log(200) / 200

    def test_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ("sweep", "--n-grid", "20,30", "--p-rule", "constant:0.3", "--replicates", "2", "--seed", "5")
        run(capsys, *args, "--out", str(a))
        run(capsys, *args, "--out", str(b), "--workers", "2")
        assert a.read_bytes() == b.read_bytes()

    @pytest.mark.parametrize("grid, rule", [("100,50", "polylog:2"), ("x", "polylog:2"), ("10", "cubic:2")])
    def test_flag_errors(self, grid, rule, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["sweep", "--n-grid", grid, "--p-rule", rule, "--replicates", "1", "--seed", "1",
                  "--out", str(tmp_path / "x.csv")])
        assert exc.value.code == 2


def test_console_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "erwalk", "analyze", "--graph", files["path"], "--target", "2", "--json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["report"]["H_target"] == pytest.approx(2.5)
    proc = subprocess.run([sys.executable, "-m", "erwalk", "analyze", "--graph", files["split"]],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 3 and proc.stderr.strip() == "graph is disconnected"
