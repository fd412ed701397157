import json
import time

import pytest

from nontidy import cli, pipeline
from nontidy.pipeline import PipelineConfig, emit_report, parse_report, run_pipeline
from nontidy.simplicial import ComplexBuildError, parse_text


@pytest.fixture(scope="module")
def report2():
    return run_pipeline(PipelineConfig(2, mode="full"))


def test_full_dim2(report2):
    r = report2
    assert r.cohomology["height"] == 2
    assert r.group["odd_involution"] is None
    assert r.group["coindex_witness"] == [0, 1]
    assert r.conclusion == "non-tidy: h = 2, coind = 1"
    assert r.exit_status == 0


def test_group_only_dim5():
    r = run_pipeline(PipelineConfig(5, mode="group-only"))
    assert r.group["torsion_verdict"] == "torsion-free"
    assert r.group["odd_involution"] is None
    assert r.group["coindex_witness"] == [0, 0, 0, 0, 1]
    assert r.cohomology is None
    assert r.exit_status == 0


def test_default_mode():
    assert PipelineConfig(3).mode == "full"
    assert PipelineConfig(4).mode == "group-only"


@pytest.mark.parametrize("bad", [0, -1])
def test_rejects_dim(bad):
    with pytest.raises(ValueError):
        PipelineConfig(bad)


def test_rejects_mode():
    with pytest.raises(ValueError):
        PipelineConfig(2, mode="everything")


def test_group_only_is_fast():
    t = time.perf_counter()
    for n in range(1, 9):
        run_pipeline(PipelineConfig(n, mode="group-only"))
    assert time.perf_counter() - t < 1.0


def test_json_dim1():
    r = run_pipeline(PipelineConfig(1))
    d = json.loads(emit_report(r, "json"))
    assert d["cohomology"]["height"] == 1
    assert '"height": 1' in emit_report(r, "json").decode()


def test_markdown_contains_conclusion(report2):
    md = emit_report(report2, "markdown").decode()
    assert report2.conclusion in md


def test_round_trip(report2):
    data = emit_report(report2, "json")
    assert emit_report(parse_report(data), "json") == data


def test_determinism():
    a = emit_report(run_pipeline(PipelineConfig(3)), "json")
    b = emit_report(run_pipeline(PipelineConfig(3)), "json")
    assert a == b


def test_key_order(report2):
    keys = list(json.loads(emit_report(report2, "json")))
    assert keys == ["dim", "mode", "resolution", "group", "cohomology", "conclusion", "exit_status", "failures"]


def test_unknown_format(report2):
    with pytest.raises(ValueError):
        emit_report(report2, "yaml")


def test_failed_height_is_reported(monkeypatch):
    class Fake:
        height, pairing, betti = 1, 0, [1, 2, 1]
        powers = [(1, False), (2, True), (3, True)]

        def as_dict(self):
            return {"height": 1, "betti": self.betti, "powers": [], "pairing": 0}

    monkeypatch.setattr(pipeline, "sw_height", lambda m: Fake())
    r = run_pipeline(PipelineConfig(2))
    assert r.exit_status == 1
    assert "non-tidy" not in r.conclusion
    assert any("height" in f for f in r.failures)


class TestCli:
    def test_verify_stdout(self, capsys):
        assert cli.main(["verify", "--dim", "2"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["conclusion"] == "non-tidy: h = 2, coind = 1"

    def test_verify_out_markdown(self, tmp_path):
        out = tmp_path / "r.md"
        assert cli.main(["verify", "--dim", "1", "--format", "markdown", "--out", str(out)]) == 0
        assert "**Conclusion:**" in out.read_text()

    def test_torsion(self, capsys):
        assert cli.main(["torsion", "--dim", "3"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["verdict"] == "torsion-free" and len(d["patterns"]) == 4

    def test_involution(self, capsys):
        assert cli.main(["involution", "--dim", "6"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["odd_involution"] is None and d["coindex"] == 1

    def test_cohomology(self, capsys):
        assert cli.main(["cohomology", "--dim", "2", "--resolution", "1/8"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["betti"] == [1, 2, 1] and d["height"] == 2

    def test_export(self, tmp_path, capsys):
        out = tmp_path / "k.txt"
        assert cli.main(["export-complex", "--dim", "2", "--out", str(out)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["euler"] == 0
        simplices, holonomy = parse_text(out.read_text())
        assert [len(s) for s in simplices] == summary["cells_per_dim"]

    def test_dim_zero_rejected(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["verify", "--dim", "0"])
        assert exc.value.code != 0

    def test_build_failure_exit(self, monkeypatch, capsys, caplog):
        def boom(*a, **k):
            raise ComplexBuildError("regularity cap")

        monkeypatch.setattr(pipeline, "build_quotient_model", boom)
        assert cli.main(["verify", "--dim", "2"]) == 2
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "regularity cap" in caplog.text
