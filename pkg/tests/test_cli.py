from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

from topicmesh.cli import main

DATA = Path(__file__).resolve().parent / "data"
SQA = str(DATA / "sample_sqa.csv")
QT = str(DATA / "sample_qt.csv")


def _build_model(tmp_path: Path) -> Path:
    out = tmp_path / "model.json"
    assert main(["build", SQA, QT, "--out", str(out)]) == 0
    return out


def test_build_reports_counts(tmp_path, capsys):
    out = _build_model(tmp_path)
    captured = capsys.readouterr()
    assert "6 vertices, 11 hyperedges, 0 zero-coverage sets" in captured.err
    payload = json.loads(out.read_text())
    assert len(payload["edges"]) == 11


def test_build_missing_file_exits_2(tmp_path, capsys):
    code = main(["build", SQA, str(tmp_path / "nope.csv"), "--out", str(tmp_path / "m.json")])
    assert code == 2


def test_build_untagged_question_exits_2(tmp_path, capsys):
    bad = tmp_path / "sqa.csv"
    bad.write_text("student_id,question_id,score\nS1,Q99,1\n")
    assert main(["build", str(bad), QT, "--out", str(tmp_path / "m.json")]) == 2
    assert "untagged question" in capsys.readouterr().err


def test_build_empty_sqa_ok(tmp_path, capsys):
    empty = tmp_path / "sqa.csv"
    empty.write_text("student_id,question_id,score\n")
    out = tmp_path / "m.json"
    assert main(["build", str(empty), QT, "--out", str(out)]) == 0
    captured = capsys.readouterr()
    assert "0 hyperedges" in captured.err
    payload = json.loads(out.read_text())
    assert payload["edges"] == []
    assert len(payload["diagnostics"]["zero_coverage_topic_sets"]) == 11


def test_view_strip_report_matches_level_table(tmp_path):
    model = _build_model(tmp_path)
    report_path = tmp_path / "report.json"
    code = main(
        [
            "view",
            str(model),
            "--topics",
            "T1",
            "--mode",
            "accumulative",
            "--level",
            "2",
            "--strip",
            "--out",
            str(tmp_path / "strip.svg"),
            "--report",
            str(report_path),
        ]
    )
    assert code == 0
    report = json.loads(report_path.read_text())
    assert [lv["selected"] for lv in report["levels"]] == [["h1"], ["h4", "h5"]]
    assert (tmp_path / "strip.svg").read_text().count('class="panel"') == 2


def test_view_achievement_filter(tmp_path):
    model = _build_model(tmp_path)
    out = tmp_path / "view.json"
    code = main(
        [
            "view",
            str(model),
            "--achv-max",
            "0.6",
            "--level",
            "3",
            "--mode",
            "cumulative",
            "--format",
            "json",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    report = json.loads(out.read_text())
    level3 = next(lv for lv in report["levels"] if lv["level"] == 3)
    assert level3["selected"] == ["h9"]
    assert level3["greyed"] == ["h8"]


def test_view_defaults_to_full_graph(tmp_path, capsys):
    model = _build_model(tmp_path)
    assert main(["view", str(model)]) == 0
    svg = capsys.readouterr().out
    assert svg.count("data-id=") == 11
    assert 'data-status="greyed"' not in svg


def test_view_dot_format(tmp_path, capsys):
    model = _build_model(tmp_path)
    assert main(["view", str(model), "--format", "dot"]) == 0
    assert "graph topicmesh {" in capsys.readouterr().out


def test_view_invalid_filter_exits_2(tmp_path, capsys):
    model = _build_model(tmp_path)
    assert main(["view", str(model), "--achv-min", "0.9", "--achv-max", "0.1"]) == 2
    assert main(["view", str(model), "--level", "9"]) == 2
    assert main(["view", str(model), "--achv-max", "bogus"]) == 2


def test_view_idempotent_bytes(tmp_path):
    model = _build_model(tmp_path)
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    args = ["view", str(model), "--topics", "T1", "--level", "3"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_build_deterministic_and_order_insensitive(tmp_path):
    out1 = _build_model(tmp_path)
    first = out1.read_bytes()
    out1.unlink()
    _build_model(tmp_path)
    assert out1.read_bytes() == first

    # permuted sqa rows build to identical bytes
    lines = Path(SQA).read_text().strip().split("\n")
    shuffled = [lines[0]] + lines[:0:-1]
    sqa2 = tmp_path / "sqa2.csv"
    sqa2.write_text("\n".join(shuffled) + "\n")
    out2 = tmp_path / "model2.json"
    assert main(["build", str(sqa2), QT, "--out", str(out2)]) == 0
    assert out2.read_bytes() == first


def test_generate_satisfies_constraints(tmp_path, capsys):
    sqa_out = tmp_path / "gen_sqa.csv"
    qt_out = tmp_path / "gen_qt.csv"
    code = main(
        [
            "generate",
            "--seed",
            "1",
            "--students",
            "6",
            "--questions",
            "15",
            "--topics",
            "6",
            "--sqa-out",
            str(sqa_out),
            "--qt-out",
            str(qt_out),
        ]
    )
    assert code == 0
    err = capsys.readouterr().err
    assert "arity 1..4" in err

    from topicmesh.synth import GeneratorProfile, check_constraints, describe_dataset

    report = describe_dataset(sqa_out.read_text(), qt_out.read_text())
    assert check_constraints(report, GeneratorProfile()) == []
    # the generated pair must build cleanly
    model_out = tmp_path / "gen_model.json"
    assert main(["build", str(sqa_out), str(qt_out), "--out", str(model_out)]) == 0


def test_generate_deterministic(tmp_path):
    paths = []
    for tag in ("a", "b"):
        sqa_out = tmp_path / f"sqa_{tag}.csv"
        qt_out = tmp_path / f"qt_{tag}.csv"
        assert (
            main(
                [
                    "generate",
                    "--seed",
                    "7",
                    "--sqa-out",
                    str(sqa_out),
                    "--qt-out",
                    str(qt_out),
                ]
            )
            == 0
        )
        paths.append((sqa_out, qt_out))
    assert paths[0][0].read_bytes() == paths[1][0].read_bytes()
    assert paths[0][1].read_bytes() == paths[1][1].read_bytes()


def test_generate_infeasible_exits_2(tmp_path, capsys):
    code = main(
        [
            "generate",
            "--seed",
            "1",
            "--topics",
            "1",
            "--sqa-out",
            str(tmp_path / "s.csv"),
            "--qt-out",
            str(tmp_path / "q.csv"),
        ]
    )
    assert code == 2
    assert "arity-4" in capsys.readouterr().err


def test_stats_sample_model(tmp_path, capsys):
    model = _build_model(tmp_path)
    assert main(["stats", str(model)]) == 0
    out = capsys.readouterr().out
    assert "level counts: 3/4/2/2/0/0" in out
    assert "coverage total: 76" in out


def test_stats_json_empty_model(tmp_path, capsys):
    empty = tmp_path / "sqa.csv"
    empty.write_text("student_id,question_id,score\n")
    model = tmp_path / "m.json"
    assert main(["build", str(empty), QT, "--out", str(model)]) == 0
    assert main(["stats", str(model), "--format", "json"]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["hyperedges"] == 0
    assert stats["coverage_total"] == 0
    assert stats["achievement_histogram"] == [0] * 10


def test_console_entrypoint_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "topicmesh.cli", "build", SQA, QT],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "11 hyperedges" in proc.stderr
    assert '"edges"' in proc.stdout
