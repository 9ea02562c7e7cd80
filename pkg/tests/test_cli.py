import json
import re

import pytest

from supplyscope.cli import build_parser, main

from conftest import DEMO, SCORECARDS

REPO = "https://github.com/example-org/examplelib"
WHEN = "2025-05-01T00:00:00Z"


def assess(out, *extra):
    return main(["assess", "--name", "examplelib", "--repo-url", REPO, "--config", str(DEMO / "config.json"),
                 "--offline", "--assessed-at", WHEN, "--out", str(out), *extra])


def test_assess_happy_path(tmp_path, capsys):
    assert assess(tmp_path) == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["examplelib-2025-05-01-report.json", "examplelib-2025-05-01-report.md"]
    assert "trust: 14/25" in capsys.readouterr().out


def test_assess_empty_fixture_set_degraded(tmp_path):
    code = main(["assess", "--name", "nothing", "--repo-url", "https://github.com/x/nothing", "--offline",
                 "--assessed-at", WHEN, "--out", str(tmp_path)])
    assert code == 2
    report = json.loads((tmp_path / "nothing-2025-05-01-report.json").read_text())
    assert report["trust_sum"] == 5


def test_missing_required_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["assess", "--name", "x"])
    assert exc.value.code == 1
    assert "usage:" in capsys.readouterr().err


def test_invalid_repo_url(tmp_path, capsys):
    assert main(["assess", "--name", "x", "--repo-url", "not a url", "--out", str(tmp_path)]) == 1
    assert "absolute URL" in capsys.readouterr().err


def test_bad_config(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"max_loop_depth": 3, "colour": "blue"}')
    assert main(["assess", "--name", "x", "--repo-url", REPO, "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert "unknown config keys" in capsys.readouterr().err


def test_offline_forbids_http_provider(tmp_path, capsys):
    code = main(["assess", "--name", "x", "--repo-url", REPO, "--provider", "http",
                 "--endpoint", "https://llm.example", "--offline", "--out", str(tmp_path)])
    assert code == 1
    assert "offline" in capsys.readouterr().err


def test_missing_evidence_dir(tmp_path):
    assert assess(tmp_path, "--evidence", str(tmp_path / "nope")) == 1


def test_redacted_assess(tmp_path):
    assert assess(tmp_path, "--redact", "disclosure-hold") == 0
    text = (tmp_path / "examplelib-2025-05-01-report.json").read_text()
    assert "withheld under responsible disclosure hold" in text


def test_benchmark_prints_alignment(tmp_path, capsys):
    assert assess(tmp_path) == 0
    capsys.readouterr()
    code = main(["benchmark", "--report", str(tmp_path / "examplelib-2025-05-01-report.json"),
                 "--scorecard", str(SCORECARDS / "examplelib.json"), "--offline"])
    out = capsys.readouterr().out
    assert code == 0
    assert "alignment: 88.2" in out and "matched: 15/17" in out
    assert re.search(r"novelty yield: \d+", out)
    assert (tmp_path / "examplelib-2025-05-01-benchmark.json").exists()


def test_benchmark_malformed_scorecard(tmp_path, capsys):
    assess(tmp_path)
    code = main(["benchmark", "--report", str(tmp_path / "examplelib-2025-05-01-report.json"),
                 "--scorecard", str(SCORECARDS / "malformed-no-checks.json")])
    assert code == 1
    assert "checks: field missing" in capsys.readouterr().err


def test_benchmark_zero_row_report(tmp_path, capsys):
    assess(tmp_path)
    path = tmp_path / "examplelib-2025-05-01-report.json"
    data = json.loads(path.read_text())
    for s in data["sections"]:
        s["rows"] = []
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps(data))
    capsys.readouterr()
    assert main(["benchmark", "--report", str(empty), "--scorecard", str(SCORECARDS / "jax.json"),
                 "--out", str(tmp_path / "b")]) == 0
    out = capsys.readouterr().out
    assert "alignment: 0.0" in out and "novelty yield: 0" in out


def test_run_scorecard_without_executable(tmp_path, capsys, monkeypatch):
    assess(tmp_path)
    monkeypatch.setenv("PATH", str(tmp_path))
    code = main(["benchmark", "--report", str(tmp_path / "examplelib-2025-05-01-report.json"), "--run-scorecard"])
    assert code == 1
    err = capsys.readouterr().err
    assert "not found on PATH" in err and "--scorecard" in err


def test_leaderboard_flow(tmp_path, capsys, monkeypatch):
    assess(tmp_path / "out")
    report = tmp_path / "out" / "examplelib-2025-05-01-report.json"
    main(["benchmark", "--report", str(report), "--scorecard", str(SCORECARDS / "examplelib.json")])
    monkeypatch.setenv("SUPPLYSCOPE_STORE", str(tmp_path / "lb" / "store.jsonl"))
    bench = tmp_path / "out" / "examplelib-2025-05-01-benchmark.json"
    assert main(["leaderboard", "add", "--report", str(report), "--benchmark", str(bench),
                 "--created-at", WHEN]) == 0
    assert main(["leaderboard", "add", "--report", str(report), "--created-at", WHEN]) == 0
    assert main(["leaderboard", "render", "--out", str(tmp_path / "site")]) == 0
    html = (tmp_path / "site" / "index.html").read_text()
    assert "examplelib" in html and 'href="../out/examplelib-2025-05-01-report.json"' in html
    assert main(["leaderboard", "render", "--out", str(tmp_path / "site1"), "--snapshot", "1"]) == 0
    assert "88.2" in (tmp_path / "site1" / "index.html").read_text()
    capsys.readouterr()
    assert main(["leaderboard", "diff", "1", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["deltas"]["examplelib"]["Trust"] == 0
    assert main(["leaderboard", "diff", "2", "2"]) == 1


def test_leaderboard_errors(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("SUPPLYSCOPE_STORE", raising=False)
    assert main(["leaderboard", "render", "--out", str(tmp_path)]) == 1
    assert "SUPPLYSCOPE_STORE" in capsys.readouterr().err
    assert main(["leaderboard", "render", "--store", str(tmp_path / "s.jsonl"), "--out", str(tmp_path)]) == 1
    assert "no snapshots" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        main(["leaderboard", "frobnicate"])
    assert exc.value.code == 1


def test_replay_identical_and_drift(tmp_path, capsys):
    assess(tmp_path)
    report = tmp_path / "examplelib-2025-05-01-report.json"
    assert main(["replay", "--report", str(report), "--config", str(DEMO / "config.json")]) == 0
    assert "identical" in capsys.readouterr().out
    data = json.loads(report.read_text())
    data["trust_sum"] = 25
    report.write_text(json.dumps(data, indent=2) + "\n")
    assert main(["replay", "--report", str(report), "--config", str(DEMO / "config.json")]) == 1


def test_cache_dir_flag(tmp_path):
    assert assess(tmp_path / "out", "--cache-dir", str(tmp_path / "cache")) == 0
    assert any((tmp_path / "cache").rglob("*.json"))


def test_help_deterministic(monkeypatch):
    texts = []
    for cols in ("40", "200"):
        monkeypatch.setenv("COLUMNS", cols)
        texts.append(build_parser().format_help())
    assert texts[0] == texts[1]
    for cmd in ("assess", "benchmark", "leaderboard", "replay"):
        assert cmd in texts[0]


@pytest.mark.parametrize("argv", [["assess"], ["benchmark"], ["leaderboard", "add"], ["leaderboard", "render"],
                                  ["leaderboard", "diff"], ["replay"]])
def test_all_commands_accept_offline_and_cache_dir(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv + ["--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    assert "--offline" in text and "--cache-dir" in text
