import json
import subprocess
import sys

import pytest

from attackpath import CATALOG_ENV_VAR, builtin_catalog, catalog_to_json
from attackpath.cli import EXIT_INVALID_GRAPH, EXIT_NO_PATH, EXIT_OK, EXIT_USAGE, run

from conftest import FIXTURES, GOLDEN


def fx(name):
    return str(FIXTURES / name)


ANALYZE_FIG4A = [
    "analyze",
    "--graph",
    fx("fig4a.json"),
    "--attacker",
    "attacker",
    "--target",
    "car_agent",
]


def test_validate_ok(capsys):
    assert run(["validate", "--graph", fx("fig4a.json")]) == EXIT_OK
    assert capsys.readouterr().out == "OK\n"


def test_validate_broken_graph(capsys):
    assert run(["validate", "--graph", fx("broken.json")]) == EXIT_INVALID_GRAPH
    out = capsys.readouterr().out
    assert "EDGE_ENDPOINT_KIND" in out


def test_validate_json_format(capsys):
    assert run(["validate", "--graph", fx("broken.json"), "--format", "json"]) == EXIT_INVALID_GRAPH
    doc = json.loads(capsys.readouterr().out)
    assert [v["code"] for v in doc["violations"]] == ["EDGE_ENDPOINT_KIND"]


def test_validate_missing_file(capsys):
    assert run(["validate", "--graph", "/nonexistent/graph.json"]) == EXIT_INVALID_GRAPH
    assert "graph error" in capsys.readouterr().err


def test_validate_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert run(["validate", "--graph", str(bad)]) == EXIT_INVALID_GRAPH
    assert "graph error" in capsys.readouterr().err


def test_analyze_text(capsys):
    assert run(ANALYZE_FIG4A) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("plan 1 (cost 3, 2 steps)\n")
    assert "1. attacker -communicate-> car_agent (push cost 1)" in out
    assert "total cost 3 = push 2 + activation 0 + consumption 1" in out
    assert out.count("plan ") == 3


def test_analyze_no_path_exits_1(capsys):
    assert run(ANALYZE_FIG4A + ["--max-cost", "2"]) == EXIT_NO_PATH
    assert capsys.readouterr().out == "no attack path found\n"


def test_analyze_rejects_invalid_graph(capsys):
    argv = list(ANALYZE_FIG4A)
    argv[2] = fx("broken.json")
    assert run(argv) == EXIT_INVALID_GRAPH
    assert "graph error" in capsys.readouterr().err


def test_analyze_bad_request_exits_3(capsys):
    argv = list(ANALYZE_FIG4A)
    argv[6] = "attacker"  # target == attacker
    assert run(argv) == EXIT_USAGE
    assert "request error" in capsys.readouterr().err


def test_bad_flags_exit_3(capsys):
    assert run(["analyze", "--graph", fx("fig4a.json")]) == EXIT_USAGE
    assert run(["frobnicate"]) == EXIT_USAGE
    assert run([]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "usage error" in err


def test_analyze_writes_output_file(tmp_path, capsys):
    out_file = tmp_path / "report.json"
    assert run(ANALYZE_FIG4A + ["--format", "json", "--output", str(out_file)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    doc = json.loads(out_file.read_text(encoding="utf-8"))
    assert doc["plan_count"] == 3


def test_analyze_dot_without_plans_is_plain(capsys):
    assert run(ANALYZE_FIG4A + ["--format", "dot", "--max-cost", "2"]) == EXIT_NO_PATH
    out = capsys.readouterr().out
    assert out.startswith("digraph attackpath {")
    assert "color=red" not in out


def test_catalog_lists_builtin(capsys):
    assert run(["catalog"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert [c["severity_rank"] for c in doc] == list(range(1, 8))
    assert doc[0]["id"] == "life-and-bodily-health"


def test_catalog_env_override(tmp_path, monkeypatch, capsys):
    categories = json.loads(catalog_to_json(builtin_catalog()))
    categories[0]["name"] = "Renamed category"
    path = tmp_path / "catalog.json"
    path.write_text(json.dumps(categories), encoding="utf-8")
    monkeypatch.setenv(CATALOG_ENV_VAR, str(path))
    assert run(["catalog"]) == EXIT_OK
    assert "Renamed category" in capsys.readouterr().out


def test_catalog_env_override_bad_file(tmp_path, monkeypatch, capsys):
    path = tmp_path / "catalog.json"
    path.write_text("[]", encoding="utf-8")
    monkeypatch.setenv(CATALOG_ENV_VAR, str(path))
    assert run(["catalog"]) == EXIT_INVALID_GRAPH
    assert "graph error" in capsys.readouterr().err


@pytest.mark.parametrize("fmt", ["text", "json", "dot"])
def test_analyze_output_is_byte_deterministic(fmt, capsys):
    runs = []
    for _ in range(2):
        assert run(ANALYZE_FIG4A + ["--format", fmt]) == EXIT_OK
        runs.append(capsys.readouterr().out)
    assert runs[0] == runs[1]


@pytest.mark.parametrize(
    "golden, extra",
    [
        ("fig4a_report.json", ["--format", "json"]),
        ("fig4a_plans.txt", ["--format", "text"]),
        ("fig4a_best.dot", ["--format", "dot"]),
    ],
)
def test_golden_outputs(golden, extra, tmp_path):
    out_file = tmp_path / golden
    assert run(ANALYZE_FIG4A + extra + ["--output", str(out_file)]) == EXIT_OK
    assert out_file.read_bytes() == (GOLDEN / golden).read_bytes()


def test_golden_nowatch_report(tmp_path):
    out_file = tmp_path / "report.json"
    argv = [
        "analyze",
        "--graph",
        fx("fig4a_nowatch.json"),
        "--attacker",
        "attacker",
        "--target",
        "car_agent",
        "--format",
        "json",
        "--output",
        str(out_file),
    ]
    assert run(argv) == EXIT_OK
    assert out_file.read_bytes() == (GOLDEN / "fig4a_nowatch_report.json").read_bytes()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "attackpath.cli", "validate", "--graph", fx("fig4a.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == EXIT_OK
    assert proc.stdout == "OK\n"
