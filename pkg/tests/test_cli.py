import csv
import json
import subprocess
import sys

import pytest

from agendaframe import __version__, cli
from agendaframe.lexicon import ScoredLexicon, write_lexicons
from agendaframe.synthetic import granger_pair, monthly
from agendaframe.timeseries import write_series


@pytest.fixture
def assign_setup(tmp_path):
    (tmp_path / "docs.jsonl").write_text(
        json.dumps({"id": "a", "date": "2010-01-05", "text": "Tax tax deficit."}) + "\n"
        + json.dumps({"id": "b", "date": "2010-01-06", "text": "Vote."}) + "\n",
        encoding="utf-8",
    )
    lex = [
        ScoredLexicon.from_scores("Economic", [("tax", 1.0), ("deficit", 1.0)], "final"),
        ScoredLexicon.from_scores("Political", [("vote", 1.0)], "final"),
    ]
    write_lexicons(lex, tmp_path / "lex")
    cfg = tmp_path / "run.ini"
    cfg.write_text("[general]\noutput_dir = out\n\n[assign]\ncorpus = docs.jsonl\nlexicons = lex\n", encoding="utf-8")
    return cfg


def read_jsonl(path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def test_unknown_command_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2


def test_assign_three_token_document(assign_setup):
    assert cli.main(["assign", "-c", str(assign_setup)]) == 0
    rows = {r["doc_id"]: r for r in read_jsonl(assign_setup.parent / "out" / "assignments.jsonl")}
    assert rows["a"]["primary"] == "Economic"
    assert rows["b"]["primary"] == "Other"


def test_override_changes_threshold(assign_setup):
    assert cli.main(["assign", "-c", str(assign_setup), "--frame_threshold=1"]) == 0
    rows = {r["doc_id"]: r for r in read_jsonl(assign_setup.parent / "out" / "assignments.jsonl")}
    assert rows["b"]["primary"] == "Political"


def test_section_override_for_other_command_is_ignored(assign_setup):
    assert cli.main(["assign", "-c", str(assign_setup), "--project.dimension=50"]) == 0


def test_missing_required_key_names_it(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[assign]\nlexicons = .\n", encoding="utf-8")
    assert cli.main(["assign", "-c", str(cfg)]) == 1
    assert "'corpus'" in capsys.readouterr().err


@pytest.mark.parametrize("override, key", [
    ("--seed=-1", "seed"),
    ("--frame_threshold=zero", "frame_threshold"),
    ("--dimension=50", "dimension"),
    ("--distinct=maybe", "distinct"),
])
def test_bad_values_exit_1(assign_setup, capsys, override, key):
    assert cli.main(["assign", "-c", str(assign_setup), override]) == 1
    assert f"'{key}'" in capsys.readouterr().err


def test_missing_input_file(assign_setup, capsys):
    assert cli.main(["assign", "-c", str(assign_setup), "--corpus=nope.jsonl"]) == 1
    assert "'corpus'" in capsys.readouterr().err


def test_manifest_fields(assign_setup):
    cli.main(["assign", "-c", str(assign_setup), "--seed=4"])
    out = assign_setup.parent / "out"
    m = json.loads((out / "assign.manifest.json").read_text(encoding="utf-8"))
    assert m["command"] == "assign"
    assert m["version"] == __version__
    assert m["seed"] == 4
    assert m["parameters"]["frame_threshold"] == 3
    assert set(m["outputs"]) == {"assignments.jsonl"}
    assert len(next(iter(m["inputs"].values()))) == 64
    assert "created" in m


def test_granger_on_planted_pair(tmp_path):
    y, x = granger_pair(0)
    write_series({"value": monthly(y)}, tmp_path / "target.csv")
    write_series({"value": monthly(x)}, tmp_path / "pred.csv")
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[granger]\ntarget = target.csv\npredictor = pred.csv\ntransform = none\nlags = 1\n", encoding="utf-8")
    assert cli.main(["granger", "-c", str(cfg)]) == 0
    with open(tmp_path / "out" / "granger.csv", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    beta = [r for r in rows if r["direction"] == "forward" and r["term"] == "beta_1"]
    assert len(beta) == 1
    assert -0.45 <= float(beta[0]["coefficient"]) <= -0.25
    assert float(beta[0]["p_value"]) < 0.05
    assert {r["direction"] for r in rows} == {"forward", "reverse"}


def test_granger_needs_a_target(tmp_path, capsys):
    _, x = granger_pair(0)
    write_series({"value": monthly(x)}, tmp_path / "pred.csv")
    cfg = tmp_path / "run.ini"
    cfg.write_text("[granger]\npredictor = pred.csv\n", encoding="utf-8")
    assert cli.main(["granger", "-c", str(cfg)]) == 1
    assert "'target'" in capsys.readouterr().err


def test_module_entry_point(assign_setup):
    proc = subprocess.run([sys.executable, "-m", "agendaframe", "assign", "-c", str(assign_setup)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip().endswith("assignments.jsonl")


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out
