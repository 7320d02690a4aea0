import json

import pytest

from nearmiss.cli import main


@pytest.fixture
def data(tmp_path):
    path = tmp_path / "d.json"
    assert main(["generate", "--seed", "3", "--pain", "10", "--disgust", "20", "--out", str(path)]) == 0
    return path


@pytest.fixture
def relational(tmp_path):
    path = tmp_path / "r.json"
    assert main(["generate", "--preset", "relational", "--seed", "3", "--pain", "8", "--disgust", "12",
                 "--out", str(path)]) == 0
    return path


def test_unknown_flag_exit_1(capsys):
    assert main(["evaluate", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err


def test_evaluate_writes_report(data, tmp_path):
    out = tmp_path / "out.json"
    csv = tmp_path / "out.csv"
    assert main(["evaluate", "--data", str(data), "--report", str(out), "--csv", str(csv)]) == 0
    report = json.loads(out.read_text())
    assert len(report["cells"]) == 8
    assert csv.read_text().startswith("approach,mode,metric")


def test_learn_writes_theory(data, tmp_path):
    theory = tmp_path / "pain.pl"
    rep = tmp_path / "pain.json"
    assert main(["learn", "--data", str(data), "--class", "pain", "--out", str(theory), "--report", str(rep)]) == 0
    assert theory.read_text().startswith("pain(S) :- ")
    assert json.loads(rep.read_text())["accuracy"] == 1.0


def test_explain_prints_json_and_text(data, capsys):
    assert main(["explain", "--data", str(data), "--target", "pain_001", "--metric", "jaccard",
                 "--mode", "attributes", "--basis", "trace", "--miss", "near"]) == 0
    out = capsys.readouterr().out
    payload, _, text = out.partition("\n}\n")
    result = json.loads(payload + "\n}")
    assert result["result"] == "ok" and result["explanations"]
    assert "pain_001 vs" in text
    assert "shows" in text or "does not show" in text or "no differences found" in text


def test_explain_no_near_misses(relational, capsys):
    assert main(["explain", "--data", str(relational), "--target", "pain_001", "--mode", "relations"]) == 0
    out = capsys.readouterr().out
    assert '"result": "no near misses"' in out
    assert out.rstrip().endswith("no near misses")


def test_explain_unknown_target(data, capsys):
    assert main(["explain", "--data", str(data), "--target", "nobody"]) == 1
    assert "unknown target" in capsys.readouterr().err


def test_bad_dataset(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"classes": ["pain"], "sequences": []}')
    assert main(["learn", "--data", str(bad), "--class", "pain"]) == 1
    assert main(["learn", "--data", str(tmp_path / "missing.json"), "--class", "pain"]) == 1


def test_strict_learner_failure_exit_2(tmp_path):
    d = tmp_path / "d.json"
    d.write_text(json.dumps({
        "classes": ["pain", "disgust"],
        "sequences": [
            {"id": "p1", "label": "pain", "events": [{"e": "e1", "au": 4, "on": 0, "off": 5, "int": "c"}]},
            {"id": "n1", "label": "disgust", "events": [{"e": "e1", "au": 4, "on": 0, "off": 5, "int": "c"}]},
        ],
    }))
    assert main(["learn", "--data", str(d), "--class", "pain", "--strict"]) == 2
    assert main(["learn", "--data", str(d), "--class", "pain"]) == 0


def test_export(data, capsys):
    assert main(["export", "--data", str(data), "--mode", "relations", "--relations", "overlaps,starts"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert all(l.split("(")[0] in {"event", "overlaps", "starts"} for l in lines)


def test_seed_env_override(tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["generate", "--seed", "1", "--out", str(a)])
    monkeypatch.setenv("NEARMISS_SEED", "1")
    main(["generate", "--seed", "99", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
