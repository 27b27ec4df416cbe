import json

import pytest
from click.testing import CliRunner

from combodose.cli import main
from combodose.reference import MAIN_TABLE


@pytest.fixture
def runner():
    return CliRunner()


def _write_scenario(path, name="sc01"):
    obj = {
        "name": name,
        "J": 5,
        "K": 3,
        "rates": [
            [0.05, 0.10, 0.15, 0.30, 0.45],
            [0.10, 0.15, 0.30, 0.45, 0.55],
            [0.15, 0.30, 0.45, 0.55, 0.65],
        ],
    }
    path.write_text(json.dumps(obj))


def _write_config(path, scenario_path, designs=({"id": "cboin"},), reps=2):
    obj = {
        "phi": 0.3,
        "max_n": 12,
        "cohort_size": 3,
        "reps": reps,
        "seed": 1,
        "designs": list(designs),
        "scenarios": [str(scenario_path)],
    }
    path.write_text(json.dumps(obj))


def test_simulate_minimal(tmp_path, runner):
    sc = tmp_path / "sc01.json"
    cfg = tmp_path / "cfg.json"
    out = tmp_path / "out.csv"
    _write_scenario(sc)
    _write_config(cfg, sc, reps=1)
    result = runner.invoke(main, ["simulate", "--config", str(cfg), "--out", str(out)])
    assert result.exit_code == 0, result.output
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("design,scenario,S_C")
    assert len(lines) == 2
    assert lines[1].startswith("cboin,sc01,")


def test_simulate_seed_default_is_zero(tmp_path, runner):
    sc = tmp_path / "sc01.json"
    _write_scenario(sc)
    cfg = tmp_path / "cfg.json"
    obj = {"designs": [{"id": "cboin"}], "scenarios": [str(sc)], "reps": 1, "max_n": 6}
    cfg.write_text(json.dumps(obj))
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    r1 = runner.invoke(main, ["simulate", "--config", str(cfg), "--out", str(out1)])
    r2 = runner.invoke(main, ["simulate", "--config", str(cfg), "--out", str(out2), "--seed", "0"])
    assert r1.exit_code == 0 and r2.exit_code == 0
    assert out1.read_text() == out2.read_text()


def test_simulate_unknown_design_lists_valid_ids(tmp_path, runner):
    sc = tmp_path / "sc01.json"
    cfg = tmp_path / "cfg.json"
    _write_scenario(sc)
    _write_config(cfg, sc, designs=({"id": "nope"},))
    result = runner.invoke(main, ["simulate", "--config", str(cfg), "--out", str(tmp_path / "o.csv")])
    assert result.exit_code == 2
    assert "nope" in result.output and "cboin" in result.output


def test_simulate_malformed_config(tmp_path, runner):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    result = runner.invoke(main, ["simulate", "--config", str(cfg), "--out", str(tmp_path / "o.csv")])
    assert result.exit_code == 2
    assert "line" in result.output


def test_decide_empty_history(tmp_path, runner):
    hist = tmp_path / "h.json"
    hist.write_text(json.dumps({
        "design": "cboin",
        "grid": {"J": 5, "K": 3},
        "study": {"phi": 0.3, "max_n": 60, "cohort_size": 3},
        "seed": 0,
        "log": [],
    }))
    result = runner.invoke(main, ["decide", "--history", str(hist)])
    assert result.exit_code == 0, result.output
    out = json.loads(result.output)
    assert out["decision"]["action"] == "assign"
    assert out["decision"]["dose"] == {"j": 1, "k": 1}


def test_decide_direction_matches_boundary_rule(tmp_path, runner):
    hist = tmp_path / "h.json"
    hist.write_text(json.dumps({
        "design": "cboin",
        "grid": {"J": 5, "K": 3},
        "study": {"phi": 0.3, "max_n": 60, "cohort_size": 3},
        "seed": 0,
        "log": [{"dose": {"j": 1, "k": 1}, "patients": 3, "dlts": 3}],
    }))
    result = runner.invoke(main, ["decide", "--history", str(hist)])
    out = json.loads(result.output)
    # 3/3 crosses the de-escalation boundary; at (1,1) the design stays
    assert out["decision"]["dose"] == {"j": 1, "k": 1}
    assert out["decision"]["reason"] == "stay-at-bottom"


def test_decide_malformed_history(tmp_path, runner):
    hist = tmp_path / "h.json"
    hist.write_text("{oops")
    result = runner.invoke(main, ["decide", "--history", str(hist)])
    assert result.exit_code == 2


def test_boundary_table_row(runner):
    result = runner.invoke(main, ["boundary-table", "--phi", "0.3", "--max-n", "5"])
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[3] == "3,0,2"
    again = runner.invoke(main, ["boundary-table", "--phi", "0.3", "--max-n", "5"])
    assert again.output == result.output


def test_report_zero_deltas_when_results_match_reference(tmp_path, runner):
    rows = ["design,scenario,S_C,S_OT,A_C,A_OT,reps,mean_n"]
    for i in range(1, 11):
        m = MAIN_TABLE["cboin"]
        rows.append(f"cboin,sc{i:02d},{m['S_C'][i-1]},{m['S_OT'][i-1]},{m['A_C'][i-1]},{m['A_OT'][i-1]},2000,59.0")
    res_path = tmp_path / "res.csv"
    res_path.write_text("\n".join(rows) + "\n")
    result = runner.invoke(main, ["report", "--results", str(res_path), "--format", "csv"])
    assert result.exit_code == 0, result.output
    body = [l for l in result.output.splitlines() if l.startswith("cboin")]
    assert len(body) == 40
    assert all(",+0.0000," in line for line in body)
    assert all(line.endswith(",1") for line in body)  # within band


def test_report_known_delta(tmp_path, runner):
    res_path = tmp_path / "res.csv"
    res_path.write_text(
        "design,scenario,S_C,S_OT,A_C,A_OT,reps,mean_n\n"
        "cboin,sc01,0.68,0.16,0.43,0.20,2000,59.0\n"
    )
    result = runner.invoke(main, ["report", "--results", str(res_path), "--format", "csv"])
    line = [l for l in result.output.splitlines() if l.startswith("cboin,1,S_C")][0]
    assert ",-0.0200," in line  # 0.68 against the stored 0.70


def test_report_unknown_scenario_warns(tmp_path, runner):
    res_path = tmp_path / "res.csv"
    res_path.write_text(
        "design,scenario,S_C,S_OT,A_C,A_OT,reps,mean_n\n"
        "cboin,custom,0.5,0.1,0.3,0.2,10,59.0\n"
    )
    result = runner.invoke(main, ["report", "--results", str(res_path), "--format", "markdown"])
    assert result.exit_code == 0
    assert "warning" in result.output


def test_designs_command(runner):
    result = runner.invoke(main, ["designs"])
    assert result.exit_code == 0
    listed = result.output.split()
    assert "cboin" in listed and "pocrm" in listed and len(listed) == 9
