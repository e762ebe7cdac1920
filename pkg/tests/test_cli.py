import json

import pytest

from ransomgame.cli import load_preset, main


@pytest.fixture
def inst_file(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({
        "n": 6, "ransoms": [400, 80, 80, 80, 80, 80], "data_value": 500,
        "recovery_cost": 0, "decay": "linear", "sale_ratio": 0.7,
    }))
    return str(path)


def test_solve_with_reputation(inst_file, capsys):
    code = main(["solve", "--instance", inst_file,
                 "--reputation", "1,0,0,0,0,0,0"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["policy"]["abort_round"] == 6


def test_solve_worst(inst_file, capsys):
    assert main(["solve", "--instance", inst_file, "--worst"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["policy"]["abort_round"] == 1
    assert doc["payoffs"]["attacker"] == pytest.approx(0.7 * 500 * 5 / 6)


def test_optimize_writes_artifacts(inst_file, tmp_path, capsys):
    out = tmp_path / "opt"
    assert main(["optimize", "--instance", inst_file, "--out", str(out)]) == 0
    doc = json.loads((out / "optimize.json").read_text())
    assert doc["expected_profit"] > 0
    table = (out / "cases.csv").read_text().splitlines()
    assert len(table) == 7


def test_missing_instance_is_validation_error(tmp_path, capsys):
    assert main(["solve", "--instance", str(tmp_path / "nope.json")]) == 2


def test_invalid_instance_rejected(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "n": 2, "ransoms": [10, 0], "data_value": 100,
        "losses": [50, 40], "sale_profits": [35, 28],
    }))
    assert main(["solve", "--instance", str(path), "--perfect"]) == 2
    assert "positive" in capsys.readouterr().err


def test_unknown_flag_exits_2(inst_file, capsys):
    assert main(["solve", "--instance", inst_file, "--bogus"]) == 2


def test_unknown_preset_listed(tmp_path, capsys):
    assert main(["simulate", "--preset", "fig99", "--out", str(tmp_path)]) == 2
    assert "fig2" in capsys.readouterr().err


def test_simulate_preset_writes_csvs(tmp_path, capsys):
    out = tmp_path / "sim"
    code = main(["simulate", "--preset", "fig2", "--seed", "7",
                 "--out", str(out), "--threads", "2"])
    assert code == 0
    victims = (out / "victims.csv").read_text().splitlines()
    assert victims[0].startswith("victim_id,data_value,decay,mode")
    assert len(victims) == 1 + 3 * 40  # three modes, forty victims
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary["totals"]) == {"worst", "perfect_single", "perfect_multi"}


def test_simulate_deterministic_across_threads(tmp_path):
    blobs = []
    for threads, name in ((1, "a"), (8, "b")):
        out = tmp_path / name
        assert main(["simulate", "--preset", "fig2", "--seed", "7",
                     "--out", str(out), "--threads", str(threads)]) == 0
        blobs.append((out / "victims.csv").read_bytes()
                     + (out / "rounds.csv").read_bytes())
    assert blobs[0] == blobs[1]


def test_overwrite_protection(tmp_path, inst_file, capsys):
    out = tmp_path / "once"
    assert main(["solve", "--instance", inst_file, "--perfect",
                 "--out", str(out)]) == 0
    assert main(["solve", "--instance", inst_file, "--perfect",
                 "--out", str(out)]) == 2
    assert "exists" in capsys.readouterr().err
    assert main(["solve", "--instance", inst_file, "--perfect",
                 "--out", str(out), "--force"]) == 0


def test_sweep_flags(tmp_path):
    out = tmp_path / "sw"
    code = main(["sweep", "--type", "profit", "--decay", "linear",
                 "--ransom-grid", "400,800", "--out", str(out)])
    assert code == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert len(lines) == 3


def test_protocol_multi_cancel(tmp_path, capsys):
    out = tmp_path / "proto"
    code = main(["protocol", "--mode", "multi", "--rounds", "6",
                 "--cancel-at", "3", "--seed", "1", "--out", str(out)])
    assert code == 0
    summary = json.loads((out / "protocol_summary.json").read_text())
    assert summary["token_conservation"] is True
    assert summary["replay_matches"] is True
    lines = (out / "transcript.jsonl").read_text().strip().splitlines()
    assert all(json.loads(l) for l in lines)


def test_every_preset_loads():
    for name in ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8",
                 "fig9", "fig9_mid", "fig9_low", "fig10"):
        doc = load_preset(name)
        assert doc["type"] in ("scenario", "reputation_sweep", "profit_sweep")
