"""Command line entry points, run in-process via main(argv)."""

import json

import numpy as np
import pytest

from olreg.cli import main
from olreg.streams import write_stream_csv

CONFIG = {
    "horizon": 10,
    "repetitions": 2,
    "master_seed": 3,
    "stream": {"kind": "lds-sparse", "d": 1, "c": 1},
    "class": {"kind": "constants", "values": [0.0, 0.5, 1.0]},
    "target": {"kind": "planted", "source": "class", "noise_std": 0.1},
    "learner": {"kind": "mwa", "mode": "sampled"},
}


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(CONFIG))
    return path


@pytest.fixture
def stream_path(tmp_path):
    path = tmp_path / "stream.csv"
    rng = np.random.default_rng(1)
    write_stream_csv(path, rng.random((8, 1)), rng.random(8))
    return path


def test_simulate_writes_csv_and_sidecar(config_path, tmp_path, capsys):
    out = tmp_path / "result.csv"
    code = main(["simulate", "--config", str(config_path), "--out", str(out)])
    assert code == 0
    assert out.exists()
    sidecar = tmp_path / "result.json"
    assert sidecar.exists()
    payload = json.loads(sidecar.read_text())
    assert payload["config"]["horizon"] == 10
    stdout = capsys.readouterr().out
    assert "final mean regret" in stdout


def test_simulate_seed_override_changes_nothing_but_the_seed(config_path, tmp_path):
    outs = []
    for name, seed in (("a.csv", "3"), ("b.csv", "3"), ("c.csv", "4")):
        out = tmp_path / name
        assert main(["simulate", "--config", str(config_path), "--out", str(out), "--seed", seed]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0] != outs[2]


def test_simulate_per_rep_columns(config_path, tmp_path):
    out = tmp_path / "result.csv"
    assert main(["simulate", "--config", str(config_path), "--out", str(out), "--per-rep"]) == 0
    assert out.read_text().splitlines()[0].endswith("rep0_regret,rep1_regret")


def test_simulate_rejects_bad_config(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({"horizon": 10}))
    code = main(["simulate", "--config", str(path)])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_simulate_rejects_missing_file(tmp_path, capsys):
    code = main(["simulate", "--config", str(tmp_path / "nope.json")])
    assert code == 2


def test_dim_prints_dimension_and_cover(stream_path, capsys):
    code = main(
        [
            "dim",
            "--class",
            json.dumps({"kind": "constants", "values": [0.0, 0.5, 1.0]}),
            "--alpha",
            "1.0",
            "--points",
            str(stream_path),
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "fat-shattering dimension at alpha=1: 1 (exact)" in out
    assert "certificate:" in out
    assert "covering number" in out


def test_cover_reports_exact_size(stream_path, capsys):
    code = main(
        [
            "cover",
            "--class",
            json.dumps({"kind": "constants", "values": [0.0, 0.25, 0.5, 0.75, 1.0]}),
            "--sequence",
            str(stream_path),
            "--alpha",
            "0.25",
            "--exact",
        ]
    )
    assert code == 0
    assert "cover size 2 at alpha=0.25 (exact minimum, 8 rounds)" in capsys.readouterr().out


def test_mistakes_counts_a_perfect_predictor(stream_path, capsys):
    code = main(
        [
            "mistakes",
            "--predictor",
            json.dumps({"kind": "perfect"}),
            "--stream",
            str(stream_path),
            "--eps",
            "0.1",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "zero-one mistakes: 0" in out
    assert "eps-ball misses at eps=0.1: 0" in out


def test_mistakes_with_corrupted_predictor(stream_path, capsys):
    spec = {"kind": "corrupted", "schedule": [3, 5], "magnitude": 0.5, "seed": 2}
    code = main(["mistakes", "--predictor", json.dumps(spec), "--stream", str(stream_path)])
    assert code == 0
    assert "zero-one mistakes: 2" in capsys.readouterr().out


def test_verify_bounds_fast_suites(capsys):
    code = main(["verify-bounds", "--suite", "dimension-oracle", "determinism"])
    out = capsys.readouterr().out
    lines = [l for l in out.splitlines() if l.startswith("[")]
    assert code == 0
    assert len(lines) == 2
    assert lines[0].startswith("[PASS] 11 dimension-oracle")
    assert lines[1].startswith("[PASS] 12 determinism")


def test_verify_bounds_rejects_unknown_suite(capsys):
    code = main(["verify-bounds", "--suite", "everything"])
    assert code == 2
    assert "unknown suite" in capsys.readouterr().err


def test_invalid_json_class_spec(stream_path, capsys):
    code = main(["dim", "--class", "{not json", "--alpha", "0.5", "--points", str(stream_path)])
    assert code == 2
    assert "not valid JSON" in capsys.readouterr().err
