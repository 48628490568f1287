"""CLI tests, run in-process through main() on the synthetic toy dataset."""

import json

import numpy as np
import pytest

from robustpu import harness
from robustpu.cli import main
from robustpu.data import load_split
from robustpu.trainer import load_checkpoint

FAST_SETS = [
    "--set", "iterations=2",
    "--set", "epochs_per_iteration=1",
    "--set", "pretrain_epochs=3",
    "--set", "hidden=4",
    "--set", "patience=2",
]


def make_manifest(toy_data_dir, tmp_path, pi=0.4, seed=0):
    out = tmp_path / "toy.split.json"
    rc = main([
        "data", "split", "--dataset", "toy", "--pi", str(pi), "--seed", str(seed),
        "--data-dir", str(toy_data_dir), "--out", str(out),
        "--n-p", "12", "--n-u", "36", "--n-val", "16", "--n-test", "30",
    ])
    assert rc == 0
    return out


def test_data_ingest(toy_data_dir, capsys):
    rc = main(["data", "ingest", "--dataset", "toy", "--data-dir", str(toy_data_dir)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "instances    400" in out
    assert "sha256" in out


def test_data_ingest_missing_dataset_exits_2(toy_data_dir, capsys):
    rc = main(["data", "ingest", "--dataset", "ghost", "--data-dir", str(toy_data_dir)])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_data_split_writes_manifest(toy_data_dir, tmp_path, capsys):
    manifest = make_manifest(toy_data_dir, tmp_path)
    out = capsys.readouterr().out
    assert "|P|=12 |U|=36" in out
    assert "(14 hidden positives)" in out  # 36 * 0.4 = 14.4 -> 14
    split = load_split(manifest)
    assert split.dataset == "toy"
    assert len(split.idx_test) == 30


def test_data_split_requires_sizes_for_unknown_dataset(toy_data_dir, tmp_path, capsys):
    rc = main([
        "data", "split", "--dataset", "toy", "--pi", "0.4",
        "--data-dir", str(toy_data_dir), "--out", str(tmp_path / "x.json"),
    ])
    assert rc == 2
    assert "size preset" in capsys.readouterr().err


def test_train_robust_from_manifest(toy_data_dir, tmp_path, capsys):
    manifest = make_manifest(toy_data_dir, tmp_path)
    out_dir = tmp_path / "run"
    rc = main(["train", "--split", str(manifest), "--out", str(out_dir), *FAST_SETS])
    assert rc == 0
    assert "test error" in capsys.readouterr().out
    info = json.loads((out_dir / "result.json").read_text())
    assert info["method"] == "robust"
    assert info["iterations_run"] >= 1
    assert 0.0 <= info["test_error"] <= 1.0
    records = [json.loads(l) for l in
               (out_dir / "records.jsonl").read_text().splitlines()]
    assert len(records) == info["iterations_run"]
    model = load_checkpoint(out_dir / "checkpoint.npz")
    assert model.w1.shape == (2, 4)


def test_train_baseline_from_manifest(toy_data_dir, tmp_path):
    manifest = make_manifest(toy_data_dir, tmp_path)
    out_dir = tmp_path / "run_pn"
    rc = main(["train", "--split", str(manifest), "--method", "pn",
               "--out", str(out_dir), *FAST_SETS])
    assert rc == 0
    info = json.loads((out_dir / "result.json").read_text())
    assert info["method"] == "pn"
    assert "iterations_run" not in info
    assert (out_dir / "checkpoint.npz").exists()
    assert not (out_dir / "records.jsonl").exists()


def test_train_bad_override_exits_2(toy_data_dir, tmp_path, capsys):
    manifest = make_manifest(toy_data_dir, tmp_path)
    rc = main(["train", "--split", str(manifest), "--out", str(tmp_path / "r"),
               "--set", "tau=-1"])
    assert rc == 2
    assert "tau" in capsys.readouterr().err


def test_train_without_dataset_or_split():
    with pytest.raises(SystemExit):
        main(["train", "--out", "somewhere"])


def test_eval_checkpoint(toy_data_dir, tmp_path, capsys):
    manifest = make_manifest(toy_data_dir, tmp_path)
    out_dir = tmp_path / "run"
    main(["train", "--split", str(manifest), "--out", str(out_dir), *FAST_SETS])
    trained_err = json.loads((out_dir / "result.json").read_text())["test_error"]
    capsys.readouterr()
    rc = main(["eval", "--checkpoint", str(out_dir / "checkpoint.npz"),
               "--split", str(manifest)])
    assert rc == 0
    printed = capsys.readouterr().out
    assert f"test error {trained_err:.4f}" in printed


def test_experiment_from_config(toy_data_dir, tmp_path, capsys):
    config = tmp_path / "exp.json"
    config.write_text(json.dumps({
        "name": "toytest",
        "datasets": ["toy"],
        "pis": [0.4],
        "methods": ["robust", "pn"],
        "seeds": [0, 1],
        "overrides": {"iterations": 2, "epochs_per_iteration": 1,
                      "pretrain_epochs": 3, "hidden": 4, "patience": 2},
        "sizes": {"n_p": 12, "n_u": 36, "n_val": 16, "n_test": 30},
    }))
    out_dir = tmp_path / "report"
    rc = main(["experiment", "--config", str(config),
               "--data-dir", str(toy_data_dir), "--out", str(out_dir)])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "mean err" in printed
    rows = harness.read_results(out_dir / "results.csv")
    assert {(r.method, r.seed) for r in rows} == {("robust", 0), ("robust", 1),
                                                  ("pn", 0), ("pn", 1)}
    # --seeds trims the grid without editing the config file
    rc = main(["experiment", "--config", str(config),
               "--data-dir", str(toy_data_dir), "--out", str(out_dir),
               "--seeds", "0"])
    assert rc == 0
    assert len(harness.read_results(out_dir / "results.csv")) == 2


def test_sweep_cli(toy_data_dir, tmp_path, capsys, monkeypatch):
    monkeypatch.setitem(harness.DATASET_SIZES, "toy",
                        dict(n_p=12, n_u=36, n_val=16, n_test=30))
    out = tmp_path / "rank.json"
    rc = main([
        "sweep", "--dataset", "toy", "--pi", "0.4",
        "--grid", json.dumps({"tau": [1.0, 2.0]}),
        "--seeds", "0", "--data-dir", str(toy_data_dir), "--out", str(out),
        "--set", "iterations=2", "--set", "epochs_per_iteration=1",
        "--set", "pretrain_epochs=3", "--set", "hidden=4",
    ])
    assert rc == 0
    assert "val acc" in capsys.readouterr().out
    ranking = json.loads(out.read_text())
    assert len(ranking) == 2
    assert ranking[0]["val_accuracy"] >= ranking[1]["val_accuracy"]


def test_set_rejects_malformed_pair(toy_data_dir, tmp_path):
    manifest = make_manifest(toy_data_dir, tmp_path)
    with pytest.raises(SystemExit, match="key=value"):
        main(["train", "--split", str(manifest), "--out", str(tmp_path / "r"),
              "--set", "learning_rate"])


def test_schedule_override_via_set(toy_data_dir, tmp_path):
    manifest = make_manifest(toy_data_dir, tmp_path)
    out_dir = tmp_path / "run_sched"
    rc = main([
        "train", "--split", str(manifest), "--out", str(out_dir), *FAST_SETS,
        "--set", 'schedule={"kind": "constant", "lambda0": 3.0}',
    ])
    assert rc == 0
    records = [json.loads(l) for l in
               (out_dir / "records.jsonl").read_text().splitlines()]
    assert all(r["lambda_p"] == 3.0 for r in records)
