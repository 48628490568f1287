"""Experiment harness: dataset presets, method runners, reports, sweeps.

A run is (dataset, prior, method, seed). The seed controls everything random
in the run: the split draw, model init, and minibatch order, so repeating a
run reproduces its numbers bit for bit. Reports separate the deterministic
results table (results.csv, summary.csv) from the per-run log (runs.jsonl)
that also carries timings and diagnostics.
"""

from __future__ import annotations

import csv
import itertools
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import numcore, trainer
from .data import DatasetSchema, PUSplit, SplitSpec, load_dataset, make_pu_split
from .errors import ConfigurationError, UsageError
from .pacing import ScheduleConfig
from .risk import RiskConfig, pretrain
from .trainer import TrainConfig, accuracy, robust_pu_train

METHODS = ("robust", "nnpu", "upu", "pn")

# Sizing protocol: small tabular sets get 400 labeled positives and an
# unlabeled pool of 800; the image sets are five times larger.
DATASET_SIZES = {
    "mushrooms": dict(n_p=400, n_u=800, n_val=100, n_test=1000),
    "spambase": dict(n_p=400, n_u=800, n_val=100, n_test=1000),
    "shuttle": dict(n_p=400, n_u=800, n_val=100, n_test=1000),
    "mnist": dict(n_p=2000, n_u=4000, n_val=500, n_test=5000),
}

_GENERIC_DEFAULTS = dict(
    tau=1.0,
    metric="logistic",
    mapping="welsch",
    schedule=dict(kind="linear", lambda0=0.5, beta=2.0, t_grow=10),
    iterations=20,
    epochs_per_iteration=20,
    warmup=0,
    learning_rate=1e-3,
    weight_decay=1e-4,
    batch_size=64,
    patience=5,
    pretrain_epochs=100,
)

# Per-dataset defaults, tuned on held-out accuracy over the usual grids
# (learning rate 1e-2/1e-3/1e-4, weight decay 0/1e-4/1e-2, tau 0.2..3,
# lambda0 0.1..0.9, beta 1/2/5, warmup 0/5/10). Only deviations from
# _GENERIC_DEFAULTS are listed.
TRAIN_DEFAULTS = {
    "mushrooms": dict(tau=2.0, schedule=dict(kind="linear", lambda0=0.1, beta=2.0, t_grow=10)),
    "spambase": dict(tau=2.0, metric="sigmoid", weight_decay=1e-2),
    "shuttle": dict(tau=2.0, learning_rate=3e-3),
    # On the flattened-image set the defensive correction step keeps the PU
    # risk pinned to the all-negative plateau, so it runs plain clamping.
    "mnist": dict(tau=2.0, learning_rate=1e-4, pretrain_lr=1e-3, defense_step=False,
                  epochs_per_iteration=10, iterations=15),
}

# The risk baselines are tuned separately (they only consume the optimizer
# fields); validation prefers a hotter learning rate for them on the small
# tabular sets. On the image set the PU risk sits on an all-negative
# plateau for the first ~15 epochs, so patience must outlast it.
BASELINE_DEFAULTS = {
    "mushrooms": dict(learning_rate=3e-3, patience=20),
    "spambase": dict(learning_rate=1e-2),
    "shuttle": dict(learning_rate=1e-2),
    "mnist": dict(learning_rate=1e-3, patience=100),
}


def error_rate(model, features, labels) -> float:
    """Test error = 1 - accuracy; empty evaluation sets are a usage error."""
    return 1.0 - accuracy(model, features, labels)


_RAW_CACHE: dict = {}


def dataset_paths(dataset: str, data_dir) -> tuple[Path, Path]:
    data_dir = Path(data_dir)
    csv_path = data_dir / f"{dataset}.csv.gz"
    if not csv_path.exists():
        csv_path = data_dir / f"{dataset}.csv"
    schema_path = data_dir / f"{dataset}.schema.json"
    return csv_path, schema_path


def load_raw(dataset: str, data_dir):
    """Load (and memoize) a raw dataset from data_dir by naming convention."""
    csv_path, schema_path = dataset_paths(dataset, data_dir)
    key = str(csv_path.resolve())
    if key not in _RAW_CACHE:
        _RAW_CACHE[key] = load_dataset(csv_path, DatasetSchema.from_file(schema_path))
    return _RAW_CACHE[key]


def make_split(dataset: str, pi: float, seed: int, data_dir, sizes=None) -> PUSplit:
    if sizes is None:
        if dataset not in DATASET_SIZES:
            raise ConfigurationError(
                f"no size preset for dataset {dataset!r}; pass sizes explicitly"
            )
        sizes = DATASET_SIZES[dataset]
    raw = load_raw(dataset, data_dir)
    split = make_pu_split(raw, SplitSpec(pi=pi, seed=seed, **sizes))
    split.schema_path = str(dataset_paths(dataset, data_dir)[1])
    return split


def _schedule_from(obj) -> ScheduleConfig:
    if isinstance(obj, ScheduleConfig):
        return obj
    return ScheduleConfig(**obj)


def train_config_for(dataset: str, pi: float, seed: int, overrides=None,
                     method: str = "robust") -> TrainConfig:
    """Dataset defaults + overrides -> a concrete TrainConfig.

    Overrides use the flat key "schedule" for a shared threshold schedule, or
    "schedule_p"/"schedule_u" (dicts or ScheduleConfig) to split them.
    """
    kw = dict(_GENERIC_DEFAULTS)
    kw.update(TRAIN_DEFAULTS.get(dataset, {}))
    if method != "robust":
        kw.update(BASELINE_DEFAULTS.get(dataset, {}))
    kw.update(overrides or {})
    shared = kw.pop("schedule", None)
    schedule_p = kw.pop("schedule_p", None) or shared
    schedule_u = kw.pop("schedule_u", None)
    if schedule_p is None:
        raise ConfigurationError("no threshold schedule configured")
    return TrainConfig(
        pi=pi,
        seed=seed,
        schedule_p=_schedule_from(schedule_p),
        schedule_u=_schedule_from(schedule_u) if schedule_u is not None else None,
        **kw,
    )


@dataclass
class ResultRow:
    dataset: str
    pi: float
    method: str
    variant: str
    seed: int
    error_rate: float
    val_accuracy: float
    best_iteration: int

    FIELDS = ("dataset", "pi", "method", "variant", "seed",
              "error_rate", "val_accuracy", "best_iteration")

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.FIELDS}

    def sort_key(self):
        return (self.dataset, self.pi, self.method, self.variant, self.seed)


def run_robust(split: PUSplit, cfg: TrainConfig) -> tuple[ResultRow, dict]:
    result = robust_pu_train(split.train_view(), cfg)
    row = ResultRow(
        dataset=split.dataset,
        pi=split.spec.pi,
        method="robust",
        variant="default",
        seed=cfg.seed,
        error_rate=error_rate(result.model, split.test_features, split.test_labels),
        val_accuracy=result.best_val_accuracy,
        best_iteration=result.best_iteration,
    )
    extras = {
        "iterations_run": len(result.records),
        "pretrain_val_accuracy": result.pretrain_val_accuracy,
    }
    hidden = split.u_oracle_labels.astype(bool)
    if hidden.any() and (~hidden).any():
        extras["final_mean_weight_hidden_pos"] = float(result.final_weights_u[hidden].mean())
        extras["final_mean_weight_hidden_neg"] = float(result.final_weights_u[~hidden].mean())
    return row, extras


def train_baseline(split: PUSplit, method: str, cfg: TrainConfig):
    """PU risk baselines (and the label-all-unlabeled-negative one).

    Same budget as the pipeline's warm start: minibatch Adam for
    cfg.pretrain_epochs epochs, validation-accuracy patience, and the
    best-validation checkpoint is what comes back.
    Returns (best model, best val accuracy, best epoch index).
    """
    model = numcore.init_model(split.x_p.shape[1], hidden=cfg.hidden, seed=cfg.seed)
    best = {"acc": -1.0, "model": model.copy(), "epoch": -1, "stall": 0}

    def track(epoch, m):
        acc = accuracy(m, split.val_features, split.val_labels)
        if acc > best["acc"]:
            best.update(acc=acc, model=m.copy(), epoch=epoch, stall=0)
            return False
        best["stall"] += 1
        return best["stall"] >= cfg.patience

    pretrain(
        model, split.x_p, split.x_u,
        RiskConfig(pi=cfg.pi, defense_step=cfg.defense_step),
        epochs=cfg.pretrain_epochs,
        batch_size=cfg.batch_size,
        learning_rate=cfg.pretrain_lr or cfg.learning_rate,
        weight_decay=cfg.weight_decay,
        seed=cfg.seed,
        mode=method,
        on_epoch=track,
    )
    return best["model"], best["acc"], best["epoch"]


def run_baseline(split: PUSplit, method: str, cfg: TrainConfig) -> tuple[ResultRow, dict]:
    model, val_acc, best_epoch = train_baseline(split, method, cfg)
    row = ResultRow(
        dataset=split.dataset,
        pi=split.spec.pi,
        method=method,
        variant="default",
        seed=cfg.seed,
        error_rate=error_rate(model, split.test_features, split.test_labels),
        val_accuracy=val_acc,
        best_iteration=best_epoch,
    )
    return row, {}


def run_single(dataset, pi, method, seed, data_dir, overrides=None,
               variant="default", sizes=None) -> tuple[ResultRow, dict]:
    if method not in METHODS:
        raise ConfigurationError(f"unknown method {method!r}, expected one of {METHODS}")
    split = make_split(dataset, pi, seed, data_dir, sizes=sizes)
    cfg = train_config_for(dataset, pi, seed, overrides, method=method)
    if method == "robust":
        row, extras = run_robust(split, cfg)
    else:
        row, extras = run_baseline(split, method, cfg)
    row.variant = variant
    return row, extras


@dataclass
class ExperimentSpec:
    name: str
    datasets: tuple
    pis: tuple
    methods: tuple = ("robust", "nnpu")
    seeds: tuple = (0, 1, 2, 3, 4)
    overrides: dict = field(default_factory=dict)
    variants: dict = field(default_factory=dict)  # label -> robust-only overrides
    sizes: dict | None = None

    @classmethod
    def from_file(cls, path) -> "ExperimentSpec":
        path = Path(path)
        if not path.exists():
            raise UsageError(f"experiment config not found: {path}")
        raw = json.loads(path.read_text())
        return cls(
            name=raw.get("name", path.stem),
            datasets=tuple(raw["datasets"]),
            pis=tuple(raw["pis"]),
            methods=tuple(raw.get("methods", ("robust", "nnpu"))),
            seeds=tuple(raw.get("seeds", (0, 1, 2, 3, 4))),
            overrides=raw.get("overrides", {}),
            variants=raw.get("variants", {}),
            sizes=raw.get("sizes"),
        )


def run_experiment(spec: ExperimentSpec, data_dir, out_dir=None, progress=None):
    """Run the full (dataset x pi x method x seed) grid; returns logged rows.

    Each returned entry is (ResultRow, extras dict with wall time). Variants
    fan out the robust method only; baselines run once per cell.
    """
    logged = []
    for dataset, pi, method, seed in itertools.product(
        spec.datasets, spec.pis, spec.methods, spec.seeds
    ):
        cells = [("default", spec.overrides)]
        if method == "robust" and spec.variants:
            cells = [
                (label, {**spec.overrides, **var})
                for label, var in sorted(spec.variants.items())
            ]
        for variant, overrides in cells:
            start = time.perf_counter()
            row, extras = run_single(
                dataset, pi, method, seed, data_dir,
                overrides=overrides, variant=variant, sizes=spec.sizes,
            )
            extras["wall_time_seconds"] = time.perf_counter() - start
            if progress is not None:
                progress(row, extras)
            logged.append((row, extras))
    if out_dir is not None:
        emit_report(logged, out_dir)
    return logged


def summarize(rows) -> list:
    """Aggregate per (dataset, pi, method, variant): mean and sample std."""
    groups: dict = {}
    for row in rows:
        groups.setdefault((row.dataset, row.pi, row.method, row.variant), []).append(row)
    out = []
    for key in sorted(groups):
        errs = np.array([r.error_rate for r in groups[key]])
        out.append({
            "dataset": key[0],
            "pi": key[1],
            "method": key[2],
            "variant": key[3],
            "n_seeds": len(errs),
            "mean_error": float(errs.mean()),
            "std_error": float(errs.std(ddof=1)) if len(errs) > 1 else 0.0,
        })
    return out


def _write_csv(path, fieldnames, dicts):
    # repr keeps the full float so the table round-trips exactly
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(fieldnames)
        for d in dicts:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in
                             (d[name] for name in fieldnames)])


def emit_report(logged, out_dir) -> None:
    """results.csv + summary.csv (deterministic) and runs.jsonl (with timings)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = sorted((row for row, _ in logged), key=ResultRow.sort_key)
    _write_csv(out_dir / "results.csv", ResultRow.FIELDS, [r.to_dict() for r in rows])
    summary = summarize(rows)
    _write_csv(
        out_dir / "summary.csv",
        ("dataset", "pi", "method", "variant", "n_seeds", "mean_error", "std_error"),
        summary,
    )
    with open(out_dir / "runs.jsonl", "w") as f:
        for row, extras in logged:
            f.write(json.dumps({**row.to_dict(), **extras}, sort_keys=True) + "\n")


def read_results(path) -> list:
    """results.csv back into ResultRow objects (exact float round-trip)."""
    rows = []
    with open(path, newline="") as f:
        for rec in csv.DictReader(f):
            rows.append(ResultRow(
                dataset=rec["dataset"],
                pi=float(rec["pi"]),
                method=rec["method"],
                variant=rec["variant"],
                seed=int(rec["seed"]),
                error_rate=float(rec["error_rate"]),
                val_accuracy=float(rec["val_accuracy"]),
                best_iteration=int(rec["best_iteration"]),
            ))
    return rows


def run_sweep(dataset, pi, grid: dict, seeds, data_dir, base_overrides=None) -> list:
    """Grid search scored by mean best-validation accuracy across seeds.

    grid maps override keys to candidate lists; returns (val acc, combo)
    pairs sorted best first. Test labels are never consulted.
    """
    if not grid:
        raise UsageError("sweep grid is empty")
    keys = sorted(grid)
    scored = []
    for values in itertools.product(*(grid[k] for k in keys)):
        combo = dict(zip(keys, values))
        accs = []
        for seed in seeds:
            split = make_split(dataset, pi, seed, data_dir)
            cfg = train_config_for(dataset, pi, seed, {**(base_overrides or {}), **combo})
            result = robust_pu_train(split.train_view(), cfg)
            accs.append(result.best_val_accuracy)
        scored.append((float(np.mean(accs)), combo))
    scored.sort(key=lambda item: (-item[0], json.dumps(item[1], sort_keys=True)))
    return scored
