"""Dataset ingestion and PU split construction.

Raw datasets are comma-separated text files (optionally gzipped) with a
header row. A JSON schema file names the label column, the categorical
columns, and the positive/negative class groups. Ingestion one-hot encodes
categoricals and leaves numeric columns raw; z-scoring happens when a split
is materialized, using statistics of that split's training pool (x_p + x_u)
so validation and test never leak into the scaler.

A PU split takes n_p labeled positives plus an unlabeled pool of n_u samples
of which round(n_u * pi) are hidden positives; validation and test sets are
drawn the same way at the same pi. The true labels of the unlabeled pool are
kept on the split object for diagnostics only; training code receives a
TrainView that does not carry them.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import ConfigurationError, IngestionError, IntegrityError, SizingError

MANIFEST_FORMAT = "pu-split/1"
SCALINGS = ("zscore", "pixel", "none")


def round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass(frozen=True)
class DatasetSchema:
    label_column: str
    positive_classes: tuple
    negative_classes: tuple | None = None
    categorical_columns: tuple = ()
    feature_scaling: str = "zscore"
    name: str = ""

    def __post_init__(self):
        if self.feature_scaling not in SCALINGS:
            raise ConfigurationError(f"unknown feature_scaling {self.feature_scaling!r}")

    @classmethod
    def from_file(cls, path) -> "DatasetSchema":
        path = Path(path)
        if not path.exists():
            raise IngestionError(f"schema file not found: {path}")
        raw = json.loads(path.read_text())
        return cls(
            label_column=raw["label_column"],
            positive_classes=tuple(raw["positive_classes"]),
            negative_classes=tuple(raw["negative_classes"]) if "negative_classes" in raw else None,
            categorical_columns=tuple(raw.get("categorical_columns", ())),
            feature_scaling=raw.get("feature_scaling", "zscore"),
            name=raw.get("name", path.stem.replace(".schema", "")),
        )


@dataclass
class RawDataset:
    name: str
    features: np.ndarray          # (n, d) float64, one-hot applied, numerics unscaled
    labels: np.ndarray            # (n,) uint8, 1 = positive group
    numeric_columns: np.ndarray   # (d,) bool, True = z-score at split time
    feature_names: list = field(default_factory=list)
    source_path: str | None = None
    source_sha256: str | None = None

    @property
    def n_positive(self) -> int:
        return int(self.labels.sum())

    @property
    def n_negative(self) -> int:
        return int(len(self.labels) - self.labels.sum())


def binarize(classes, positive_classes, negative_classes=None) -> np.ndarray:
    """Map original class values to 1 (positive group) / 0 (negative group).

    Classes are compared by string form so schema files can spell them as
    either ints or strings. With an explicit negative group, any class
    outside both groups (or in both) is a configuration error.
    """
    pos = {str(c) for c in positive_classes}
    neg = {str(c) for c in negative_classes} if negative_classes is not None else None
    if neg is not None and pos & neg:
        raise ConfigurationError(f"classes in both groups: {sorted(pos & neg)}")
    out = np.empty(len(classes), dtype=np.uint8)
    for i, c in enumerate(classes):
        key = str(c)
        if key in pos:
            out[i] = 1
        elif neg is None or key in neg:
            out[i] = 0
        else:
            raise ConfigurationError(f"class {c!r} belongs to neither class group")
    return out


def one_hot_encode(values, categories) -> np.ndarray:
    """One column of category symbols -> (n, len(categories)) indicator block."""
    index = {str(c): j for j, c in enumerate(categories)}
    block = np.zeros((len(values), len(categories)))
    for i, v in enumerate(values):
        j = index.get(str(v))
        if j is None:
            raise IngestionError(f"unknown category {v!r} at row {i}")
        block[i, j] = 1.0
    return block


def load_dataset(path, schema) -> RawDataset:
    """Read a CSV(.gz) per its schema: binarize labels, one-hot categoricals.

    Numeric columns stay raw under "zscore" scaling (standardized later from
    training-pool statistics) and are divided by 255 under "pixel" scaling.
    """
    path = Path(path)
    if isinstance(schema, (str, Path)):
        schema = DatasetSchema.from_file(schema)
    if not path.exists():
        raise IngestionError(f"dataset file not found: {path}")
    try:
        df = pd.read_csv(path)
    except Exception as exc:
        raise IngestionError(f"failed to parse {path}: {exc}") from exc

    if schema.label_column not in df.columns:
        raise IngestionError(f"label column {schema.label_column!r} missing from {path}")
    labels = binarize(
        df[schema.label_column].tolist(), schema.positive_classes, schema.negative_classes
    )

    feature_cols = [c for c in df.columns if c != schema.label_column]
    missing = set(schema.categorical_columns) - set(feature_cols)
    if missing:
        raise IngestionError(f"categorical columns not in {path}: {sorted(missing)}")

    blocks, names, numeric_mask = [], [], []
    categorical = set(schema.categorical_columns)
    for col in feature_cols:
        if col in categorical:
            cats = sorted(pd.unique(df[col]).tolist(), key=str)
            blocks.append(one_hot_encode(df[col].tolist(), cats))
            names.extend(f"{col}={c}" for c in cats)
            numeric_mask.extend([False] * len(cats))
        else:
            values = pd.to_numeric(df[col], errors="coerce").to_numpy(dtype=np.float64)
            bad = np.flatnonzero(~np.isfinite(values))
            if bad.size:
                raise IngestionError(
                    f"non-finite or non-numeric value in column {col!r}, row {bad[0]}"
                )
            if schema.feature_scaling == "pixel":
                values = values / 255.0
            blocks.append(values[:, None])
            names.append(col)
            numeric_mask.append(schema.feature_scaling == "zscore")

    features = np.hstack(blocks) if blocks else np.zeros((len(df), 0))
    return RawDataset(
        name=schema.name or path.stem,
        features=features,
        labels=labels,
        numeric_columns=np.asarray(numeric_mask, dtype=bool),
        feature_names=names,
        source_path=str(path),
        source_sha256=sha256_file(path),
    )


@dataclass(frozen=True)
class SplitSpec:
    n_p: int
    n_u: int
    pi: float
    n_val: int
    n_test: int
    seed: int

    def __post_init__(self):
        if not 0.0 < self.pi < 1.0:
            raise ConfigurationError(f"pi must be in (0, 1), got {self.pi}")
        for name in ("n_p", "n_u", "n_val", "n_test"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0")


@dataclass
class TrainView:
    """What training is allowed to see: no oracle labels for the unlabeled pool."""

    x_p: np.ndarray
    x_u: np.ndarray
    val_features: np.ndarray
    val_labels: np.ndarray


@dataclass
class PUSplit:
    dataset: str
    spec: SplitSpec
    x_p: np.ndarray
    x_u: np.ndarray
    u_oracle_labels: np.ndarray   # hidden true labels of x_u, diagnostics only
    val_features: np.ndarray
    val_labels: np.ndarray
    test_features: np.ndarray
    test_labels: np.ndarray
    idx_p: np.ndarray
    idx_u: np.ndarray
    idx_val: np.ndarray
    idx_test: np.ndarray
    raw_path: str | None = None
    schema_path: str | None = None
    raw_sha256: str | None = None

    def train_view(self) -> TrainView:
        return TrainView(
            x_p=self.x_p,
            x_u=self.x_u,
            val_features=self.val_features,
            val_labels=self.val_labels,
        )


def _pool_counts(spec: SplitSpec):
    n_up = round_half_up(spec.n_u * spec.pi)
    n_vp = round_half_up(spec.n_val * spec.pi)
    n_tp = round_half_up(spec.n_test * spec.pi)
    need_pos = spec.n_p + n_up + n_vp + n_tp
    need_neg = (spec.n_u - n_up) + (spec.n_val - n_vp) + (spec.n_test - n_tp)
    return n_up, n_vp, n_tp, need_pos, need_neg


def _standardize(train_pool, matrices, numeric_mask):
    """Z-score numeric columns of every matrix using train-pool statistics.

    Uses population std (ddof=0); constant columns map to all zeros.
    """
    if not numeric_mask.any():
        return matrices
    cols = train_pool[:, numeric_mask]
    mean = cols.mean(axis=0)
    std = cols.std(axis=0)
    # a constant column must come out exactly zero; summation roundoff can
    # leave its computed std at ~1e-16 instead of 0, so detect by range
    constant = cols.min(axis=0) == cols.max(axis=0)
    mean = np.where(constant, cols.min(axis=0), mean)
    std = np.where(constant, 1.0, std)
    out = []
    for m in matrices:
        m = m.copy()
        m[:, numeric_mask] = (m[:, numeric_mask] - mean) / std
        out.append(m)
    return out


def _materialize(raw: RawDataset, idx_p, idx_u, idx_val, idx_test):
    x_p = raw.features[idx_p]
    x_u = raw.features[idx_u]
    x_val = raw.features[idx_val]
    x_test = raw.features[idx_test]
    x_p, x_u, x_val, x_test = _standardize(
        np.vstack([x_p, x_u]), [x_p, x_u, x_val, x_test], raw.numeric_columns
    )
    return x_p, x_u, x_val, x_test


def make_pu_split(raw: RawDataset, spec: SplitSpec) -> PUSplit:
    """Draw disjoint x_p / x_u / val / test index sets, fully seed-determined."""
    n_up, n_vp, n_tp, need_pos, need_neg = _pool_counts(spec)
    pos_idx = np.flatnonzero(raw.labels == 1)
    neg_idx = np.flatnonzero(raw.labels == 0)
    if need_pos > len(pos_idx):
        raise SizingError(
            f"{raw.name}: need {need_pos} positives, pool has {len(pos_idx)} "
            f"(short by {need_pos - len(pos_idx)})"
        )
    if need_neg > len(neg_idx):
        raise SizingError(
            f"{raw.name}: need {need_neg} negatives, pool has {len(neg_idx)} "
            f"(short by {need_neg - len(neg_idx)})"
        )

    rng = np.random.default_rng(spec.seed)
    pos_perm = rng.permutation(pos_idx)
    neg_perm = rng.permutation(neg_idx)

    def take(perm, start, k):
        return perm[start : start + k], start + k

    p_idx, po = take(pos_perm, 0, spec.n_p)
    u_pos, po = take(pos_perm, po, n_up)
    val_pos, po = take(pos_perm, po, n_vp)
    test_pos, po = take(pos_perm, po, n_tp)
    u_neg, no = take(neg_perm, 0, spec.n_u - n_up)
    val_neg, no = take(neg_perm, no, spec.n_val - n_vp)
    test_neg, no = take(neg_perm, no, spec.n_test - n_tp)

    def mix(pos_part, neg_part):
        idx = np.concatenate([pos_part, neg_part])
        lab = np.concatenate(
            [np.ones(len(pos_part), dtype=np.uint8), np.zeros(len(neg_part), dtype=np.uint8)]
        )
        order = rng.permutation(len(idx))
        return idx[order], lab[order]

    idx_u, u_oracle = mix(u_pos, u_neg)
    idx_val, val_labels = mix(val_pos, val_neg)
    idx_test, test_labels = mix(test_pos, test_neg)

    x_p, x_u, x_val, x_test = _materialize(raw, p_idx, idx_u, idx_val, idx_test)
    return PUSplit(
        dataset=raw.name,
        spec=spec,
        x_p=x_p,
        x_u=x_u,
        u_oracle_labels=u_oracle,
        val_features=x_val,
        val_labels=val_labels,
        test_features=x_test,
        test_labels=test_labels,
        idx_p=p_idx,
        idx_u=idx_u,
        idx_val=idx_val,
        idx_test=idx_test,
        raw_path=raw.source_path,
        schema_path=None,
        raw_sha256=raw.source_sha256,
    )


def save_split(split: PUSplit, path) -> None:
    """Write the split manifest: spec, seed, index lists, raw-file checksum."""
    if split.raw_path is None or split.raw_sha256 is None:
        raise ConfigurationError("split does not reference a raw dataset file")
    # absolutize so the manifest still resolves when saved outside the data tree
    schema_path = split.schema_path
    if schema_path is not None:
        schema_path = str(Path(schema_path).resolve())
    manifest = {
        "format": MANIFEST_FORMAT,
        "dataset": split.dataset,
        "raw_path": str(Path(split.raw_path).resolve()),
        "schema_path": schema_path,
        "raw_sha256": split.raw_sha256,
        "spec": {
            "n_p": split.spec.n_p,
            "n_u": split.spec.n_u,
            "pi": split.spec.pi,
            "n_val": split.spec.n_val,
            "n_test": split.spec.n_test,
            "seed": split.spec.seed,
        },
        "indices": {
            "p": split.idx_p.tolist(),
            "u": split.idx_u.tolist(),
            "val": split.idx_val.tolist(),
            "test": split.idx_test.tolist(),
        },
    }
    Path(path).write_text(json.dumps(manifest, indent=1, sort_keys=True))


def _resolve(base: Path, p: str) -> Path:
    q = Path(p)
    return q if q.is_absolute() else (base / q)


def load_split(path) -> PUSplit:
    """Re-materialize a split from its manifest and the referenced raw file."""
    path = Path(path)
    if not path.exists():
        raise IntegrityError(f"manifest not found: {path}")
    manifest = json.loads(path.read_text())
    if manifest.get("format") != MANIFEST_FORMAT:
        raise IntegrityError(f"unsupported manifest format {manifest.get('format')!r}")
    raw_path = _resolve(path.parent, manifest["raw_path"])
    if not raw_path.exists():
        raise IntegrityError(f"manifest references missing raw file: {raw_path}")
    if sha256_file(raw_path) != manifest["raw_sha256"]:
        raise IntegrityError(f"checksum mismatch for {raw_path}")
    schema_path = manifest.get("schema_path")
    if schema_path is None:
        schema_path = raw_path.with_name(raw_path.name.split(".")[0] + ".schema.json")
    else:
        schema_path = _resolve(path.parent, schema_path)
    raw = load_dataset(raw_path, DatasetSchema.from_file(schema_path))

    spec = SplitSpec(**manifest["spec"])
    idx = {k: np.asarray(v, dtype=np.int64) for k, v in manifest["indices"].items()}
    x_p, x_u, x_val, x_test = _materialize(raw, idx["p"], idx["u"], idx["val"], idx["test"])
    return PUSplit(
        dataset=manifest["dataset"],
        spec=spec,
        x_p=x_p,
        x_u=x_u,
        u_oracle_labels=raw.labels[idx["u"]],
        val_features=x_val,
        val_labels=raw.labels[idx["val"]],
        test_features=x_test,
        test_labels=raw.labels[idx["test"]],
        idx_p=idx["p"],
        idx_u=idx["u"],
        idx_val=idx["val"],
        idx_test=idx["test"],
        raw_path=str(raw_path),
        schema_path=str(schema_path),
        raw_sha256=manifest["raw_sha256"],
    )
