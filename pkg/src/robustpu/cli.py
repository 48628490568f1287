"""Command line front end.

Subcommands:
  data ingest    validate a raw dataset and print its shape and class counts
  data split     draw a PU split and write its manifest
  train          train one (dataset, pi, method, seed) run, save checkpoint
  eval           score a saved checkpoint on a saved split's test set
  experiment     run a (dataset x pi x method x seed) grid from a JSON config
  sweep          grid-search hyperparameters by validation accuracy
"""

from __future__ import annotations

import argparse
import json
import os
import sys


def _set_threads(n: int) -> None:
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(n))


def _parse_overrides(pairs):
    """--set key=value pairs; values parse as JSON, falling back to strings."""
    out = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise SystemExit(f"--set expects key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def cmd_data_ingest(args) -> int:
    from .data import DatasetSchema, load_dataset
    from .harness import dataset_paths

    csv_path, schema_path = dataset_paths(args.dataset, args.data_dir)
    raw = load_dataset(csv_path, DatasetSchema.from_file(schema_path))
    print(f"dataset      {raw.name}")
    print(f"instances    {len(raw.labels)}")
    print(f"features     {raw.features.shape[1]} (encoded)")
    print(f"positives    {raw.n_positive}")
    print(f"negatives    {raw.n_negative}")
    print(f"sha256       {raw.source_sha256}")
    return 0


def cmd_data_split(args) -> int:
    from .data import save_split
    from .harness import DATASET_SIZES, make_split

    sizes = None
    if args.n_p is not None:
        sizes = dict(n_p=args.n_p, n_u=args.n_u, n_val=args.n_val, n_test=args.n_test)
    split = make_split(args.dataset, args.pi, args.seed, args.data_dir, sizes=sizes)
    save_split(split, args.out)
    hidden = int(split.u_oracle_labels.sum())
    print(f"wrote {args.out}: |P|={len(split.idx_p)} |U|={len(split.idx_u)} "
          f"({hidden} hidden positives) |Val|={len(split.idx_val)} |Test|={len(split.idx_test)}")
    return 0


def _get_split(args):
    from .data import load_split
    from .harness import make_split

    if args.split:
        return load_split(args.split)
    if not args.dataset:
        raise SystemExit("need either --split or --dataset")
    return make_split(args.dataset, args.pi, args.seed, args.data_dir)


def cmd_train(args) -> int:
    from pathlib import Path

    from .harness import error_rate, train_baseline, train_config_for
    from .trainer import dump_records, robust_pu_train, save_checkpoint

    split = _get_split(args)
    cfg = train_config_for(split.dataset, split.spec.pi, args.seed,
                           _parse_overrides(args.set), method=args.method)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.method == "robust":
        result = robust_pu_train(split.train_view(), cfg)
        model = result.model
        dump_records(result.records, out / "records.jsonl")
        info = {
            "best_iteration": result.best_iteration,
            "best_val_accuracy": result.best_val_accuracy,
            "iterations_run": len(result.records),
        }
    else:
        model, val_acc, best_epoch = train_baseline(split, args.method, cfg)
        info = {"best_iteration": best_epoch, "best_val_accuracy": val_acc}
    save_checkpoint(model, out / "checkpoint.npz")
    info["method"] = args.method
    info["test_error"] = error_rate(model, split.test_features, split.test_labels)
    (out / "result.json").write_text(json.dumps(info, indent=1, sort_keys=True))
    print(f"test error {info['test_error']:.4f}  best iteration {info['best_iteration']}")
    return 0


def cmd_eval(args) -> int:
    from .data import load_split
    from .harness import error_rate
    from .trainer import load_checkpoint

    split = load_split(args.split)
    model = load_checkpoint(args.checkpoint)
    err = error_rate(model, split.test_features, split.test_labels)
    print(f"{split.dataset} pi={split.spec.pi}: test error {err:.4f}")
    return 0


def cmd_experiment(args) -> int:
    from .harness import ExperimentSpec, run_experiment, summarize

    spec = ExperimentSpec.from_file(args.config)
    if args.seeds:
        spec.seeds = tuple(int(s) for s in args.seeds.split(","))

    def progress(row, extras):
        print(f"{row.dataset} pi={row.pi} {row.method}/{row.variant} seed={row.seed}: "
              f"err={row.error_rate:.4f} ({extras['wall_time_seconds']:.1f}s)", flush=True)

    logged = run_experiment(spec, args.data_dir, out_dir=args.out, progress=progress)
    print(f"\n{'dataset':<12}{'pi':>5}  {'method':<8}{'variant':<10}{'mean err':>9}  {'std':>7}")
    for s in summarize([row for row, _ in logged]):
        print(f"{s['dataset']:<12}{s['pi']:>5}  {s['method']:<8}{s['variant']:<10}"
              f"{s['mean_error']:>9.4f}  {s['std_error']:>7.4f}")
    if args.out:
        print(f"\nreport written to {args.out}")
    return 0


def cmd_sweep(args) -> int:
    from .harness import run_sweep

    grid = json.loads(open(args.grid).read()) if os.path.exists(args.grid) \
        else json.loads(args.grid)
    seeds = tuple(int(s) for s in args.seeds.split(","))
    scored = run_sweep(args.dataset, args.pi, grid, seeds, args.data_dir,
                       base_overrides=_parse_overrides(args.set))
    for acc, combo in scored[: args.top]:
        print(f"val acc {acc:.4f}  {json.dumps(combo, sort_keys=True)}")
    if args.out:
        with open(args.out, "w") as f:
            json.dump([{"val_accuracy": a, "overrides": c} for a, c in scored], f, indent=1)
        print(f"full ranking written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robustpu", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--threads", type=int, default=1,
                        help="BLAS/OpenMP thread cap (default 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    data = sub.add_parser("data", help="dataset utilities")
    data_sub = data.add_subparsers(dest="data_command", required=True)

    ingest = data_sub.add_parser("ingest", help="validate a raw dataset")
    ingest.add_argument("--dataset", required=True)
    ingest.add_argument("--data-dir", default="data")
    ingest.set_defaults(func=cmd_data_ingest)

    split = data_sub.add_parser("split", help="draw a PU split, write a manifest")
    split.add_argument("--dataset", required=True)
    split.add_argument("--pi", type=float, required=True)
    split.add_argument("--seed", type=int, default=0)
    split.add_argument("--data-dir", default="data")
    split.add_argument("--out", required=True)
    split.add_argument("--n-p", type=int, default=None)
    split.add_argument("--n-u", type=int, default=None)
    split.add_argument("--n-val", type=int, default=None)
    split.add_argument("--n-test", type=int, default=None)
    split.set_defaults(func=cmd_data_split)

    train = sub.add_parser("train", help="train one run")
    train.add_argument("--dataset")
    train.add_argument("--pi", type=float, default=0.2)
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--split", help="train on a saved split manifest instead")
    train.add_argument("--method", default="robust",
                       choices=("robust", "nnpu", "upu", "pn"))
    train.add_argument("--data-dir", default="data")
    train.add_argument("--out", required=True)
    train.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a training option (value parsed as JSON)")
    train.set_defaults(func=cmd_train)

    ev = sub.add_parser("eval", help="evaluate a checkpoint on a split's test set")
    ev.add_argument("--checkpoint", required=True)
    ev.add_argument("--split", required=True)
    ev.set_defaults(func=cmd_eval)

    exp = sub.add_parser("experiment", help="run a grid from a JSON config")
    exp.add_argument("--config", required=True)
    exp.add_argument("--data-dir", default="data")
    exp.add_argument("--out", default=None)
    exp.add_argument("--seeds", default=None, help="comma list, overrides the config")
    exp.set_defaults(func=cmd_experiment)

    sweep = sub.add_parser("sweep", help="hyperparameter grid search")
    sweep.add_argument("--dataset", required=True)
    sweep.add_argument("--pi", type=float, required=True)
    sweep.add_argument("--grid", required=True,
                       help="JSON file or inline JSON: {option: [candidates]}")
    sweep.add_argument("--seeds", default="0,1,2")
    sweep.add_argument("--data-dir", default="data")
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--top", type=int, default=10)
    sweep.add_argument("--set", action="append", metavar="KEY=VALUE")
    sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _set_threads(args.threads)
    from .errors import RobustPUError

    try:
        return args.func(args)
    except RobustPUError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
