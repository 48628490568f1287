#!/usr/bin/env python3
"""Fetch the benchmark datasets and convert them into data/ as CSV.

Sources are the PMLB dataset dumps (tab-separated, gzipped, one `target`
column). We re-emit them as comma-separated .csv.gz with a fixed gzip
header so the files are byte-stable across runs, and write nothing else;
the .schema.json files in data/ are maintained by hand.

Offline use: pass --from-dir pointing at a directory that already holds
<source-name>.tsv.gz files and no network access happens.
"""

import argparse
import gzip
import io
import sys
import urllib.request
from pathlib import Path

import pandas as pd

# repo name -> PMLB name
DATASETS = {
    "mushrooms": "mushroom",
    "spambase": "spambase",
    "shuttle": "shuttle",
    "mnist": "mnist",
}
DEFAULT_BASE = "https://github.com/EpistasisLab/pmlb/raw/master/datasets"


def fetch(base_url: str, source: str) -> bytes:
    url = f"{base_url}/{source}/{source}.tsv.gz"
    print(f"fetching {url}")
    with urllib.request.urlopen(url) as resp:
        return resp.read()


def convert(tsv_gz: bytes, out_path: Path) -> None:
    df = pd.read_csv(io.BytesIO(tsv_gz), sep="\t", compression="gzip")
    csv_bytes = df.to_csv(index=False).encode()
    # mtime=0 keeps the gzip container reproducible
    with open(out_path, "wb") as f:
        with gzip.GzipFile(fileobj=f, mode="wb", mtime=0) as z:
            z.write(csv_bytes)
    print(f"wrote {out_path} ({len(df)} rows, {df.shape[1] - 1} feature columns)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--base-url", default=DEFAULT_BASE)
    parser.add_argument("--out-dir", default="data")
    parser.add_argument("--datasets", nargs="*", default=sorted(DATASETS))
    parser.add_argument("--from-dir", default=None,
                        help="directory with pre-downloaded <source>.tsv.gz files")
    args = parser.parse_args(argv)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in args.datasets:
        if name not in DATASETS:
            print(f"unknown dataset {name!r}, expected one of {sorted(DATASETS)}")
            return 2
        source = DATASETS[name]
        if args.from_dir:
            tsv_gz = (Path(args.from_dir) / f"{source}.tsv.gz").read_bytes()
        else:
            tsv_gz = fetch(args.base_url, source)
        convert(tsv_gz, out_dir / f"{name}.csv.gz")
    return 0


if __name__ == "__main__":
    sys.exit(main())
