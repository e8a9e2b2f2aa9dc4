#!/usr/bin/env python3
"""Materialize MovieLens 100k as data/ml-100k/u.data (tab layout).

The GroupLens archive is tried first. When that host is unreachable the
ratings table bundled inside the pytorch-widedeep wheel is used instead;
it is the same 100,000-row u.data table stored as parquet.
"""

import argparse
import io
import pathlib
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

GROUPLENS_URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
WHEEL_SPEC = "pytorch-widedeep==1.7.0"
WHEEL_MEMBER = "pytorch_widedeep/datasets/data/MovieLens100k_data.parquet.brotli"


def from_grouplens():
    with urllib.request.urlopen(GROUPLENS_URL, timeout=20) as resp:
        archive = zipfile.ZipFile(io.BytesIO(resp.read()))
    return archive.read("ml-100k/u.data")


def from_wheel(wheel):
    import pandas as pd

    if wheel is None:
        tmp = tempfile.mkdtemp()
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "--timeout", "120",
             "-d", tmp, WHEEL_SPEC],
            check=True)
        wheel = next(pathlib.Path(tmp).glob("*.whl"))
    frame = pd.read_parquet(io.BytesIO(zipfile.ZipFile(wheel).read(WHEEL_MEMBER)))
    lines = (f"{u}\t{i}\t{r}\t{t}\n" for u, i, r, t in
             frame[["user_id", "movie_id", "rating", "timestamp"]].itertuples(index=False))
    return "".join(lines).encode()


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent
                                             / "data" / "ml-100k" / "u.data"))
    parser.add_argument("--wheel", help="use an already downloaded pytorch-widedeep wheel")
    args = parser.parse_args()

    payload = None
    if args.wheel is None:
        try:
            payload = from_grouplens()
        except OSError as err:
            print(f"grouplens unavailable ({err}); falling back to wheel", file=sys.stderr)
    if payload is None:
        payload = from_wheel(args.wheel)

    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(payload)
    count = payload.count(b"\n")
    print(f"wrote {count} ratings to {out}")


if __name__ == "__main__":
    main()
