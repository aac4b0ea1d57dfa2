#!/usr/bin/env python3
"""Downloads the benchmark regression datasets and converts them to the
canonical CSV layout (feature columns, then a final column named `target`).

Produces, under --out (default: data/):
  enbcool.csv   768 rows,  8 features  (building cooling load)
  enbheat.csv   768 rows,  8 features  (building heating load)
  airfoil.csv   1503 rows, 5 features  (NASA airfoil self-noise)
  cpusmall.csv  8192 rows, 12 features (Delve computer activity)

Needs network access. The ENB workbook conversion needs pandas + openpyxl
(`pip install pandas openpyxl`).
"""

import argparse
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

ENB_URLS = [
    "https://archive.ics.uci.edu/static/public/242/energy+efficiency.zip",
    "https://archive.ics.uci.edu/ml/machine-learning-databases/00242/ENB2012_data.xlsx",
]
AIRFOIL_URLS = [
    "https://archive.ics.uci.edu/static/public/291/airfoil+self+noise.zip",
    "https://archive.ics.uci.edu/ml/machine-learning-databases/00291/airfoil_self_noise.dat",
]
CPUSMALL_URLS = [
    "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/regression/cpusmall",
]


def fetch(urls):
    last_error = None
    for url in urls:
        try:
            print(f"  downloading {url}")
            with urllib.request.urlopen(url, timeout=120) as response:
                return response.read(), url
        except Exception as exc:  # noqa: BLE001 - report and try the mirror
            print(f"    failed: {exc}")
            last_error = exc
    raise RuntimeError(f"all sources failed: {last_error}")


def maybe_unzip(blob, url, suffix):
    if not url.endswith(".zip"):
        return blob
    with zipfile.ZipFile(io.BytesIO(blob)) as archive:
        for name in archive.namelist():
            if name.lower().endswith(suffix):
                return archive.read(name)
    raise RuntimeError(f"{url}: no {suffix} member in archive")


def write_csv(path, rows, num_features):
    with open(path, "w") as out:
        out.write(",".join(f"x{j + 1}" for j in range(num_features)) + ",target\n")
        for row in rows:
            out.write(",".join(repr(v) for v in row) + "\n")
    print(f"  wrote {path} ({len(rows)} rows, {num_features} features)")


def fetch_enb(out_dir):
    import pandas as pd  # deferred so the other datasets work without it

    blob, url = fetch(ENB_URLS)
    blob = maybe_unzip(blob, url, ".xlsx")
    frame = pd.read_excel(io.BytesIO(blob))
    frame = frame.dropna(how="all").dropna(axis=1, how="all")
    if frame.shape[1] != 10:
        raise RuntimeError(f"expected 10 columns in ENB2012, got {frame.shape[1]}")
    values = frame.to_numpy(dtype=float)
    features = values[:, :8]
    heating, cooling = values[:, 8], values[:, 9]
    write_csv(out_dir / "enbheat.csv",
              [list(f) + [y] for f, y in zip(features, heating)], 8)
    write_csv(out_dir / "enbcool.csv",
              [list(f) + [y] for f, y in zip(features, cooling)], 8)


def fetch_airfoil(out_dir):
    blob, url = fetch(AIRFOIL_URLS)
    blob = maybe_unzip(blob, url, ".dat")
    rows = []
    for line in blob.decode("utf-8").splitlines():
        fields = line.split()
        if len(fields) == 6:
            rows.append([float(v) for v in fields])
    if len(rows) != 1503:
        raise RuntimeError(f"expected 1503 airfoil rows, got {len(rows)}")
    write_csv(out_dir / "airfoil.csv", rows, 5)


def fetch_cpusmall(out_dir):
    blob, _ = fetch(CPUSMALL_URLS)
    rows = []
    for line in blob.decode("utf-8").splitlines():
        fields = line.split()
        if not fields:
            continue
        target = float(fields[0])
        features = [0.0] * 12
        for item in fields[1:]:
            idx, value = item.split(":")
            features[int(idx) - 1] = float(value)
        rows.append(features + [target])
    if len(rows) != 8192:
        raise RuntimeError(f"expected 8192 cpusmall rows, got {len(rows)}")
    write_csv(out_dir / "cpusmall.csv", rows, 12)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data", help="output directory")
    parser.add_argument("--only", choices=["enb", "airfoil", "cpusmall"],
                        help="fetch a single dataset")
    args = parser.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    jobs = {
        "enb": fetch_enb,
        "airfoil": fetch_airfoil,
        "cpusmall": fetch_cpusmall,
    }
    selected = [args.only] if args.only else list(jobs)
    failures = []
    for name in selected:
        print(f"fetching {name} ...")
        try:
            jobs[name](out_dir)
        except Exception as exc:  # noqa: BLE001
            print(f"  {name} failed: {exc}")
            failures.append(name)
    if failures:
        print(f"incomplete: {', '.join(failures)} could not be fetched")
        return 1
    print("all datasets ready")
    return 0


if __name__ == "__main__":
    sys.exit(main())
