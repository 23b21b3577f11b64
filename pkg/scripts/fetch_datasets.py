"""Fetch the benchmark datasets into a data directory (network required).

Usage: python scripts/fetch_datasets.py [--data-dir data] [--only thyroid ...]

Grabs the two ODDS .mat files and the NSL-KDD text files from public
mirrors.  KDDCUP'99 10% and CSE-CIC-IDS2018 are large; URLs are printed for
manual download instead.
"""

import argparse
import gzip
import sys
import urllib.request
from pathlib import Path

MIRRORS = {
    "thyroid.mat": [
        "https://github.com/GuansongPang/ADRepository-Anomaly-detection-datasets/raw/main/numerical%20data/mat%20file/thyroid.mat",
        "https://odds.cs.stonybrook.edu/wp-content/uploads/2015/06/thyroid.mat",
    ],
    "arrhythmia.mat": [
        "https://github.com/GuansongPang/ADRepository-Anomaly-detection-datasets/raw/main/numerical%20data/mat%20file/arrhythmia.mat",
        "https://odds.cs.stonybrook.edu/wp-content/uploads/2015/06/arrhythmia.mat",
    ],
    "KDDTrain+.txt": [
        "https://github.com/defcom17/NSL_KDD/raw/master/KDDTrain%2B.txt",
    ],
    "KDDTest+.txt": [
        "https://github.com/defcom17/NSL_KDD/raw/master/KDDTest%2B.txt",
    ],
}

MANUAL = {
    "kddcup.data_10_percent": "http://kdd.ics.uci.edu/databases/kddcup99/kddcup.data_10_percent.gz",
    "cse-cic-ids2018.csv": "https://www.unb.ca/cic/datasets/ids-2018.html (registration required)",
}


def fetch(name: str, urls: list[str], data_dir: Path) -> bool:
    target = data_dir / name
    if target.exists():
        print(f"  {name}: already present")
        return True
    for url in urls:
        try:
            print(f"  {name}: trying {url}")
            with urllib.request.urlopen(url, timeout=60) as response:
                payload = response.read()
            if url.endswith(".gz"):
                payload = gzip.decompress(payload)
            target.write_bytes(payload)
            print(f"  {name}: saved {len(payload)} bytes")
            return True
        except Exception as exc:
            print(f"  {name}: failed ({exc})")
    return False


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", default="data")
    parser.add_argument("--only", nargs="*", default=None,
                        help="subset of files to fetch")
    args = parser.parse_args()
    data_dir = Path(args.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)

    wanted = args.only or list(MIRRORS)
    ok = True
    for name in wanted:
        if name not in MIRRORS:
            print(f"  {name}: no mirror registered, skipping")
            continue
        ok &= fetch(name, MIRRORS[name], data_dir)

    print("\nlarge datasets to fetch manually:")
    for name, url in MANUAL.items():
        print(f"  {name}: {url}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
