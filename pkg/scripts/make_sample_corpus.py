from __future__ import annotations

import argparse
import os

from transmap.corpus.wos import format_wos_export
from transmap.sim.utils import liposome_like_corpus


def main():
    ap = argparse.ArgumentParser(description="Write the 30-record liposome-like sample corpus as a WOS export")
    ap.add_argument("-o", "--output", default="data/sample_liposomes.txt", help="Output path")
    args = ap.parse_args()
    records = liposome_like_corpus()
    out_dir = os.path.dirname(os.path.abspath(args.output))
    os.makedirs(out_dir, exist_ok=True)
    with open(args.output, "wb") as f:
        f.write(format_wos_export(records))
    print(f"Wrote {len(records)} records to {args.output}")


if __name__ == "__main__":
    main()
