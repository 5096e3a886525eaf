"""End-to-end demo: synthesize a world, then fuse, correlate and train.

Everything lands under --out (default ./demo_out).
"""
import argparse
import json
from pathlib import Path

from fsconflict.cli import main as cli


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("demo_out"))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    data = args.out / "data"
    steps = [
        ["synth", "--out", data, "--synth-seed", args.seed],
        ["report", "--data-dir", data, "--out", args.out / "report"],
    ]
    for argv_ in steps:
        code = cli([str(a) for a in argv_])
        if code:
            return code
    print((args.out / "report" / "metrics.csv").read_text(encoding="utf-8"))
    index = json.loads((args.out / "report" / "index.json").read_text(encoding="utf-8"))
    print("files:", ", ".join(sorted(index["files"])))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
