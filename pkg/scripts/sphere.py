"""200 agents on a sphere split into two hemispheres 20 m apart.

    python3 scripts/sphere.py [--out runs/sphere]
"""
import argparse
from pathlib import Path

from etformation.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("runs/sphere"))
    ap.add_argument("--n", type=int, default=200)
    args = ap.parse_args()
    return cli_main(["sphere", "--n", str(args.n), "--out", str(args.out)])


if __name__ == "__main__":
    raise SystemExit(main())
