"""Event vs periodic triggering on the six-agent V, complete and cycle graphs.

    python3 scripts/table1.py [--dynamics si|unicycle] [--out runs/table1]
"""
import argparse
import dataclasses
import warnings
from pathlib import Path

from etformation.cli import write_run
from etformation.engine import RigidityWarning, run
from etformation.metrics import compare, summarize
from etformation.scenarios import scenario_v_formation


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dynamics", default="unicycle", choices=("si", "unicycle"))
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()
    warnings.simplefilter("ignore", RigidityWarning)

    print(f"{'graph':<10}{'trigger':<10}{'tau1':>9}{'tau2':>7}{'updates':>9}{'F(T)':>9}")
    for top in ("complete", "cycle"):
        base = scenario_v_formation(top, dynamics=args.dynamics)
        sums = {}
        for mode in ("event", "periodic"):
            tr = run(dataclasses.replace(base, trigger=mode))
            s = sums[mode] = summarize(tr)
            if args.out:
                write_run(tr, args.out / top, prefix=f"{mode}_")
            print(f"{top:<10}{mode:<10}{s.tau1_avg:9.1f}{s.tau2_avg:7.1f}"
                  f"{s.total_updates_avg:9.1f}{s.F_final:9.4f}")
        print("  " + str(compare(sums["event"], sums["periodic"])))


if __name__ == "__main__":
    main()
