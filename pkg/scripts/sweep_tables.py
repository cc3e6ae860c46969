"""alpha x A grid on the cycle V: total triggers and final formation error.

Saturated cells (commanded speed above v_max at some step) are starred.

    python3 scripts/sweep_tables.py [--workers 4] [--out runs/sweep.csv]
"""
import argparse
import warnings
from pathlib import Path

from etformation.engine import RigidityWarning
from etformation.scenarios import SWEEP_ALPHAS, SWEEP_AS, scenario_v_formation, sweep
from etformation.storage import write_sweep_csv


def table(rows, field, fmt):
    cell = {(r.alpha, r.A): r for r in rows}
    lines = ["A \\ alpha".ljust(10) + "".join(f"{a:>12g}" for a in SWEEP_ALPHAS)]
    for A in SWEEP_AS:
        parts = []
        for a in SWEEP_ALPHAS:
            r = cell[(a, A)]
            parts.append((format(getattr(r, field), fmt) + ("*" if r.saturated else " ")).rjust(12))
        lines.append(f"{A:<10g}" + "".join(parts))
    return "\n".join(lines)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--dynamics", default="unicycle", choices=("si", "unicycle"))
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()
    warnings.simplefilter("ignore", RigidityWarning)

    rows = sweep(scenario_v_formation("cycle", dynamics=args.dynamics), workers=args.workers)
    print("average triggers per agent (tau1 + tau2)")
    print(table(rows, "triggers_total", ".1f"))
    print("\nF(T)")
    print(table(rows, "F_T", ".4f"))
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        write_sweep_csv(rows, args.out)


if __name__ == "__main__":
    main()
