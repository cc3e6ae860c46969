"""Command-line entry point.

    etformation run --scenario v-complete --trigger event --out runs/complete
    etformation run --config my.json --out runs/custom
    etformation sweep --out runs/sweep
    etformation sphere --out runs/sphere

Exit codes: 0 success, 1 configuration error, 2 divergence.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import storage
from .controller import ParameterRangeError
from .engine import ConfigError, DivergenceError, RigidityWarning, SimConfig, run
from .formation import FormationError
from .graph import GraphError
from .metrics import compare, summarize
from .scenarios import (PLANT_MODELS, SCENARIOS, SWEEP_ALPHAS, SWEEP_AS, scenario_v_formation,
                        sweep)

log = logging.getLogger("etformation")

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2
CONFIG_ERRORS = (ConfigError, FormationError, GraphError, ParameterRangeError, ValueError,
                 KeyError, TypeError, OSError, json.JSONDecodeError)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trigger", choices=("event", "periodic"))
    p.add_argument("--period", type=int, help="periodic update interval in steps")
    p.add_argument("--dt", type=float)
    p.add_argument("--horizon", type=float)
    p.add_argument("--record-stride", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path, default=Path("."))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="etformation",
                                     description="Event-triggered distance-based formation control")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="run one scenario or config file")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--scenario", default=None, help=f"one of {', '.join(SCENARIOS)}")
    src.add_argument("--config", type=Path)
    _common(p)
    p.add_argument("--dynamics", choices=("si", "unicycle"))
    p.add_argument("--hold", choices=("own", "latest"))
    p.add_argument("--dump-config", type=Path, help="write the resolved config as JSON")

    p = sub.add_parser("sweep", help="alpha x A grid on the cycle V-formation")
    _common(p)
    p.add_argument("--dynamics", choices=("si", "unicycle"), default="unicycle")
    p.add_argument("--alphas", type=float, nargs="+", default=list(SWEEP_ALPHAS))
    p.add_argument("--As", type=float, nargs="+", default=list(SWEEP_AS))
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("sphere", help="200-agent sphere, event vs periodic")
    _common(p)
    p.add_argument("--n", type=int, default=200)
    return parser


def apply_overrides(cfg: SimConfig, args) -> SimConfig:
    changes = {}
    plant = cfg.plant
    if getattr(args, "dt", None) is not None:
        plant = dataclasses.replace(plant, dt=args.dt)
    if getattr(args, "dynamics", None) is not None:
        plant = dataclasses.replace(plant, model=PLANT_MODELS[args.dynamics])
    if plant is not cfg.plant:
        changes["plant"] = plant
    for name in ("trigger", "period", "horizon", "record_stride", "seed", "hold"):
        v = getattr(args, name, None)
        if v is not None:
            changes[name] = v
    return dataclasses.replace(cfg, **changes) if changes else cfg


def write_run(trace, out: Path, prefix: str = "") -> dict:
    out.mkdir(parents=True, exist_ok=True)
    storage.write_trace_csv(trace, out / f"{prefix}trace.csv")
    storage.write_events_csv(trace.events, out / f"{prefix}events.csv")
    summary = summarize(trace)
    storage.write_summary(summary.flat(), out / f"{prefix}summary.txt")
    return summary.flat()


def cmd_run(args) -> int:
    if args.config is not None:
        cfg = storage.load_config(args.config)
    else:
        name = args.scenario or "v-complete"
        if name not in SCENARIOS:
            raise ConfigError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
        cfg = SCENARIOS[name]()
    cfg = apply_overrides(cfg, args)
    if args.dump_config is not None:
        storage.save_config(cfg, args.dump_config)
    summary = write_run(run(cfg), args.out)
    for k, v in summary.items():
        print(f"{k}={v}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = apply_overrides(scenario_v_formation("cycle", dynamics=args.dynamics), args)
    rows = sweep(base, args.alphas, args.As, workers=args.workers)
    args.out.mkdir(parents=True, exist_ok=True)
    storage.write_sweep_csv(rows, args.out / "sweep.csv")
    for r in rows:
        flag = " *saturated*" if r.saturated else ""
        print(f"alpha={r.alpha:<6g} A={r.A:<7g} F(T)={r.F_T:.4f} "
              f"tau1+tau2={r.triggers_total:7.1f}{flag}")
    return EXIT_OK


def cmd_sphere(args) -> int:
    base = apply_overrides(SCENARIOS["sphere"](n=args.n, seed=args.seed), args)
    runs = {}
    for mode in ("event", "periodic"):
        cfg = dataclasses.replace(base, trigger=mode)
        tr = run(cfg)
        prefix = "et_" if mode == "event" else "pt_"
        write_run(tr, args.out, prefix)
        runs[mode] = tr
    with open(args.out / "displacement.csv", "w") as fh:
        fh.write("agent,displacement_et,displacement_pt\n")
        paths = {m: np.linalg.norm(np.diff(tr.positions, axis=0), axis=2).sum(axis=0)
                 for m, tr in runs.items()}
        for i in range(base.n):
            fh.write(f"{i},{paths['event'][i]!r},{paths['periodic'][i]!r}\n")
    print(compare(summarize(runs["event"]), summarize(runs["periodic"])))
    still = float(np.mean(paths["event"] < 0.1))
    print(f"agents moving < 0.1 m (ET): {100 * still:.0f}%")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "sphere": cmd_sphere}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    warnings.simplefilter("default", RigidityWarning)
    try:
        return COMMANDS[args.cmd](args)
    except DivergenceError as exc:
        log.error("%s", exc)
        return EXIT_DIVERGED
    except CONFIG_ERRORS as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
