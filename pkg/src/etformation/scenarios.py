"""Scenario builders for the V-formation, parameter sweep and sphere runs."""
from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import graph as gr
from .controller import ControllerParams
from .dynamics import PlantConfig
from .engine import SimConfig, run
from .formation import from_distances, from_target_placement

V_DT = 0.0329
SPHERE_DT = 0.05

PLANT_MODELS = {"si": "single_integrator", "single_integrator": "single_integrator",
                "unicycle": "unicycle"}

SWEEP_ALPHAS = (0.01, 0.05, 0.1)
SWEEP_AS = (0.0001, 0.001, 0.01, 0.1, 1.0, 10.0)


def circle_positions(n: int, radius: float) -> np.ndarray:
    ang = 2 * np.pi * np.arange(n) / n
    return radius * np.column_stack([np.cos(ang), np.sin(ang)])


def v_formation_target(arm_dists=(0.2, 0.6, 1.0), opening_deg: float = 120.0) -> np.ndarray:
    """Two arms meeting at an empty vertex at the origin, symmetric about +x.

    Order walks the upper arm from its tip inwards, then the lower arm
    outwards, so neighbouring indices are neighbouring slots on the V.
    """
    half = math.radians(opening_deg / 2)
    up = np.array([math.cos(half), math.sin(half)])
    down = np.array([math.cos(half), -math.sin(half)])
    upper = [r * up for r in sorted(arm_dists, reverse=True)]
    lower = [r * down for r in sorted(arm_dists)]
    return np.array(upper + lower)


def scenario_v_formation(topology: str = "complete", dynamics: str = "unicycle",
                         trigger: str = "event", period: int = 1, alpha: float | None = None,
                         A: float = 0.001, dt: float = V_DT, horizon: float = 100.0,
                         v_max: float = 0.2, record_stride: int = 1) -> SimConfig:
    """Six agents on a 0.9 m circle driven into a 120 degree V."""
    n = 6
    if topology == "complete":
        g = gr.complete(n)
        default_alpha = 0.01
    elif topology == "cycle":
        g = gr.cycle(n)
        default_alpha = 0.05
    else:
        raise ValueError(f"unknown topology {topology!r}")
    spec = from_target_placement(g, v_formation_target())
    params = ControllerParams.uniform(spec, 2, alpha=default_alpha if alpha is None else alpha,
                                      A=A, sigma_frac=0.5, v_max=v_max)
    model = PLANT_MODELS.get(dynamics)
    if model is None:
        raise ValueError(f"unknown dynamics {dynamics!r}")
    return SimConfig(
        spec=spec,
        initial=circle_positions(n, 0.9),
        params=params,
        plant=PlantConfig(model=model, dt=dt, ell=0.05, v_max=v_max),
        trigger=trigger,
        period=period,
        horizon=horizon,
        record_stride=record_stride,
        name=f"v-{topology}",
    )


def fibonacci_sphere(n: int, radius: float = 10.0) -> np.ndarray:
    """Golden-angle lattice with both poles included, polar axis along z."""
    i = np.arange(n)
    z = 1.0 - 2.0 * i / (n - 1) if n > 1 else np.zeros(1)
    r = np.sqrt(np.clip(1.0 - z**2, 0.0, None))
    phi = np.pi * (3.0 - math.sqrt(5.0)) * i
    return radius * np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def scenario_sphere(n: int = 200, seed: int | None = None, trigger: str = "event",
                    period: int = 1, radius: float = 10.0, comm_radius: float = 5.0,
                    split_dist: float = 20.0, alpha: float = 0.00025, A: float = 0.001,
                    dt: float = SPHERE_DT, horizon: float = 25.0, jitter: float = 0.0,
                    record_stride: int = 1) -> SimConfig:
    """Agents on a Fibonacci sphere; edges crossing the equator stretch to ``split_dist``.

    ``seed`` only matters when ``jitter > 0``: each coordinate is then
    perturbed by up to ``jitter`` metres and the point pushed back onto the sphere.
    """
    pts = fibonacci_sphere(n, radius)
    if jitter > 0:
        rng = np.random.default_rng(seed)
        pts = pts + rng.uniform(-jitter, jitter, pts.shape)
        pts *= radius / np.linalg.norm(pts, axis=1, keepdims=True)
    g = gr.disk_graph(pts, comm_radius)
    dist = np.linalg.norm(pts[g.head] - pts[g.tail], axis=1)
    cross = np.sign(pts[g.tail, 2]) != np.sign(pts[g.head, 2])
    spec = from_distances(g, np.where(cross, split_dist, dist))
    params = ControllerParams.uniform(spec, 3, alpha=alpha, A=A, sigma_frac=0.5)
    return SimConfig(
        spec=spec,
        initial=pts,
        params=params,
        plant=PlantConfig(model="single_integrator", dt=dt),
        trigger=trigger,
        period=period,
        horizon=horizon,
        record_stride=record_stride,
        name="sphere",
        seed=seed,
    )


def cross_hemisphere_edges(cfg: SimConfig) -> np.ndarray:
    g = cfg.spec.graph
    z = cfg.initial[:, 2]
    return np.flatnonzero(np.sign(z[g.tail]) != np.sign(z[g.head]))


SCENARIOS = {
    "v-complete": lambda **kw: scenario_v_formation("complete", **kw),
    "v-cycle": lambda **kw: scenario_v_formation("cycle", **kw),
    "sphere": lambda **kw: scenario_sphere(**kw),
}


@dataclass
class SweepRow:
    alpha: float
    A: float
    F_T: float
    triggers_total: float
    saturated: bool


def with_gains(base: SimConfig, alpha: float, A: float) -> SimConfig:
    params = dataclasses.replace(base.params, alpha=alpha,
                                 A=np.full_like(base.params.A, A))
    return dataclasses.replace(base, params=params)


def _sweep_cell(args) -> SweepRow:
    base, alpha, A = args
    tr = run(with_gains(base, alpha, A))
    total = float(np.mean(tr.tau1 + tr.tau2))
    return SweepRow(alpha, A, tr.F_final, total, tr.saturated)


def sweep(base: SimConfig, alphas=SWEEP_ALPHAS, As=SWEEP_AS, workers: int = 1) -> list[SweepRow]:
    """Grid of runs over (alpha, A), rows ordered A-major like the tables."""
    cells = [(base, alpha, A) for A in As for alpha in alphas]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_sweep_cell, cells))
    return [_sweep_cell(c) for c in cells]
