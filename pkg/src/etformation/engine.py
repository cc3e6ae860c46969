"""Deterministic simulation loop.

One step at time t = k * dt:

1. snapshot the true positions,
2. decide which agents trigger (event conditions or the periodic clock),
3. triggered agents broadcast their position and recompute their control
   from the freshest broadcasts (including neighbours that triggered in the
   same step),
4. advance the plant with every agent's held control,
5. record.

With ``hold="own"`` (default) an agent's control changes only at its own
triggers. ``hold="latest"`` instead re-evaluates every control whenever any
broadcast changes, i.e. the stacked loop u = -alpha L(x(t_k)) x(t_k) with
the current broadcast vector; only there do the controls sum to zero at all
times, so only there is the centroid conserved under event triggering.

At k = 0 every agent triggers once. In event mode that trigger is logged as
``initial`` and is not counted in tau1/tau2; in periodic mode it is the
first periodic update.
"""
from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import controller as ctl
from . import dynamics as dyn
from .formation import FormationSpec
from .graph import is_connected, is_rigid
from .metrics import formation_error
from .trigger import (COND1, INITIAL, PERIODIC, PeriodicPolicy, TriggerRecord,
                      TriggerState, evaluate_events)

log = logging.getLogger(__name__)

CONDITION_CODES = {"": 0, COND1: 1, "2": 2, PERIODIC: 3, INITIAL: 4}
CODE_NAMES = {v: k for k, v in CONDITION_CODES.items()}


class ConfigError(ValueError):
    pass


class DivergenceError(RuntimeError):
    pass


class RigidityWarning(UserWarning):
    pass


@dataclass
class SimConfig:
    spec: FormationSpec
    initial: np.ndarray  # (n, D); look-ahead points in unicycle mode
    params: ctl.ControllerParams
    plant: dyn.PlantConfig = field(default_factory=dyn.PlantConfig)
    trigger: str = "event"  # or "periodic"
    period: int = 1
    horizon: float = 100.0
    record_stride: int = 1
    initial_theta: np.ndarray | None = None  # unicycle headings, default 0
    name: str = "custom"
    seed: int | None = None
    hold: str = "own"  # or "latest"

    def __post_init__(self):
        self.initial = np.array(self.initial, dtype=float)
        if self.initial_theta is not None:
            self.initial_theta = np.array(self.initial_theta, dtype=float).reshape(-1)

    @property
    def n(self) -> int:
        return self.spec.graph.n

    @property
    def dim(self) -> int:
        return self.initial.shape[1]

    @property
    def steps(self) -> int:
        # nearest whole step: 100 s at 0.0329 s is 3040 steps, 25 s at 0.05 s is 500
        return int(math.floor(self.horizon / self.plant.dt + 0.5))

    def validate(self) -> None:
        if self.initial.ndim != 2 or self.initial.shape[0] != self.n:
            raise ConfigError(f"initial positions must be ({self.n}, D), got {self.initial.shape}")
        if self.dim not in (2, 3):
            raise ConfigError(f"dimension must be 2 or 3, got {self.dim}")
        if not np.all(np.isfinite(self.initial)):
            raise ConfigError("initial positions must be finite")
        if self.plant.model == "unicycle" and self.dim != 2:
            raise ConfigError("unicycle plant is planar")
        if self.initial_theta is not None and self.initial_theta.shape != (self.n,):
            raise ConfigError("initial_theta must have one heading per agent")
        if self.trigger not in ("event", "periodic"):
            raise ConfigError(f"unknown trigger mode {self.trigger!r}")
        if self.hold not in ("own", "latest"):
            raise ConfigError(f"unknown hold mode {self.hold!r}")
        if self.period < 1 or self.record_stride < 1:
            raise ConfigError("period and record_stride must be >= 1")
        if not self.horizon > 0 or self.steps < 1:
            raise ConfigError("horizon must cover at least one step")
        try:
            self.params.check(self.spec, self.dim)
        except ctl.ParameterRangeError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass
class SimTrace:
    name: str
    trigger: str
    n: int
    dim: int
    dt: float
    steps: int
    times: np.ndarray  # (S,)
    positions: np.ndarray  # (S, n, D)
    controls: np.ndarray  # (S, n, D)
    e_norm: np.ndarray  # (S, n)
    condition: np.ndarray  # (S, n) int codes, 0 = no trigger at that step
    F_series: np.ndarray
    V_series: np.ndarray
    trigger_state: TriggerState
    saturated: bool
    centroid_drift: float
    F_final: float
    wall_time: float = 0.0
    thetas: np.ndarray | None = None  # (S, n) for unicycle runs

    @property
    def events(self) -> list:
        return self.trigger_state.log

    @property
    def tau1(self) -> np.ndarray:
        return self.trigger_state.tau1

    @property
    def tau2(self) -> np.ndarray:
        return self.trigger_state.tau2

    @property
    def final_positions(self) -> np.ndarray:
        return self.positions[-1]


def check_topology(cfg: SimConfig) -> None:
    g = cfg.spec.graph
    if not is_connected(g):
        raise ConfigError("communication graph is not connected")
    if g.n >= cfg.dim and not is_rigid(g, cfg.initial):
        warnings.warn(f"{cfg.name}: graph is not rigid at the initial placement",
                      RigidityWarning, stacklevel=3)


def run(cfg: SimConfig) -> SimTrace:
    cfg.validate()
    check_topology(cfg)
    t_wall = time.perf_counter()

    spec, params, plant = cfg.spec, cfg.params, cfg.plant
    n, dim, dt, steps = cfg.n, cfg.dim, plant.dt, cfg.steps
    unicycle = plant.model == "unicycle"
    policy = PeriodicPolicy(cfg.period) if cfg.trigger == "periodic" else None

    if unicycle:
        theta0 = np.zeros(n) if cfg.initial_theta is None else cfg.initial_theta
        poses = dyn.poses_from_ell_points(cfg.initial, theta0, plant.ell)
        pos = dyn.ell_points(poses, plant.ell)
    else:
        poses = None
        pos = cfg.initial.copy()

    bt = ctl.BroadcastTable.from_positions(pos, 0.0)
    ts = TriggerState.empty(n, dim)
    u = np.zeros((n, dim))
    centroid0 = ctl.centroid(pos)
    saturated = False

    n_rec = -(-steps // cfg.record_stride) + 1
    times = np.empty(n_rec)
    positions = np.empty((n_rec, n, dim))
    controls = np.empty((n_rec, n, dim))
    e_norm = np.empty((n_rec, n))
    cond_codes = np.zeros((n_rec, n), dtype=np.int8)
    F_series = np.empty(n_rec)
    V_series = np.empty(n_rec)
    thetas = np.empty((n_rec, n)) if unicycle else None
    r = 0

    for k in range(steps):
        t = k * dt
        e = bt.last_pos - pos
        ts.e = e

        if k == 0:
            fired = np.arange(n)
            conds = [INITIAL if policy is None else PERIODIC] * n
            lhs = thr = np.zeros(n)
        elif policy is not None:
            fired = np.arange(n) if policy.fires(k) else np.empty(0, dtype=np.intp)
            conds = [PERIODIC] * len(fired)
            lhs = thr = np.zeros(n)
        else:
            chk = evaluate_events(spec, params, pos, bt, e)
            fired = np.flatnonzero(chk.fired)
            conds = [chk.condition(i) for i in fired]
            lhs = np.where(chk.cond1, chk.lhs1, chk.lhs2)
            thr = np.where(chk.cond1, chk.thr1, chk.thr2)

        codes = np.zeros(n, dtype=np.int8)
        if len(fired):
            bt.update(fired, pos, t)
            for i, c in zip(fired, conds):
                ts.record(TriggerRecord(int(i), t, c, float(lhs[i]), float(thr[i])))
                codes[i] = CONDITION_CODES[c]
            fresh = ctl.all_controls(spec, params, bt.last_pos)
            if cfg.hold == "own":
                u[fired] = fresh[fired]
            else:
                u = fresh
            if not saturated and dyn.saturated(u, plant.v_max):
                saturated = True
        e = bt.last_pos - pos

        if k % cfg.record_stride == 0:
            times[r] = t
            positions[r] = pos
            controls[r] = u
            e_norm[r] = np.linalg.norm(e, axis=1)
            cond_codes[r] = codes
            F_series[r] = formation_error(spec, pos)
            V_series[r] = ctl.lyapunov(spec, params, pos)
            if unicycle:
                thetas[r] = poses[:, 2]
            r += 1

        if unicycle:
            v, omega = dyn.si_to_uni_all(u, poses, plant.ell)
            poses = dyn.uni_step_all(poses, v, omega, dt)
            pos = dyn.ell_points(poses, plant.ell)
        else:
            pos = dyn.si_step(pos, u, dt)

        if not np.all(np.isfinite(pos)):
            raise DivergenceError(f"{cfg.name}: state became non-finite at t={t + dt:.4g} s")

    ts.e = bt.last_pos - pos
    times[r] = steps * dt
    positions[r] = pos
    controls[r] = u
    e_norm[r] = np.linalg.norm(ts.e, axis=1)
    F_series[r] = F_final = formation_error(spec, pos)
    V_series[r] = ctl.lyapunov(spec, params, pos)
    if unicycle:
        thetas[r] = poses[:, 2]
    r += 1

    return SimTrace(
        name=cfg.name,
        trigger=cfg.trigger,
        n=n,
        dim=dim,
        dt=dt,
        steps=steps,
        times=times[:r],
        positions=positions[:r],
        controls=controls[:r],
        e_norm=e_norm[:r],
        condition=cond_codes[:r],
        F_series=F_series[:r],
        V_series=V_series[:r],
        trigger_state=ts,
        saturated=saturated,
        centroid_drift=float(np.linalg.norm(ctl.centroid(pos) - centroid0)),
        F_final=F_final,
        wall_time=time.perf_counter() - t_wall,
        thetas=thetas[:r] if unicycle else None,
    )
