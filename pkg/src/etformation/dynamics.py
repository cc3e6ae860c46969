"""Plant models: single integrator under zero-order hold, and the unicycle
driven through a point a fixed distance ahead of the wheel axle."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def wrap_angle(theta):
    """Wrap to (-pi, pi]."""
    out = np.pi - np.mod(np.pi - np.asarray(theta, dtype=float), 2 * np.pi)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class UnicyclePose:
    p_x: float
    p_y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(self.theta))


@dataclass(frozen=True)
class PlantConfig:
    model: str = "single_integrator"  # or "unicycle"
    dt: float = 0.0329
    ell: float = 0.05
    v_max: float = 0.2

    def __post_init__(self):
        if self.model not in ("single_integrator", "unicycle"):
            raise ValueError(f"unknown plant model {self.model!r}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.ell > 0:
            raise ValueError("ell must be positive")
        if not self.v_max > 0:
            raise ValueError("v_max must be positive")


def si_step(pos: np.ndarray, u_held: np.ndarray, dt: float) -> np.ndarray:
    return pos + dt * u_held


def ell_point(pose: UnicyclePose, ell: float) -> np.ndarray:
    return np.array([pose.p_x + ell * math.cos(pose.theta),
                     pose.p_y + ell * math.sin(pose.theta)])


def si_to_uni(si_vel, pose: UnicyclePose, ell: float) -> tuple[float, float]:
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    vx, vy = float(si_vel[0]), float(si_vel[1])
    return c * vx + s * vy, (-s * vx + c * vy) / ell


def uni_step(pose: UnicyclePose, v: float, omega: float, dt: float) -> UnicyclePose:
    """Exact integration for constant (v, omega) over one step."""
    th = pose.theta
    if abs(omega) < 1e-9:
        return UnicyclePose(pose.p_x + v * dt * math.cos(th), pose.p_y + v * dt * math.sin(th), th)
    th1 = th + omega * dt
    r = v / omega
    return UnicyclePose(pose.p_x + r * (math.sin(th1) - math.sin(th)),
                        pose.p_y + r * (math.cos(th) - math.cos(th1)), th1)


# Array forms used by the engine; same maths as above for all agents at once.

def ell_points(poses: np.ndarray, ell: float) -> np.ndarray:
    """``poses`` is (n, 3) of (p_x, p_y, theta)."""
    th = poses[:, 2]
    return poses[:, :2] + ell * np.column_stack([np.cos(th), np.sin(th)])


def si_to_uni_all(si_vel: np.ndarray, poses: np.ndarray, ell: float):
    c, s = np.cos(poses[:, 2]), np.sin(poses[:, 2])
    v = c * si_vel[:, 0] + s * si_vel[:, 1]
    omega = (-s * si_vel[:, 0] + c * si_vel[:, 1]) / ell
    return v, omega


def uni_step_all(poses: np.ndarray, v: np.ndarray, omega: np.ndarray, dt: float) -> np.ndarray:
    th = poses[:, 2]
    th1 = th + omega * dt
    straight = np.abs(omega) < 1e-9
    safe = np.where(straight, 1.0, omega)
    r = v / safe
    dx = np.where(straight, v * dt * np.cos(th), r * (np.sin(th1) - np.sin(th)))
    dy = np.where(straight, v * dt * np.sin(th), r * (np.cos(th) - np.cos(th1)))
    return np.column_stack([poses[:, 0] + dx, poses[:, 1] + dy, wrap_angle(th1)])


def poses_from_ell_points(points: np.ndarray, theta, ell: float) -> np.ndarray:
    """Place robots so their look-ahead points land on ``points``."""
    pts = np.asarray(points, dtype=float)
    th = np.broadcast_to(np.asarray(theta, dtype=float), (len(pts),))
    body = pts - ell * np.column_stack([np.cos(th), np.sin(th)])
    return np.column_stack([body, wrap_angle(th)])


def saturated(u: np.ndarray, v_max: float) -> bool:
    return bool(np.any(np.linalg.norm(u, axis=1) > v_max))


def saturation_flag(controls, v_max: float) -> bool:
    """True if any agent's commanded speed exceeded ``v_max`` at any step.

    ``controls`` is an iterable of (n, D) control snapshots. Nothing is clipped.
    """
    return any(saturated(np.asarray(u), v_max) for u in controls)
