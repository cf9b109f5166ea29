"""Time-domain validation: output trajectories, residuals, noisy detection times."""
from __future__ import annotations

import csv
import json
import logging
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .sysmodel import LumpedRealization

log = logging.getLogger(__name__)

DEFAULT_HORIZON = 10.0
DEFAULT_STEPS = 1000


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    outputs: np.ndarray  # (len(times), n_y)
    label: str
    initial_state: np.ndarray
    sensors: tuple = ()

    @property
    def n_y(self) -> int:
        return self.outputs.shape[1]


@dataclass(frozen=True)
class DetectionExperiment:
    noise_std: float
    threshold: float
    first_detection_time: float | None
    deviations: np.ndarray


def time_grid(horizon=DEFAULT_HORIZON, steps=DEFAULT_STEPS) -> np.ndarray:
    return np.linspace(0.0, float(horizon), int(steps) + 1)


def random_initial_state(n_x: int, seed) -> np.ndarray:
    x0 = np.random.default_rng(seed).standard_normal(n_x)
    return x0 / np.linalg.norm(x0)


def _check_grid(grid):
    t = np.asarray(grid, dtype=float)
    if t.ndim != 1 or t.size == 0 or t[0] != 0.0:
        raise ValueError("time grid must be 1-D and start at 0")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return t


def propagate(lumped: LumpedRealization, x0, grid, label="") -> Trajectory:
    """Sample ``y(t_k) = Q exp(Phi t_k) x0`` by stepping with ``exp(Phi dt)``.

    One propagator per distinct step length (steps equal to 1e-12 relative
    share a propagator). Non-finite states truncate the trajectory.
    """
    t = _check_grid(grid)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (lumped.n_x,):
        raise ValueError(f"initial state must have dimension {lumped.n_x}, got {x0.shape}")
    cache = {}
    states = np.empty((t.size, lumped.n_x))
    states[0] = x0
    x = x0
    end = t.size
    for k in range(1, t.size):
        dt = t[k] - t[k - 1]
        key = round(dt, 12)
        if key not in cache:
            cache[key] = expm(lumped.Phi * dt)
        with np.errstate(over="ignore", invalid="ignore"):
            x = cache[key] @ x
        if not np.all(np.isfinite(x)):
            warnings.warn(f"trajectory {label!r} diverged at t={t[k]:g}; truncated", RuntimeWarning)
            end = k
            break
        states[k] = x
    outputs = states[:end] @ lumped.Q.T
    return Trajectory(t[:end], outputs, label, x0, tuple(lumped.sensors))


def residual(traj_a: Trajectory, traj_b: Trajectory):
    """Per-instant 2-norm of the output difference and its maximum."""
    if traj_a.times.shape != traj_b.times.shape or not np.array_equal(traj_a.times, traj_b.times):
        raise ValueError("trajectories are sampled on different grids")
    if not np.array_equal(traj_a.initial_state, traj_b.initial_state):
        raise ValueError("trajectories start from different initial states")
    if traj_a.outputs.shape != traj_b.outputs.shape:
        raise ValueError("trajectories have different output dimensions")
    per = np.linalg.norm(traj_a.outputs - traj_b.outputs, axis=1)
    return per, float(per.max()) if per.size else 0.0


def _measurement_noise(faulty: Trajectory, noise_std, seed):
    K, n_y = faulty.outputs.shape
    if noise_std == 0:
        return np.zeros((K, n_y))
    if faulty.sensors and n_y % len(faulty.sensors) == 0:
        # one stream per sensor node, so a node sees the same noise in any sensor set
        p = n_y // len(faulty.sensors)
        cols = [np.random.default_rng([int(seed), int(s)]).normal(0.0, noise_std, (K, p))
                for s in faulty.sensors]
        return np.hstack(cols)
    return np.random.default_rng(seed).normal(0.0, noise_std, (K, n_y))


def detection_time(nominal: Trajectory, faulty: Trajectory, noise_std, threshold, seed=0) -> DetectionExperiment:
    """First grid instant where ``||y_faulty + noise - y_nominal||_2 > threshold``.

    Only the faulty measurement is noisy; the nominal reference is noiseless.
    """
    if noise_std < 0:
        raise ValueError("noise_std must be non-negative")
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    if not np.array_equal(nominal.times, faulty.times) or nominal.outputs.shape != faulty.outputs.shape:
        raise ValueError("trajectories are not matched")
    noisy = faulty.outputs + _measurement_noise(faulty, noise_std, seed)
    dev = np.linalg.norm(noisy - nominal.outputs, axis=1)
    fired = np.flatnonzero(dev > threshold)
    first = float(nominal.times[fired[0]]) if fired.size else None
    return DetectionExperiment(float(noise_std), float(threshold), first, dev)


def export_csv(trajectories: Sequence[Trajectory], path) -> Path:
    """One ``time`` column then ``label:channel`` columns, 9 significant digits."""
    path = Path(path)
    header = ["time"]
    if trajectories:
        times = trajectories[0].times
        for tr in trajectories:
            if not np.array_equal(tr.times, times):
                raise ValueError(f"trajectory {tr.label!r} uses a different time grid")
            header += [f"{tr.label}:{c}" for c in range(tr.n_y)]
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            if trajectories:
                data = np.hstack([times[:, None]] + [tr.outputs for tr in trajectories])
                for row in data:
                    w.writerow([f"{v:.9g}" for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def write_metadata(path, meta: dict) -> Path:
    path = Path(path)
    try:
        path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path
