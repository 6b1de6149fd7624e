"""Per-dimension AR(1) observation noise: generation and trajectory injection.

The corruption model is z_t = alpha * z_{t-1} + eps_t with Gaussian
innovations, added to each observation dimension independently. alpha
tunes the temporal correlation of the corruption and is the controlled
violation knob; alpha = 0 reduces to i.i.d. noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .trajectory import Episode, Trajectory


@dataclass(frozen=True)
class NoiseConfig:
    """AR(1) noise parameters.

    alpha in [0, 1) is the lag-1 autocorrelation of the noise process,
    innovation_std the standard deviation of the Gaussian innovations.
    With stationary_init the first value is drawn from the stationary
    marginal instead of starting the recursion at z_{-1} = 0.
    """

    alpha: float
    innovation_std: float = 1.0
    seed: int = 0
    stationary_init: bool = False

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must be in [0, 1), got {self.alpha}")
        if self.innovation_std <= 0.0:
            raise ValueError(f"innovation_std must be positive, got {self.innovation_std}")


def ar1_filter(innovations: np.ndarray, alpha: float, stationary_init: bool = False) -> np.ndarray:
    """Run the recursion z_t = alpha * z_{t-1} + eps_t over the leading axis.

    Starts from z_{-1} = 0 so z_0 equals the first innovation; with
    stationary_init the first innovation is scaled by 1/sqrt(1 - alpha^2)
    so z_0 has the stationary variance.
    """
    eps = np.asarray(innovations, dtype=np.float64)
    if stationary_init and alpha > 0.0:
        eps = eps.copy()
        eps[0] = eps[0] / math.sqrt(1.0 - alpha * alpha)
    if alpha == 0.0:
        return eps.copy()
    return lfilter([1.0], [1.0, -alpha], eps, axis=0)


def _dimension_streams(config: NoiseConfig, dims: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(config.seed).spawn(dims)
    return [np.random.default_rng(child) for child in children]


def generate_noise(config: NoiseConfig, dims: int, steps: int) -> np.ndarray:
    """Generate a (steps, dims) AR(1) noise matrix.

    Each dimension uses an independent child stream of the seeded generator,
    so noise in dimension i does not change when dims grows.
    """
    if dims < 1 or steps < 1:
        raise ValueError("dims and steps must be >= 1")
    out = np.empty((steps, dims))
    for d, rng in enumerate(_dimension_streams(config, dims)):
        eps = rng.normal(0.0, config.innovation_std, size=steps)
        out[:, d] = ar1_filter(eps, config.alpha, config.stationary_init)
    return out


def inject_noise(traj: Trajectory, config: NoiseConfig) -> Trajectory:
    """Add AR(1) corruption to every observation dimension of a trajectory.

    The noise state resets at episode boundaries (episodes are collected
    independently, so corruption must not correlate across them); actions
    are untouched. Deterministic given config.seed.
    """
    total = traj.n_steps
    noise = np.empty((total, traj.obs_dim))
    lengths = [len(ep) for ep in traj.episodes]
    for d, rng in enumerate(_dimension_streams(config, traj.obs_dim)):
        eps = rng.normal(0.0, config.innovation_std, size=total)
        offset = 0
        for length in lengths:
            noise[offset : offset + length, d] = ar1_filter(
                eps[offset : offset + length], config.alpha, config.stationary_init
            )
            offset += length
    episodes = []
    offset = 0
    for ep, length in zip(traj.episodes, lengths):
        episodes.append(
            Episode(
                observations=ep.observations + noise[offset : offset + length],
                actions=ep.actions,
            )
        )
        offset += length
    return Trajectory(episodes=tuple(episodes), obs_dim=traj.obs_dim, act_dim=traj.act_dim)
