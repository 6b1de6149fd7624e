"""Episode-structured observation/action trajectories and lag-feature construction.

All types are immutable after construction (arrays are marked read-only),
so they can be shared freely across threads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError


def _frozen_array(values, dtype=np.float64) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Episode:
    """One contiguous run of (observation, action) steps.

    ``observations`` has shape (length, obs_dim). ``actions`` has shape
    (length, act_dim) or (length - 1, act_dim): the terminal observation of
    an episode may carry no action. ``actions[t]`` is the action taken at
    ``observations[t]``.
    """

    observations: np.ndarray
    actions: np.ndarray

    def __post_init__(self):
        obs = _frozen_array(self.observations)
        act = _frozen_array(self.actions)
        if obs.ndim != 2 or act.ndim != 2:
            raise DataError("observations and actions must be 2-d arrays")
        if len(obs) < 2:
            raise DataError("an episode needs at least 2 steps")
        if len(act) not in (len(obs), len(obs) - 1):
            raise DataError(
                f"episode has {len(obs)} observations but {len(act)} actions; "
                "expected length or length - 1"
            )
        if not np.isfinite(obs).all() or not np.isfinite(act).all():
            raise DataError("episode contains non-finite values")
        object.__setattr__(self, "observations", obs)
        object.__setattr__(self, "actions", act)

    def __len__(self) -> int:
        return len(self.observations)


@dataclass(frozen=True)
class Trajectory:
    """A list of episodes with fixed observation and action dimensionality."""

    episodes: tuple[Episode, ...]
    obs_dim: int
    act_dim: int

    def __post_init__(self):
        episodes = tuple(self.episodes)
        if not episodes:
            raise DataError("trajectory has no episodes")
        if self.obs_dim < 1 or self.act_dim < 1:
            raise DataError("obs_dim and act_dim must be positive")
        for i, ep in enumerate(episodes):
            if ep.observations.shape[1] != self.obs_dim:
                raise DataError(f"episode {i}: obs width {ep.observations.shape[1]} != {self.obs_dim}")
            if ep.actions.shape[1] != self.act_dim:
                raise DataError(f"episode {i}: action width {ep.actions.shape[1]} != {self.act_dim}")
        object.__setattr__(self, "episodes", episodes)

    @property
    def n_episodes(self) -> int:
        return len(self.episodes)

    @property
    def n_steps(self) -> int:
        return sum(len(ep) for ep in self.episodes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.obs_dim == other.obs_dim
            and self.act_dim == other.act_dim
            and len(self.episodes) == len(other.episodes)
            and all(
                np.array_equal(a.observations, b.observations)
                and np.array_equal(a.actions, b.actions)
                for a, b in zip(self.episodes, other.episodes)
            )
        )


@dataclass(frozen=True)
class FeatureSet:
    """Aligned design matrices for the current-pair and history regressions.

    ``markov_X`` holds the current (observation, action) pair per row,
    ``history_X`` prefixes that same pair ahead of k - 1 lagged pairs, and
    ``targets_Y`` is the next observation. ``row_index[i] = (episode, t)``
    records where row i came from. No row's lag window crosses an episode
    boundary.
    """

    markov_X: np.ndarray
    history_X: np.ndarray
    targets_Y: np.ndarray
    k: int
    row_index: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.markov_X)

    def select_rows(self, rows) -> "FeatureSet":
        """Return a new FeatureSet restricted to the given row positions (order kept)."""
        rows = np.asarray(rows)
        return FeatureSet(
            markov_X=_frozen_array(self.markov_X[rows]),
            history_X=_frozen_array(self.history_X[rows]),
            targets_Y=_frozen_array(self.targets_Y[rows]),
            k=self.k,
            row_index=_frozen_array(self.row_index[rows], dtype=np.int64),
        )


def build_features(traj: Trajectory, k: int) -> FeatureSet:
    """Build Markov and history feature matrices with history depth k.

    An episode of length L contributes rows for t in [k-1, L-2]: the lag
    window must fit inside the episode and the target o_{t+1} must exist.
    Row order is chronological within and across episodes.
    """
    if k < 2:
        raise ValueError(f"history depth k must be >= 2, got {k}")
    pair_dim = traj.obs_dim + traj.act_dim
    markov_rows, history_rows, target_rows, index_rows = [], [], [], []
    for ep_idx, ep in enumerate(traj.episodes):
        length = len(ep)
        if length - k <= 0:
            continue
        obs, act = ep.observations, ep.actions
        pairs = np.hstack([obs[: length - 1], act[: length - 1]])  # (L-1, pair_dim)
        for t in range(k - 1, length - 1):
            lags = [pairs[t - lag] for lag in range(k)]
            history_rows.append(np.concatenate(lags))
            markov_rows.append(pairs[t])
            target_rows.append(obs[t + 1])
            index_rows.append((ep_idx, t))
    if not markov_rows:
        raise DataError(f"no episode is long enough to yield a feature row at k={k}")
    return FeatureSet(
        markov_X=_frozen_array(markov_rows),
        history_X=_frozen_array(history_rows),
        targets_Y=_frozen_array(target_rows),
        k=k,
        row_index=_frozen_array(index_rows, dtype=np.int64),
    )


def mask_observations(traj: Trajectory, zero_dims) -> Trajectory:
    """Zero out the listed observation dimensions at every step.

    Models partial observability: the masked dimensions become constant 0.0
    while obs_dim and everything else stay unchanged.
    """
    dims = sorted(set(int(d) for d in zero_dims))
    if not dims:
        return traj
    if dims[0] < 0 or dims[-1] >= traj.obs_dim:
        raise IndexError(f"zero_dims {dims} out of range for obs_dim={traj.obs_dim}")
    episodes = []
    for ep in traj.episodes:
        obs = ep.observations.copy()
        obs[:, dims] = 0.0
        episodes.append(Episode(observations=obs, actions=ep.actions))
    return Trajectory(episodes=tuple(episodes), obs_dim=traj.obs_dim, act_dim=traj.act_dim)


def _format(x: float) -> str:
    return repr(float(x))


def save_trajectory(traj: Trajectory, path) -> None:
    """Write a trajectory as UTF-8 CSV, one step per row.

    Header: ``episode,obs_0..obs_{d-1},act_0..act_{a-1}``. Floats are written
    with shortest round-trip precision, so load(save(t)) == t bit-exactly.
    When an episode has no action at its terminal observation, that row's
    action cells are left empty.
    """
    path = Path(path)
    header = (
        ["episode"]
        + [f"obs_{i}" for i in range(traj.obs_dim)]
        + [f"act_{i}" for i in range(traj.act_dim)]
    )
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for ep_idx, ep in enumerate(traj.episodes):
            for t in range(len(ep)):
                row = [str(ep_idx)] + [_format(v) for v in ep.observations[t]]
                if t < len(ep.actions):
                    row += [_format(v) for v in ep.actions[t]]
                else:  # terminal step without action
                    row += [""] * traj.act_dim
                writer.writerow(row)


def load_trajectory(path) -> Trajectory:
    """Read a trajectory written by :func:`save_trajectory`.

    Raises DataError on malformed files: wrong row width, non-finite values,
    non-contiguous episode blocks, or episodes shorter than 2 steps.
    """
    path = Path(path)
    with path.open("r", newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        obs_dim = sum(1 for name in header if name.startswith("obs_"))
        act_dim = sum(1 for name in header if name.startswith("act_"))
        expected = ["episode"] + [f"obs_{i}" for i in range(obs_dim)] + [f"act_{i}" for i in range(act_dim)]
        if header != expected or obs_dim < 1 or act_dim < 1:
            raise DataError(f"{path}: malformed header {header!r}")
        width = 1 + obs_dim + act_dim

        blocks: list[tuple[int, list, list]] = []  # (episode id, obs rows, act rows)
        seen = set()
        for lineno, row in enumerate(reader, start=2):
            if len(row) != width:
                raise DataError(f"{path}:{lineno}: expected {width} fields, got {len(row)}")
            try:
                ep_id = int(row[0])
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad episode id {row[0]!r}") from None
            if not blocks or blocks[-1][0] != ep_id:
                if ep_id in seen:
                    raise DataError(f"{path}:{lineno}: episode {ep_id} is not contiguous")
                seen.add(ep_id)
                blocks.append((ep_id, [], []))
            _, obs_rows, act_rows = blocks[-1]
            obs_rows.append(_parse_floats(row[1 : 1 + obs_dim], path, lineno))
            act_cells = row[1 + obs_dim :]
            if all(cell == "" for cell in act_cells):
                act_rows.append(None)
            else:
                act_rows.append(_parse_floats(act_cells, path, lineno))

    episodes = []
    for ep_id, obs_rows, act_rows in blocks:
        missing = [t for t, a in enumerate(act_rows) if a is None]
        if missing and missing != [len(obs_rows) - 1]:
            raise DataError(f"{path}: episode {ep_id}: only the final step may omit its action")
        actions = [a for a in act_rows if a is not None]
        try:
            episodes.append(Episode(observations=np.array(obs_rows), actions=np.array(actions)))
        except DataError as exc:
            raise DataError(f"{path}: episode {ep_id}: {exc}") from None
    return Trajectory(episodes=tuple(episodes), obs_dim=obs_dim, act_dim=act_dim)


def _parse_floats(cells, path, lineno) -> list[float]:
    values = []
    for cell in cells:
        try:
            value = float(cell)
        except ValueError:
            raise DataError(f"{path}:{lineno}: bad numeric field {cell!r}") from None
        if not np.isfinite(value):
            raise DataError(f"{path}:{lineno}: non-finite value {cell!r}")
        values.append(value)
    return values
