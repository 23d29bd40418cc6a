"""Containers for trajectory ensembles and row-stochastic transition matrices."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """n_states trajectories sampled on a shared time grid.

    Parameters
    ----------
    positions : ndarray, shape (n_states, n_times, n_dims)
        Particle coordinates in the flow's length unit.
    times : ndarray, shape (n_times,)
        Strictly increasing sample times.
    periods : tuple of (float or None), optional
        Periodic extent per dimension; None marks a non-periodic dimension.
        Positions are stored unwrapped regardless.
    """

    positions: np.ndarray
    times: np.ndarray
    periods: tuple | None = None

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        t = np.asarray(self.times, dtype=float)
        if pos.ndim != 3:
            raise ValueError(f"positions must be (n_states, n_times, n_dims), got shape {pos.shape}")
        n, T, d = pos.shape
        if n < 1 or T < 1 or d < 1:
            raise ValueError(f"empty ensemble: shape {pos.shape}")
        if t.shape != (T,):
            raise ValueError(f"times has shape {t.shape}, expected ({T},)")
        if not np.all(np.isfinite(pos)):
            bad = np.argwhere(~np.isfinite(pos))[0]
            raise ValueError(f"non-finite position at state {bad[0]}, time index {bad[1]}")
        if not np.all(np.isfinite(t)):
            raise ValueError("non-finite time value")
        if T > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        if self.periods is not None:
            p = tuple(self.periods)
            if len(p) != d:
                raise ValueError(f"periods has {len(p)} entries for {d} dimensions")
            for dim, L in enumerate(p):
                if L is not None and not (np.isfinite(L) and L > 0):
                    raise ValueError(f"period for dimension {dim} must be positive, got {L}")
            object.__setattr__(self, "periods", p)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "times", t)

    @property
    def n_states(self) -> int:
        return self.positions.shape[0]

    @property
    def n_times(self) -> int:
        return self.positions.shape[1]

    @property
    def n_dims(self) -> int:
        return self.positions.shape[2]


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic n x n matrix; each row is a distribution over states."""

    rows: np.ndarray = field(repr=False)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] != rows.shape[1]:
            raise ValueError(f"transition matrix must be square, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise ValueError("non-finite transition probability")
        if np.any(rows < 0) or np.any(rows > 1):
            i, j = np.argwhere((rows < 0) | (rows > 1))[0]
            raise ValueError(f"entry ({i},{j}) = {rows[i, j]} outside [0, 1]")
        sums = rows.sum(axis=1)
        bad = np.abs(sums - 1.0) > ROW_SUM_TOL
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ValueError(f"row {i} sums to {sums[i]:.12g}, not 1 within {ROW_SUM_TOL}")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]
