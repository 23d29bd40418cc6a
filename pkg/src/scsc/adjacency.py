"""Pairwise dissimilarity matrices from trajectories or transition matrices.

Two metrics are provided: the normalized separation deviation for trajectory
pairs (the time-resolved distance between two particles, its spread around the
mean, divided by that mean) and the square root of the Jensen-Shannon
divergence for pairs of probability distributions.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from scsc.ensemble import TrajectoryEnsemble, TransitionMatrix

SYMMETRY_TOL = 1e-9
DIAGONAL_TOL = 1e-12
DISTRIBUTION_TOL = 1e-9

# rows per work item in the pairwise sweep; fixed so that results do not
# depend on the worker count
_SWEEP_BLOCK = 8


@dataclass(frozen=True)
class AdjacencyMatrix:
    """Dense symmetric nonnegative dissimilarity matrix with zero diagonal."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _pair_separations(positions, i, j_slice, periods=None, minimum_image=False):
    """Euclidean separation time series between state i and a block of states.

    Returns an array of shape (block, n_times). Minimum-image wrapping is
    applied per periodic dimension when requested.
    """
    diff = positions[j_slice] - positions[i]
    if minimum_image and periods is not None:
        for dim, L in enumerate(periods):
            if L is not None:
                diff[:, :, dim] -= L * np.round(diff[:, :, dim] / L)
    return np.sqrt((diff * diff).sum(axis=-1))


def _normalized_deviation(r):
    """sqrt(sum_k (rbar - r_k)^2) / rbar per row of r; 0 where rbar == 0."""
    rbar = r.mean(axis=1)
    dev = np.sqrt(((rbar[:, None] - r) ** 2).sum(axis=1))
    degenerate = rbar == 0.0
    if np.any(degenerate):
        warnings.warn(
            f"{int(degenerate.sum())} identical trajectory pair(s); dissimilarity set to 0",
            stacklevel=3,
        )
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(degenerate, 0.0, dev / np.where(degenerate, 1.0, rbar))
    return out


def trajectory_dissimilarity(ensemble: TrajectoryEnsemble, i: int, j: int, minimum_image: bool = False) -> float:
    """Normalized deviation of the separation between trajectories i and j.

    With r_k the distance between the two particles at sample time k and rbar
    its time mean, returns sqrt(sum_k (rbar - r_k)^2) / rbar. Identical
    trajectories (rbar == 0) yield 0 with a warning.
    """
    n = ensemble.n_states
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"state indices ({i}, {j}) out of range for n={n}")
    if i == j:
        raise ValueError("trajectory_dissimilarity requires i != j")
    if ensemble.n_times < 2:
        raise ValueError("need at least 2 time samples")
    r = _pair_separations(ensemble.positions, i, slice(j, j + 1), ensemble.periods, minimum_image)
    return float(_normalized_deviation(r)[0])


def build_trajectory_adjacency(
    ensemble: TrajectoryEnsemble, minimum_image: bool = False, workers: int = 1
) -> AdjacencyMatrix:
    """Dissimilarity matrix over all unordered trajectory pairs.

    Each pair is evaluated exactly once and mirrored, so the result is exactly
    symmetric with a zero diagonal. The row sweep is split into fixed blocks;
    the worker count changes scheduling only, never any output bit.
    """
    n = ensemble.n_states
    pos = ensemble.positions
    periods = ensemble.periods
    out = np.zeros((n, n))

    def sweep(i0):
        for i in range(i0, min(i0 + _SWEEP_BLOCK, n - 1)):
            r = _pair_separations(pos, i, slice(i + 1, n), periods, minimum_image)
            out[i, i + 1 :] = _normalized_deviation(r)

    starts = range(0, n - 1, _SWEEP_BLOCK)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(sweep, starts))
    else:
        for i0 in starts:
            sweep(i0)

    lower = np.tril_indices(n, -1)
    out[lower] = out.T[lower]
    return AdjacencyMatrix(out)


def js_divergence(P, Q) -> float:
    """Jensen-Shannon divergence (natural log) between two distributions.

    Uses the convention 0*log(0/m) = 0; the result is clamped to be
    nonnegative against rounding and is bounded by ln 2.
    """
    p = np.asarray(P, dtype=float)
    q = np.asarray(Q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError(f"P and Q must be 1-D of equal length, got {p.shape} and {q.shape}")
    for name, v in (("P", p), ("Q", q)):
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError(f"{name} has negative or non-finite entries")
        if abs(v.sum() - 1.0) > DISTRIBUTION_TOL:
            raise ValueError(f"{name} sums to {v.sum():.12g}, not 1 within {DISTRIBUTION_TOL}")
    m = 0.5 * (p + q)
    with np.errstate(invalid="ignore", divide="ignore"):
        terms_p = np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0) / np.where(m > 0, m, 1.0)), 0.0)
        terms_q = np.where(q > 0, q * np.log(np.where(q > 0, q, 1.0) / np.where(m > 0, m, 1.0)), 0.0)
    return max(0.0, 0.5 * float(terms_p.sum()) + 0.5 * float(terms_q.sum()))


def js_metric(P, Q) -> float:
    """Square root of the Jensen-Shannon divergence; a true metric."""
    return float(np.sqrt(js_divergence(P, Q)))


def build_transition_adjacency(T: TransitionMatrix) -> AdjacencyMatrix:
    """Pairwise Jensen-Shannon metric between the rows of a transition matrix."""
    rows = T.rows
    n = T.n
    out = np.zeros((n, n))
    log = np.log
    for i in range(n - 1):
        p = rows[i]
        q = rows[i + 1 :]
        m = 0.5 * (p[None, :] + q)
        with np.errstate(invalid="ignore", divide="ignore"):
            tp = np.where(p[None, :] > 0, p[None, :] * log(np.where(p[None, :] > 0, p[None, :], 1.0) / np.where(m > 0, m, 1.0)), 0.0)
            tq = np.where(q > 0, q * log(np.where(q > 0, q, 1.0) / np.where(m > 0, m, 1.0)), 0.0)
        div = np.maximum(0.0, 0.5 * tp.sum(axis=1) + 0.5 * tq.sum(axis=1))
        out[i, i + 1 :] = np.sqrt(div)
    lower = np.tril_indices(n, -1)
    out[lower] = out.T[lower]
    return AdjacencyMatrix(out)


def validate_adjacency(raw) -> AdjacencyMatrix:
    """Validate an externally supplied square array as an adjacency matrix.

    Asymmetry up to 1e-9 is symmetrized away as (A + A^T)/2; diagonal noise up
    to 1e-12 in magnitude is zeroed. Anything worse is rejected.
    """
    a = np.asarray(raw, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        i, j = np.argwhere(~np.isfinite(a))[0]
        raise ValueError(f"non-finite entry at ({i},{j})")
    asym = np.abs(a - a.T)
    if asym.max(initial=0.0) > SYMMETRY_TOL:
        i, j = np.unravel_index(np.argmax(asym), asym.shape)
        raise ValueError(f"asymmetry {asym[i, j]:.3g} at ({i},{j}) exceeds {SYMMETRY_TOL}")
    a = 0.5 * (a + a.T)
    diag = np.abs(np.diag(a))
    if diag.max(initial=0.0) > DIAGONAL_TOL:
        i = int(np.argmax(diag))
        raise ValueError(f"diagonal entry {a[i, i]:.3g} at ({i},{i}) exceeds {DIAGONAL_TOL}")
    np.fill_diagonal(a, 0.0)
    if np.any(a < 0):
        i, j = np.argwhere(a < 0)[0]
        raise ValueError(f"negative entry {a[i, j]:.3g} at ({i},{j})")
    return AdjacencyMatrix(a)
