"""Graph Laplacian and the generalized eigenvalue problem L X = lambda D X.

The pencil is reduced to a standard symmetric problem with the similarity
transform S = D^(-1/2) L D^(-1/2) (D is positive diagonal), solved with a
dense direct eigensolver, and mapped back. Eigenpairs are returned sorted by
nonincreasing eigenvalue with a fixed sign convention so that repeated runs
and downstream bit codes are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from scsc.adjacency import AdjacencyMatrix

RESIDUAL_TOL = 1e-8
ORTHO_TOL = 1e-8


@dataclass(frozen=True)
class SpectralBasis:
    """Top-m generalized eigenpairs of (L, D) plus the degree vector.

    eigenvalues are nonincreasing; eigenvectors[:, k] is normalized so that
    X^T D X = I and its largest-magnitude entry is positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    degrees: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.eigenvectors.shape[0]

    @property
    def m(self) -> int:
        return self.eigenvectors.shape[1]


def degree_vector(A: AdjacencyMatrix) -> np.ndarray:
    """Row sums of the adjacency matrix; must all be positive."""
    d = A.values.sum(axis=1)
    if np.any(d <= 0):
        i = int(np.argmax(d <= 0))
        raise ValueError(f"state {i} has zero total dissimilarity; deduplicate or perturb the input")
    return d


def graph_laplacian(A: AdjacencyMatrix) -> np.ndarray:
    """L = diag(row sums) - A."""
    d = degree_vector(A)
    L = -A.values.copy()
    L[np.diag_indices_from(L)] = d
    return L


def _fix_signs(X):
    # largest-|entry| positive per column; argmax takes the lowest index on ties
    for k in range(X.shape[1]):
        if X[np.argmax(np.abs(X[:, k])), k] < 0:
            X[:, k] = -X[:, k]
    return X


def _first_nonzero_index(col):
    nz = np.abs(col) > 1e-12 * np.abs(col).max()
    return int(np.argmax(nz))


def solve_generalized(A: AdjacencyMatrix, m: int | None = None) -> SpectralBasis:
    """Solve L X = lambda D X and keep the top m eigenpairs.

    Eigenvalues tie-break by ascending index of the first nonzero eigenvector
    entry after sign fixing, so exactly degenerate spectra still order
    deterministically (the basis within a degenerate subspace remains
    solver-chosen; see module tests).
    """
    n = A.n
    if m is None:
        m = n
    if not (1 <= m <= n):
        raise ValueError(f"requested {m} eigenpairs for n={n}")
    d = degree_vector(A)
    L = graph_laplacian(A)
    s = 1.0 / np.sqrt(d)
    S = (L * s[None, :]) * s[:, None]
    S = 0.5 * (S + S.T)
    w, Y = scipy.linalg.eigh(S, driver="evd")
    X = Y * s[:, None]
    X /= np.sqrt((X * X * d[:, None]).sum(axis=0))
    X = _fix_signs(X)

    order = np.argsort(-w, kind="stable")
    w = w[order]
    X = X[:, order]
    # stable secondary ordering inside exactly-equal eigenvalue runs
    k = 0
    while k < n - 1:
        j = k + 1
        while j < n and w[j] == w[k]:
            j += 1
        if j - k > 1:
            sub = sorted(range(k, j), key=lambda c: _first_nonzero_index(X[:, c]))
            X[:, k:j] = X[:, sub]
        k = j

    w = w[:m].copy()
    X = np.ascontiguousarray(X[:, :m])

    Dx = X * d[:, None]
    resid = np.linalg.norm(L @ X - Dx * w[None, :], axis=0)
    scale = np.linalg.norm(Dx, axis=0)
    if np.any(resid > RESIDUAL_TOL * scale):
        k = int(np.argmax(resid / scale))
        raise ArithmeticError(
            f"eigenpair {k} residual {resid[k]:.3e} exceeds {RESIDUAL_TOL:.0e} * {scale[k]:.3e}"
        )
    gram = X.T @ Dx
    if np.abs(gram - np.eye(m)).max() > ORTHO_TOL:
        raise ArithmeticError("eigenvectors are not D-orthonormal within tolerance")
    return SpectralBasis(eigenvalues=w, eigenvectors=X, degrees=d)


def z_value(x, A: AdjacencyMatrix, subset=None) -> float:
    """Dissimilarity-weighted spread 0.5 * sum_ij (x_i - x_j)^2 a_ij.

    With subset given, both sums run over that index set only (the branch
    length of a dendrogram split, restricted to the states it connects).
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (A.n,):
        raise ValueError(f"x has shape {x.shape}, expected ({A.n},)")
    if subset is None:
        xs = x
        a = A.values
    else:
        idx = np.asarray(subset, dtype=int)
        if idx.size == 0:
            raise ValueError("subset must contain at least one state")
        if idx.min() < 0 or idx.max() >= A.n:
            raise IndexError(f"subset index out of range for n={A.n}")
        xs = x[idx]
        a = A.values[np.ix_(idx, idx)]
    diff = xs[:, None] - xs[None, :]
    return 0.5 * float((diff * diff * a).sum())
