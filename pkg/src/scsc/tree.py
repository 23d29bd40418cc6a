"""Binary-coded dendrogram construction from a spectral basis.

Each eigenvector, in order of decreasing eigenvalue, is bifurcated over all
states by exact average-linkage (UPGMA) clustering of the one-dimensional
coordinates, cut at its final merge. Every eigenvector contributes one bit to
each state's code; shared prefixes define the tree. Codes that no state
occupies terminate branches, which is the method's natural stopping signal.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from scsc.adjacency import AdjacencyMatrix
from scsc.spectral import SpectralBasis, z_value


def bifurcate_coordinate(x) -> np.ndarray:
    """Split states into labels {0,1} along one coordinate.

    Runs exact agglomerative clustering with average linkage on the 1-D
    dissimilarities |x_i - x_j| and cuts at the final merge. For 1-D data the
    average-linkage distance between non-interleaved clusters equals the
    difference of their means, so clusters stay contiguous in sorted order and
    the merge sequence can be simulated over adjacent runs in O(n log n).
    Merge ties break on the lexicographically smallest pair of cluster
    min-indices. Label 0 goes to the cluster with the smaller mean (tie: the
    cluster containing the lowest state index).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 2:
        raise ValueError("need a 1-D coordinate over at least 2 states")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite coordinate value")
    n = x.shape[0]

    order = np.lexsort((np.arange(n), x))
    sums = x[order].astype(float)
    cnts = np.ones(n)
    mins = order.astype(int).copy()  # smallest original index in each cluster
    nxt = np.arange(1, n + 1)
    prv = np.arange(-1, n - 1)
    alive = np.ones(n, dtype=bool)
    stamp = np.zeros(n, dtype=np.int64)

    def entry(i, j):
        d = sums[j] / cnts[j] - sums[i] / cnts[i]
        lo, hi = (mins[i], mins[j]) if mins[i] < mins[j] else (mins[j], mins[i])
        return (d, lo, hi, i, j, stamp[i], stamp[j])

    heap = [entry(i, i + 1) for i in range(n - 1)]
    heapq.heapify(heap)
    n_alive = n
    while n_alive > 2:
        d, lo, hi, i, j, si, sj = heapq.heappop(heap)
        if not (alive[i] and alive[j]) or stamp[i] != si or stamp[j] != sj or nxt[i] != j:
            continue
        sums[i] += sums[j]
        cnts[i] += cnts[j]
        if mins[j] < mins[i]:
            mins[i] = mins[j]
        alive[j] = False
        stamp[i] += 1
        nxt[i] = nxt[j]
        if nxt[i] < n:
            prv[nxt[i]] = i
        n_alive -= 1
        if prv[i] >= 0:
            heapq.heappush(heap, entry(prv[i], i))
        if nxt[i] < n:
            heapq.heappush(heap, entry(i, nxt[i]))

    first = int(np.argmax(alive))
    c0 = int(cnts[first])
    left, right = order[:c0], order[c0:]
    labels = np.zeros(n, dtype=np.int64)
    mean_left = x[left].mean()
    mean_right = x[right].mean()
    if mean_left > mean_right or (mean_left == mean_right and right.min() < left.min()):
        labels[left] = 1
    else:
        labels[right] = 1
    return labels


def assign_codes(basis: SpectralBasis, depth: int) -> list[str]:
    """Per-state bit strings; bit k comes from bifurcating eigenvector k."""
    if not (1 <= depth <= basis.m):
        raise ValueError(f"depth {depth} not in [1, {basis.m}]")
    bits = np.stack([bifurcate_coordinate(basis.eigenvectors[:, k]) for k in range(depth)], axis=1)
    return ["".join("1" if b else "0" for b in row) for row in bits]


@dataclass
class TreeNode:
    code: str
    population: int
    members: np.ndarray | None = field(default=None, repr=False)
    z_length: float = 0.0
    converged: bool = False
    children: list = field(default_factory=list, repr=False)

    @property
    def depth(self) -> int:
        return len(self.code)

    @property
    def is_split(self) -> bool:
        return len(self.children) == 2


@dataclass
class ColoringTree:
    """Dendrogram over n states built from `depth` eigenvectors."""

    root: TreeNode
    depth: int
    n: int
    codes: list[str]

    def nodes(self) -> list[TreeNode]:
        """All materialized nodes in breadth-first order, 0-child first."""
        out = []
        queue = [self.root]
        while queue:
            node = queue.pop(0)
            out.append(node)
            queue.extend(node.children)
        return out

    def level_nodes(self, d: int) -> list[TreeNode]:
        """Partition of the states in effect at depth d (frozen nodes persist)."""
        out = []
        for node in self.nodes():
            if node.depth == d or (node.depth < d and not node.children):
                out.append(node)
        return out

    def leaves(self) -> list[TreeNode]:
        return [node for node in self.nodes() if not node.children]

    def display_code(self, leaf: TreeNode) -> str:
        """Code truncated after the last visible split on the leaf's path."""
        node = self.root
        last_split = 0
        for d, bit in enumerate(leaf.code, start=1):
            nxt = None
            for child in node.children:
                if child.code[-1] == bit:
                    nxt = child
            if nxt is None:
                break
            if node.is_split:
                last_split = d
            node = nxt
        return leaf.code[:last_split]


def build_tree(
    basis: SpectralBasis,
    A: AdjacencyMatrix,
    depth: int = 7,
    min_population: int = 1,
    z_min: float = 0.0,
) -> ColoringTree:
    """Materialize the coded dendrogram down to `depth` eigenvectors.

    At level k every active node either splits into its two occupied children
    (both carrying the branch length z of eigenvector k restricted to the
    node's members), or passes through unchanged when only one child code is
    occupied. Nodes smaller than min_population, or whose restricted z falls
    below z_min, are marked converged and left alone.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    depth = min(depth, basis.m)
    n = basis.n
    root = TreeNode(code="", population=n, members=np.arange(n))
    frontier = [root]
    codes = [""] * n
    for k in range(depth):
        labels = bifurcate_coordinate(basis.eigenvectors[:, k])
        next_frontier = []
        for node in frontier:
            if node.converged:
                continue
            z = z_value(basis.eigenvectors[:, k], A, node.members)
            if node.population < min_population or z < z_min:
                node.converged = True
                continue
            sub = labels[node.members]
            for bit in (0, 1):
                sel = node.members[sub == bit]
                if sel.shape[0] == 0:
                    continue
                child = TreeNode(code=node.code + str(bit), population=int(sel.shape[0]), members=sel, z_length=z)
                node.children.append(child)
                next_frontier.append(child)
                for i in sel:
                    codes[i] = child.code
        frontier = next_frontier

    def mark_converged(node):
        # converged: no visible split here or anywhere below
        sub = [mark_converged(c) for c in node.children]
        node.converged = node.converged or (not node.is_split and all(sub))
        return node.converged

    mark_converged(root)
    return ColoringTree(root=root, depth=depth, n=n, codes=codes)


def dendrogram_geometry(tree: ColoringTree) -> list[dict]:
    """Renderer-agnostic layout: one polyline per node at 45-degree angles.

    Each node descends from its parent's junction by its z_length in both
    axes (children of a split go toward -x for bit 0 and +x for bit 1;
    pass-through nodes descend vertically). Widths are the population
    fraction. Both axes are in units of the branch-length parameter z.
    """
    out = []

    def walk(node, x, y):
        for child in node.children:
            z = child.z_length
            if node.is_split:
                dx = -z if child.code[-1] == "0" else z
            else:
                dx = 0.0
            cx, cy = x + dx, y - z
            out.append(
                {
                    "code": child.code,
                    "population": child.population,
                    "fraction": child.population / tree.n,
                    "z_length": z,
                    "path": [(x, y), (cx, cy)],
                }
            )
            walk(child, cx, cy)

    out.append(
        {
            "code": "",
            "population": tree.root.population,
            "fraction": 1.0,
            "z_length": 0.0,
            "path": [],
        }
    )
    walk(tree.root, 0.0, 0.0)
    return out
