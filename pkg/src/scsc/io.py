"""Bit-exact file formats: trajectory CSV, matrix CSV/binary, tree JSON/Newick/SVG.

Floats are serialized with the shortest round-trip decimal representation, so
write -> read -> write cycles are byte-identical. The binary matrix format is
endian-fixed and checksummed.
"""

from __future__ import annotations

import json
import struct
import zlib
from pathlib import Path

import numpy as np

from scsc.adjacency import AdjacencyMatrix, validate_adjacency
from scsc.ensemble import TrajectoryEnsemble, TransitionMatrix
from scsc.tree import ColoringTree, TreeNode, dendrogram_geometry

MATRIX_MAGIC = b"SCSCMAT1"
TRAJECTORY_FORMAT = "scsc-trajectories"
TREE_FORMAT = "scsc-tree"
FORMAT_VERSION = 1


def _fmt(v: float) -> str:
    return repr(float(v))


def _meta_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.name + ".meta.json")


# ---------------------------------------------------------------- trajectories


def write_trajectories(ensemble: TrajectoryEnsemble, path, extra_meta: dict | None = None) -> None:
    """CSV with header state,t,x,y[,z] plus a .meta.json sidecar."""
    if ensemble.n_states < 1:
        raise ValueError("empty ensemble")
    d = ensemble.n_dims
    if d not in (2, 3):
        raise ValueError(f"can only serialize 2-D or 3-D ensembles, got {d} dims")
    cols = ["x", "y", "z"][:d]
    lines = ["state,t," + ",".join(cols)]
    for i in range(ensemble.n_states):
        for k in range(ensemble.n_times):
            coords = ",".join(_fmt(c) for c in ensemble.positions[i, k])
            lines.append(f"{i},{_fmt(ensemble.times[k])},{coords}")
    Path(path).write_text("\n".join(lines) + "\n")

    meta = {
        "format": TRAJECTORY_FORMAT,
        "version": FORMAT_VERSION,
        "n_states": ensemble.n_states,
        "n_times": ensemble.n_times,
        "n_dims": d,
        "periods": list(ensemble.periods) if ensemble.periods is not None else None,
    }
    if extra_meta:
        meta.update(extra_meta)
    _meta_path(path).write_text(json.dumps(meta, indent=2) + "\n")


def read_trajectories(path) -> TrajectoryEnsemble:
    """Parse a trajectory CSV; all states must share an identical time grid."""
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("state,t,"):
        raise ValueError(f"{path}: missing 'state,t,...' header")
    n_dims = len(lines[0].split(",")) - 2
    if n_dims not in (2, 3):
        raise ValueError(f"{path}: expected 2 or 3 coordinate columns, got {n_dims}")

    per_state: dict[int, list] = {}
    for row_no, ln in enumerate(lines[1:], start=2):
        cells = ln.split(",")
        if len(cells) != n_dims + 2:
            raise ValueError(f"{path}:{row_no}: expected {n_dims + 2} cells, got {len(cells)}")
        try:
            state = int(cells[0])
            vals = [float(c) for c in cells[1:]]
        except ValueError as err:
            raise ValueError(f"{path}:{row_no}: non-numeric cell ({err})") from None
        per_state.setdefault(state, []).append(vals)

    ids = sorted(per_state)
    n = len(ids)
    if ids != list(range(n)):
        raise ValueError(f"{path}: state ids must be 0..{n - 1}, got {ids[:5]}...")
    rows0 = sorted(per_state[0], key=lambda r: r[0])
    times = [r[0] for r in rows0]
    n_times = len(times)
    positions = np.empty((n, n_times, n_dims))
    for i in ids:
        rows = sorted(per_state[i], key=lambda r: r[0])
        if [r[0] for r in rows] != times:
            raise ValueError(f"{path}: state {i} has a ragged time grid ({len(rows)} rows vs {n_times})")
        positions[i] = [r[1:] for r in rows]

    periods = None
    meta_file = _meta_path(path)
    if meta_file.exists():
        meta = json.loads(meta_file.read_text())
        if meta.get("periods") is not None:
            periods = tuple(meta["periods"])
    return TrajectoryEnsemble(positions=positions, times=np.asarray(times), periods=periods)


# --------------------------------------------------------------------- matrices


def write_matrix(values, path, fmt: str | None = None) -> None:
    """Write a square matrix as dense CSV (no header) or checksummed binary."""
    if isinstance(values, (AdjacencyMatrix, TransitionMatrix)):
        values = values.values if isinstance(values, AdjacencyMatrix) else values.rows
    a = np.ascontiguousarray(np.asarray(values, dtype=float))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got {a.shape}")
    path = Path(path)
    if fmt is None:
        fmt = "bin" if path.suffix == ".bin" else "csv"
    if fmt == "csv":
        lines = [",".join(_fmt(v) for v in row) for row in a]
        path.write_text("\n".join(lines) + "\n")
    elif fmt == "bin":
        n = a.shape[0]
        payload = a.astype("<f8").tobytes(order="C")
        blob = MATRIX_MAGIC + struct.pack("<Q", n) + payload + struct.pack("<I", zlib.crc32(payload))
        path.write_bytes(blob)
    else:
        raise ValueError(f"unknown matrix format {fmt!r}")


def read_matrix_raw(path, fmt: str | None = None) -> np.ndarray:
    """Read a matrix file without semantic validation."""
    path = Path(path)
    blob = path.read_bytes()
    if fmt is None:
        fmt = "bin" if blob[: len(MATRIX_MAGIC)] == MATRIX_MAGIC else "csv"
    if fmt == "bin":
        if blob[: len(MATRIX_MAGIC)] != MATRIX_MAGIC:
            raise ValueError(f"{path}: bad magic bytes")
        off = len(MATRIX_MAGIC)
        if len(blob) < off + 8:
            raise ValueError(f"{path}: truncated header")
        (n,) = struct.unpack_from("<Q", blob, off)
        off += 8
        need = n * n * 8
        if len(blob) != off + need + 4:
            raise ValueError(f"{path}: size mismatch (expected {off + need + 4} bytes, got {len(blob)})")
        payload = blob[off : off + need]
        (crc,) = struct.unpack_from("<I", blob, off + need)
        if zlib.crc32(payload) != crc:
            raise ValueError(f"{path}: CRC mismatch; file is corrupt")
        return np.frombuffer(payload, dtype="<f8").reshape(n, n).astype(float)
    if fmt == "csv":
        rows = []
        for row_no, ln in enumerate(blob.decode().splitlines(), start=1):
            if not ln.strip():
                continue
            try:
                rows.append([float(c) for c in ln.split(",")])
            except ValueError as err:
                raise ValueError(f"{path}:{row_no}: non-numeric cell ({err})") from None
        a = np.asarray(rows, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"{path}: not square, got shape {a.shape}")
        return a
    raise ValueError(f"unknown matrix format {fmt!r}")


def read_matrix(path, fmt: str | None = None, kind: str = "adjacency"):
    """Read and validate a matrix as an adjacency or transition matrix."""
    raw = read_matrix_raw(path, fmt)
    if kind == "adjacency":
        return validate_adjacency(raw)
    if kind == "transition":
        return TransitionMatrix(raw)
    raise ValueError(f"unknown kind {kind!r}")


# ------------------------------------------------------------------------ trees


def write_tree(tree: ColoringTree, path, fmt: str = "json", include_members: bool = True) -> None:
    path = Path(path)
    if fmt == "json":
        path.write_text(tree_to_json(tree, include_members))
    elif fmt == "newick":
        path.write_text(tree_to_newick(tree) + "\n")
    elif fmt in ("svg", "geometry-svg"):
        path.write_text(tree_to_svg(tree))
    else:
        raise ValueError(f"unknown tree format {fmt!r}")


def tree_to_json(tree: ColoringTree, include_members: bool = True) -> str:
    nodes = []
    for node in tree.nodes():
        rec = {
            "code": node.code,
            "population": node.population,
            "z_length": node.z_length,
            "converged": node.converged,
        }
        if include_members and node.members is not None:
            rec["members"] = [int(i) for i in node.members]
        nodes.append(rec)
    doc = {"depth": tree.depth, "n": tree.n, "nodes": nodes, "codes": tree.codes}
    return json.dumps(doc, indent=1) + "\n"


def read_tree(path) -> ColoringTree:
    doc = json.loads(Path(path).read_text())
    by_code = {}
    root = None
    for rec in doc["nodes"]:
        members = np.asarray(rec["members"], dtype=int) if "members" in rec else None
        node = TreeNode(
            code=rec["code"],
            population=int(rec["population"]),
            members=members,
            z_length=float(rec["z_length"]),
            converged=bool(rec["converged"]),
        )
        by_code[node.code] = node
        if node.code == "":
            root = node
        else:
            parent = by_code.get(node.code[:-1])
            if parent is None:
                raise ValueError(f"node {node.code!r} appears before its parent")
            parent.children.append(node)
    if root is None:
        raise ValueError("tree file has no root node")
    return ColoringTree(root=root, depth=int(doc["depth"]), n=int(doc["n"]), codes=list(doc["codes"]))


def _fmt_branch_length(z: float) -> str:
    return str(int(z)) if float(z).is_integer() and abs(z) < 1e15 else repr(float(z))


def _visible_subtree(tree: ColoringTree, node: TreeNode, carried: float):
    """Collapse pass-through chains; edge lengths accumulate the carried z."""
    while len(node.children) == 1:
        node = node.children[0]
        carried += node.z_length
    if not node.children:
        return (tree.display_code(node), carried, [])
    kids = [_visible_subtree(tree, c, c.z_length) for c in node.children]
    return (node.code, carried, kids)


def tree_to_newick(tree: ColoringTree) -> str:
    label, _, kids = _visible_subtree(tree, tree.root, 0.0)

    def render(entry, is_root):
        name, length, kids = entry
        if kids:
            body = "(" + ",".join(render(k, False) for k in kids) + ")"
            return body if is_root else f"{body}:{_fmt_branch_length(length)}"
        return name if is_root else f"{name}:{_fmt_branch_length(length)}"

    return render((label, 0.0, kids), True) + ";"


def tree_to_svg(tree: ColoringTree, size: float = 640.0) -> str:
    geo = dendrogram_geometry(tree)
    segs = [g for g in geo if g["path"]]
    if segs:
        xs = [p[0] for g in segs for p in g["path"]]
        ys = [p[1] for g in segs for p in g["path"]]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
    else:
        x0 = y0 = -1.0
        x1 = y1 = 1.0
    span = max(x1 - x0, y1 - y0, 1e-12)
    pad = 0.08 * span
    scale = size / (span + 2 * pad)

    def sx(x):
        return (x - x0 + pad) * scale

    def sy(y):
        return (y1 - y + pad) * scale

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" height="{size:.0f}">',
        f'<text x="8" y="16" font-size="12">axes in units of the parameter z (span {span:.6g})</text>',
    ]
    max_w = 0.04 * size
    for g in segs:
        (xa, ya), (xb, yb) = g["path"]
        w = max(0.75, g["fraction"] * max_w)
        lines.append(
            f'<line x1="{sx(xa):.2f}" y1="{sy(ya):.2f}" x2="{sx(xb):.2f}" y2="{sy(yb):.2f}" '
            f'stroke="black" stroke-width="{w:.2f}"/>'
        )
        lines.append(
            f'<text x="{sx(xb) + 3:.2f}" y="{sy(yb):.2f}" font-size="9">{g["code"]} ({g["population"]})</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def geometry_to_branch_csv(tree: ColoringTree) -> str:
    lines = ["code,population,z_length,converged"]
    for node in tree.nodes():
        if node.code == "":
            continue
        lines.append(f"{node.code},{node.population},{_fmt(node.z_length)},{str(node.converged).lower()}")
    return "\n".join(lines) + "\n"
