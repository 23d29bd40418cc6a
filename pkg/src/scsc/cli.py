"""Command-line pipeline: simulate -> adjacency -> cluster -> export.

Every subcommand is deterministic given its flags (seeds included); thread
counts change wall time only, never output bytes. Exit codes: 0 success,
1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

import scsc
from scsc import io as scio
from scsc.adjacency import build_trajectory_adjacency, build_transition_adjacency
from scsc.ensemble import TransitionMatrix
from scsc.flows import BickleyParams, DAY_SECONDS, FlowSpec, QuadEddyParams, advect, noise_ensemble, seed_uniform
from scsc.spectral import solve_generalized
from scsc.tree import build_tree


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scsc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a trajectory ensemble")
    sim_sub = sim.add_subparsers(dest="model", required=True)

    quad = sim_sub.add_parser("quadgyre", help="unsteady four-eddy flow")
    quad.add_argument("--n", type=int, default=3000)
    quad.add_argument("--seed", type=int, default=0)
    quad.add_argument("--t-end", type=float, default=40.0)
    quad.add_argument("--steps", type=int, default=401)
    quad.add_argument("--substeps", type=int, default=10)
    quad.add_argument("--variant", choices=["divfree", "verbatim"], default="divfree")
    quad.add_argument("-o", "--output", required=True)

    bick = sim_sub.add_parser("bickley", help="meandering zonal jet")
    bick.add_argument("--n", type=int, default=3000)
    bick.add_argument("--seed", type=int, default=0)
    bick.add_argument("--days", type=float, default=40.0)
    bick.add_argument("--steps", type=int, default=601)
    bick.add_argument("--substeps", type=int, default=10)
    bick.add_argument("-o", "--output", required=True)

    noise = sim_sub.add_parser("noise", help="uniform random control ensemble")
    noise.add_argument("--n", type=int, default=3000)
    noise.add_argument("--t", type=int, default=2000)
    noise.add_argument("--seed", type=int, default=0)
    noise.add_argument("-o", "--output", required=True)

    adj = sub.add_parser("adjacency", help="pairwise dissimilarity matrix")
    adj.add_argument("input")
    adj.add_argument("--metric", choices=["traj-std", "js-sqrt"], required=True)
    adj.add_argument("--minimum-image", action="store_true")
    adj.add_argument("--threads", type=int, default=1)
    adj.add_argument("-o", "--output", required=True)

    clu = sub.add_parser("cluster", help="binary-coded dendrogram from an adjacency matrix")
    clu.add_argument("input")
    clu.add_argument("--depth", type=int, default=7)
    clu.add_argument("--min-population", type=int, default=1)
    clu.add_argument("--z-min", type=float, default=0.0)
    clu.add_argument("--no-members", action="store_true")
    clu.add_argument("-o", "--output", required=True)

    exp = sub.add_parser("export", help="convert a tree file")
    exp.add_argument("input")
    exp.add_argument("--format", choices=["newick", "svg", "branch-csv"], required=True)
    exp.add_argument("-o", "--output", required=True)

    pipe = sub.add_parser("pipeline", help="simulate + adjacency + cluster + export")
    pipe.add_argument("model", choices=["quadgyre", "bickley", "noise"])
    pipe.add_argument("--n", type=int, default=3000)
    pipe.add_argument("--seed", type=int, default=0)
    pipe.add_argument("--steps", type=int, default=None)
    pipe.add_argument("--substeps", type=int, default=10)
    pipe.add_argument("--t", type=int, default=2000, help="noise: stored time steps")
    pipe.add_argument("--t-end", type=float, default=40.0, help="quadgyre: advection span")
    pipe.add_argument("--days", type=float, default=40.0, help="bickley: advection span")
    pipe.add_argument("--variant", choices=["divfree", "verbatim"], default="divfree")
    pipe.add_argument("--depth", type=int, default=7)
    pipe.add_argument("--min-population", type=int, default=1)
    pipe.add_argument("--z-min", type=float, default=0.0)
    pipe.add_argument("--threads", type=int, default=1)
    pipe.add_argument("--out-dir", required=True)

    return parser


def _simulate(args, parser) -> None:
    if args.model == "noise":
        if args.n < 1 or args.t < 1:
            parser.error("--n and --t must be >= 1")
        ens = noise_ensemble(args.n, args.t, args.seed)
        params = {"model": "noise", "n": args.n, "t": args.t, "seed": args.seed}
    else:
        if args.steps < 2:
            parser.error("--steps must be >= 2")
        if args.n < 1:
            parser.error("--n must be >= 1")
        if args.substeps < 1:
            parser.error("--substeps must be >= 1")
        if args.model == "quadgyre":
            fp = QuadEddyParams(variant="divergence-free" if args.variant == "divfree" else "verbatim")
            flow = FlowSpec(params=fp, t_span=(0.0, args.t_end), n_steps=args.steps)
            rect = (0.0, 2.0, -1.0, 1.0)
            params = {
                "model": "quadgyre",
                "n": args.n,
                "seed": args.seed,
                "t_end": args.t_end,
                "steps": args.steps,
                "substeps": args.substeps,
                "variant": args.variant,
            }
        else:
            fp = BickleyParams()
            flow = FlowSpec(params=fp, t_span=(0.0, args.days * DAY_SECONDS), n_steps=args.steps)
            rect = (fp.domain_x[0], fp.domain_x[1], fp.domain_y[0], fp.domain_y[1])
            params = {
                "model": "bickley",
                "n": args.n,
                "seed": args.seed,
                "days": args.days,
                "steps": args.steps,
                "substeps": args.substeps,
            }
        _progress(f"simulate: advecting {args.n} particles over {args.steps} stored steps")
        ens = advect(flow, seed_uniform(args.n, rect, args.seed), substeps=args.substeps)
    scio.write_trajectories(ens, args.output, extra_meta={"command": "simulate", "params": params, "scsc_version": scsc.__version__})
    _progress(f"simulate: wrote {args.output}")


def _adjacency(args, parser) -> None:
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    if args.metric == "traj-std":
        try:
            ens = scio.read_trajectories(args.input)
        except ValueError as err:
            parser.error(f"--metric traj-std needs a trajectory CSV: {err}")
        _progress(f"adjacency: {ens.n_states} states x {ens.n_times} times")
        A = build_trajectory_adjacency(ens, minimum_image=args.minimum_image, workers=args.threads)
    else:
        if args.minimum_image:
            parser.error("--minimum-image applies to --metric traj-std only")
        try:
            T = scio.read_matrix(args.input, kind="transition")
        except ValueError as err:
            parser.error(f"--metric js-sqrt needs a transition matrix: {err}")
        _progress(f"adjacency: {T.n} distribution rows")
        A = build_transition_adjacency(T)
    scio.write_matrix(A, args.output)
    _progress(f"adjacency: wrote {args.output}")


def _cluster(args, parser) -> None:
    A = scio.read_matrix(args.input, kind="adjacency")
    if not (1 <= args.depth <= A.n):
        parser.error(f"--depth must be in [1, {A.n}] for this matrix")
    basis = solve_generalized(A, m=args.depth)
    tree = build_tree(basis, A, depth=args.depth, min_population=args.min_population, z_min=args.z_min)
    scio.write_tree(tree, args.output, fmt="json", include_members=not args.no_members)
    for d in range(1, tree.depth + 1):
        nodes = tree.level_nodes(d)
        desc = "  ".join(f"{node.code or '-'}:{node.population}(z={node.z_length:.4g})" for node in nodes)
        print(f"depth {d}: {len(nodes)} occupied  {desc}")
    _progress(f"cluster: wrote {args.output}")


def _export(args, parser) -> None:
    tree = scio.read_tree(args.input)
    if args.format == "newick":
        Path(args.output).write_text(scio.tree_to_newick(tree) + "\n")
    elif args.format == "svg":
        Path(args.output).write_text(scio.tree_to_svg(tree))
    else:
        Path(args.output).write_text(scio.geometry_to_branch_csv(tree))
    _progress(f"export: wrote {args.output}")


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _pipeline(args, parser) -> None:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    defaults = {"quadgyre": 401, "bickley": 601, "noise": None}
    steps = args.steps if args.steps is not None else defaults[args.model]

    stage = "simulate"
    try:
        traj = out / "trajectories.csv"
        sim_args = argparse.Namespace(
            model=args.model, n=args.n, seed=args.seed, steps=steps, substeps=args.substeps,
            t=args.t, t_end=args.t_end, days=args.days, variant=args.variant, output=str(traj),
        )
        _simulate(sim_args, parser)

        stage = "adjacency"
        adj = out / "adjacency.bin"
        adj_args = argparse.Namespace(
            input=str(traj), metric="traj-std", minimum_image=False, threads=args.threads, output=str(adj),
        )
        _adjacency(adj_args, parser)

        stage = "cluster"
        tree_path = out / "tree.json"
        clu_args = argparse.Namespace(
            input=str(adj), depth=args.depth, min_population=args.min_population,
            z_min=args.z_min, no_members=False, output=str(tree_path),
        )
        _cluster(clu_args, parser)

        stage = "export"
        tree = scio.read_tree(tree_path)
        (out / "tree.newick").write_text(scio.tree_to_newick(tree) + "\n")
        (out / "tree.svg").write_text(scio.tree_to_svg(tree))
        (out / "branches.csv").write_text(scio.geometry_to_branch_csv(tree))
    except Exception as err:
        raise RuntimeError(f"pipeline stage '{stage}' failed: {err}") from err

    files = ["trajectories.csv", "trajectories.csv.meta.json", "adjacency.bin",
             "tree.json", "tree.newick", "tree.svg", "branches.csv"]
    manifest = {
        "scsc_version": scsc.__version__,
        "pipeline": args.model,
        "parameters": {
            "n": args.n, "seed": args.seed, "steps": steps, "substeps": args.substeps,
            "t": args.t, "t_end": args.t_end, "days": args.days, "variant": args.variant,
            "depth": args.depth, "min_population": args.min_population, "z_min": args.z_min,
        },
        "files": {name: _sha256(out / name) for name in files},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    _progress(f"pipeline: wrote manifest {out / 'manifest.json'}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": _simulate,
        "adjacency": _adjacency,
        "cluster": _cluster,
        "export": _export,
        "pipeline": _pipeline,
    }
    try:
        handlers[args.command](args, parser)
    except SystemExit:
        raise
    except (ValueError, IndexError, ArithmeticError, OSError, RuntimeError) as err:
        print(f"scsc: error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
