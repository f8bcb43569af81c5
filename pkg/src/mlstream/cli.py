"""Batch command-line front end.

Ingest a dataset (or a serialized graph), then validate it, summarize it,
project it, or run the analyses: windowed density dynamics, per-aspect
density matrices, layer centralities, exposure tables, and the
coverage-versus-centrality rank comparison. Outputs are CSV/JSON with
fixed 12-significant-digit formatting, written atomically, and
byte-identical across reruns with the same seed.

Exit codes: 0 on success, 1 on errors (bad input, parse or solver
failures), 2 when ``validate`` finds violations (and for usage errors).
Set ``MLS_LOG=info`` (or ``debug``) for progress logging.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .analysis import (aspect_density_matrix, density_dynamics,
                       rank_comparison, select_coordinate)
from .centrality import (DEFAULT_MAX_ITER, DEFAULT_TOL,
                         juxtaposed_centrality, superimposed_centrality)
from .datasets import DatasetManifest
from .errors import MlsError
from .interchange import read_interchange, write_interchange
from .measures import (DenominatorMode, DensityMatrix, density_matrix,
                       density_mls, number_of_links)
from .model import MultilayerStreamGraph
from .model import validate as validate_graph
from .projections import collapse_aspects, restrict_window
from .walks import WalkPolicy, direct_exposure, layer_exposure

log = logging.getLogger("mlstream")


# --- plumbing ----------------------------------------------------------------


def _atomic_text(path: Path, render) -> None:
    """Write via ``render(fp)`` to a temp file, then rename into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    try:
        with open(tmp, "w", newline="") as fp:
            render(fp)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()
    log.info("wrote %s", path)


def _load_graph(args) -> MultilayerStreamGraph:
    if getattr(args, "manifest", None):
        manifest = DatasetManifest.from_json(args.manifest)
        g, report = manifest.load()
        for label, rep in report.files.items():
            log.info("parsed %s: %d rows, %d accepted, %d dropped",
                     label, rep.total, rep.accepted, rep.dropped_total)
    else:
        g = read_interchange(args.input)
        log.info("read %s", args.input)
    for spec in getattr(args, "select", None) or []:
        aspect, _, values = spec.partition("=")
        if not values:
            raise MlsError(
                f"--select needs ASPECT=VALUE[,VALUE...], got {spec!r}")
        g = select_coordinate(g, aspect, values.split(","))
    return g


def _policy(args) -> WalkPolicy:
    return WalkPolicy(gamma=args.gamma, num_walks=args.walks,
                      seed=args.seed, t_max=args.t_max)


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _read_matrix_csv(path) -> DensityMatrix:
    with open(path, newline="") as fp:
        rows = list(csv.reader(fp))
    if not rows or rows[0][:1] != ["layer"]:
        raise MlsError(f"{path}: expected a 'layer,...' header row")
    names = rows[0][1:]
    if len(rows) != len(names) + 1:
        raise MlsError(f"{path}: need one row per column, "
                       f"got {len(rows) - 1} rows for {len(names)} columns")
    values = np.zeros((len(names), len(names)))
    for i, row in enumerate(rows[1:]):
        if row[0] != names[i]:
            raise MlsError(
                f"{path}: row label {row[0]!r} != column label {names[i]!r}")
        values[i] = [float(v) for v in row[1:]]
    return DensityMatrix(tuple(tuple(n.split("|")) for n in names), values)


# --- subcommands -------------------------------------------------------------


def cmd_density_dynamics(args) -> int:
    g = _load_graph(args)
    series = density_dynamics(g, args.aspect, args.window,
                              args.window_origin)
    _atomic_text(_out_dir(args) / "density_dynamics.csv", series.write_csv)
    return 0


def cmd_class_matrix(args) -> int:
    g = _load_graph(args)
    dm = aspect_density_matrix(g, args.aspect)
    out = _out_dir(args)
    _atomic_text(out / "class_matrix.csv", dm.write_csv)
    _atomic_text(out / "class_matrix_log.csv", dm.write_log_csv)
    return 0


def cmd_centrality(args) -> int:
    out = _out_dir(args)
    if args.kind == "juxtaposed":
        if args.matrix_file:
            delta = _read_matrix_csv(args.matrix_file)
        else:
            delta = density_matrix(_load_graph(args))
        report = juxtaposed_centrality(delta, tol=args.tol,
                                       max_iter=args.max_iter)
    else:
        g = _load_graph(args)
        report = superimposed_centrality(g, _policy(args), tol=args.tol,
                                         max_iter=args.max_iter)
    _atomic_text(out / "centrality.csv", report.write_csv)
    _atomic_text(out / "centrality.json", report.write_json)
    return 0


def cmd_rank_compare(args) -> int:
    g = _load_graph(args)
    seeds = tuple(args.seed + i for i in range(args.seed_runs))
    rc = rank_comparison(
        g, _policy(args), seeds=seeds,
        exposure_source="direct" if args.direct else "walks",
        tol=args.tol, max_iter=args.max_iter)
    out = _out_dir(args)
    _atomic_text(out / "rank_comparison.csv", rc.write_csv)
    _atomic_text(out / "rank_summary.json",
                 lambda fp: json.dump(rc.summary(), fp, indent=2,
                                      sort_keys=True) or fp.write("\n"))
    return 0


def cmd_exposure(args) -> int:
    g = _load_graph(args)
    if args.direct:
        x = direct_exposure(g, t0=args.t0, t_max=args.t_max)
    else:
        x = layer_exposure(g, _policy(args), start_time=args.t0)
    _atomic_text(_out_dir(args) / "exposure.csv", x.write_csv)
    return 0


def cmd_validate(args) -> int:
    g = _load_graph(args)
    violations = validate_graph(g)
    if violations:
        for v in violations:
            print(f"{v.kind}: {v.message}", file=sys.stderr)
        print(f"{len(violations)} violation(s)", file=sys.stderr)
        return 2
    print(f"OK: {len(g.nodes)} nodes, {len(g.links)} links, "
          f"{len(g.layers)} layers")
    return 0


def cmd_stats(args) -> int:
    g = _load_graph(args)
    mode = DenominatorMode(args.denominator_mode)
    dens = density_mls(g, mode)
    stats = {
        "study_interval": [g.study_interval.start, g.study_interval.end],
        "resolution": g.resolution,
        "nodes": len(g.nodes),
        "layers": len(g.layers),
        "node_layers": len(g.node_layers),
        "links": len(g.links),
        "aspects": {a.name: list(a.elementary_layers) for a in g.aspects},
        "number_of_links": number_of_links(g.links, g.study_interval),
        "density": {
            "mode": mode.value,
            "value": dens.value,
            "numerator": dens.numerator,
            "denominator": dens.denominator,
            "empty_denominator": dens.empty_denominator,
        },
    }
    text = json.dumps(stats, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if args.out_dir:
        _atomic_text(Path(args.out_dir) / "stats.json",
                     lambda fp: fp.write(text))
    return 0


def cmd_project(args) -> int:
    g = _load_graph(args)
    if args.window_range:
        lo, _, hi = args.window_range.partition(":")
        g = restrict_window(g, (int(lo), int(hi)))
    if args.keep_aspects:
        g = collapse_aspects(g, args.keep_aspects.split(","))
    write_interchange(g, args.out)
    log.info("wrote %s", args.out)
    return 0


# --- argument wiring ---------------------------------------------------------


def _add_input_args(p: argparse.ArgumentParser, *, required=True) -> None:
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--manifest", help="dataset manifest (JSON)")
    src.add_argument("--input", help="serialized graph (interchange JSON)")
    p.add_argument("--select", action="append", metavar="ASPECT=V1[,V2]",
                   help="keep only layers with these aspect values "
                        "(repeatable)")


def _add_out_dir(p: argparse.ArgumentParser, *, required=True) -> None:
    p.add_argument("--out-dir", required=required,
                   help="directory for output files")


def _add_solver_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)


def _add_walk_args(p: argparse.ArgumentParser, *, seed_required=True) -> None:
    p.add_argument("--gamma", type=int, default=0,
                   help="hop turnaround delay in ticks")
    p.add_argument("--walks", type=int, default=1000,
                   help="number of simulated walks")
    p.add_argument("--seed", type=int, required=seed_required,
                   help="RNG seed (required: runs must be reproducible)")
    p.add_argument("--t-max", type=int, default=None,
                   help="walk horizon (default: study end)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlstream",
        description="Temporal multilayer network analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density-dynamics",
                       help="windowed intra/inter/global density series")
    _add_input_args(p)
    _add_out_dir(p)
    p.add_argument("--aspect", default="gender",
                   help="two-valued aspect to split on")
    p.add_argument("--window", type=int, default=86_400,
                   help="window length in ticks")
    p.add_argument("--window-origin", type=int, default=None,
                   help="grid origin (default: study start)")
    p.set_defaults(func=cmd_density_dynamics)

    p = sub.add_parser("class-matrix",
                       help="pairwise density matrix over one aspect")
    _add_input_args(p)
    _add_out_dir(p)
    p.add_argument("--aspect", default="class")
    p.set_defaults(func=cmd_class_matrix)

    p = sub.add_parser("centrality", help="layer centrality report")
    p.add_argument("kind", choices=["superimposed", "juxtaposed"])
    _add_input_args(p, required=False)
    _add_out_dir(p)
    p.add_argument("--matrix-file",
                   help="juxtaposed only: density matrix CSV instead of "
                        "a graph")
    _add_walk_args(p, seed_required=False)
    _add_solver_args(p)
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("rank-compare",
                       help="walker coverage rank vs centrality rank")
    _add_input_args(p)
    _add_out_dir(p)
    _add_walk_args(p)
    _add_solver_args(p)
    p.add_argument("--seed-runs", type=int, default=1,
                   help="average exposures over this many seeds "
                        "(seed, seed+1, ...)")
    p.add_argument("--direct", action="store_true",
                   help="closed-form exposures instead of walks")
    p.set_defaults(func=cmd_rank_compare)

    p = sub.add_parser("exposure", help="per-node layer exposure table")
    _add_input_args(p)
    _add_out_dir(p)
    _add_walk_args(p, seed_required=False)
    p.add_argument("--t0", type=int, default=None,
                   help="fixed start instant (default: uniform starts)")
    p.add_argument("--direct", action="store_true",
                   help="closed-form per-record weighting, no walks")
    p.set_defaults(func=cmd_exposure)

    p = sub.add_parser("validate", help="check the closure invariants")
    _add_input_args(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="size and density summary (JSON)")
    _add_input_args(p)
    _add_out_dir(p, required=False)
    p.add_argument("--denominator-mode", default="all-pairs",
                   choices=[m.value for m in DenominatorMode])
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("project",
                       help="restrict/collapse and re-serialize a graph")
    _add_input_args(p)
    p.add_argument("--window-range", metavar="LO:HI",
                   help="restrict to this closed tick interval")
    p.add_argument("--keep-aspects", metavar="A[,B]",
                   help="collapse onto these aspects")
    p.add_argument("--out", required=True, help="output interchange path")
    p.set_defaults(func=cmd_project)

    return parser


def main(argv: Optional[list] = None) -> int:
    logging.basicConfig(
        level=os.environ.get("MLS_LOG", "warning").upper(),
        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.func is cmd_centrality:
        if args.kind == "superimposed":
            if args.seed is None:
                parser.error("superimposed centrality is stochastic: "
                             "--seed is required")
            if not (args.manifest or args.input):
                parser.error("superimposed centrality needs --manifest "
                             "or --input")
        elif not (args.manifest or args.input or args.matrix_file):
            parser.error("juxtaposed centrality needs --manifest, --input "
                         "or --matrix-file")
    if args.func is cmd_exposure and not args.direct and args.seed is None:
        parser.error("walk exposure is stochastic: --seed is required "
                     "(or use --direct)")
    try:
        return args.func(args)
    except MlsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
