"""Command line driver: simulate, cluster, bic-select, ingest.

Every subcommand is deterministic given its flags and seed, returns 0 on
success, 1 on a data error, and 2 on a usage error, and with --json-errors
reports failures as one JSON object on stderr. `main(argv)` returns the exit
code instead of exiting, so the CLI can be driven in-process.

Note on negative numbers in list-valued flags: write them with an equals
sign, e.g. `--gammas=-2,-1.5,-1`, so the shell-style parser does not read
the value as an option.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

import numpy as np

from .blockmodel import bic, block_mean_estimate, objective
from .experiments import (
    METHODS,
    ExperimentGrid,
    run_estimation_comparison,
    run_init_impact,
    run_method_comparison,
    run_phase_transition,
    write_records_csv,
)
from .hlloyd import HLloydConfig, hlloyd
from .hsc import HscConfig, hsc
from .ingest import DataError, ingest_edgelist, ingest_events
from .labels import labels_to_csv
from .tensor import read_tensor, write_tensor

_DEFAULT_RANK_GRID = "3,4,5,6"


class UsageError(Exception):
    """Bad flags or arguments."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _ints(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _ranks_arg(text: str):
    values = _ints(text)
    if not values:
        raise UsageError("empty rank list")
    return values[0] if len(values) == 1 else tuple(values)


def _methods_arg(text: str) -> tuple:
    methods = tuple(m.strip() for m in text.split(",") if m.strip())
    allowed = tuple(m for m in METHODS if m not in ("hlloyd-init", "hooi"))
    for m in methods:
        if m not in allowed:
            raise UsageError(f"unknown method {m!r}; choose from {', '.join(allowed)}")
    if not methods:
        raise UsageError("empty method list")
    return methods


def _cmd_simulate(args) -> int:
    if args.mode in ("phase", "compare"):
        grid = ExperimentGrid(
            d=args.d,
            p=tuple(_ints(args.p)),
            gammas=tuple(_floats(args.gammas)),
            r=_ranks_arg(args.r),
            sigma=args.sigma,
            replications=args.reps,
            methods=_methods_arg(args.methods),
            base_seed=args.seed,
            oracle_contamination=args.contamination,
            xi=args.xi,
            workers=args.workers,
        )
        runner = run_phase_transition if args.mode == "phase" else run_method_comparison
        records = runner(grid)
    elif args.mode == "init":
        records = run_init_impact(
            p=_ints(args.p)[0],
            r=_ranks_arg(args.r),
            d=args.d,
            deltas=_floats(args.deltas),
            contaminations=_floats(args.eps),
            replications=args.reps,
            base_seed=args.seed,
            sigma=args.sigma,
            workers=args.workers,
        )
    else:
        records = run_estimation_comparison(
            p_list=_ints(args.p),
            r=_ranks_arg(args.r),
            d=args.d,
            delta_min=args.delta,
            sigma=args.sigma,
            replications=args.reps,
            base_seed=args.seed,
            workers=args.workers,
        )
    write_records_csv(records, args.out, timing=args.timing)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_cluster(args) -> int:
    y = read_tensor(args.file)
    ranks = tuple(_ints(args.ranks))
    if len(ranks) != y.ndim:
        raise DataError(
            f"--ranks has {len(ranks)} entries but the tensor has order {y.ndim}"
        )
    init = hsc(
        y,
        HscConfig(
            ranks=ranks,
            kmeans_restarts=args.restarts,
            seed=np.random.SeedSequence(args.seed),
        ),
    )
    config = HLloydConfig(max_iters=args.iters) if args.iters is not None else None
    labels, _ = hlloyd(y, init, config=config, ranks=ranks)
    core = block_mean_estimate(y, labels, ranks)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for k, z in enumerate(labels, start=1):
        (out_dir / f"labels_mode{k}.csv").write_text(labels_to_csv(z))
    write_tensor(out_dir / "block_means.tbm1", core)
    obj = objective(y, core, labels)
    print(f"wrote {y.ndim} label files and block_means.tbm1 to {out_dir}")
    print(f"objective {format(obj, '.12g')}")
    return 0


def _parse_rank_grid(text: str, d: int) -> list:
    parts = text.split("x")
    if len(parts) == 1:
        parts = parts * d
    if len(parts) != d:
        raise UsageError(
            f"--rank-grid has {len(parts)} mode blocks but the tensor has order {d}"
        )
    grids = []
    for part in parts:
        values = _ints(part)
        if not values or any(v < 1 for v in values):
            raise UsageError(f"bad rank grid block {part!r}")
        grids.append(values)
    return grids


def _cmd_bic_select(args) -> int:
    y = read_tensor(args.file)
    grids = _parse_rank_grid(args.rank_grid, y.ndim)
    best = None
    best_bic = float("inf")
    for idx, combo in enumerate(itertools.product(*grids)):
        label = ",".join(str(r) for r in combo)
        seed = np.random.SeedSequence((args.seed, idx))
        init = hsc(y, HscConfig(ranks=combo, seed=seed))
        labels, _ = hlloyd(y, init, ranks=combo)
        sizes = [np.bincount(z, minlength=rk + 1)[1:] for z, rk in zip(labels, combo)]
        if any(s.min() <= 1 for s in sizes):
            print(f"ranks={label} rejected: singleton cluster")
            continue
        value = bic(y, labels, combo)
        print(f"ranks={label} bic={format(value, '.12g')}")
        if value < best_bic:
            best, best_bic = combo, value
    if best is None:
        raise DataError("every rank choice produced a singleton cluster")
    print(f"selected: {','.join(str(r) for r in best)}")
    return 0


def _write_id_map(path, id_maps) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(json.dumps(id_maps, indent=2) + "\n")


def _cmd_ingest(args) -> int:
    if args.source == "edgelist":
        tensor, id_maps = ingest_edgelist(
            args.file,
            top_entities=args.top_entities,
            top_layers=args.top_layers,
            header=args.header,
        )
    else:
        tensor, id_maps = ingest_events(
            args.files,
            top_a=args.top_a,
            top_b=args.top_b,
            buckets=args.buckets,
            header=args.header,
        )
    write_tensor(args.out, tensor)
    _write_id_map(args.id_map, id_maps)
    shape = "x".join(str(n) for n in tensor.shape)
    print(f"wrote {shape} tensor to {args.out} and id map to {args.id_map}")
    return 0


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument(
        "--json-errors",
        action="store_true",
        help="report errors as one JSON object on stderr",
    )
    parser = _Parser(prog="hoclust", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a seeded Monte-Carlo sweep", parents=[common])
    sim_sub = sim.add_subparsers(dest="mode", required=True)

    def add_sim(mode, help_text):
        sp = sim_sub.add_parser(mode, help=help_text, parents=[common])
        sp.add_argument("--out", required=True, help="output CSV path")
        sp.add_argument("--seed", type=int, required=True, help="base seed")
        sp.add_argument("--d", type=int, default=3, help="tensor order")
        sp.add_argument("--r", default="5", help="clusters per mode: R or r1,..,rd")
        sp.add_argument("--sigma", type=float, default=1.0, help="noise level")
        sp.add_argument("--reps", type=int, default=20, help="replications per cell")
        sp.add_argument("--workers", type=int, default=1, help="parallel workers")
        sp.add_argument("--timing", action="store_true", help="record wall time (ms column)")
        sp.set_defaults(func=_cmd_simulate, mode=mode)
        return sp

    for mode, help_text, default_methods in (
        ("phase", "CER across a signal-exponent sweep", "hsc+hlloyd,oracle"),
        ("compare", "method comparison across the same sweep", "hsc,hsc+hlloyd,hosvd"),
    ):
        sp = add_sim(mode, help_text)
        sp.add_argument("--p", required=True, help="extents, e.g. 40,100")
        sp.add_argument("--gammas", required=True, help="signal exponents (write --gammas=-2,-1)")
        sp.add_argument("--methods", default=default_methods, help="methods to run")
        sp.add_argument("--xi", type=float, default=None, help="first-cluster proportion")
        sp.add_argument(
            "--contamination", type=float, default=0.2, help="oracle corruption fraction"
        )

    sp = add_sim("init", "Lloyd refinement from contaminated truth")
    sp.add_argument("--p", required=True, help="extent (single integer)")
    sp.add_argument("--deltas", required=True, help="separations, e.g. 0.5,1,2")
    sp.add_argument("--eps", required=True, help="contamination levels, e.g. 0.1,0.3,0.6")

    sp = add_sim("estimation", "blockwise fit vs low-rank HOOI fit")
    sp.add_argument("--p", required=True, help="extents, e.g. 20,40,60")
    sp.add_argument("--delta", type=float, default=2.0, help="separation")

    cl = sub.add_parser("cluster", help="cluster a TBM1 tensor file", parents=[common])
    cl.add_argument("file", help="input TBM1 tensor")
    cl.add_argument("--ranks", required=True, help="clusters per mode: r1,..,rd")
    cl.add_argument("--iters", type=int, default=None, help="refinement rounds")
    cl.add_argument("--restarts", type=int, default=10, help="k-means restarts")
    cl.add_argument("--seed", type=int, default=0, help="seed")
    cl.add_argument("--out-dir", default=".", help="where to write labels and block means")
    cl.set_defaults(func=_cmd_cluster)

    bs = sub.add_parser("bic-select", help="pick cluster counts by BIC", parents=[common])
    bs.add_argument("file", help="input TBM1 tensor")
    bs.add_argument(
        "--rank-grid",
        default=_DEFAULT_RANK_GRID,
        help='candidates per mode: "2,3" for all modes or "2,3x2,3x2,3" per mode',
    )
    bs.add_argument("--seed", type=int, default=0, help="seed")
    bs.set_defaults(func=_cmd_bic_select)

    ing = sub.add_parser("ingest", help="turn delimited files into a TBM1 tensor", parents=[common])
    ing_sub = ing.add_subparsers(dest="source", required=True)

    ie = ing_sub.add_parser("edgelist", help="layer,source,target rows", parents=[common])
    ie.add_argument("file", help="edge list (CSV or TSV)")
    ie.add_argument("--top-entities", type=int, required=True, help="entities kept by degree")
    ie.add_argument("--top-layers", type=int, default=None, help="layers kept (default all)")
    ie.add_argument("--header", action="store_true", help="skip the first line")
    ie.add_argument("--out", required=True, help="output TBM1 path")
    ie.add_argument("--id-map", required=True, help="output id-map JSON path")
    ie.set_defaults(func=_cmd_ingest, source="edgelist")

    ev = ing_sub.add_parser("events", help="a,b,bucket rows, one file per group", parents=[common])
    ev.add_argument("files", nargs="+", help="event files (CSV or TSV), one per group")
    ev.add_argument("--top-a", type=int, required=True, help="first-axis ids kept by count")
    ev.add_argument("--top-b", type=int, required=True, help="second-axis ids kept by count")
    ev.add_argument("--buckets", type=int, required=True, help="bucket count (third axis)")
    ev.add_argument("--header", action="store_true", help="skip the first line of each file")
    ev.add_argument("--out", required=True, help="output TBM1 path")
    ev.add_argument("--id-map", required=True, help="output id-map JSON path")
    ev.set_defaults(func=_cmd_ingest, source="events")

    return parser


def _emit_error(kind: str, message: str, as_json: bool) -> None:
    if as_json:
        print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    else:
        print(message, file=sys.stderr)


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    as_json = "--json-errors" in argv
    try:
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        _emit_error("usage", str(exc), as_json)
        return 2
    except DataError as exc:
        _emit_error("data", str(exc), as_json)
        return 1
    except (ValueError, OSError) as exc:
        _emit_error("data", str(exc), as_json)
        return 1
    except SystemExit as exc:
        return 0 if exc.code is None else int(exc.code)


if __name__ == "__main__":
    sys.exit(main())
