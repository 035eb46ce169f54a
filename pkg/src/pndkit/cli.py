"""Command-line front end.

Exit codes: 0 on success, 1 for usage errors (bad flags, unknown
subcommand), 2 for data errors (parse failures, layer mismatches, bad
values). Diagnostics go to stderr, results to files or stdout.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .errors import PNDError
from .io import (
    load_coordinates,
    load_multiplex,
    load_weighted_matrix,
    merge_layers,
    save_multiplex,
    split_by_distance,
    write_nulls_csv,
    write_result_bundle,
    write_sweep_csv,
)
from .lattice import decompose_network
from .nullmodels import er_sweep, rewire_sweep
from .pathstats import mode_proportions
from .stats import (
    empirical_p_vs_population,
    null_decompositions,
    permutation_paired_test,
)


def _grid(step: float, start: float) -> np.ndarray:
    if not 0 < step <= 1:
        raise ValueError(f"step must lie in (0, 1], got {step}")
    return np.round(np.arange(start, 1.0 + 1e-9, step), 10)


def _select_and_merge(args):
    selection = args.layers.split(",") if args.layers else None
    m = load_multiplex(args.multiplex, layer_selection=selection)
    if args.merge:
        m = merge_layers(m, [g.split("+") for g in args.merge])
    return m


def _cmd_decompose(args) -> int:
    m = _select_and_merge(args)
    result = decompose_network(m)
    config = {
        "command": "decompose",
        "multiplex": str(args.multiplex),
        "layers": args.layers,
        "merge": args.merge,
        "seed": args.seed,
    }
    summary = write_result_bundle(result, args.out, config)
    fracs = ", ".join(f"{k}={v:.4f}" for k, v in summary["mode_fractions"].items())
    print(f"{m.node_count} nodes, layers {list(m.layer_names)}: {fracs}")
    print(f"results written to {args.out}")
    return 0


def _cmd_split(args) -> int:
    weighted = load_weighted_matrix(args.matrix)
    coords = load_coordinates(args.coords)
    m = split_by_distance(weighted, coords, quantile=args.quantile)
    if args.out:
        save_multiplex(m, args.out)
    else:
        labels = m.node_labels or tuple(str(i) for i in range(m.node_count))
        for name, g in zip(m.layer_names, m.layers):
            for i, j in g.edge_array:
                print(f"{name} {labels[i]} {labels[j]}")
    return 0


def _cmd_sweep_er(args) -> int:
    records = er_sweep(
        n=args.n,
        densities=_grid(args.step, args.step),
        replicates=args.replicates,
        seed=args.seed,
    )
    write_sweep_csv(records, args.out)
    print(f"{len(records)} cells written to {args.out}")
    return 0


def _cmd_sweep_rewire(args) -> int:
    records = rewire_sweep(
        n=args.n,
        density=args.density,
        fractions=_grid(args.step, 0.0),
        replicates=args.replicates,
        seed=args.seed,
    )
    write_sweep_csv(records, args.out)
    print(f"{len(records)} fractions written to {args.out}")
    return 0


def _cmd_nulls(args) -> int:
    m = _select_and_merge(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    real = mode_proportions(decompose_network(m))
    nulls = null_decompositions(m, args.n_nulls, seed=args.seed)
    write_nulls_csv([real], out / "real.csv")
    write_nulls_csv(nulls, out / "nulls.csv")
    print(f"{args.n_nulls} degree-preserving nulls written to {out}")
    return 0


def _load_series(path, column: str | None) -> np.ndarray:
    rows = []
    header = None
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = [t.strip() for t in line.split(",")] if "," in line else line.split()
            if header is None and not _all_numeric(fields):
                header = fields
                continue
            rows.append(fields)
    if not rows:
        raise PNDError(f"{path}: no numeric rows")
    width = len(rows[0])
    if column is not None:
        if header is None or column not in header:
            raise PNDError(f"{path}: no column named {column!r}")
        idx = header.index(column)
    elif width == 1:
        idx = 0
    else:
        raise PNDError(f"{path}: {width} columns, pick one with --column")
    try:
        return np.array([float(r[idx]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise PNDError(f"{path}: {exc}") from exc


def _all_numeric(fields) -> bool:
    try:
        for t in fields:
            float(t)
    except ValueError:
        return False
    return True


def _cmd_stats(args) -> int:
    real = _load_series(args.real, args.column)
    null = _load_series(args.null, args.column)
    if args.paired:
        report = permutation_paired_test(
            real, null, n_perm=args.n_perm, seed=args.seed
        )
        payload = dataclasses.asdict(report)
    else:
        if real.size != 1:
            raise PNDError(
                f"unpaired mode compares one observed value against a "
                f"population, got {real.size} values in {args.real}"
            )
        p = empirical_p_vs_population(float(real[0]), null, side=args.side)
        payload = {
            "test_mode": "empirical",
            "side": args.side,
            "observed": float(real[0]),
            "n_null": int(null.size),
            "p_value": p,
        }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pnd",
        description=(
            "Decompose shortest-path efficiency of a multiplex network into "
            "redundant, unique and synergistic layer contributions."
        ),
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("decompose", help="decompose a multiplex edge list")
    p.add_argument("--multiplex", required=True, help="edge-list file")
    p.add_argument("--layers", help="comma-separated layer ids to keep")
    p.add_argument(
        "--merge",
        action="append",
        help="layers to union into one, joined by '+' (repeatable)",
    )
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("split", help="split a weighted network by edge length")
    p.add_argument("--matrix", required=True, help="weighted CSV matrix")
    p.add_argument("--coords", required=True, help="node coordinates file")
    p.add_argument("--quantile", type=float, default=0.5)
    p.add_argument("--out", help="edge-list output file (default stdout)")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("sweep-er", help="density sweep over random graph pairs")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--replicates", type=int, default=10)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="sweep_er.csv")
    p.set_defaults(func=_cmd_sweep_er)

    p = sub.add_parser(
        "sweep-rewire", help="lattice-vs-rewired sweep with small-world index"
    )
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--density", type=float, default=0.05)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--replicates", type=int, default=10)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="sweep_rewire.csv")
    p.set_defaults(func=_cmd_sweep_rewire)

    p = sub.add_parser("nulls", help="degree-preserving null decompositions")
    p.add_argument("--multiplex", required=True)
    p.add_argument("--layers")
    p.add_argument("--merge", action="append")
    p.add_argument("--n-nulls", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="nulls_out", help="output directory")
    p.set_defaults(func=_cmd_nulls)

    p = sub.add_parser("stats", help="compare real values against nulls")
    p.add_argument("--real", required=True, help="CSV of observed values")
    p.add_argument("--null", required=True, help="CSV of null values")
    p.add_argument("--paired", action="store_true")
    p.add_argument("--n-perm", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument(
        "--side", choices=("greater", "less", "two-sided"), default="greater"
    )
    p.add_argument("--column", help="column name when files have several")
    p.add_argument("--out", help="also write the JSON report here")
    p.set_defaults(func=_cmd_stats)

    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except (PNDError, OSError, ValueError) as exc:
        print(f"pnd: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))
