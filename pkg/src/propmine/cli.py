"""Command line entry point: ``propmine {mine,check,eval,oracle,gen,convert}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 enumeration budget
exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import concepts
from .concepts import PairDataset, Partitioning
from .dataset import DensityOptions, Dim, Selection, TripletDataset, natural_key
from .errors import BudgetExceeded, DataError, InvalidSelection, PropmineError
from .io import (
    IngestSpec,
    read_rows,
    ingest,
    load_config,
    result_record,
    write_dataset_csv,
    write_results,
)
from .miner import MinerConfig, mine
from .oracle import PlantSpec, PlantedBlock, enumerate_all, generate
from .propositions import Thresholded, evaluate, format_proposition, parse_proposition

logger = logging.getLogger("propmine")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_BUDGET = 0, 1, 2, 3

CONCEPTS = {
    "disconnected": concepts.is_disconnected,
    "vertex-cover": concepts.is_vertex_cover,
    "dominating-set": concepts.is_dominating_set,
    "separating-set": concepts.is_separating_set,
    "k-coloring": concepts.is_k_coloring,
    "clique": concepts.is_clique,
    "cluster": concepts.is_cluster,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_input(p):
    p.add_argument("input", help="dataset file")
    p.add_argument("--format", choices=("csv", "tij"), default=None,
                   help="input format (default: tij for .dat/.tij files, else csv)")
    p.add_argument("--bin-seconds", type=int, default=None, help="time bin width for timestamps")
    p.add_argument("--symmetrize", action=argparse.BooleanOptionalAction, default=None,
                   help="add (j, i, t) for every (i, j, t); default on for tij")
    p.add_argument("--header", action="store_true", help="csv input has a header row")
    p.add_argument("--columns", default="0,1,2", help="csv columns feeding A,B,C")
    p.add_argument("--shared-ab", action=argparse.BooleanOptionalAction, default=None,
                   help="A and B index the same elements; default on for tij")
    p.add_argument("--roles", default=None, help="role map csv 'id,role'")
    p.add_argument("--config", default=None, help="key = value config file")


def _add_thresholds(p):
    p.add_argument("--x-min", default=None, help="minimum coverage (default 0.7)")
    p.add_argument("--y-min", default=None, help="minimum density (default 0.5)")
    p.add_argument("--subject", choices=("a", "b", "c"), default=None, help="subject dimension")
    p.add_argument("--loopless", action=argparse.BooleanOptionalAction, default=None,
                   help="exclude a == b cells from densities; default on for tij")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="propmine", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mine", help="list thresholded propositions")
    _add_input(p)
    _add_thresholds(p)
    p.add_argument("--jobs", type=int, default=None, help="worker processes")
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("--out-format", choices=("jsonl", "csv"), default="jsonl")

    p = sub.add_parser("check", help="verify a graph concept on a selection")
    _add_input(p)
    p.add_argument("concept", choices=sorted(CONCEPTS))
    p.add_argument("--selection", default=None,
                   help="json file: {alpha, beta, gamma} label lists (lists of lists for k-coloring)")
    p.add_argument("--graph", action="store_true", help="read a two-column edge list as an undirected graph")
    p.add_argument("--threshold", default=None, help="coverage threshold for 'cluster'")
    p.add_argument("--literal-table", action="store_true",
                   help="vertex-cover: literal 'No beta^c are alpha^c and beta^c' reading")

    p = sub.add_parser("eval", help="evaluate one proposition")
    _add_input(p)
    p.add_argument("proposition", help="e.g. 'All A{1} are B{1,2} and C{1}'")
    p.add_argument("--loopless", action=argparse.BooleanOptionalAction, default=None)

    p = sub.add_parser("oracle", help="exhaustively list valid (subject, block) pairs")
    _add_input(p)
    _add_thresholds(p)
    p.add_argument("--budget", type=int, default=2**24)
    p.add_argument("--maximal", action="store_true", help="keep only maximal blocks")
    p.add_argument("--out", default="-")

    p = sub.add_parser("gen", help="generate a dataset with planted blocks")
    p.add_argument("spec", help="json plant spec: {sizes, blocks: [{alpha, beta, gamma, fill_rate}], noise_rate, seed}")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="dataset csv")
    p.add_argument("--truth", default=None, help="ground-truth json")

    p = sub.add_parser("convert", help="rewrite an input file as canonical csv")
    _add_input(p)
    p.add_argument("--out", required=True)
    return parser


# -- helpers -------------------------------------------------------------------


def _config_sections(args):
    if args.config:
        return load_config(args.config)
    return {}, {}


def _ingest_spec(args, ingest_opts) -> IngestSpec:
    fmt = args.format or ingest_opts.get("format")
    if fmt is None:
        fmt = "tij" if Path(args.input).suffix in (".dat", ".tij", ".txt") else "csv"
    bin_seconds = args.bin_seconds
    if bin_seconds is None and "bin_seconds" in ingest_opts:
        bin_seconds = int(ingest_opts["bin_seconds"])
    symmetrize = args.symmetrize
    if symmetrize is None and "symmetrize" in ingest_opts:
        symmetrize = ingest_opts["symmetrize"].lower() in ("true", "1", "yes")
    columns = tuple(int(c) for c in args.columns.split(","))
    if len(columns) != 3:
        raise UsageError("--columns needs three indices")
    return IngestSpec(
        format=fmt,
        columns=columns,
        time_bin_seconds=bin_seconds,
        symmetrize=symmetrize,
        shared_ab=args.shared_ab,
        role_map_file=args.roles,
        header=args.header,
    )


def _load(args, ingest_opts=None) -> tuple[TripletDataset, IngestSpec]:
    spec = _ingest_spec(args, ingest_opts or {})
    return ingest(args.input, spec), spec


def _miner_config(args, miner_opts, spec: IngestSpec, d: TripletDataset) -> MinerConfig:
    opts = dict(miner_opts)
    for key, value in (("x_min", args.x_min), ("y_min", args.y_min), ("subject_dim", args.subject),
                       ("loopless", args.loopless), ("n_jobs", getattr(args, "jobs", None))):
        if value is not None:
            opts[key] = value
    if "loopless" not in opts:
        opts["loopless"] = spec.format == "tij" and d.shared_ab and not d.has_diagonal()
    return MinerConfig.from_mapping(opts)


def _write_lines(lines, path):
    if path == "-":
        for line in lines:
            sys.stdout.write(line)
        return
    with open(path, "w") as fh:
        fh.writelines(lines)


def _write_records(records, path, fmt):
    if path == "-":
        if fmt == "csv":
            raise UsageError("csv output needs --out")
        for rec in records:
            print(json.dumps(rec, ensure_ascii=False))
        return len(records)
    return write_results(records, path, fmt)


def _labels_to_set(d, dim, labels):
    try:
        return frozenset(d.index_of(dim, lab) for lab in labels)
    except KeyError as exc:
        raise InvalidSelection(str(exc)) from None


# -- commands ------------------------------------------------------------------


def cmd_mine(args) -> int:
    miner_opts, ingest_opts = _config_sections(args)
    d, spec = _load(args, ingest_opts)
    cfg = _miner_config(args, miner_opts, spec, d)
    result = mine(d, cfg)
    records = [result_record(m, d) for m in result.propositions]
    _write_records(records, args.out, args.out_format)
    summary = {
        "triplets": len(d),
        "sizes": list(d.sizes),
        "predicates_pre_merge": result.predicate_count,
        "propositions_post_merge": len(result.propositions),
        "config": cfg.to_mapping(),
    }
    print(json.dumps(summary), file=sys.stderr)
    return EXIT_OK


def _read_selection(args):
    if not args.selection:
        raise UsageError(f"concept {args.concept!r} needs --selection")
    return json.loads(Path(args.selection).read_text())


def cmd_check(args) -> int:
    if args.graph:
        spec = _ingest_spec(args, {})
        edges = []
        for lineno, fields in read_rows(args.input, IngestSpec(format="csv", header=spec.header)):
            if len(fields) < 2:
                raise DataError("edge rows need two columns", lineno)
            edges.append((fields[0], fields[1]))
        vertices = sorted({v for e in edges for v in e}, key=natural_key)
        index = {v: i for i, v in enumerate(vertices)}
        target = PairDataset.from_edges(len(vertices), [(index[u], index[v]) for u, v in edges],
                                        labels=vertices)
        data = target.data
    else:
        data, _ = _load(args)
        target = data
    raw = _read_selection(args)
    fn = CONCEPTS[args.concept]
    dims = (Dim.A,) if args.graph else tuple(Dim)
    names = ("alpha", "beta", "gamma")
    if args.concept == "k-coloring":
        parts = [
            [_labels_to_set(data, dim, group) for group in raw[names[dim]]] for dim in dims
        ]
        verdict = fn(target, Partitioning(*parts))
    else:
        sel = Selection(*(
            _labels_to_set(data, dim, raw.get(names[dim], [])) if dim in dims else frozenset()
            for dim in Dim
        ))
        if args.concept == "cluster":
            if args.threshold is None:
                raise UsageError("cluster needs --threshold")
            verdict = fn(target, sel, Fraction(args.threshold))
        elif args.concept == "vertex-cover" and not args.graph:
            verdict = fn(target, sel, literal_table=args.literal_table)
        else:
            verdict = fn(target, sel)
    out = {
        "concept": args.concept,
        "holds": verdict.holds,
        "checks": [
            {"proposition": format_proposition(c.proposition, data), "holds": c.holds}
            for c in verdict.checks
        ],
        "details": {k: v for k, v in verdict.details.items() if isinstance(v, (bool, int, str))},
    }
    print(json.dumps(out, ensure_ascii=False))
    return EXIT_OK


def cmd_eval(args) -> int:
    d, spec = _load(args)
    p = parse_proposition(args.proposition, d)
    loopless = args.loopless
    if loopless is None:
        loopless = spec.format == "tij" and d.shared_ab
    result = evaluate(d, p, DensityOptions(loopless=loopless))
    out = {"proposition": format_proposition(p, d)}
    if isinstance(p.form, Thresholded):
        out.update(x=float(result.x_actual), y=float(result.y_actual),
                   x_exact=str(result.x_actual), y_exact=str(result.y_actual), holds=result.holds)
    else:
        out["holds"] = result
    print(json.dumps(out, ensure_ascii=False))
    return EXIT_OK


def cmd_oracle(args) -> int:
    miner_opts, ingest_opts = _config_sections(args)
    d, spec = _load(args, ingest_opts)
    cfg = _miner_config(args, miner_opts, spec, d)
    result = enumerate_all(d, cfg, budget=args.budget, maximal_only=args.maximal)
    s = cfg.subject_dim
    lines = []
    for e in result.entries:
        rec = {
            "selection": [[str(d.labels[k][i]) for i in sorted(e.selection[k])] for k in Dim],
            "subject_dim": s.letter,
            "x_exact": str(e.x),
            "y_exact": str(e.y),
        }
        lines.append(json.dumps(rec, ensure_ascii=False) + "\n")
    _write_lines(lines, args.out)
    print(json.dumps({"entries": len(result.entries), **result.bounds}, default=list), file=sys.stderr)
    return EXIT_OK


def cmd_gen(args) -> int:
    raw = json.loads(Path(args.spec).read_text())
    blocks = [
        PlantedBlock(frozenset(b["alpha"]), frozenset(b["beta"]), frozenset(b["gamma"]),
                     float(b.get("fill_rate", 1.0)))
        for b in raw.get("blocks", [])
    ]
    seed = args.seed if args.seed is not None else int(raw.get("seed", 0))
    spec = PlantSpec(tuple(raw["sizes"]), tuple(blocks), float(raw.get("noise_rate", 0.0)), seed)
    d, truth = generate(spec)
    write_dataset_csv(d, args.out)
    if args.truth:
        Path(args.truth).write_text(json.dumps(
            [{"alpha": sorted(t.alpha), "beta": sorted(t.beta), "gamma": sorted(t.gamma)} for t in truth]
        ) + "\n")
    print(json.dumps({"triplets": len(d), "blocks": len(truth), "seed": seed}), file=sys.stderr)
    return EXIT_OK


def cmd_convert(args) -> int:
    _, ingest_opts = _config_sections(args)
    d, _ = _load(args, ingest_opts)
    write_dataset_csv(d, args.out)
    print(json.dumps({"triplets": len(d), "sizes": list(d.sizes)}), file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "mine": cmd_mine,
    "check": cmd_check,
    "eval": cmd_eval,
    "oracle": cmd_oracle,
    "gen": cmd_gen,
    "convert": cmd_convert,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"propmine: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"propmine: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (PropmineError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"propmine: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
