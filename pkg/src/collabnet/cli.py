"""Command-line interface.

Each subcommand wraps one analysis stage; ``run`` executes the whole
pipeline from a JSON config. Failures surface as ``error <CODE>: message``
on stderr with a non-zero exit status.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import pandas as pd

from . import __version__
from .communities import adjacency_from_counts, optimise_partition, resolution_scan
from .errors import CollabnetError, SchemaError
from .manifest import write_json
from .panel import (DEFAULT_PERIODS, PeriodSpec, filter_min_production,
                    load_panel, merge_entities, read_dataset_json,
                    write_dataset_json)
from .partition import Partition
from .partition_metrics import jaccard_flows, nmi, variation_of_information
from .pipeline import (_entropy_stage, _kl_stage, _profiles_stage, _tau_tag,
                       _write_csv, run_pipeline, write_panel_csvs,
                       write_planted_csv)
from .significance import (collaboration_significance,
                           continental_mean_weights, export_network)
from .synth import SynthConfig, generate_panel

logger = logging.getLogger(__name__)


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help="override the seed (default: config value or 0)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for per-period stages")
    parser.add_argument("--out", type=Path, default=Path("out"),
                        help="output directory (default: ./out)")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log progress to stderr")


def _load_dataset(args):
    return read_dataset_json(args.dataset)


def _read_periods(path: str | None):
    if path is None:
        return DEFAULT_PERIODS
    with open(path, encoding="utf-8") as fh:
        spec = json.load(fh)
    return tuple(PeriodSpec(p["label"], int(p["start_year"]),
                            int(p["end_year"])) for p in spec)


def _cmd_ingest(args) -> int:
    dataset = load_panel(args.publications, args.collaborations, args.metadata,
                         periods=_read_periods(args.periods))
    if args.merge_map:
        with open(args.merge_map, encoding="utf-8") as fh:
            dataset = merge_entities(dataset, json.load(fh))
    if args.min_production is not None:
        dataset = filter_min_production(dataset, args.min_production)
    args.out.mkdir(parents=True, exist_ok=True)
    write_dataset_json(dataset, args.out / "dataset.json")
    write_json(dataset.report.to_dict(), args.out / "load_report.json")
    print(f"wrote {args.out / 'dataset.json'} "
          f"({dataset.n_countries} countries, {len(dataset.periods)} periods)")
    return 0


def _cmd_profiles(args) -> int:
    dataset = _load_dataset(args)
    files = _profiles_stage(dataset, {"max_clusters": args.max_clusters},
                            args.out)
    print(f"wrote {len(files)} files to {args.out}")
    return 0


def _cmd_entropy(args) -> int:
    dataset = _load_dataset(args)
    files = _entropy_stage(dataset, args.out, args.out)
    print(f"wrote {len(files)} files to {args.out}")
    return 0


def _cmd_significance(args) -> int:
    dataset = _load_dataset(args)
    periods = args.period or list(dataset.period_labels)
    args.out.mkdir(parents=True, exist_ok=True)
    count = 0
    for period in periods:
        net = collaboration_significance(dataset, period)
        formats = ("csv", "gexf") if args.export == "both" else (args.export,)
        for fmt in formats:
            suffix = "csv" if fmt == "csv" else "gexf"
            name = ("edges" if fmt == "csv" else "network")
            path = args.out / f"{name}_{period}.{suffix}"
            export_network(net, dataset, path, fmt=fmt, cutoff=args.cutoff)
            count += 1
        heat = continental_mean_weights(net, dataset, args.positive_only)
        heat.to_csv(args.out / f"heatmap_{period}.csv", lineterminator="\n",
                    na_rep="", index_label="region")
        count += 1
    print(f"wrote {count} files to {args.out}")
    return 0


def _cmd_communities(args) -> int:
    dataset = _load_dataset(args)
    periods = args.period or list(dataset.period_labels)
    taus = args.tau or [1.0, 0.76]
    seed = args.seed if args.seed is not None else 0
    args.out.mkdir(parents=True, exist_ok=True)
    for ti, tau in enumerate(taus):
        tag = _tau_tag(tau)
        rows, doc = [], []
        for pi, period in enumerate(periods):
            adj = adjacency_from_counts(dataset, period,
                                        use_significance=args.use_significance)
            task_seed = seed + (ti * len(periods) + pi) * (args.runs + 1)
            result = optimise_partition(adj, gamma=1.0 / tau, seed=task_seed,
                                        n_runs=args.runs, backend=args.backend)
            rows += [{"period": period, "country": c, "community": lab}
                     for c, lab in zip(result.partition.nodes,
                                       result.partition.labels)]
            doc.append(dict(result.to_json_dict(), period=period))
            print(f"tau={tau:g} period={period}: "
                  f"{result.partition.n_communities} communities, "
                  f"score={result.score:.6f}")
        _write_csv(pd.DataFrame(rows), args.out / f"partitions_tau{tag}.csv")
        write_json(doc, args.out / f"stability_tau{tag}.json")
    return 0


def _cmd_resolution_scan(args) -> int:
    dataset = _load_dataset(args)
    adj = adjacency_from_counts(dataset, args.period)
    seed = args.seed if args.seed is not None else 0
    pairs = resolution_scan(adj, args.tau, runs_per_tau=args.runs_per_tau,
                            seed=seed, backend=args.backend)
    df = pd.DataFrame(pairs, columns=["tau", "mean_vi"])
    args.out.mkdir(parents=True, exist_ok=True)
    _write_csv(df, args.out / f"resolution_scan_{args.period}.csv")
    for tau, mean_vi in pairs:
        print(f"tau={tau:g}: mean_vi={mean_vi:.6f}")
    return 0


def _read_partition_csv(path: str) -> Partition:
    df = pd.read_csv(path, dtype={"country": "string"})
    for col in ("country", "community"):
        if col not in df.columns:
            raise SchemaError(f"{path}: missing column '{col}'")
    if "period" in df.columns and df["period"].nunique() > 1:
        raise SchemaError(f"{path}: holds several periods; filter to one")
    return Partition.from_labels(df["country"].tolist(),
                                 df["community"].tolist())


def _cmd_compare(args) -> int:
    x = _read_partition_csv(args.partition_a)
    y = _read_partition_csv(args.partition_b)
    flows, _ = jaccard_flows(x, y, args.color_threshold)
    doc = {
        "nmi": nmi(x, y) if x.same_nodes(y) else None,
        "vi": variation_of_information(x, y) if x.same_nodes(y) else None,
        "flows": [{"from_community": f.from_community,
                   "to_community": f.to_community,
                   "shared": f.shared, "jaccard": f.jaccard}
                  for f in flows],
    }
    json.dump(doc, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


def _cmd_kl_div(args) -> int:
    dataset = _load_dataset(args)
    files = _kl_stage(dataset, {"kl_smoothing": args.smoothing}, args.out)
    print(f"wrote {len(files)} files to {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        config = SynthConfig.from_json_dict(json.load(fh))
    if args.seed is not None:
        config = config.with_seed(args.seed)
    dataset, planted = generate_panel(config)
    files = write_panel_csvs(dataset, args.out)
    files.append(write_planted_csv(planted, args.out))
    write_dataset_json(dataset, args.out / "dataset.json")
    write_json(config.to_json_dict(), args.out / "synth_config.json")
    print(f"wrote {len(files) + 2} files to {args.out} "
          f"({dataset.n_countries} countries, {len(dataset.periods)} periods)")
    return 0


def _cmd_run(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        config = json.load(fh)
    manifest = run_pipeline(config, args.out,
                            base_dir=Path(args.config).parent,
                            seed=args.seed, threads=args.threads)
    print(f"wrote {len(manifest.output_digests)} files to {args.out} "
          f"(seed={manifest.seed})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="collabnet",
        description="Temporal country-collaboration network analysis.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a panel dataset from CSV files")
    p.add_argument("--publications", required=True)
    p.add_argument("--collaborations", required=True)
    p.add_argument("--metadata", required=True)
    p.add_argument("--periods", help="JSON list of period specs "
                                     "(default: 1970-2018 buckets)")
    p.add_argument("--merge-map", help="JSON object mapping codes to merge targets")
    p.add_argument("--min-production", type=int, default=None,
                   help="drop countries at or below this publication count "
                        "in any period (default: keep all)")
    _common_flags(p)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("profiles", help="production profiles and clustering")
    p.add_argument("--dataset", required=True)
    p.add_argument("--max-clusters", type=int, default=6)
    _common_flags(p)
    p.set_defaults(func=_cmd_profiles)

    p = sub.add_parser("entropy", help="collaboration entropy tables")
    p.add_argument("--dataset", required=True)
    _common_flags(p)
    p.set_defaults(func=_cmd_entropy)

    p = sub.add_parser("significance", help="significance-filtered networks")
    p.add_argument("--dataset", required=True)
    p.add_argument("--period", action="append",
                   help="period label (repeatable; default: all)")
    p.add_argument("--cutoff", type=float, default=0.5)
    p.add_argument("--export", choices=("csv", "gexf", "both"), default="both")
    p.add_argument("--positive-only", action="store_true",
                   help="average only positive weights in the region heatmap")
    _common_flags(p)
    p.set_defaults(func=_cmd_significance)

    p = sub.add_parser("communities", help="stability-optimal partitions")
    p.add_argument("--dataset", required=True)
    p.add_argument("--period", action="append",
                   help="period label (repeatable; default: all)")
    p.add_argument("--tau", action="append", type=float,
                   help="time-scale value (repeatable; default: 1.0 and 0.76)")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--use-significance", action="store_true",
                   help="weight edges by significance instead of raw counts")
    p.add_argument("--backend", choices=("python", "cython"), default=None)
    _common_flags(p)
    p.set_defaults(func=_cmd_communities)

    p = sub.add_parser("resolution-scan",
                       help="partition reproducibility across time scales")
    p.add_argument("--dataset", required=True)
    p.add_argument("--period", required=True)
    p.add_argument("--tau", action="append", type=float, required=True)
    p.add_argument("--runs-per-tau", type=int, default=20)
    p.add_argument("--backend", choices=("python", "cython"), default=None)
    _common_flags(p)
    p.set_defaults(func=_cmd_resolution_scan)

    p = sub.add_parser("compare", help="agreement between two partition CSVs")
    p.add_argument("partition_a")
    p.add_argument("partition_b")
    p.add_argument("--color-threshold", type=float, default=0.6)
    _common_flags(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("kl-div",
                       help="divergence from the configuration expectation")
    p.add_argument("--dataset", required=True)
    p.add_argument("--smoothing", type=float, default=1.0)
    _common_flags(p)
    p.set_defaults(func=_cmd_kl_div)

    p = sub.add_parser("simulate", help="generate a synthetic panel")
    p.add_argument("--config", required=True,
                   help="JSON file describing the synthetic panel")
    _common_flags(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("run", help="full pipeline from a JSON config")
    p.add_argument("--config", required=True)
    _common_flags(p)
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except CollabnetError as exc:
        print(f"error {exc.code}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error E_IO: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
