"""Command-line front end: ensemble generation, rank tables, indicators,
validation studies, and real-data assessment, all as reproducible runs.

Exit codes: 0 success, 1 data error (bad input file, failed selection),
2 usage error.  Outputs are written atomically; every emitted file is
accompanied by enough metadata (config, seed, hash, tool version) to
reproduce it byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys

from . import __version__, experiments, indicators, ingest, rankcore, synthdist
from .experiments import atomic_write_text, config_hash
from .rankcore import TIE_POLICIES

DEFAULT_X = (10.0, 1.0, 0.5, 0.1, 0.01)


class DataError(Exception):
    """User-facing data problem: report on stderr and exit 1."""


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (
        synthdist.ConfigError,
        synthdist.GridError,
        experiments.SelectionError,
        ingest.CorpusFormatError,
        ingest.EmptyCorpusError,
        ingest.UnknownCountryError,
        rankcore.InsufficientPapersError,
        rankcore.UnknownLabelError,
        json.JSONDecodeError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankmetrics",
        description="Rank-based research-assessment metrics and their validation studies.",
    )
    parser.add_argument("--version", action="version", version=f"rankmetrics {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config=False, corpus=False, out=True):
        if config:
            p.add_argument("--config", help="ensemble config file (key = value lines)")
            p.add_argument("--seed", type=int, help="override the config seed")
            p.add_argument("--jobs", type=int, default=1, help="sampling threads")
        if corpus:
            p.add_argument("--input", help="corpus CSV (id,year,citations,countries[,field])")
            p.add_argument("--meta", help="corpus metadata JSON sidecar")
            p.add_argument(
                "--skip-bad-rows", action="store_true",
                help="proceed with valid rows instead of failing on row errors",
            )
        p.add_argument("--tie-policy", choices=TIE_POLICIES, default=rankcore.ORDINAL)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if out:
            p.add_argument("--out", help="output directory (default: stdout where supported)")

    def add_indicator_flags(p):
        p.add_argument("--k", type=int, default=indicators.DEFAULT_K)
        p.add_argument("--offset", type=float, default=indicators.DEFAULT_OFFSET)
        p.add_argument("--scale", type=float, default=indicators.DEFAULT_SCALE)

    p = sub.add_parser("gen", help="generate an ensemble and export it")
    add_common(p, config=True)
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("rank", help="export the dual-rank table of an ensemble")
    add_common(p, config=True)
    p.add_argument("--labels", help="comma-separated series labels (default: all)")
    p.add_argument("--top", type=int, help="keep only each unit's top-n papers")
    p.set_defaults(handler=cmd_rank)

    p = sub.add_parser("rk", help="rank index of one country/split in a corpus")
    add_common(p, corpus=True)
    add_indicator_flags(p)
    p.add_argument("--country", required=True)
    p.add_argument("--split", choices=(ingest.DOMESTIC, ingest.COLLABORATIVE), required=True)
    p.set_defaults(handler=cmd_rk)

    p = sub.add_parser("ptop", help="top-percentile indicators")
    add_common(p, config=True, corpus=True)
    add_indicator_flags(p)
    p.add_argument("--x", default=",".join(str(x) for x in DEFAULT_X),
                   help="comma-separated percentile list")
    p.add_argument("--labels", help="series labels (synthetic input; default: triple selection)")
    p.add_argument("--country", help="country code (corpus input)")
    p.add_argument("--split", choices=(ingest.DOMESTIC, ingest.COLLABORATIVE),
                   help="country split (corpus input)")
    p.set_defaults(handler=cmd_ptop)

    for name, help_text in (
        ("tables1", "dual-rank sample table"),
        ("fig1", "collapse of percentile counts onto inverse-rank means"),
        ("fig2", "stringency tiers"),
        ("fig3", "size/efficiency rank traces"),
        ("fig4", "equivalence ranges of the rank index"),
    ):
        p = sub.add_parser(name, help=help_text)
        add_common(p, config=name != "fig4")
        if name == "fig4":
            p.add_argument("--config", help="extended grid config (default: built-in 115-series grid)")
            p.add_argument("--seed", type=int, help="seed for the built-in grid or config override")
            p.add_argument("--jobs", type=int, default=1)
        add_indicator_flags(p)
        if name == "tables1":
            p.add_argument("--sample-size", type=int, default=15)
        p.set_defaults(handler=make_experiment_handler(name))

    p = sub.add_parser("assess", help="country assessment table from a corpus")
    add_common(p, corpus=True)
    add_indicator_flags(p)
    p.add_argument("--countries", help="comma-separated country codes")
    p.add_argument("--countries-file", help="file with one country code per line")
    p.set_defaults(handler=cmd_assess)

    return parser


def load_run_config(args) -> synthdist.EnsembleConfig:
    if not args.config:
        raise DataError("--config is required for this command")
    config = synthdist.load_config(args.config)
    if args.seed is not None:
        config = synthdist.EnsembleConfig(
            mu_start=config.mu_start, mu_end=config.mu_end,
            mu_count=config.mu_count, sizes=config.sizes, seed=args.seed,
        )
    return config


def load_corpus_or_fail(args) -> list[ingest.PaperRecord]:
    if not args.input:
        raise DataError("--input is required for this command")
    meta = ingest.CorpusMeta.from_json(args.meta) if args.meta else None
    result = ingest.load_corpus(args.input, meta)
    if result.errors:
        for error in result.errors:
            print(f"{args.input}: {error}", file=sys.stderr)
        if not args.skip_bad_rows:
            raise DataError(f"{len(result.errors)} malformed rows (use --skip-bad-rows to proceed)")
    if not result.records:
        raise DataError(f"{args.input}: no usable records")
    return result.records


def emit_rows(rows: list[dict], columns, args, name: str, parameters: dict) -> int:
    """Write rows as CSV/JSON to --out (with sidecar) or stdout."""
    if args.out:
        report = experiments.ExperimentReport(
            experiment_id=name, parameters=parameters, columns=tuple(columns), rows=rows
        )
        for path in experiments.write_report(report, args.out, fmt=args.format):
            print(path)
        return 0
    if args.format == "json":
        print(json.dumps(rows, indent=1))
    else:
        buf = io.StringIO()
        buf.write(",".join(columns) + "\n")
        for row in rows:
            buf.write(",".join(experiments._cell(row[c]) for c in columns) + "\n")
        sys.stdout.write(buf.getvalue())
    return 0


def cmd_gen(args) -> int:
    config = load_run_config(args)
    ensemble = synthdist.generate_ensemble(config, jobs=args.jobs)
    if not args.out:
        raise DataError("gen requires --out")
    os.makedirs(args.out, exist_ok=True)
    params = {"config": config.to_dict()}
    digest = config_hash(params)
    base = os.path.join(args.out, f"ensemble_{digest}")
    spec_buf, value_buf = io.StringIO(), io.StringIO()
    synthdist.write_specs_csv(ensemble.specs, spec_buf)
    synthdist.write_values_csv(ensemble.series, value_buf)
    atomic_write_text(base + "_specs.csv", spec_buf.getvalue())
    atomic_write_text(base + "_values.csv", value_buf.getvalue())
    sidecar = {
        "experiment": "gen",
        "config_hash": digest,
        "parameters": params,
        "series_count": len(ensemble.specs),
        "total_papers": config.total_papers,
        "tool_version": __version__,
    }
    atomic_write_text(base + ".json", json.dumps(sidecar, indent=1, sort_keys=True) + "\n")
    for suffix in ("_specs.csv", "_values.csv", ".json"):
        print(base + suffix)
    return 0


def cmd_rank(args) -> int:
    config = load_run_config(args)
    ensemble = synthdist.generate_ensemble(config, jobs=args.jobs)
    world = rankcore.build_world(list(ensemble.series), tie_policy=args.tie_policy)
    labels = args.labels.split(",") if args.labels else None
    rows = list(rankcore.rank_table_rows(world, labels=labels, top=args.top))
    params = {
        "config": config.to_dict(), "tie_policy": args.tie_policy,
        "labels": labels, "top": args.top,
    }
    return emit_rows(rows, ("label", "rank2", "rank1", "value"), args, "rank", params)


def cmd_rk(args) -> int:
    records = load_corpus_or_fail(args)
    rows = ingest.assess(
        records, [args.country], k=args.k, offset=args.offset,
        scale=args.scale, tie_policy=args.tie_policy,
    )
    rows = [r for r in rows if r.split == args.split]
    table = ingest.assessment_table(rows)
    params = corpus_parameters(args)
    return emit_rows(table, ingest.ASSESSMENT_COLUMNS, args, "rk", params)


def parse_x_list(text: str) -> list[float]:
    try:
        xs = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise DataError(f"bad percentile list {text!r}") from exc
    if not xs:
        raise DataError("empty percentile list")
    return xs


def cmd_ptop(args) -> int:
    xs = parse_x_list(args.x)
    if args.input and args.config:
        raise DataError("give either --config or --input, not both")
    if args.input:
        return ptop_corpus(args, xs)
    if args.config:
        return ptop_synthetic(args, xs)
    raise DataError("ptop needs --config (synthetic) or --input (corpus)")


def ptop_corpus(args, xs) -> int:
    # real data carries no distribution parameters: empirical counting only
    records = load_corpus_or_fail(args)
    if not args.country or not args.split:
        raise DataError("corpus ptop needs --country and --split")
    split = ingest.split_country(records, args.country)
    ids = set(split.domestic if args.split == ingest.DOMESTIC else split.collaborative)
    by_id = {r.id: r for r in records}
    rank_of = ingest.corpus_world_ranks(records, tie_policy=args.tie_policy)
    ranks = sorted(rank_of[i] for i in ids)
    row = {
        "label": f"{args.country}:{args.split}",
        "p": len(ids),
        "p0": sum(1 for i in ids if by_id[i].citations == 0),
    }
    for x in xs:
        cutoff = indicators.percentile_cutoff(x, len(records))
        row[f"ptop_{x:g}"] = sum(1 for r in ranks if r <= cutoff)
    row["rk"] = (
        indicators.rk_from_rank1s(ranks[: args.k], offset=args.offset, scale=args.scale)
        if len(ranks) >= args.k
        else ""
    )
    columns = ["label", "p", "p0"] + [f"ptop_{x:g}" for x in xs] + ["rk"]
    params = corpus_parameters(args, x=xs)
    return emit_rows([row], columns, args, "ptop", params)


def ptop_synthetic(args, xs) -> int:
    config = load_run_config(args)
    ensemble = synthdist.generate_ensemble(config, jobs=args.jobs)
    world = rankcore.build_world(list(ensemble.series), tie_policy=args.tie_policy)
    if args.labels:
        labels = args.labels.split(",")
    else:
        labels = experiments.select_99(ensemble)
    rows = []
    for label in labels:
        spec = ensemble.spec_by_label.get(label)
        if spec is None:
            raise DataError(f"unknown series label {label!r}")
        row = {"label": label, "mu": spec.mu, "n": spec.n}
        for x in xs:
            result = indicators.analytic_ptop(spec, world, x)
            row[f"ptop_{x:g}"] = result.value
        ranks = experiments.top_rank1s(world, label, args.k)
        row["rk"] = indicators.rk_from_rank1s(ranks, offset=args.offset, scale=args.scale)
        rows.append(row)
    columns = ["label", "mu", "n"] + [f"ptop_{x:g}" for x in xs] + ["rk"]
    params = {"config": config.to_dict(), "tie_policy": args.tie_policy, "x": xs,
              "labels": args.labels, "k": args.k, "offset": args.offset, "scale": args.scale}
    return emit_rows(rows, columns, args, "ptop", params)


def make_experiment_handler(name: str):
    def handler(args) -> int:
        if name == "fig4":
            if args.config:
                config = load_run_config(args)
            else:
                if args.seed is None:
                    raise DataError("fig4 needs --seed when using the built-in grid")
                config = experiments.extended_grid(args.seed)
            report = experiments.run_fig4(
                config, k=args.k, offset=args.offset, scale=args.scale,
                tie_policy=args.tie_policy, jobs=args.jobs,
            )
        else:
            config = load_run_config(args)
            ensemble = synthdist.generate_ensemble(config, jobs=args.jobs)
            if name == "tables1":
                report = experiments.run_table_s1(
                    ensemble, sample_size=args.sample_size, k=args.k,
                    tie_policy=args.tie_policy,
                )
            elif name == "fig1":
                report = experiments.run_fig1(
                    ensemble, k=args.k, offset=args.offset, scale=args.scale,
                    tie_policy=args.tie_policy,
                )
            elif name == "fig2":
                report = experiments.run_fig2(
                    ensemble, k=args.k, offset=args.offset, scale=args.scale,
                    tie_policy=args.tie_policy,
                )
            else:
                report = experiments.run_fig3(
                    ensemble, k=args.k, offset=args.offset, scale=args.scale,
                    tie_policy=args.tie_policy,
                )
        if not args.out:
            raise DataError(f"{name} requires --out")
        for path in experiments.write_report(report, args.out, fmt=args.format):
            print(path)
        return 0

    return handler


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def corpus_parameters(args, **extra) -> dict:
    params = {
        "input": os.path.basename(args.input),
        "input_sha256": file_sha256(args.input),
        "tie_policy": args.tie_policy,
        "k": getattr(args, "k", indicators.DEFAULT_K),
        "offset": getattr(args, "offset", indicators.DEFAULT_OFFSET),
        "scale": getattr(args, "scale", indicators.DEFAULT_SCALE),
    }
    if getattr(args, "country", None):
        params["country"] = args.country
    if getattr(args, "split", None):
        params["split"] = args.split
    params.update(extra)
    return params


def cmd_assess(args) -> int:
    records = load_corpus_or_fail(args)
    if args.countries:
        countries = [c.strip() for c in args.countries.split(",") if c.strip()]
    elif args.countries_file:
        countries = [
            line.strip() for line in open(args.countries_file, encoding="utf-8")
            if line.strip() and not line.startswith("#")
        ]
    else:
        raise DataError("assess needs --countries or --countries-file")
    try:
        rows = ingest.assess(
            records, countries, k=args.k, offset=args.offset,
            scale=args.scale, tie_policy=args.tie_policy,
        )
    except ingest.UnknownCountryError as exc:
        raise DataError(f"country {exc} does not appear in the corpus") from exc
    table = ingest.assessment_table(rows)
    params = corpus_parameters(args, countries=countries)
    return emit_rows(table, ingest.ASSESSMENT_COLUMNS, args, "assess", params)


if __name__ == "__main__":
    sys.exit(main())
