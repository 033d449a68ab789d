"""The `delineate` command line."""

import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path

from delineate import __version__
from delineate.config import config
from delineate.errors import ConfigSchemaError, DelineateError, DependencyError, LockError
from delineate.models.corpus import LanguagePolicy
from delineate.pipeline import STAGE_ORDER, RunOptions, execute, load_config
from delineate.services.analytics import (
    in_discipline,
    precision_sample,
    score_precision_sheet,
    write_precision_sheet,
)
from delineate.services.ingest import RecordStore
from delineate.services.keyword_compiler import compile_keywords, load_keyword_file
from delineate.services.retriever import padding_specs, synthetic_bench, throughput_bench

logger = logging.getLogger("delineate")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
USAGE_ERRORS = (ConfigSchemaError, DependencyError, LockError)


def _version() -> str:
    try:
        keywords = load_keyword_file().version or "unversioned"
    except (OSError, DelineateError):
        keywords = "unavailable"
    return f"delineate {__version__} (keywords {keywords})"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delineate",
        description="Delineate a research field from bibliographic records: core journals, "
                    "mined keywords, title retrieval and descriptive analytics.",
    )
    parser.add_argument("--version", action="version", version=_version())
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path, help="pipeline config (JSON)")
    common.add_argument("--force", action="store_true", help="re-run even if up to date")
    common.add_argument("--shards", type=int, default=None, help="scan worker processes")
    common.add_argument(
        "--language-policy",
        choices=[p.value for p in LanguagePolicy],
        default=None,
        help="override the config's language gating",
    )
    common.add_argument("--keywords", type=Path, default=None, help="keyword file used by retrieve")

    sub = parser.add_subparsers(dest="command", required=True)
    for name in STAGE_ORDER:
        sub.add_parser(name, parents=[common], help=f"run the {name} stage")
    sub.add_parser("run", parents=[common], help="run every stage in order")

    bench = sub.add_parser("bench", parents=[common], help="measure title scan throughput")
    bench.add_argument("--repetitions", type=int, default=config.BENCH_REPETITIONS)
    bench.add_argument(
        "--synthetic", type=int, default=None, metavar="N",
        help=f"scan N generated titles against at least {config.BENCH_MIN_PATTERNS} patterns instead of the ingested store",
    )

    sample = sub.add_parser("sample", parents=[common], help="draw or score a precision audit sheet")
    sample.add_argument("--n", type=int, default=100, help="sample size")
    sample.add_argument("--seed", type=int, default=None, help="defaults to the config's sample_seed")
    sample.add_argument("--discipline", default=None, help="discipline or group code filter")
    sample.add_argument("--output", type=Path, default=None, help="sheet path")
    sample.add_argument("--score", type=Path, default=None, help="annotated sheet to score instead")

    serve = sub.add_parser("serve", help="serve a finished output tree over MCP")
    serve.add_argument("--output-dir", type=Path, default=None)
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else config.LOG_LEVEL
    logging.basicConfig(level=level, format=LOG_FORMAT)


def _bench(args: argparse.Namespace) -> None:
    cfg = load_config(args.config)
    policy = LanguagePolicy(args.language_policy or cfg.language_policy)
    compiled = cfg.output_dir / "compile-keywords" / "keywords.csv"
    if args.synthetic is not None:
        specs = load_keyword_file(args.keywords or (compiled if compiled.exists() else None)).specs
        matcher, report = compile_keywords([*specs, *padding_specs(specs, config.BENCH_MIN_PATTERNS)])
        result = synthetic_bench(matcher, args.synthetic, args.repetitions, policy)
    else:
        store = RecordStore.load(cfg.output_dir / "ingest" / "records.jsonl")
        matcher, report = compile_keywords(load_keyword_file(args.keywords or compiled).specs)
        result = throughput_bench(store, matcher, args.repetitions, policy)
    print(json.dumps({"patterns": report.pattern_count, **result.to_json_dict()}, indent=2, sort_keys=True))


def _sample(args: argparse.Namespace) -> None:
    if args.score is not None:
        annotated, relevant, precision = score_precision_sheet(args.score)
        print(json.dumps({"annotated": annotated, "relevant": relevant, "precision": precision}, indent=2))
        return
    cfg = load_config(args.config)
    store = RecordStore.load(cfg.output_dir / "ingest" / "records.jsonl")
    code = args.discipline or cfg.core_policy.group_code
    seed = cfg.sample_seed if args.seed is None else args.seed
    records = precision_sample(store, args.n, seed, in_discipline(code) if code else None)
    output = args.output or cfg.output_dir / "precision-sample.csv"
    write_precision_sheet(records, output)
    logger.info("Wrote %d sampled records to %s", len(records), output)


def _pipeline(args: argparse.Namespace) -> None:
    cfg = load_config(args.config)
    if args.language_policy:
        cfg = cfg.model_copy(update={"language_policy": LanguagePolicy(args.language_policy)})
    opts = RunOptions(force=args.force, shards=args.shards, keywords=args.keywords)
    stages = None if args.command == "run" else [args.command]
    results = asyncio.run(execute(cfg, stages, opts))
    for result in results:
        print(f"{result.name}: {'up-to-date' if result.skipped else 'done'}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        if args.command == "serve":
            from delineate.server import main as serve_main
            serve_main(args.output_dir)
        elif args.command == "bench":
            _bench(args)
        elif args.command == "sample":
            _sample(args)
        else:
            _pipeline(args)
    except USAGE_ERRORS as e:
        logger.error("%s", e)
        return 2
    except DelineateError as e:
        logger.error("%s", e)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
