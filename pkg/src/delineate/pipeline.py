"""Stage graph, stage manifest and output-tree locking."""

import asyncio
import json
import logging
import os
from collections.abc import AsyncIterator, Callable
from contextlib import asynccontextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from delineate.config import config
from delineate.errors import ConfigSchemaError, DelineateError, DependencyError, LockError
from delineate.models.journals import UNKNOWN_JOURNAL
from delineate.models.keywords import KeywordSpec, TermTrace
from delineate.models.pipeline import PipelineConfig
from delineate.models.records import Rejection
from delineate.services import manifest
from delineate.services.analytics import emit_all
from delineate.services.core_selector import (
    load_policy,
    load_seed_terms,
    profile_journals,
    read_core_ids,
    select_core,
    write_selection,
)
from delineate.services.ingest import RecordStore, ingest_files
from delineate.services.keyword_compiler import (
    apply_curation,
    compile_keywords,
    curation_audit,
    load_curation,
    load_keyword_file,
    load_surface_table,
    merge_specs,
    propose_candidates,
    read_candidates,
    write_candidates,
    write_keyword_file,
)
from delineate.services.retriever import read_matches, scan, write_matches
from delineate.services.segmenter import export, import_corpus, segment
from delineate.services.topic_miner import mine_topics, write_topics
from delineate.utils.io import atomic_directory, read_json, sha256_params, sha256_paths, write_json, write_ndjson
from delineate.utils.text import load_stopwords

logger = logging.getLogger(__name__)

RECORDS = "records.jsonl"
CORPUS = "corpus.jsonl"
KEYWORDS = "keywords.csv"


def load_config(path: Path) -> PipelineConfig:
    """Load and validate the pipeline config; relative paths resolve against its folder.

    Raises:
        ConfigSchemaError: Invalid JSON or schema violations, with offending keys
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigSchemaError(["<document>"], [str(e)]) from e
    if not isinstance(raw, dict):
        raise ConfigSchemaError(["<document>"], ["config must be a JSON object"])
    try:
        return PipelineConfig.model_validate(raw, context={"base_dir": path.parent.resolve()})
    except ValidationError as e:
        errors = e.errors()
        keys = sorted({".".join(str(part) for part in err["loc"]) or "<document>" for err in errors})
        details = [f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in errors]
        raise ConfigSchemaError(keys, details) from e


@dataclass(frozen=True)
class RunOptions:
    """Command-line overrides that do not belong in the config document."""

    force: bool = False
    shards: int | None = None
    keywords: Path | None = None


@dataclass(frozen=True)
class StageResult:
    name: str
    skipped: bool
    output: Path


# ---- stage bodies: (config, options, output root, temp dir) ----

def _load_store(out: Path) -> RecordStore:
    return RecordStore.load(out / "ingest" / RECORDS)


def _run_ingest(cfg: PipelineConfig, opts: RunOptions, out: Path, tmp: Path) -> None:
    rejections: list[Rejection] = []
    store, report = ingest_files(cfg.inputs, rejections=rejections)
    store.dump(tmp / RECORDS)
    write_json(tmp / "ingest_report.json", report.model_dump())
    write_ndjson(tmp / "rejections.jsonl", (r.model_dump() for r in rejections))
    logger.info("Ingest: %d of %d records admitted", report.admitted, report.read)


def _run_select_core(cfg: PipelineConfig, opts: RunOptions, out: Path, tmp: Path) -> None:
    store = _load_store(out)
    policy_cfg = cfg.core_policy
    policy = load_policy(
        policy_cfg.include,
        policy_cfg.exclude,
        excluded_divisions=frozenset(policy_cfg.excluded_divisions),
        exclusivity_threshold=policy_cfg.exclusivity_threshold,
        review_ratio=policy_cfg.review_ratio,
    )
    profiles = profile_journals(store, policy_cfg.group_code)
    selection = select_core(profiles, load_seed_terms(cfg.seed_terms), policy)
    write_selection(selection, tmp)
    write_json(tmp / "core_summary.json", {
        "selected_count": selection.selected_count,
        "populated_count": selection.populated_count,
        "unknown_policy_ids": list(selection.unknown_policy_ids),
    })


def _run_mine_topics(cfg: PipelineConfig, opts: RunOptions, out: Path, tmp: Path) -> None:
    store = _load_store(out)
    core_ids = read_core_ids(out / "select-core")
    core = [r for r in store if (r.journal_id or UNKNOWN_JOURNAL) in core_ids]
    model = mine_topics(core, load_stopwords(cfg.stopwords_dir), cfg.topics)
    write_topics(model.summaries, tmp / "topics.csv")
    write_candidates(propose_candidates(model.summaries, cfg.topics.top_n), tmp / "candidates.csv")
    write_ndjson(
        tmp / "assignments.jsonl",
        ({"doi": doi, "topic_id": topic} for doi, topic in sorted(model.assignments.items())),
    )
    write_json(tmp / "topics_summary.json", {
        "documents": len(model.docs),
        "k": model.k,
        "topics": len(model.summaries),
        "outliers": model.outliers,
    })


def _run_compile_keywords(cfg: PipelineConfig, opts: RunOptions, out: Path, tmp: Path) -> None:
    candidates = read_candidates(out / "mine-topics" / "candidates.csv")
    decisions = load_curation(cfg.curation_file)
    warnings: list[str] = []
    trace: list[TermTrace] = []
    specs: list[KeywordSpec] = apply_curation(
        candidates, decisions, load_seed_terms(cfg.seed_terms), load_surface_table(cfg.surface_table), warnings, trace
    )
    audit = curation_audit(specs, decisions, trace)
    version, declared = None, {}
    if cfg.keyword_file is not None:
        pinned = load_keyword_file(cfg.keyword_file)
        merged = merge_specs(pinned.specs, specs)
        version = pinned.version
        declared = pinned.declared if len(merged) == len(pinned.specs) else {}
        specs = merged
    _, report = compile_keywords(specs, warnings, version, declared)
    write_keyword_file(specs, tmp / KEYWORDS, version)
    write_json(tmp / "compile_report.json", report.model_dump())
    write_json(tmp / "curation_audit.json", audit.model_dump(mode="json"))


def _keyword_path(out: Path, opts: RunOptions) -> Path:
    return opts.keywords or out / "compile-keywords" / KEYWORDS


def _run_retrieve(cfg: PipelineConfig, opts: RunOptions, out: Path, tmp: Path) -> None:
    store = _load_store(out)
    keyword_file = load_keyword_file(_keyword_path(out, opts))
    matcher, _ = compile_keywords(keyword_file.specs)
    results, report = scan(store, matcher, cfg.language_policy, opts.shards or cfg.shards)
    write_matches(results, tmp / "matches.jsonl")
    write_json(tmp / "scan_report.json", report.to_json_dict(include_timing=False))


def _run_segment(cfg: PipelineConfig, opts: RunOptions, out: Path, tmp: Path) -> None:
    corpus = segment(
        _load_store(out),
        read_core_ids(out / "select-core"),
        read_matches(out / "retrieve" / "matches.jsonl"),
    )
    export(corpus, tmp / CORPUS)


def _run_analyze(cfg: PipelineConfig, opts: RunOptions, out: Path, tmp: Path) -> None:
    groups = read_json(out / "compile-keywords" / "compile_report.json")["groups"]
    corpus = import_corpus(out / "segment" / CORPUS)
    emit_all(corpus, _load_store(out), tmp, cfg.analytics, cfg.years, set(groups))


@dataclass(frozen=True)
class Stage:
    name: str
    upstream: tuple[str, ...]
    inputs: Callable[[PipelineConfig, RunOptions], list[Path | None]]
    params: Callable[[PipelineConfig, RunOptions], Any]
    run: Callable[[PipelineConfig, RunOptions, Path, Path], None]


def _stage_list() -> tuple[Stage, ...]:
    return (
        Stage("ingest", (), lambda c, o: list(c.inputs), lambda c, o: {}, _run_ingest),
        Stage(
            "select-core", ("ingest",),
            lambda c, o: [c.seed_terms, c.core_policy.include, c.core_policy.exclude],
            lambda c, o: c.core_policy.model_dump(mode="json", exclude={"include", "exclude"}),
            _run_select_core,
        ),
        Stage(
            "mine-topics", ("ingest", "select-core"),
            lambda c, o: [c.stopwords_dir],
            lambda c, o: c.topics.model_dump(mode="json"),
            _run_mine_topics,
        ),
        Stage(
            "compile-keywords", ("mine-topics",),
            lambda c, o: [c.curation_file, c.keyword_file, c.seed_terms, c.surface_table],
            lambda c, o: {},
            _run_compile_keywords,
        ),
        Stage(
            "retrieve", ("ingest", "compile-keywords"),
            lambda c, o: [o.keywords],
            lambda c, o: {"language_policy": c.language_policy.value},
            _run_retrieve,
        ),
        Stage("segment", ("ingest", "select-core", "retrieve"), lambda c, o: [], lambda c, o: {}, _run_segment),
        Stage(
            "analyze", ("ingest", "compile-keywords", "segment"),
            lambda c, o: [],
            lambda c, o: {"analytics": c.analytics.model_dump(mode="json"), "years": c.years.model_dump(mode="json")},
            _run_analyze,
        ),
    )


STAGES: dict[str, Stage] = {stage.name: stage for stage in _stage_list()}
STAGE_ORDER: tuple[str, ...] = tuple(STAGES)


def state_dir(cfg: PipelineConfig) -> Path:
    return cfg.output_dir / config.STATE_DIR


def _holder_alive(lock: Path) -> bool:
    """Whether the pid written in the lock names a live process; unreadable locks count as held."""
    try:
        pid = int(lock.read_text(encoding="utf-8").strip())
    except (OSError, ValueError):
        return True
    try:
        os.kill(pid, 0)
    except (ProcessLookupError, OverflowError):
        return False
    except PermissionError:
        pass
    return True


def _acquire_lock(lock: Path, output_dir: Path) -> None:
    for attempt in range(2):
        try:
            fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError as e:
            if attempt or _holder_alive(lock):
                raise LockError(f"{output_dir} is locked by another run ({lock})") from e
            logger.warning("Removing stale lock %s left by a process that is no longer running", lock)
            lock.unlink(missing_ok=True)
            continue
        with os.fdopen(fd, "w") as f:
            f.write(str(os.getpid()))
        return


@asynccontextmanager
async def pipeline_session(cfg: PipelineConfig) -> AsyncIterator[None]:
    """Hold the output-tree lock and the open manifest for the duration of a run.

    Raises:
        LockError: A running pipeline instance holds the lock; a lock left by a dead
            process is removed
    """
    state = state_dir(cfg)
    state.mkdir(parents=True, exist_ok=True)
    lock = state / config.LOCK_NAME
    _acquire_lock(lock, cfg.output_dir)
    try:
        await manifest.init_manifest(state / config.MANIFEST_NAME)
        try:
            yield
        finally:
            await manifest.close_manifest()
    finally:
        lock.unlink(missing_ok=True)


async def run_stage(name: str, cfg: PipelineConfig, opts: RunOptions | None = None) -> StageResult:
    """Run one stage inside an open pipeline session.

    The stage is skipped when its input and parameter digests match the
    manifest and its output exists, unless opts.force is set.

    Raises:
        DependencyError: An upstream stage has not completed
    """
    opts = opts or RunOptions()
    stage = STAGES[name]
    out = cfg.output_dir
    for upstream in stage.upstream:
        entry = await manifest.get_entry(upstream)
        if not (out / upstream).is_dir() or (entry is None and not opts.force):
            raise DependencyError(name, upstream)

    inputs = [p for p in stage.inputs(cfg, opts) if p is not None]
    inputs.extend(out / upstream for upstream in stage.upstream)
    input_digest = sha256_paths(inputs)
    param_digest = sha256_params(stage.params(cfg, opts))
    target = out / name

    entry = await manifest.get_entry(name)
    if (
        not opts.force
        and entry is not None
        and entry.input_digest == input_digest
        and entry.param_digest == param_digest
        and target.is_dir()
    ):
        logger.warning("Stage %s is up to date; skipped", name)
        return StageResult(name=name, skipped=True, output=target)

    logger.info("Stage %s started", name)
    with atomic_directory(target) as tmp:
        await asyncio.to_thread(stage.run, cfg, opts, out, tmp)
    await manifest.record_entry(name, input_digest, param_digest, name)
    logger.info("Stage %s finished", name)
    return StageResult(name=name, skipped=False, output=target)


async def run_all(cfg: PipelineConfig, opts: RunOptions | None = None) -> list[StageResult]:
    """Run every stage in dependency order; the first failure aborts the run."""
    results = []
    for name in STAGE_ORDER:
        try:
            results.append(await run_stage(name, cfg, opts))
        except DelineateError as e:
            logger.error("Stage %s failed: %s", name, e)
            e.add_note(f"stage: {name}")
            raise
    return results


async def execute(cfg: PipelineConfig, stages: list[str] | None = None, opts: RunOptions | None = None) -> list[StageResult]:
    """Open a session and run the named stages (all stages when None)."""
    async with pipeline_session(cfg):
        if stages is None:
            return await run_all(cfg, opts)
        return [await run_stage(name, cfg, opts) for name in stages]
