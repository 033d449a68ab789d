"""Curated keyword list: candidates, curation, language expansion and compilation."""

import io
import json
import logging
import re
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import pandas as pd
from pydantic import ValidationError

from delineate.errors import CurationFileError, DuplicatePatternError, PatternError
from delineate.models.journals import MatchMode, SeedTerm, SeedTermSet
from delineate.models.keywords import (
    REQUIRED_LANGUAGES,
    Action,
    Candidate,
    CompileReport,
    CurationAudit,
    CurationDecision,
    KeywordSpec,
    KeywordTemplate,
    Origin,
    TermTrace,
)
from delineate.models.topics import TopicSummary
from delineate.services.core_selector import load_seed_terms
from delineate.services.matcher import CompiledMatcher, anchor
from delineate.utils.text import normalize_text

logger = logging.getLogger(__name__)

KEYWORD_COLUMNS = ["keyword_id", "group", "language", "pattern", "origin"]
CURATION_COLUMNS = ["candidate", "action", "replacements", "note"]

_ESCAPE = re.compile(r"\\.")
_SLUG = re.compile(r"[^a-z0-9]+")


def propose_candidates(topics: Sequence[TopicSummary], top_n: int) -> list[Candidate]:
    """Union of each topic's top_n terms, highest score first.

    Args:
        topics: Mined topic summaries
        top_n: Terms taken per topic (0 gives an empty list)

    Returns:
        One Candidate per term with (topic id, score) provenance
    """
    if top_n <= 0:
        return []
    provenance: dict[str, list[tuple[int, float]]] = {}
    for topic in topics:
        for term, score in topic.top_terms[:top_n]:
            provenance.setdefault(term, []).append((topic.topic_id, score))
    candidates = [Candidate(term=term, provenance=tuple(sorted(entries))) for term, entries in provenance.items()]
    candidates.sort(key=lambda c: (-c.max_score, c.term))
    return candidates


def write_candidates(candidates: Iterable[Candidate], path: Path) -> None:
    """Candidate sheet (term, max_score, topics) used to start a curation file."""
    frame = pd.DataFrame(
        [
            {"term": c.term, "max_score": c.max_score, "topics": "|".join(str(t) for t in c.topic_ids)}
            for c in candidates
        ],
        columns=["term", "max_score", "topics"],
    )
    frame.to_csv(path, index=False, lineterminator="\n")


def read_candidates(path: Path) -> list[Candidate]:
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    candidates = []
    for row in frame.to_dict("records"):
        topic_ids = [int(t) for t in row["topics"].split("|") if t]
        score = float(row["max_score"])
        candidates.append(Candidate(term=row["term"], provenance=tuple((t, score) for t in topic_ids)))
    return candidates


def load_curation(path: Path) -> list[CurationDecision]:
    """Read a curation file (candidate, action, replacements, note).

    Replacements are separated by "|". Terms are normalized on load.

    Raises:
        CurationFileError: Missing columns, unknown action or invalid row
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, comment=None)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise CurationFileError(f"{path}: {e}") from e
    missing = {"candidate", "action"} - set(frame.columns)
    if missing:
        raise CurationFileError(f"{path}: missing columns {sorted(missing)}")

    decisions = []
    for row_no, row in enumerate(frame.to_dict("records"), start=2):
        action = row["action"].strip()
        try:
            decision = CurationDecision(
                candidate=normalize_text(row["candidate"]),
                action=Action(action),
                replacements=tuple(
                    normalize_text(p) for p in row.get("replacements", "").split("|") if p.strip()
                ),
                note=row.get("note", ""),
            )
        except ValueError as e:
            # ValidationError is a ValueError
            raise CurationFileError(f"{path}:{row_no}: {e}") from e
        decisions.append(decision)
    return decisions


def load_surface_table(path: Path | None = None) -> dict[str, SeedTerm]:
    """Surface table keyed by normalized term; same schema as the seed term file."""
    if path is None:
        text = resources.files("delineate.data").joinpath("surfaces.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    table = {}
    for term, entry in json.loads(text).items():
        table[normalize_text(term)] = SeedTerm(
            term_id=normalize_text(term),
            mode=MatchMode(entry.get("mode", MatchMode.STEM)),
            group=entry.get("group", ""),
            surfaces={lang: tuple(normalize_text(s) for s in forms) for lang, forms in entry["surfaces"].items()},
        )
    return table


def surface_pattern(form: str, whole_word: bool = False) -> str:
    """Regex for one surface form; whole-word forms allow a plural "s"."""
    body = re.escape(normalize_text(form))
    return rf"{body}s?\b" if whole_word else body


def slug(term: str) -> str:
    return _SLUG.sub("-", normalize_text(term)).strip("-")


def expand_languages(
    template: KeywordTemplate,
    surface_table: Mapping[str, SeedTerm],
    warnings: list[str] | None = None,
) -> list[KeywordSpec]:
    """One spec per supplied language surface, all in the template's group.

    Surfaces come from the template itself or from the surface table entry for
    its term. A term with no entry is matched in every language. Missing
    required languages are reported through warnings and are not fatal.
    """
    entry = surface_table.get(template.term)
    surfaces = template.surfaces or (entry.surfaces if entry else {})
    whole_word = template.whole_word or (entry is not None and entry.mode is MatchMode.WHOLE_WORD)
    if not surfaces:
        surfaces = {"any": (template.term,)}
        if warnings is not None:
            warnings.append(f"{template.term}: no surface entry, matched in every language")
    elif "any" not in surfaces:
        missing = [lang for lang in REQUIRED_LANGUAGES if not surfaces.get(lang)]
        if missing and warnings is not None:
            warnings.append(f"{template.term}: no surface for {', '.join(missing)}")

    specs = []
    for language in sorted(surfaces):
        for i, form in enumerate(surfaces[language]):
            if not form:
                continue
            specs.append(KeywordSpec(
                keyword_id=f"{slug(template.term)}.{language}.{i}",
                group=template.group,
                language=language,
                pattern=surface_pattern(form, whole_word),
                origin=template.origin,
            ))
    return specs


def merge_specs(base: Sequence[KeywordSpec], extra: Iterable[KeywordSpec]) -> list[KeywordSpec]:
    """Append extra specs, dropping exact (pattern, language, group) repeats."""
    seen = {(s.pattern, s.language, s.group) for s in base}
    merged = list(base)
    for spec in extra:
        key = (spec.pattern, spec.language, spec.group)
        if key not in seen:
            seen.add(key)
            merged.append(spec)
    return merged


def _template(term: str, origin: Origin, table: Mapping[str, SeedTerm]) -> KeywordTemplate:
    entry = table.get(term)
    group = entry.group_name if entry else term
    return KeywordTemplate(term=term, group=group, origin=origin)


def seed_templates(seeds: SeedTermSet) -> list[KeywordTemplate]:
    return [
        KeywordTemplate(
            term=seed.term_id,
            group=seed.group_name,
            origin=Origin.SEED,
            whole_word=seed.mode is MatchMode.WHOLE_WORD,
            surfaces=seed.surfaces,
        )
        for seed in seeds.terms
    ]


def _curated(
    term: str,
    origin: Origin,
    table: Mapping[str, SeedTerm],
    seeds_by_term: Mapping[str, KeywordTemplate],
) -> KeywordTemplate:
    """Template for a curated term; a term that is also a seed keeps the seed's surfaces and mode."""
    seed = seeds_by_term.get(term)
    if seed is not None:
        return seed.model_copy(update={"origin": origin})
    return _template(term, origin, table)


def apply_curation(
    candidates: Sequence[Candidate],
    decisions: Sequence[CurationDecision],
    seeds: SeedTermSet,
    surface_table: Mapping[str, SeedTerm] | None = None,
    warnings: list[str] | None = None,
    trace: list[TermTrace] | None = None,
) -> list[KeywordSpec]:
    """Build the keyword list from seeds plus curated candidates.

    Accepted candidates, reconfigured phrases (one group per phrase) and manual
    additions are expanded across languages after the seeds. Rejected terms
    are left out. A (pattern, language, group) already present is not
    repeated; the term's TermTrace names the spec that carries it. Keyword
    ids stay unique: a clashing id gets the origin appended.

    Args:
        trace: Receives one TermTrace per seed and curated term, in list order

    Raises:
        CurationFileError: A decision other than "add" names an unknown candidate
    """
    table = load_surface_table() if surface_table is None else surface_table
    known = {c.term for c in candidates}
    templates = seed_templates(seeds)
    seeds_by_term = {t.term: t for t in templates}
    rejected = 0
    for decision in decisions:
        term = decision.candidate
        if decision.action is not Action.ADD and term not in known:
            raise CurationFileError(f"Decision {decision.action.value!r} references unknown candidate {term!r}")
        if decision.action is Action.ACCEPT:
            templates.append(_curated(term, Origin.TOPIC_MINED, table, seeds_by_term))
        elif decision.action is Action.RECONFIGURE:
            templates.extend(
                _curated(phrase, Origin.RECONFIGURED, table, seeds_by_term) for phrase in decision.replacements
            )
        elif decision.action is Action.ADD:
            templates.append(_curated(term, Origin.MANUAL_ADDED, table, seeds_by_term))
        else:
            rejected += 1

    undecided = known - {d.candidate for d in decisions}
    if undecided:
        logger.info("%d candidates have no curation decision and are left out", len(undecided))

    specs: list[KeywordSpec] = []
    owners: dict[tuple[str, str, str], str] = {}
    ids: set[str] = set()
    for template in templates:
        expanded = expand_languages(template, table, warnings)
        duplicates = []
        kept = 0
        for spec in expanded:
            key = (spec.pattern, spec.language, spec.group)
            if key in owners:
                duplicates.append(owners[key])
                continue
            if spec.keyword_id in ids:
                spec = spec.model_copy(update={"keyword_id": f"{spec.keyword_id}.{spec.origin.value}"})
            owners[key] = spec.keyword_id
            ids.add(spec.keyword_id)
            specs.append(spec)
            kept += 1
        if duplicates and not kept and template.origin is not Origin.SEED:
            message = f"{template.term}: every pattern already carried by {', '.join(duplicates)}"
            logger.info("%s", message)
            if warnings is not None:
                warnings.append(message)
        if trace is not None:
            trace.append(TermTrace(
                term=template.term,
                group=template.group,
                origin=template.origin,
                expanded=len(expanded),
                kept=kept,
                duplicates=tuple(duplicates),
            ))
    logger.info("Curation produced %d keyword specs (%d candidates rejected)", len(specs), rejected)
    return specs


def curation_audit(
    specs: Sequence[KeywordSpec],
    decisions: Iterable[CurationDecision],
    trace: Sequence[TermTrace],
) -> CurationAudit:
    """Per-origin term counts from the curation trace, checked against the spec list.

    Raises:
        CurationFileError: The trace does not account for every spec
    """
    kept = sum(t.kept for t in trace)
    if kept != len(specs):
        raise CurationFileError(f"Curation trace accounts for {kept} specs but the list has {len(specs)}")
    terms = Counter(t.origin for t in trace)
    return CurationAudit(
        accepted=terms[Origin.TOPIC_MINED],
        reconfigured=terms[Origin.RECONFIGURED],
        added=terms[Origin.MANUAL_ADDED],
        seeds=terms[Origin.SEED],
        rejected=sum(1 for d in decisions if d.action is Action.REJECT_GENERIC),
        specs=dict(sorted(Counter(s.origin.value for s in specs).items())),
        terms=list(trace),
    )


@dataclass
class KeywordFile:
    specs: list[KeywordSpec]
    version: str | None = None
    declared: dict[str, int] = field(default_factory=dict)


def load_keyword_file(path: Path | None = None) -> KeywordFile:
    """Read a keyword CSV with optional "# key: value" header lines.

    Integer headers (specs, groups, patterns) are the file's declared totals.

    Raises:
        PatternError: A row fails KeywordSpec validation
    """
    if path is None:
        text = resources.files("delineate.data").joinpath("keywords.csv").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    version = None
    declared: dict[str, int] = {}
    body_start = 0
    for body_start, line in enumerate(lines):
        if not line.startswith("#"):
            break
        key, _, value = line.lstrip("#").partition(":")
        key, value = key.strip(), value.strip()
        if key == "version":
            version = value
        elif value.isdigit():
            declared[key] = int(value)
    else:
        body_start = len(lines)

    frame = pd.read_csv(io.StringIO("\n".join(lines[body_start:])), dtype=str, keep_default_na=False)
    specs = []
    for row_no, row in enumerate(frame.to_dict("records"), start=body_start + 2):
        try:
            specs.append(KeywordSpec(**{column: row[column] for column in KEYWORD_COLUMNS}))
        except (ValidationError, KeyError) as e:
            raise PatternError(f"{path or 'keywords.csv'}:{row_no}: {e}") from e
    return KeywordFile(specs=specs, version=version, declared=declared)


def write_keyword_file(specs: Sequence[KeywordSpec], path: Path, version: str | None = None) -> None:
    header = []
    if version:
        header.append(f"# version: {version}")
    header.append(f"# specs: {len(specs)}")
    header.append(f"# groups: {len({s.group for s in specs})}")
    header.append(f"# patterns: {len({s.pattern for s in specs})}")
    frame = pd.DataFrame([s.model_dump(mode="json") for s in specs], columns=KEYWORD_COLUMNS)
    body = frame.to_csv(index=False, lineterminator="\n")
    path.write_text("\n".join(header) + "\n" + body, encoding="utf-8")


def _check_pattern(spec: KeywordSpec) -> None:
    letters = _ESCAPE.sub("", spec.pattern)
    bad = sorted({ch for ch in letters if ch.isalpha() and normalize_text(ch) != ch})
    if bad:
        raise PatternError(
            f"Pattern {spec.pattern!r} of {spec.keyword_id!r} has uppercase or accented characters: {''.join(bad)}"
        )
    try:
        re.compile(spec.pattern)
        re.compile(anchor(spec.pattern))
    except re.error as e:
        raise PatternError(f"Pattern {spec.pattern!r} of {spec.keyword_id!r} does not compile: {e}") from e


def compile_keywords(
    specs: Sequence[KeywordSpec],
    warnings: Sequence[str] = (),
    version: str | None = None,
    declared: Mapping[str, int] | None = None,
) -> tuple[CompiledMatcher, CompileReport]:
    """Validate the keyword list and build the matcher.

    Args:
        specs: Keyword specs in file order
        warnings: Expansion warnings to carry into the report
        version: Keyword file version
        declared: Totals declared by the keyword file header

    Returns:
        (matcher, report)

    Raises:
        PatternError: Invalid pattern or repeated keyword id
        DuplicatePatternError: Two specs share pattern and language
    """
    ids: set[str] = set()
    pairs: dict[tuple[str, str], str] = {}
    for spec in specs:
        _check_pattern(spec)
        if spec.keyword_id in ids:
            raise PatternError(f"Keyword id {spec.keyword_id!r} is used twice")
        ids.add(spec.keyword_id)
        key = (spec.pattern, spec.language)
        if key in pairs:
            raise DuplicatePatternError(pairs[key], spec.keyword_id, spec.pattern, spec.language)
        pairs[key] = spec.keyword_id

    matcher = CompiledMatcher(specs)
    groups = sorted({s.group for s in specs})
    report = CompileReport(
        spec_count=len(specs),
        pattern_count=len({s.pattern for s in specs}),
        group_count=len(groups),
        groups=groups,
        per_language=dict(sorted(Counter(s.language for s in specs).items())),
        literal_patterns=matcher.literal_count,
        residual_patterns=matcher.residual_count,
        warnings=list(warnings),
        version=version,
        declared=dict(declared or {}),
    )
    if report.declared and not report.matches_declared:
        logger.warning("Keyword file declares %s but contains %d specs, %d groups",
                       report.declared, report.spec_count, report.group_count)
    logger.info("Compiled %d keyword specs into %d patterns over %d groups",
                report.spec_count, report.pattern_count, report.group_count)
    return matcher, report
