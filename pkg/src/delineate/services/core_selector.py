"""Stage 1: select the core set of journals specialized in Gender Studies."""

import json
import logging
import re
from collections import defaultdict
from collections.abc import Iterable
from importlib import resources
from pathlib import Path

import pandas as pd

from delineate.models.journals import (
    UNKNOWN_JOURNAL,
    CorePolicy,
    CoreSelection,
    Decision,
    JournalDecision,
    JournalProfile,
    MatchMode,
    Reason,
    SeedTerm,
    SeedTermSet,
)
from delineate.services.ingest import RecordStore
from delineate.utils.text import normalize_text

logger = logging.getLogger(__name__)

# Word start: not preceded by a letter or digit.
WORD_START = r"(?<![^\W_])"
WORD_END = r"(?![^\W_])"

_DIVISION_CODE = re.compile(r"^\d+\s+")


def load_seed_terms(path: Path | None = None) -> SeedTermSet:
    """Load a seed term file: {term_id: {"mode": ..., "surfaces": {lang: [...]}}}."""
    if path is None:
        text = resources.files("delineate.data").joinpath("seed_terms.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    raw = json.loads(text)
    terms = tuple(
        SeedTerm(
            term_id=term_id,
            mode=MatchMode(entry["mode"]),
            group=entry.get("group", ""),
            surfaces={lang: tuple(normalize_text(s) for s in forms) for lang, forms in entry["surfaces"].items()},
        )
        for term_id, entry in sorted(raw.items())
    )
    return SeedTermSet(terms=terms)


def read_id_list(path: Path | None) -> dict[str, str]:
    """Read a journal id list: one id per line, `#` starts a comment.

    A comment after an id on the same line is kept as that id's provenance tag.

    Returns:
        Map journal id -> provenance tag ("" when absent)
    """
    if path is None:
        return {}
    entries: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        journal_id, _, comment = line.partition("#")
        journal_id = journal_id.strip()
        if journal_id:
            entries.setdefault(journal_id, comment.strip())
    return entries


def load_policy(
    include: Path | None = None,
    exclude: Path | None = None,
    **overrides,
) -> CorePolicy:
    included = read_id_list(include)
    excluded = read_id_list(exclude)
    return CorePolicy(
        include_list=frozenset(included),
        exclude_list=frozenset(excluded),
        include_sources={k: v for k, v in included.items() if v},
        **overrides,
    )


def division_name(code: str) -> str:
    """Discipline label without a leading numeric code ("11 Medical..." -> "Medical...")."""
    return _DIVISION_CODE.sub("", code).strip()


def _in_group(code: str, group_code: str) -> bool:
    return code == group_code or code.split(" ", 1)[0] == group_code


def profile_journals(store: RecordStore, group_code: str | None = "4405") -> list[JournalProfile]:
    """Aggregate the store per journal.

    Each record spreads one unit of weight evenly over its disciplines, so a
    journal's discipline shares sum to the fraction of its records that carry
    any discipline.

    Args:
        store: Ingested records
        group_code: Classification group whose share is reported as group_ratio
            (None disables the signal)

    Returns:
        One profile per journal id, sorted by journal id
    """
    counts: dict[str, int] = defaultdict(int)
    names: dict[str, str] = {}
    weights: dict[str, dict[str, float]] = defaultdict(lambda: defaultdict(float))
    in_group: dict[str, int] = defaultdict(int)

    for record in store:
        journal_id = record.journal_id or UNKNOWN_JOURNAL
        counts[journal_id] += 1
        if record.journal_name and journal_id not in names:
            names[journal_id] = record.journal_name
        if record.disciplines:
            unit = 1.0 / len(record.disciplines)
            for code in record.disciplines:
                weights[journal_id][code] += unit
        if group_code and any(_in_group(code, group_code) for code in record.disciplines):
            in_group[journal_id] += 1

    profiles = []
    for journal_id in sorted(counts):
        n = counts[journal_id]
        profiles.append(JournalProfile(
            journal_id=journal_id,
            name=names.get(journal_id, ""),
            article_count=n,
            discipline_shares={code: w / n for code, w in sorted(weights[journal_id].items())},
            group_ratio=in_group[journal_id] / n if group_code else None,
        ))
    return profiles


def compile_seed_patterns(seeds: SeedTermSet) -> list[tuple[str, re.Pattern]]:
    """One regex per seed term over all of its language surfaces."""
    compiled = []
    for term in seeds.terms:
        forms = sorted({s for forms in term.surfaces.values() for s in forms if s}, key=lambda s: (-len(s), s))
        if not forms:
            continue
        body = "|".join(re.escape(s) for s in forms)
        if term.mode is MatchMode.WHOLE_WORD:
            pattern = f"{WORD_START}(?:{body})s?{WORD_END}"
        else:
            pattern = f"{WORD_START}(?:{body})"
        compiled.append((term.term_id, re.compile(pattern)))
    return compiled


def _match(name: str, compiled: list[tuple[str, re.Pattern]]) -> set[str]:
    text = normalize_text(name)
    return {term_id for term_id, regex in compiled if regex.search(text)}


def match_journal_name(name: str, seeds: SeedTermSet) -> set[str]:
    """Seed term ids found in a journal name.

    Stem seeds match at word starts ("Sex" in "Journal of Sex Research" but not
    in "Essex"); whole-word seeds match full tokens with an optional plural "s".
    """
    return _match(name, compile_seed_patterns(seeds))


def _exclusive(profile: JournalProfile, policy: CorePolicy) -> bool:
    total = sum(profile.discipline_shares.values())
    if total <= 0:
        return False
    excluded = sum(
        share for code, share in profile.discipline_shares.items()
        if code in policy.excluded_divisions or division_name(code) in policy.excluded_divisions
    )
    return excluded / total >= policy.exclusivity_threshold - 1e-9


def select_core(
    profiles: Iterable[JournalProfile],
    seeds: SeedTermSet,
    policy: CorePolicy,
) -> CoreSelection:
    """Decide which journals form the core.

    Precedence per journal: exclude list, include list, then seed match or
    group-ratio screening, both subject to the exclusive-division filter.
    Group-ratio candidates are only flagged for review.

    Args:
        profiles: Journal profiles (any order)
        seeds: Seed terms matched against journal names
        policy: Curation overlays and discipline filter

    Returns:
        CoreSelection with the core ids and one decision per candidate journal
    """
    by_id = {p.journal_id: p for p in profiles}
    compiled = compile_seed_patterns(seeds)

    unknown = sorted((policy.include_list | policy.exclude_list) - by_id.keys())
    for journal_id in unknown:
        logger.warning("Core policy references journal %s, which has no records", journal_id)

    trace: list[JournalDecision] = []
    for journal_id in sorted(by_id.keys() | policy.include_list | policy.exclude_list):
        profile = by_id.get(journal_id)
        name = profile.name if profile else ""
        matched = tuple(sorted(_match(name, compiled))) if name else ()
        ratio = profile.group_ratio if profile else None
        common = dict(
            journal_id=journal_id,
            name=name,
            matched_terms=matched,
            group_ratio=ratio,
            source=policy.include_sources.get(journal_id, ""),
        )

        if journal_id in policy.exclude_list:
            decision, reason = Decision.EXCLUDE, Reason.EXCLUDE_LIST
        elif journal_id in policy.include_list:
            decision, reason = Decision.INCLUDE, Reason.INCLUDE_LIST
        elif matched or (ratio is not None and ratio >= policy.review_ratio):
            if _exclusive(profile, policy):
                decision, reason = Decision.EXCLUDE, Reason.EXCLUDED_DIVISION
            elif matched:
                decision, reason = Decision.INCLUDE, Reason.SEED_MATCH
            else:
                decision, reason = Decision.REVIEW, Reason.GROUP_RATIO
        else:
            continue
        logger.debug("Journal %s: %s (%s)", journal_id, decision, reason)
        trace.append(JournalDecision(decision=decision, reason=reason, **common))

    core_ids = frozenset(d.journal_id for d in trace if d.decision is Decision.INCLUDE)
    populated = sum(1 for journal_id in core_ids if journal_id in by_id)
    logger.info("Selected %d core journals (%d with records)", len(core_ids), populated)
    return CoreSelection(
        core_ids=core_ids,
        trace=tuple(trace),
        populated_count=populated,
        unknown_policy_ids=tuple(unknown),
    )


def write_selection(selection: CoreSelection, directory: Path) -> None:
    """Write core_journals.txt and the decision trace CSV."""
    (directory / "core_journals.txt").write_text(
        "".join(f"{journal_id}\n" for journal_id in sorted(selection.core_ids)), encoding="utf-8"
    )
    frame = pd.DataFrame(
        [
            {
                "journal_id": d.journal_id,
                "name": d.name,
                "decision": d.decision.value,
                "reason": d.reason.value,
                "matched_terms": "|".join(d.matched_terms),
                "group_ratio": d.group_ratio,
                "source": d.source,
            }
            for d in selection.trace
        ],
        columns=["journal_id", "name", "decision", "reason", "matched_terms", "group_ratio", "source"],
    )
    frame.to_csv(directory / "core_trace.csv", index=False, lineterminator="\n")


def read_core_ids(directory: Path) -> frozenset[str]:
    text = (directory / "core_journals.txt").read_text(encoding="utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())
