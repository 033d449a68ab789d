"""Multi-pattern title matcher.

Each keyword regex contributes the literal text every one of its matches must
start with. An Aho-Corasick automaton finds all literals in one pass over a
title and only the regexes whose literal occurred are run. Patterns without a
usable literal are run on every title.
"""

import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import ahocorasick

from delineate.models.corpus import LanguagePolicy
from delineate.models.keywords import KeywordSpec
from delineate.utils.text import normalize_text

# Word start: not preceded by a letter or digit.
WORD_START = r"(?<![^\W_])"

_META = set(".^$*+?{}[]()|\\")
_OPTIONAL = set("?*{")
_ESCAPE_CLASSES = set("abBdDsSwWAZzfnrtvx0123456789pPNuU")
MIN_LITERAL = 2


class LiteralIndex:
    """Aho-Corasick automaton reporting which literal ids occur in a text."""

    def __init__(self):
        self._automaton = ahocorasick.Automaton()
        self._ids: dict[str, list[int]] = {}

    @property
    def size(self) -> int:
        return sum(len(ids) for ids in self._ids.values())

    def add(self, literal: str, literal_id: int) -> None:
        ids = self._ids.setdefault(literal, [])
        ids.append(literal_id)
        self._automaton.add_word(literal, tuple(ids))

    def build(self) -> None:
        if self._automaton.kind == ahocorasick.TRIE:
            self._automaton.make_automaton()

    def search(self, text: str) -> set[int]:
        found: set[int] = set()
        self.build()
        if self._automaton.kind == ahocorasick.EMPTY:
            return found
        for _, ids in self._automaton.iter(text):
            found.update(ids)
        return found


def _top_level_alternation(pattern: str) -> bool:
    depth = 0
    in_class = False
    i = 0
    while i < len(pattern):
        char = pattern[i]
        if char == "\\":
            i += 2
            continue
        if in_class:
            if char == "]":
                in_class = False
        elif char == "[":
            in_class = True
        elif char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        elif char == "|" and depth == 0:
            return True
        i += 1
    return False


def literal_prefix(pattern: str) -> str:
    """Literal text every match of the pattern starts with ("" when none).

    Leading zero-width anchors (\\b, ^) are skipped; extraction stops at the
    first metacharacter, and a character followed by ?, * or {m,n} is dropped.
    """
    if _top_level_alternation(pattern):
        return ""
    i = 0
    while pattern.startswith(("\\b", "^"), i):
        i += 2 if pattern[i] == "\\" else 1

    chars: list[str] = []
    while i < len(pattern):
        char = pattern[i]
        if char == "\\":
            if i + 1 >= len(pattern) or pattern[i + 1] in _ESCAPE_CLASSES:
                break
            literal, step = pattern[i + 1], 2
        elif char in _META:
            break
        else:
            literal, step = char, 1
        following = pattern[i + step] if i + step < len(pattern) else ""
        if following in _OPTIONAL:
            break
        chars.append(literal)
        if following == "+":
            break
        i += step
    return "".join(chars)


def anchor(pattern: str) -> str:
    """Prepend the word-start guard unless the pattern is already anchored."""
    if pattern.startswith(("\\b", "^")):
        return pattern
    return WORD_START + pattern


@dataclass(frozen=True)
class CompiledPattern:
    keyword_id: str
    group: str
    language: str
    pattern: str
    regex: re.Pattern
    literal: str


class CompiledMatcher:
    """Immutable matcher over a validated keyword list.

    match() and match_naive() return the same keyword ids for any title.
    """

    def __init__(self, specs: Sequence[KeywordSpec]):
        self.patterns = tuple(
            CompiledPattern(
                keyword_id=spec.keyword_id,
                group=spec.group,
                language=spec.language,
                pattern=spec.pattern,
                regex=re.compile(anchor(spec.pattern)),
                literal=literal_prefix(spec.pattern),
            )
            for spec in specs
        )
        self.specs = tuple(specs)
        self._automaton = LiteralIndex()
        residual = []
        for i, compiled in enumerate(self.patterns):
            if len(compiled.literal) >= MIN_LITERAL:
                self._automaton.add(compiled.literal, i)
            else:
                residual.append(i)
        self._automaton.build()
        self._residual = tuple(residual)
        self._groups = {p.keyword_id: p.group for p in self.patterns}

    @property
    def literal_count(self) -> int:
        return self._automaton.size

    @property
    def residual_count(self) -> int:
        return len(self._residual)

    def _admits(self, index: int, language: str | None, policy: LanguagePolicy) -> bool:
        if policy is LanguagePolicy.PERMISSIVE:
            return True
        pattern_language = self.patterns[index].language
        return pattern_language == "any" or pattern_language == language

    def _hits(self, candidates: Iterable[int], text: str, language: str | None, policy: LanguagePolicy) -> frozenset[str]:
        return frozenset(
            self.patterns[i].keyword_id
            for i in candidates
            if self._admits(i, language, policy) and self.patterns[i].regex.search(text)
        )

    def match(
        self,
        title: str,
        language: str | None = None,
        policy: LanguagePolicy = LanguagePolicy.STRICT,
    ) -> frozenset[str]:
        """Keyword ids matching the normalized title."""
        text = normalize_text(title)
        if not text:
            return frozenset()
        candidates = self._automaton.search(text)
        candidates.update(self._residual)
        return self._hits(sorted(candidates), text, language, policy)

    def match_naive(
        self,
        title: str,
        language: str | None = None,
        policy: LanguagePolicy = LanguagePolicy.STRICT,
    ) -> frozenset[str]:
        """Reference path: every admitted regex on the normalized title."""
        text = normalize_text(title)
        if not text:
            return frozenset()
        return self._hits(range(len(self.patterns)), text, language, policy)

    def groups(self, keyword_ids: Iterable[str]) -> frozenset[str]:
        return frozenset(self._groups[k] for k in keyword_ids)
