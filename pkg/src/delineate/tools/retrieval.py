"""Retrieval tools: match ad-hoc titles against the compiled keyword list."""

from pathlib import Path
from typing import Any

from mcp.server import FastMCP

from delineate.config import config
from delineate.errors import DelineateError
from delineate.models.corpus import LanguagePolicy
from delineate.services.keyword_compiler import compile_keywords, load_keyword_file
from delineate.services.matcher import CompiledMatcher
from delineate.utils.io import read_json

_matchers: dict[Path, CompiledMatcher] = {}


def get_matcher() -> CompiledMatcher:
    """Matcher for the served tree's keyword file, or the shipped list."""
    path = Path(config.OUTPUT_DIR) / "compile-keywords" / "keywords.csv"
    key = path if path.exists() else Path("<shipped>")
    if key not in _matchers:
        keyword_file = load_keyword_file(path if path.exists() else None)
        _matchers[key], _ = compile_keywords(keyword_file.specs)
    return _matchers[key]


def register_retrieval_tools(mcp: FastMCP) -> None:
    """Register retrieval tools with the MCP server."""

    @mcp.tool()
    async def match_title(title: str, language: str = "en", policy: str = "strict") -> dict[str, Any]:
        """Match one title against the keyword list.

        Args:
            title: Article title, any casing or accents
            language: Record language ('en', 'es', 'fr', 'pt')
            policy: 'strict' gates language-specific patterns, 'permissive' applies all

        Returns:
            Matched grouping terms and keyword ids (empty lists when nothing matches).
        """
        try:
            matcher = get_matcher()
            keyword_ids = matcher.match(title, language, LanguagePolicy(policy))
            return {
                "title": title,
                "matched_groups": sorted(matcher.groups(keyword_ids)),
                "matched_keyword_ids": sorted(keyword_ids),
            }
        except ValueError:
            return {"error": f"unknown language policy {policy!r}"}
        except (OSError, DelineateError) as e:
            return {"error": str(e)}

    @mcp.tool()
    async def get_compile_report() -> dict[str, Any]:
        """Get the keyword compile report of the served tree.

        Returns:
            Spec, pattern and group counts, per-language counts and expansion warnings.
        """
        try:
            return read_json(Path(config.OUTPUT_DIR) / "compile-keywords" / "compile_report.json")
        except OSError as e:
            return {"error": str(e)}
