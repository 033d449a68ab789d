"""Corpus tools: summary counts, composition table and keyword statistics."""

from pathlib import Path
from typing import Any

import pandas as pd
from mcp.server import FastMCP

from delineate.config import config
from delineate.errors import DelineateError
from delineate.models.corpus import Segment
from delineate.services import manifest
from delineate.utils.io import read_json


def _output_dir() -> Path:
    return Path(config.OUTPUT_DIR)


def _table(name: str) -> pd.DataFrame:
    path = _output_dir() / "analyze" / f"{name}.csv"
    if not path.exists():
        raise FileNotFoundError(f"{path} not found; run the analyze stage first")
    return pd.read_csv(path)


def _records(frame: pd.DataFrame) -> list[dict[str, Any]]:
    return frame.astype(object).where(frame.notna(), None).to_dict("records")


def register_corpus_tools(mcp: FastMCP) -> None:
    """Register corpus tools with the MCP server."""

    @mcp.tool()
    async def get_corpus_summary() -> dict[str, Any]:
        """Get the Core / NotCore / overlap counts of the delineated corpus.

        Returns:
            core_n, notcore_n, overlap_n and total_n.
        """
        try:
            return read_json(_output_dir() / "segment" / "corpus.summary.json")
        except (OSError, DelineateError) as e:
            return {"error": str(e)}

    @mcp.tool()
    async def get_composition_table() -> dict[str, Any]:
        """Get the dataset composition table.

        Returns articles, journals, articles per journal, average citations and
        article/journal shares for Core, NotCore and Total.
        """
        try:
            return {"rows": _records(_table("table2"))}
        except (OSError, DelineateError) as e:
            return {"error": str(e)}

    @mcp.tool()
    async def get_keyword_frequencies(segment: str = "Core", limit: int = 20) -> dict[str, Any]:
        """Get the most frequent keyword groups in a segment.

        Args:
            segment: 'Core', 'NotCore' or 'Total'
            limit: Maximum number of groups returned

        Returns:
            Groups with document counts and relative frequencies, most frequent first.
        """
        try:
            Segment(segment)
            frame = _table("fig4a_keywords")
            frame = frame[frame["segment"] == segment].head(limit)
            return {"segment": segment, "groups": _records(frame.drop(columns="segment"))}
        except ValueError:
            return {"error": f"unknown segment {segment!r}"}
        except (OSError, DelineateError) as e:
            return {"error": str(e)}

    @mcp.tool()
    async def get_keyword_series(group: str, segment: str = "Core") -> dict[str, Any]:
        """Get the yearly relative frequency of one keyword group.

        Args:
            group: Grouping term (e.g. 'gender', 'queer')
            segment: 'Core' or 'NotCore'

        Returns:
            One point per year; relative_frequency is null for years without documents.
        """
        try:
            frame = pd.concat([_table("fig4b_series"), _table("fig5a_sexgender")]).drop_duplicates()
            frame = frame[(frame["group"] == group) & (frame["segment"] == segment)]
            if frame.empty:
                return {"error": f"no series for group {group!r} in {segment}"}
            points = frame[["year", "count", "denominator", "relative_frequency"]].sort_values("year")
            return {"group": group, "segment": segment, "points": _records(points)}
        except (OSError, DelineateError) as e:
            return {"error": str(e)}

    @mcp.tool()
    async def get_stage_status() -> dict[str, Any]:
        """Get the completed pipeline stages of the served output tree.

        Returns:
            Stage names with their completion time and digests.
        """
        entries = await manifest.list_entries()
        return {"stages": [e.model_dump() for e in entries]}
