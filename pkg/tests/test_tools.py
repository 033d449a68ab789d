"""Tests for MCP tools."""

import pytest
from mcp.server import FastMCP

import delineate.config
from delineate.pipeline import execute, load_config, state_dir
from delineate.services.manifest import close_manifest, init_manifest
from delineate.tools.corpus import register_corpus_tools
from delineate.tools.retrieval import register_retrieval_tools


def _tools(register) -> dict:
    mcp = FastMCP("test")
    register(mcp)
    return mcp._tool_manager._tools


@pytest.fixture
def served_dir(tmp_path):
    """Point the server config at tmp_path/out and restore it afterwards."""
    original = delineate.config.config.OUTPUT_DIR
    delineate.config.config.OUTPUT_DIR = str(tmp_path / "out")
    yield tmp_path / "out"
    delineate.config.config.OUTPUT_DIR = original


class TestCorpusTools:
    """Tests for corpus tools."""

    @pytest.fixture(autouse=True)
    async def setup(self, pipeline_config, served_dir):
        """Run the pipeline and open its manifest."""
        cfg = load_config(pipeline_config)
        await execute(cfg)
        await init_manifest(state_dir(cfg) / delineate.config.config.MANIFEST_NAME)
        yield
        await close_manifest()

    async def test_corpus_summary(self):
        """Test the summary reports segment sizes."""
        result = await _tools(register_corpus_tools)["get_corpus_summary"].fn()

        assert result["core_n"] == 40
        assert result["notcore_n"] == 10

    async def test_composition_table(self):
        """Test the composition table has one row per segment."""
        result = await _tools(register_corpus_tools)["get_composition_table"].fn()

        assert [row["segment"] for row in result["rows"]] == ["Core", "NotCore", "Total"]
        assert result["rows"][0]["articles"] == 40

    async def test_keyword_frequencies(self):
        """Test NotCore frequencies include the sex group."""
        result = await _tools(register_corpus_tools)["get_keyword_frequencies"].fn(segment="NotCore")

        groups = {row["group"]: row for row in result["groups"]}
        assert groups["sex"]["doc_count"] == 10

    async def test_unknown_segment(self):
        """Test unknown segments return an error."""
        result = await _tools(register_corpus_tools)["get_keyword_frequencies"].fn(segment="Elsewhere")

        assert "error" in result

    async def test_keyword_series(self):
        """Test a series covers the years of the planted records."""
        result = await _tools(register_corpus_tools)["get_keyword_series"].fn(group="sex", segment="NotCore")

        years = {point["year"] for point in result["points"]}
        assert 2005 in years

    async def test_stage_status(self):
        """Test every completed stage is listed."""
        result = await _tools(register_corpus_tools)["get_stage_status"].fn()

        assert len(result["stages"]) == 7


class TestRetrievalTools:
    """Tests for retrieval tools."""

    async def test_match_title(self, served_dir):
        """Test a title is matched against the shipped list when no tree is served."""
        result = await _tools(register_retrieval_tools)["match_title"].fn(title="Sex and gender differences in pain")

        assert {"sex", "gender"} <= set(result["matched_groups"])

    async def test_no_match(self, served_dir):
        """Test unrelated titles match nothing."""
        result = await _tools(register_retrieval_tools)["match_title"].fn(title="Photosynthesis in maize")

        assert result["matched_groups"] == []

    async def test_bad_policy(self, served_dir):
        """Test an unknown policy returns an error."""
        result = await _tools(register_retrieval_tools)["match_title"].fn(title="Gender", policy="loose")

        assert "error" in result

    async def test_missing_report(self, served_dir):
        """Test the compile report is an error before the pipeline runs."""
        result = await _tools(register_retrieval_tools)["get_compile_report"].fn()

        assert "error" in result
