#!/usr/bin/env python3
"""Delineate MCP Server - read-only queries over a finished output tree."""

from contextlib import asynccontextmanager
from pathlib import Path

from mcp.server import FastMCP

from delineate.config import config
from delineate.services.manifest import close_manifest, init_manifest
from delineate.tools.corpus import register_corpus_tools
from delineate.tools.retrieval import register_retrieval_tools


@asynccontextmanager
async def lifespan(app):
    """Open the served tree's manifest for the server's lifetime."""
    manifest_path = Path(config.OUTPUT_DIR) / config.STATE_DIR / config.MANIFEST_NAME
    if manifest_path.exists():
        await init_manifest(manifest_path)
    yield
    await close_manifest()


mcp = FastMCP("delineate", lifespan=lifespan)


def register_all_tools():
    """Register all tool modules with the server."""
    register_corpus_tools(mcp)
    register_retrieval_tools(mcp)


register_all_tools()


def main(output_dir: Path | None = None):
    """Entry point for the MCP server."""
    if output_dir is not None:
        config.OUTPUT_DIR = str(output_dir)
    mcp.run()


if __name__ == "__main__":
    main()
