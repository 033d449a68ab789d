# MCP Tools
from delineate.tools.corpus import register_corpus_tools
from delineate.tools.retrieval import register_retrieval_tools

__all__ = [
    "register_corpus_tools",
    "register_retrieval_tools",
]
