# Services layer
from delineate.services.core_selector import load_seed_terms, profile_journals, select_core
from delineate.services.ingest import RecordStore, ingest, ingest_file, ingest_files
from delineate.services.keyword_compiler import (
    apply_curation,
    compile_keywords,
    expand_languages,
    load_keyword_file,
    propose_candidates,
)
from delineate.services.matcher import CompiledMatcher
from delineate.services.retriever import scan, throughput_bench
from delineate.services.segmenter import export, import_corpus, segment
from delineate.services.topic_miner import class_term_scores, cluster, mine_topics, tokenize, vectorize

__all__ = [
    "CompiledMatcher",
    "RecordStore",
    "apply_curation",
    "class_term_scores",
    "cluster",
    "compile_keywords",
    "expand_languages",
    "export",
    "import_corpus",
    "ingest",
    "ingest_file",
    "ingest_files",
    "load_keyword_file",
    "load_seed_terms",
    "mine_topics",
    "profile_journals",
    "propose_candidates",
    "scan",
    "segment",
    "select_core",
    "throughput_bench",
    "tokenize",
    "vectorize",
]
