import os
from dotenv import load_dotenv

load_dotenv()


class Config:
    # Logging
    LOG_LEVEL: str = os.getenv("DELINEATE_LOG_LEVEL", "INFO").upper()

    # Output tree served by the MCP server
    OUTPUT_DIR: str = os.getenv("DELINEATE_OUTPUT_DIR", "delineate-out")

    # Manifest database and lock file live here, relative to an output tree
    STATE_DIR: str = os.getenv("DELINEATE_STATE_DIR", ".delineate")
    MANIFEST_NAME: str = "manifest.db"
    LOCK_NAME: str = "lock"

    # Parallelism
    SHARDS: int = int(os.getenv("DELINEATE_SHARDS", "1"))
    INGEST_WORKERS: int = int(os.getenv("DELINEATE_INGEST_WORKERS", "4"))

    # Benchmark
    BENCH_REPETITIONS: int = int(os.getenv("DELINEATE_BENCH_REPETITIONS", "3"))
    BENCH_MIN_STORE: int = 10_000
    BENCH_MIN_PATTERNS: int = 250

    # Ingest abort threshold (share of unparseable lines)
    MAX_FAILURE_RATIO: float = 0.5


config = Config()
