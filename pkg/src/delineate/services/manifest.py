"""SQLite-backed stage manifest for an output tree."""

import time
from pathlib import Path
from typing import Optional

import aiosqlite

from delineate.models.pipeline import StageEntry

_db: Optional[aiosqlite.Connection] = None


async def init_manifest(path: Path) -> None:
    """Open (and create if needed) the manifest database."""
    global _db
    if _db:
        await close_manifest()
    path.parent.mkdir(parents=True, exist_ok=True)
    _db = await aiosqlite.connect(path)
    await _db.execute("""
        CREATE TABLE IF NOT EXISTS stages (
            name TEXT PRIMARY KEY,
            input_digest TEXT NOT NULL,
            param_digest TEXT NOT NULL,
            output_path TEXT NOT NULL,
            completed_at REAL NOT NULL
        )
    """)
    await _db.commit()


async def close_manifest() -> None:
    """Close the manifest database."""
    global _db
    if _db:
        await _db.close()
        _db = None


async def get_entry(name: str) -> Optional[StageEntry]:
    """Manifest row of a completed stage, if any."""
    if not _db:
        return None

    async with _db.execute(
        "SELECT name, input_digest, param_digest, output_path, completed_at FROM stages WHERE name = ?",
        (name,)
    ) as cursor:
        row = await cursor.fetchone()

    if not row:
        return None
    return StageEntry(
        name=row[0], input_digest=row[1], param_digest=row[2], output_path=row[3], completed_at=row[4]
    )


async def record_entry(name: str, input_digest: str, param_digest: str, output_path: str) -> StageEntry:
    """Insert or replace the row of a stage that just completed."""
    entry = StageEntry(
        name=name,
        input_digest=input_digest,
        param_digest=param_digest,
        output_path=output_path,
        completed_at=time.time(),
    )
    if not _db:
        return entry

    await _db.execute(
        """
        INSERT OR REPLACE INTO stages (name, input_digest, param_digest, output_path, completed_at)
        VALUES (?, ?, ?, ?, ?)
        """,
        (entry.name, entry.input_digest, entry.param_digest, entry.output_path, entry.completed_at)
    )
    await _db.commit()
    return entry


async def delete_entry(name: str) -> None:
    """Forget a stage, e.g. after its output was removed."""
    if not _db:
        return

    await _db.execute("DELETE FROM stages WHERE name = ?", (name,))
    await _db.commit()


async def list_entries() -> list[StageEntry]:
    if not _db:
        return []

    async with _db.execute(
        "SELECT name, input_digest, param_digest, output_path, completed_at FROM stages ORDER BY completed_at"
    ) as cursor:
        rows = await cursor.fetchall()
    return [
        StageEntry(name=r[0], input_digest=r[1], param_digest=r[2], output_path=r[3], completed_at=r[4])
        for r in rows
    ]
