"""Schema-tolerant, strictly read-only SQLite table dumps.

Databases are opened with mode=ro and immutable=1 so no journal recovery
or WAL checkpoint can ever touch the evidence; if a hot journal or WAL
sibling exists the main file is read as-is and a warning records the fact.
Missing tables and columns degrade to flags and gap lists instead of
errors: app schema drift must never abort an extraction.
"""

from __future__ import annotations

import sqlite3
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import DbMalformed

SQLITE_MAGIC = b"SQLite format 3\x00"


@dataclass
class TableRows:
    table: str
    source: str
    columns: list[str] = field(default_factory=list)
    rows: list[tuple] = field(default_factory=list)
    missing: bool = False
    column_gaps: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def dicts(self):
        for row in self.rows:
            yield dict(zip(self.columns, row))


def _quote_ident(name: str) -> str:
    return '"' + name.replace('"', '""') + '"'


def _open_readonly(db: Path) -> sqlite3.Connection:
    uri = f"file:{db.as_posix()}?mode=ro&immutable=1"
    return sqlite3.connect(uri, uri=True)


def _journal_warnings(db: Path) -> list[str]:
    warnings = []
    for suffix in ("-journal", "-wal"):
        sibling = db.parent / (db.name + suffix)
        if sibling.exists() and sibling.stat().st_size > 0:
            warnings.append(
                f"{sibling.name} present; reading main file as-is without recovery")
    return warnings


def _check_magic(db: Path) -> None:
    if not db.is_file():
        raise DbMalformed(f"{db}: no such file")
    with open(db, "rb") as handle:
        magic = handle.read(len(SQLITE_MAGIC))
    if magic != SQLITE_MAGIC:
        raise DbMalformed(f"{db}: not a SQLite format 3 file")


def list_tables(db: str | Path) -> list[str]:
    db = Path(db)
    _check_magic(db)
    with _open_readonly(db) as conn:
        try:
            rows = conn.execute(
                "SELECT name FROM sqlite_master WHERE type='table' ORDER BY name"
            ).fetchall()
        except sqlite3.DatabaseError as exc:
            raise DbMalformed(f"{db}: {exc}") from None
    conn.close()
    return [r[0] for r in rows]


def read_sql_table(db: str | Path, table: str,
                   expected_columns: list[str] | None = None) -> TableRows:
    db = Path(db)
    _check_magic(db)
    result = TableRows(table=table, source=str(db))
    result.warnings.extend(_journal_warnings(db))

    conn = _open_readonly(db)
    try:
        try:
            present = conn.execute(
                "SELECT 1 FROM sqlite_master WHERE type='table' AND name=?",
                (table,)).fetchone()
        except sqlite3.DatabaseError as exc:
            raise DbMalformed(f"{db}: {exc}") from None
        if not present:
            result.missing = True
            result.warnings.append(f"table {table!r} not present")
            if expected_columns:
                result.column_gaps = list(expected_columns)
            return result

        info = conn.execute(f"PRAGMA table_info({_quote_ident(table)})").fetchall()
        result.columns = [row[1] for row in info]
        if expected_columns:
            result.column_gaps = [c for c in expected_columns if c not in result.columns]
            if result.column_gaps:
                result.warnings.append(
                    f"table {table!r} lacks expected columns: {', '.join(result.column_gaps)}")

        try:
            cursor = conn.execute(
                "SELECT {} FROM {}".format(
                    ", ".join(_quote_ident(c) for c in result.columns),
                    _quote_ident(table)))
            result.rows = [tuple(row) for row in cursor]
        except sqlite3.DatabaseError as exc:
            raise DbMalformed(f"{db}: {exc}") from None
    finally:
        conn.close()
    return result
