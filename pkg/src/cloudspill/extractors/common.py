"""Shared machinery for the per-app extractors.

Each documented table maps to a TableMap describing how its rows become
records.  The same builders run inside the extractors (on rows read from
evidence) and inside the fixture generator (on rows it authored), so the
manifest oracle and the extraction path agree on record shape by
construction; the store readers in between are what the round trip tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from ..accounts import AccountsDump
from ..records import ArtifactRecord, ExtractResult, Normalized, Provenance, Timestamp
from ..reporting import FMT_EPOCH_S, normalize_timestamp
from ..schemas import TableSchema
from ..stores.sqlite import read_sql_table


@dataclass
class ExtractorContext:
    tz_offset_min: int = 0
    output_dir: Path | None = None
    accounts_dump: AccountsDump | None = None
    upm_candidates: list[str] | None = None
    upm_iterations: int = 20
    upm_magic_check: bool = True

    def write_output(self, relative: str, data: bytes) -> str | None:
        """Write decrypted material under the operator output directory.

        Returns the output-relative path, or None when no directory was
        configured (library use); never writes near the evidence tree.
        """
        if self.output_dir is None:
            return None
        target = self.output_dir / relative
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(data)
        return relative


@dataclass(frozen=True)
class TableMap:
    schema: TableSchema
    kind: str | Callable[[dict], str]
    name_col: str | None = None
    path_col: str | None = None
    size_col: str | None = None
    hash_cols: tuple[tuple[str, str], ...] = ()   # (column, algo)
    skip_zero_ts: frozenset = frozenset()         # columns where 0 means "never"
    derive: Callable[[dict, list], dict] | None = None


def row_provenance(rel_path: str, tmap: TableMap, row: dict, index: int) -> Provenance:
    if tmap.schema.id_column and row.get(tmap.schema.id_column) is not None:
        item = str(row[tmap.schema.id_column])
    else:
        item = f"row{index}"
    return Provenance(path=rel_path, locator=tmap.schema.name, item=item)


def build_table_record(app: str, user_scope: str, tmap: TableMap, row: dict,
                       prov: Provenance, tz_offset_min: int,
                       warnings: list[str] | None = None) -> ArtifactRecord:
    """Turn one table row into a record per its TableMap."""
    if warnings is None:
        warnings = []
    attributes = {col.name: row.get(col.name) for col in tmap.schema.columns}
    if tmap.derive is not None:
        attributes.update(tmap.derive(row, warnings))

    normalized = Normalized()
    if tmap.name_col:
        value = row.get(tmap.name_col)
        normalized.name = None if value is None else str(value)
    if tmap.path_col:
        value = row.get(tmap.path_col)
        normalized.path = None if value is None else str(value)
    if tmap.size_col:
        value = row.get(tmap.size_col)
        if isinstance(value, int):
            normalized.size_bytes = value

    for col in tmap.schema.timestamp_columns():
        raw = row.get(col.name)
        if raw is None or raw == "":
            continue
        if col.name in tmap.skip_zero_ts and raw == 0:
            continue
        utc_ms, warning = normalize_timestamp(raw, col.ts_format, tz_offset_min)
        if warning:
            warnings.append(f"{prov.path}:{tmap.schema.name}:{prov.item}: {warning}")
        normalized.timestamps.append(Timestamp(
            label=col.name, utc_ms=utc_ms, original=str(raw), clock=col.clock,
            resolution="s" if col.ts_format == FMT_EPOCH_S else "ms"))

    for col_name, algo in tmap.hash_cols:
        value = row.get(col_name)
        if value:
            normalized.hashes.append((algo, str(value).lower()))

    kind = tmap.kind(row) if callable(tmap.kind) else tmap.kind
    return ArtifactRecord(app=app, user_scope=user_scope, kind=kind,
                          attributes=attributes, normalized=normalized,
                          provenance=prov)


def extract_table(result: ExtractResult, tree, db_path: Path, tmap: TableMap,
                  tz_offset_min: int) -> list[dict]:
    """Read one table and append its records; returns row dicts for joins."""
    rel = tree.relative(db_path)
    try:
        table = read_sql_table(db_path, tmap.schema.name, tmap.schema.column_names())
    except Exception as exc:
        result.warnings.append(f"{rel}: {exc}")
        return []
    result.warnings.extend(f"{rel}: {w}" for w in table.warnings)
    if table.missing:
        return []
    rows = []
    for index, row in enumerate(table.dicts()):
        prov = row_provenance(rel, tmap, row, index)
        result.records.append(build_table_record(
            result.app, result.user_scope, tmap, row, prov, tz_offset_min,
            result.warnings))
        rows.append(row)
    return rows


def walk_files(directory: Path) -> list[Path]:
    """All regular files under a directory, sorted; symlinks skipped."""
    from ..evidence import safe_files
    return safe_files(directory)
