"""Readers for the three storage substrates found in the analyzed apps:
shared-preferences XML, SQLite-format databases, and levelDB stores.

All readers are pure functions over immutable evidence files and never
write anywhere.
"""

from .jsondoc import RawNumber, parse_json_document
from .leveldb import KvSnapshot, read_leveldb_snapshot
from .prefs import PrefsEntry, PrefsMap, read_prefs_xml
from .sqlite import TableRows, list_tables, read_sql_table

__all__ = [
    "KvSnapshot",
    "PrefsEntry",
    "PrefsMap",
    "RawNumber",
    "TableRows",
    "list_tables",
    "parse_json_document",
    "read_leveldb_snapshot",
    "read_prefs_xml",
    "read_sql_table",
]
