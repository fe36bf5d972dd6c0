"""Evernote artifact extraction.

Four preferences files identify the user and carry the encrypted auth
token; a timestamped app log records file and login events; notes live on
external storage both as ENML directories and as an unencrypted SQLite
database whose path the prefs record in LAST_DB_FILEPATH.  Share URLs are
rebuilt as [AcctInfoWebPrefixUrl]/sh/[note GUID]/[note share key], and
snippets are checked against the first 193 characters of the note text.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path

from ..records import (
    KIND_ACCOUNT,
    KIND_CONFIG,
    KIND_LOG_EVENT,
    KIND_NOTE,
    KIND_NOTEBOOK,
    KIND_RESOURCE,
    KIND_SEARCH,
    KIND_SHARE,
    KIND_THUMBNAIL,
    ArtifactRecord,
    ExtractResult,
    Normalized,
    Provenance,
    Timestamp,
)
from ..reporting import FMT_EPOCH_MS, FMT_HUMAN_OTHER, normalize_timestamp
from ..schemas import EVERNOTE_USER_DB
from ..stores.prefs import read_prefs_xml
from .common import TableMap, build_table_record, extract_table, row_provenance

SNIPPET_LENGTH = 193

USER_PREFS_DIRECTIVES = (
    "userid", "username", "encrypted_authtoken", "default_notebook",
    "AcctInfoWebPrefixUrl", "email", "LAST_USER_OBJECT_SYNC_TIME",
    "LAST_DB_FILEPATH", "Last_server_acc_info_timestamp", "AcctInfoNoteStoreUrl",
)
# object-count categories as spelled by the app, typo included
COUNT_KEYS = ("places", "notes", "sktiches", "tags", "notebooks", "snotes",
              "linked notebooks")
MAIN_PREFS_DIRECTIVES = ("PREF_USERID_LIST", "PREF_ACTIVE_USERID",
                         "last_viewed_notes")

TABLE_MAPS = {
    "guid_updates": TableMap(schema=EVERNOTE_USER_DB.table("guid_updates"),
                             kind=KIND_CONFIG),
    "note_tag": TableMap(schema=EVERNOTE_USER_DB.table("note_tag"),
                         kind=KIND_CONFIG),
    "notebooks": TableMap(schema=EVERNOTE_USER_DB.table("notebooks"),
                          kind=KIND_NOTEBOOK, name_col="name"),
    "notes": TableMap(schema=EVERNOTE_USER_DB.table("notes"),
                      kind=KIND_NOTE, name_col="title", size_col="content_length",
                      skip_zero_ts=frozenset({"deleted", "note_share_date",
                                              "task_date", "task_complete_date",
                                              "task_due_date"}),
                      derive=lambda row, w: {
                          "parsed_state": "active" if (row.get("deleted") == 0 and
                                                       row.get("is_active") == 1)
                          else "deleted"}),
    "resources": TableMap(schema=EVERNOTE_USER_DB.table("resources"),
                          kind=KIND_RESOURCE, name_col="filename",
                          size_col="length"),
    "search_history": TableMap(schema=EVERNOTE_USER_DB.table("search_history"),
                               kind=KIND_SEARCH, name_col="query"),
    "search_index_content": TableMap(
        schema=EVERNOTE_USER_DB.table("search_index_content"),
        kind=KIND_SEARCH),
    "snippets": TableMap(schema=EVERNOTE_USER_DB.table("snippets"),
                         kind=KIND_NOTE),
    "tags": TableMap(schema=EVERNOTE_USER_DB.table("tags"),
                     kind=KIND_CONFIG, name_col="name"),
}


def enml_text(enml: str) -> str:
    """Plain text content of an ENML document."""
    root = ET.fromstring(enml)
    return "".join(root.itertext())


def build_user_prefs_record(user_scope: str, directives: dict, prov: Provenance,
                            tz_offset_min: int, warnings: list) -> ArtifactRecord:
    normalized = Normalized(name=str(directives.get("username") or user_scope))
    for label in ("LAST_USER_OBJECT_SYNC_TIME", "Last_server_acc_info_timestamp"):
        raw = directives.get(label)
        if raw in (None, ""):
            continue
        utc_ms, warning = normalize_timestamp(raw, FMT_EPOCH_MS, tz_offset_min)
        if warning:
            warnings.append(f"{prov.path}: {warning}")
        normalized.timestamps.append(Timestamp(label=label, utc_ms=utc_ms,
                                               original=str(raw), clock="device"))
    return ArtifactRecord(app="evernote", user_scope=user_scope,
                          kind=KIND_ACCOUNT, attributes=directives,
                          normalized=normalized, provenance=prov)


def build_config_record(user_scope: str, name: str, directives: dict,
                        prov: Provenance) -> ArtifactRecord:
    return ArtifactRecord(app="evernote", user_scope=user_scope,
                          kind=KIND_CONFIG, attributes=directives,
                          normalized=Normalized(name=name), provenance=prov)


def build_log_event(user_scope: str, lineno: int, line: str, prov: Provenance,
                    tz_offset_min: int, warnings: list) -> ArtifactRecord:
    attributes: dict[str, object] = {"line": line}
    normalized = Normalized()
    parts = line.split(" ", 2)
    if len(parts) == 3 and parts[1].startswith("uid="):
        timestamp, uid_part, message = parts
        utc_ms, warning = normalize_timestamp(timestamp, FMT_HUMAN_OTHER,
                                              tz_offset_min)
        if warning:
            warnings.append(f"{prov.path}:{lineno}: {warning}")
        else:
            normalized.timestamps.append(Timestamp(
                label="logged", utc_ms=utc_ms, original=timestamp, clock="device"))
        attributes["uid"] = uid_part[len("uid="):]
        attributes["message"] = message
        normalized.name = message
    return ArtifactRecord(app="evernote", user_scope=user_scope,
                          kind=KIND_LOG_EVENT, attributes=attributes,
                          normalized=normalized, provenance=prov)


def build_share_record(user_scope: str, note_row: dict, web_prefix: str | None,
                       prov: Provenance, tz_offset_min: int,
                       warnings: list) -> ArtifactRecord:
    guid = str(note_row.get("guid"))
    share_key = str(note_row.get("note_share_key"))
    url = f"{web_prefix}/sh/{guid}/{share_key}" if web_prefix else None
    normalized = Normalized(name=url or share_key)
    raw_date = note_row.get("note_share_date")
    if raw_date:
        utc_ms, warning = normalize_timestamp(raw_date, FMT_EPOCH_MS, tz_offset_min)
        if warning:
            warnings.append(f"{prov.path}: {warning}")
        normalized.timestamps.append(Timestamp(label="note_share_date",
                                               utc_ms=utc_ms,
                                               original=str(raw_date)))
    return ArtifactRecord(
        app="evernote", user_scope=user_scope, kind=KIND_SHARE,
        attributes={"note_guid": guid, "note_share_key": share_key,
                    "parsed_share_url": url},
        normalized=normalized, provenance=prov)


def build_snippet_record(user_scope: str, row: dict, matches: bool | None,
                         prov: Provenance, tz_offset_min: int,
                         warnings: list) -> ArtifactRecord:
    record = build_table_record("evernote", user_scope, TABLE_MAPS["snippets"],
                                row, prov, tz_offset_min, warnings)
    if matches is not None:
        record.attributes["parsed_matches_content"] = matches
    return record


def build_resource_record(user_scope: str, row: dict, file_present: bool | None,
                          prov: Provenance, tz_offset_min: int,
                          warnings: list) -> ArtifactRecord:
    record = build_table_record("evernote", user_scope, TABLE_MAPS["resources"],
                                row, prov, tz_offset_min, warnings)
    blob = row.get("hash")
    if isinstance(blob, bytes):
        record.attributes["parsed_resource_filename"] = blob.hex() + ".dat"
    if file_present is not None:
        record.attributes["parsed_resource_file_present"] = file_present
    return record


def build_note_dir_record(user_scope: str, guid: str, files: list[str],
                          prov: Provenance) -> ArtifactRecord:
    return ArtifactRecord(
        app="evernote", user_scope=user_scope, kind=KIND_NOTE,
        attributes={"guid": guid, "files": ",".join(files)},
        normalized=Normalized(name=guid), provenance=prov)


def build_opaque_record(user_scope: str, name: str, size: int,
                        prov: Provenance) -> ArtifactRecord:
    return ArtifactRecord(
        app="evernote", user_scope=user_scope, kind=KIND_CONFIG,
        attributes={"format": "serialized", "size_bytes": size},
        normalized=Normalized(name=name, size_bytes=size), provenance=prov)


def build_thumbdb_record(user_scope: str, size: int, prov: Provenance) -> ArtifactRecord:
    return ArtifactRecord(
        app="evernote", user_scope=user_scope, kind=KIND_THUMBNAIL,
        attributes={"format": "thumbnail_cache", "size_bytes": size},
        normalized=Normalized(name="thumbnails_data_1.dat", size_bytes=size),
        provenance=prov)


def extract_evernote(tree, scope, ctx) -> ExtractResult:
    result = ExtractResult(app="evernote", user_scope=scope.user_id)
    private = scope.app.private_path
    uid = scope.user_id
    prefs_dir = private / "shared_prefs"

    web_prefix = None
    db_filepath = None
    user_prefs = prefs_dir / f"{uid}.pref.xml"
    if user_prefs.is_file():
        rel = tree.relative(user_prefs)
        try:
            prefs = read_prefs_xml(user_prefs)
            directives = {name: prefs.get(name) for name in USER_PREFS_DIRECTIVES
                          if name in prefs}
            web_prefix = directives.get("AcctInfoWebPrefixUrl")
            db_filepath = directives.get("LAST_DB_FILEPATH")
            result.records.append(build_user_prefs_record(
                uid, directives, Provenance(rel, "prefs", f"{uid}.pref"),
                ctx.tz_offset_min, result.warnings))
            if directives.get("encrypted_authtoken"):
                result.cred_inputs["encrypted_authtoken"] = directives["encrypted_authtoken"]
                result.cred_inputs.setdefault("sources", []).append(rel)
        except Exception as exc:
            result.warnings.append(f"{rel}: {exc}")

    for name, keys, label in (
            (f"{uid}_counts.pref.xml", COUNT_KEYS, "counts"),
            (f"{uid}_sync_state.pref.xml", ("SYNC_STATUS_MSG",), "sync_state"),
            ("com.evernote_preferences.xml", MAIN_PREFS_DIRECTIVES, "preferences")):
        path = prefs_dir / name
        if not path.is_file():
            continue
        rel = tree.relative(path)
        try:
            prefs = read_prefs_xml(path)
            directives = {key: prefs.get(key) for key in keys if key in prefs}
            result.records.append(build_config_record(
                uid, label, directives, Provenance(rel, "prefs", label)))
        except Exception as exc:
            result.warnings.append(f"{rel}: {exc}")

    log_path = private / "files" / ".logs" / "log_file.txt"
    if log_path.is_file():
        rel = tree.relative(log_path)
        for lineno, line in enumerate(
                log_path.read_text(encoding="utf-8", errors="replace").splitlines(),
                start=1):
            if not line.strip():
                continue
            result.records.append(build_log_event(
                uid, lineno, line, Provenance(rel, "log", str(lineno)),
                ctx.tz_offset_min, result.warnings))

    user_dat = private / "files" / ".usercache" / "user.dat"
    if user_dat.is_file():
        result.records.append(build_opaque_record(
            uid, "user.dat", user_dat.stat().st_size,
            Provenance(tree.relative(user_dat), "file", "user.dat")))

    external = scope.app.external_path
    note_texts: dict[str, str] = {}
    note_files: dict[str, list[str]] = {}
    if external is not None:
        note_texts, note_files = _extract_external_files(result, tree, external, uid)
        _extract_database(result, tree, scope, ctx, db_filepath, web_prefix,
                          note_texts, note_files)
    elif db_filepath:
        result.warnings.append(
            f"database missing from external storage (LAST_DB_FILEPATH={db_filepath})")
    return result.finish()


def _extract_external_files(result: ExtractResult, tree, external: Path, uid: str):
    thumbdb = external / "files" / f"user-{uid}" / "mapthumbdb" / "thumbnails_data_1.dat"
    if thumbdb.is_file():
        result.records.append(build_thumbdb_record(
            uid, thumbdb.stat().st_size,
            Provenance(tree.relative(thumbdb), "file", "thumbnails_data_1.dat")))

    note_texts: dict[str, str] = {}
    note_files: dict[str, list[str]] = {}
    notes_root = external / "files" / "notes"
    if notes_root.is_dir():
        for note_dir in sorted(notes_root.glob("*/*")):
            if not note_dir.is_dir():
                continue
            guid = note_dir.name
            files = sorted(p.name for p in note_dir.iterdir() if p.is_file())
            note_files[guid] = files
            rel = tree.relative(note_dir)
            result.records.append(build_note_dir_record(
                uid, guid, files, Provenance(rel, "note_dir", guid)))
            content = note_dir / "content.enml"
            if content.is_file():
                try:
                    note_texts[guid] = enml_text(
                        content.read_text(encoding="utf-8"))
                except ET.ParseError as exc:
                    result.warnings.append(f"{tree.relative(content)}: {exc}")
    return note_texts, note_files


def _extract_database(result: ExtractResult, tree, scope, ctx,
                      db_filepath: str | None, web_prefix: str | None,
                      note_texts: dict, note_files: dict) -> None:
    uid = scope.user_id
    db_path = None
    if db_filepath:
        try:
            candidate = tree.resolve(db_filepath)
            if candidate.is_file():
                db_path = candidate
        except ValueError:
            pass
    if db_path is None:
        user_dir = scope.app.external_path / "files" / f"user-{uid}"
        for candidate in sorted(user_dir.glob("*.db")) if user_dir.is_dir() else []:
            db_path = candidate
            break
    if db_path is None:
        result.warnings.append(
            f"database missing from external storage (LAST_DB_FILEPATH={db_filepath})")
        return

    rel = tree.relative(db_path)
    for table in ("guid_updates", "note_tag", "notebooks", "search_history",
                  "search_index_content", "tags"):
        extract_table(result, tree, db_path, TABLE_MAPS[table], ctx.tz_offset_min)

    note_rows = extract_table(result, tree, db_path, TABLE_MAPS["notes"],
                              ctx.tz_offset_min)
    for index, row in enumerate(note_rows):
        if row.get("note_share_key"):
            prov = Provenance(rel, "notes:share", str(row.get("guid")))
            result.records.append(build_share_record(
                uid, row, web_prefix, prov, ctx.tz_offset_min, result.warnings))

    # snippets and resources get custom builders for their cross-checks
    from ..stores.sqlite import read_sql_table
    for table, builder in (("snippets", _snippet_builder(note_texts)),
                           ("resources", _resource_builder(note_files))):
        tmap = TABLE_MAPS[table]
        try:
            data = read_sql_table(db_path, tmap.schema.name, tmap.schema.column_names())
        except Exception as exc:
            result.warnings.append(f"{rel}: {exc}")
            continue
        result.warnings.extend(f"{rel}: {w}" for w in data.warnings)
        if data.missing:
            continue
        for index, row in enumerate(data.dicts()):
            prov = row_provenance(rel, tmap, row, index)
            result.records.append(builder(uid, row, prov, ctx.tz_offset_min,
                                          result.warnings))


def _snippet_builder(note_texts: dict):
    def build(uid, row, prov, tz, warnings):
        matches = None
        text = note_texts.get(str(row.get("note_guid")))
        if text is not None and row.get("snippet") is not None:
            matches = str(row["snippet"]) == text[:SNIPPET_LENGTH]
        return build_snippet_record(uid, row, matches, prov, tz, warnings)
    return build


def _resource_builder(note_files: dict):
    def build(uid, row, prov, tz, warnings):
        present = None
        blob = row.get("hash")
        note_guid = str(row.get("note_guid"))
        if isinstance(blob, bytes) and note_guid in note_files:
            present = (blob.hex() + ".dat") in note_files[note_guid]
        return build_resource_record(uid, row, present, prov, tz, warnings)
    return build
