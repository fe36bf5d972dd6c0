"""OneNote artifact extraction.

Two .sdf databases (SQLite format 3 despite the extension) hold item and
notebook metadata with YYYYMMDD HH:MM:SS timestamps, where the value
"19000101 12:00:00" is a never-accessed sentinel.  Section content is
cached as [GUID].one files under the File Store.  The refresh token lives
encrypted in AccountManager: given a dump with _SEED/_PASSWORD and the
account password string, it decrypts to a usable OAuth 2.0 credential.
"""

from __future__ import annotations

import base64
import xml.etree.ElementTree as ET
from pathlib import Path

from ..crypto import OneNoteTokenBlob, onenote_decrypt_refresh_token
from ..errors import CryptoInputInvalid, DecryptFailed
from ..records import (
    KIND_ACCOUNT,
    KIND_CONFIG,
    KIND_FILE,
    KIND_FOLDER,
    KIND_NOTE,
    KIND_NOTEBOOK,
    KIND_SECTION,
    ArtifactRecord,
    ExtractResult,
    Normalized,
    Provenance,
)
from ..schemas import ONENOTE_HIERARCHY_DB, ONENOTE_SPSQL_DB
from ..stores.prefs import read_prefs_xml
from .common import TableMap, extract_table, walk_files

PACKAGE = "com.microsoft.office.onenote"
PREFS_FILE = "com.microsoft.office.onenote_preferences.xml"
REGISTRY_SQL_DB_PATH = "SQL DB Path"

TABLE_MAPS = {
    "SPMConfigData": TableMap(schema=ONENOTE_SPSQL_DB.table("SPMConfigData"),
                              kind=KIND_CONFIG, name_col="FieldName"),
    "SPMCIItems": TableMap(
        schema=ONENOTE_SPSQL_DB.table("SPMCIItems"),
        kind=lambda row: KIND_FOLDER if row.get("ContentType") == "Folder" else KIND_FILE,
        name_col="LinkFileName", size_col="FileSize", path_col="FileDirRef"),
    "SPMCOjects": TableMap(schema=ONENOTE_SPSQL_DB.table("SPMCOjects"),
                           kind=KIND_CONFIG, name_col="DisplayTitle"),
    "OnmConfigData": TableMap(schema=ONENOTE_HIERARCHY_DB.table("OnmConfigData"),
                              kind=KIND_CONFIG, name_col="FieldName"),
    "OnmNotebookContent": TableMap(
        schema=ONENOTE_HIERARCHY_DB.table("OnmNotebookContent"),
        kind=lambda row: (KIND_NOTEBOOK if row.get("ParentID") == row.get("ObjectID")
                          else KIND_SECTION),
        name_col="Name",
        derive=lambda row, w: {"is_notebook_root":
                               row.get("ParentID") == row.get("ObjectID")}),
    "OnmSectionContent": TableMap(
        schema=ONENOTE_HIERARCHY_DB.table("OnmSectionContent"),
        kind=KIND_NOTE, name_col="Name"),
}


def build_prefs_record(user_scope: str, directives: dict,
                       prov: Provenance) -> ArtifactRecord:
    return ArtifactRecord(
        app="onenote", user_scope=user_scope, kind=KIND_ACCOUNT,
        attributes=directives,
        normalized=Normalized(name=str(directives.get("DEFAULT_LIVE_ID"))),
        provenance=prov)


def build_registry_record(user_scope: str, entries: dict,
                          prov: Provenance) -> ArtifactRecord:
    return ArtifactRecord(
        app="onenote", user_scope=user_scope, kind=KIND_CONFIG,
        attributes=entries, normalized=Normalized(name="registry.xml"),
        provenance=prov)


def build_section_file_record(user_scope: str, guid: str, size: int,
                              prov: Provenance) -> ArtifactRecord:
    return ArtifactRecord(
        app="onenote", user_scope=user_scope, kind=KIND_SECTION,
        attributes={"section_guid": guid, "format": "one", "size_bytes": size},
        normalized=Normalized(name=f"{guid}.one", size_bytes=size),
        provenance=prov)


def parse_registry_xml(text: str) -> dict[str, str]:
    root = ET.fromstring(text)
    entries = {}
    for element in root.iter("key"):
        name = element.get("name")
        if name is not None:
            entries[name] = element.get("value", element.text or "")
    return entries


def extract_onenote(tree, scope, ctx) -> ExtractResult:
    result = ExtractResult(app="onenote", user_scope=scope.user_id)
    private = scope.app.private_path
    uid = scope.user_id

    prefs_path = private / "shared_prefs" / PREFS_FILE
    if prefs_path.is_file():
        rel = tree.relative(prefs_path)
        try:
            prefs = read_prefs_xml(prefs_path)
            directives = {name: prefs.get(name) for name in
                          ("KEY_RESUME_VIEW_ID", "DEFAULT_LIVE_ID") if name in prefs}
            result.records.append(build_prefs_record(
                uid, directives, Provenance(rel, "prefs", PREFS_FILE)))
        except Exception as exc:
            result.warnings.append(f"{rel}: {exc}")

    registry_path = private / "files" / "registry.xml"
    if registry_path.is_file():
        rel = tree.relative(registry_path)
        try:
            entries = parse_registry_xml(registry_path.read_text(encoding="utf-8"))
            result.records.append(build_registry_record(
                uid, entries, Provenance(rel, "registry", "registry.xml")))
        except ET.ParseError as exc:
            result.warnings.append(f"{rel}: {exc}")

    file_store = (private / "files" / "Microsoft" / "Office Mobile" / "SPM Data" /
                  "File Store" / "1000" / "https" / "d.docs.live.net" / uid)
    for path in walk_files(file_store):
        if path.suffix != ".one":
            continue
        rel = tree.relative(path)
        result.records.append(build_section_file_record(
            uid, path.stem, path.stat().st_size, Provenance(rel, "file_store", path.stem)))

    sp_store = (private / "files" / "Microsoft" / "Office Mobile" / "SPM Data" /
                "SPSQLStore.sdf")
    if sp_store.is_file():
        for table in ("SPMConfigData", "SPMCIItems", "SPMCOjects"):
            extract_table(result, tree, sp_store, TABLE_MAPS[table], ctx.tz_offset_min)

    hierarchy = private / "files" / "OneNote" / "hierarchy.sdf"
    if hierarchy.is_file():
        for table in ("OnmConfigData", "OnmNotebookContent", "OnmSectionContent"):
            extract_table(result, tree, hierarchy, TABLE_MAPS[table], ctx.tz_offset_min)

    _ingest_accounts_dump(result, ctx)
    return result.finish()


def _ingest_accounts_dump(result: ExtractResult, ctx) -> None:
    if ctx.accounts_dump is None:
        return
    for entry in ctx.accounts_dump.for_package(PACKAGE):
        seed_b64 = entry.userdata.get("_SEED")
        token_b64 = entry.userdata.get("_PASSWORD")
        result.cred_inputs["dump_entry"] = entry
        result.cred_inputs.setdefault("sources", []).append("<accounts-dump>")
        if not (seed_b64 and token_b64 and entry.password):
            result.warnings.append(
                "accounts dump lacks _SEED/_PASSWORD/password for token decryption")
            continue
        try:
            blob = OneNoteTokenBlob(
                seed=base64.b64decode(seed_b64),
                ciphertext=base64.b64decode(token_b64),
                key_material=entry.password)
            result.cred_inputs["refresh_token"] = onenote_decrypt_refresh_token(blob)
        except (CryptoInputInvalid, DecryptFailed, ValueError) as exc:
            result.cred_inputs["token_error"] = str(exc)
            result.warnings.append(f"refresh token decryption failed: {exc}")
