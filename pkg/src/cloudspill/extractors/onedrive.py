"""OneDrive artifact extraction.

The private databases carry all item metadata; cached file content sits on
external storage under SkyDriveCacheFile_[integer].cachedata names joined
back to cached_files_metadata by that integer.  Authentication material
lives in AccountManager, so credentials only appear when the operator
supplies a dump.
"""

from __future__ import annotations

from ..errors import FormatInvalid
from ..records import (
    KIND_ACCOUNT,
    KIND_FILE,
    KIND_UPLOAD,
    ArtifactRecord,
    CacheFileFinding,
    ExtractResult,
    Normalized,
    Provenance,
)
from ..schemas import (
    ONEDRIVE_AUTO_UPLOAD_DB,
    ONEDRIVE_CACHED_FILES_DB,
    ONEDRIVE_MANUAL_UPLOAD_DB,
    ONEDRIVE_METADATA_DB,
)
from .common import TableMap, extract_table, walk_files
from .filenames import parse_cache_filename, split_etag

PACKAGE = "com.microsoft.skydrive"


def _derive_item(row: dict, warnings: list) -> dict:
    etag = row.get("eTag")
    if not etag:
        return {}
    try:
        resource_id, version = split_etag(str(etag))
    except FormatInvalid as exc:
        warnings.append(f"items: {exc}")
        return {}
    return {"parsed_etag_resource_id": resource_id,
            "parsed_etag_version": version}


def _derive_queue(row: dict, warnings: list) -> dict:
    progress, size = row.get("loadingProgress"), row.get("fileSize")
    if progress is None or size is None:
        return {}
    return {"parsed_complete": progress == size}


TABLE_MAPS = {
    "items": TableMap(
        schema=ONEDRIVE_METADATA_DB.table("items"),
        kind=KIND_FILE, name_col="name", size_col="size",
        derive=_derive_item,
    ),
    "cached_files_metadata": TableMap(
        schema=ONEDRIVE_CACHED_FILES_DB.table("cached_files_metadata"),
        kind=KIND_FILE, name_col="cache_id", size_col="file_size_bytes",
    ),
    "auto_queue": TableMap(
        schema=ONEDRIVE_AUTO_UPLOAD_DB.table("queue"),
        kind=KIND_UPLOAD, name_col="fileName", path_col="filePath",
        size_col="fileSize", derive=_derive_queue,
    ),
    "manual_queue": TableMap(
        schema=ONEDRIVE_MANUAL_UPLOAD_DB.table("queue"),
        kind=KIND_UPLOAD, name_col="fileName", path_col="filePath",
        size_col="fileSize", derive=_derive_queue,
    ),
}


def build_dump_account_record(user_scope: str, entry, prov: Provenance) -> ArtifactRecord:
    attributes = {"account_name": entry.account_name}
    for key in sorted(entry.userdata):
        attributes[f"userdata.{key}"] = entry.userdata[key]
    for key in sorted(entry.authtokens):
        attributes[f"authtoken.{key}"] = "<present>"
    return ArtifactRecord(
        app="onedrive", user_scope=user_scope, kind=KIND_ACCOUNT,
        attributes=attributes,
        normalized=Normalized(name=entry.account_name),
        provenance=prov)


def extract_onedrive(tree, scope, ctx) -> ExtractResult:
    result = ExtractResult(app="onedrive", user_scope=scope.user_id)
    private = scope.app.private_path
    databases = private / "databases"

    if (databases / "metadata").is_file():
        extract_table(result, tree, databases / "metadata",
                      TABLE_MAPS["items"], ctx.tz_offset_min)

    cached_rows = []
    if (databases / "cached_files_md.db").is_file():
        cached_rows = extract_table(result, tree, databases / "cached_files_md.db",
                                    TABLE_MAPS["cached_files_metadata"],
                                    ctx.tz_offset_min)
    if (databases / "auto_upload.db").is_file():
        extract_table(result, tree, databases / "auto_upload.db",
                      TABLE_MAPS["auto_queue"], ctx.tz_offset_min)
    if (databases / "manual_upload_db").is_file():
        extract_table(result, tree, databases / "manual_upload_db",
                      TABLE_MAPS["manual_queue"], ctx.tz_offset_min)

    if scope.app.external_path is not None:
        _extract_cache(result, tree, scope.app.external_path, cached_rows)

    _ingest_accounts_dump(result, tree, ctx)
    return result.finish()


def _extract_cache(result: ExtractResult, tree, external, cached_rows) -> None:
    rows_by_id = {row.get("id"): row for row in cached_rows}
    for path in walk_files(external / "cache"):
        naming = parse_cache_filename("onedrive", path.name)
        finding = CacheFileFinding(
            app="onedrive", user_scope=result.user_scope,
            path=tree.relative(path), naming=naming,
            size_bytes=path.stat().st_size)
        row = rows_by_id.get(naming.get("cache_id")) if naming["kind"] == "onedrive_cache" else None
        if row is None:
            finding.status = "orphan"
        else:
            finding.naming["cache_id_row"] = str(row.get("cache_id"))
            size = row.get("file_size_bytes")
            if size is not None and size != finding.size_bytes:
                finding.status = "size_mismatch"
        result.findings.append(finding)


def _ingest_accounts_dump(result: ExtractResult, tree, ctx) -> None:
    if ctx.accounts_dump is None:
        result.warnings.append("no_account_dump: OneDrive credentials live in "
                               "AccountManager; supply a dump to recover them")
        return
    for entry in ctx.accounts_dump.for_package(PACKAGE):
        prov = Provenance(path="<accounts-dump>", locator="accountmanager",
                          item=entry.account_name or PACKAGE)
        result.records.append(build_dump_account_record(
            result.user_scope, entry, prov))
        result.cred_inputs["dump_entry"] = entry
        result.cred_inputs.setdefault("sources", []).append("<accounts-dump>")
