"""Dropbox artifact extraction.

Covers the credentials prefs file, the three private databases, and the
external-storage cache trees (scratch downloads, thumbnails, tmp files),
including the MD5 cross-check between the ``dropbox`` table's local_hash
and the cached copy in scratch, and the orphaned-thumbnail anomaly where
moved images leave their old thumbs directory behind.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

from ..errors import FormatInvalid
from ..records import (
    KIND_ACCOUNT,
    KIND_ALBUM,
    KIND_CONFIG,
    KIND_FILE,
    KIND_FOLDER,
    KIND_THUMBNAIL,
    KIND_UPLOAD,
    ArtifactRecord,
    CacheFileFinding,
    ExtractResult,
    HashClaim,
    Normalized,
    Provenance,
)
from ..schemas import DROPBOX_PREFS_SHARED_DB, DROPBOX_USER_DB
from ..stores.jsondoc import parse_json_document, plain
from ..stores.prefs import read_prefs_xml
from ..stores.sqlite import read_sql_table
from .common import TableMap, extract_table, walk_files
from .filenames import parse_cache_filename, parse_camera_upload_hash, revision_suffix

CREDENTIALS_PREFS = "shared_prefs/dropbox-credentials.xml"


def _derive_file_row(row: dict, warnings: list) -> dict:
    extra = {}
    suffix = revision_suffix(str(row.get("revision") or ""))
    if suffix:
        extra["parsed_revision_suffix"] = suffix
    return extra


def _derive_camera_upload(row: dict, warnings: list) -> dict:
    value = row.get("local_hash")
    if not value:
        return {}
    try:
        size, filename = parse_camera_upload_hash(str(value))
    except FormatInvalid as exc:
        warnings.append(f"camera_upload: {exc}")
        return {}
    return {"parsed_size_bytes": size, "parsed_filename": filename}


TABLE_MAPS = {
    "dropbox": TableMap(
        schema=DROPBOX_USER_DB.table("dropbox"),
        kind=lambda row: KIND_FOLDER if row.get("is_dir") == 1 else KIND_FILE,
        name_col="_display_name", path_col="path", size_col="bytes",
        hash_cols=(("local_hash", "md5"),),
        derive=_derive_file_row,
    ),
    "albums": TableMap(
        schema=DROPBOX_USER_DB.table("albums"),
        kind=KIND_ALBUM, name_col="name",
    ),
    "album_item": TableMap(
        schema=DROPBOX_USER_DB.table("album_item"),
        kind=KIND_ALBUM, path_col="canon_path",
    ),
    "camera_upload": TableMap(
        schema=DROPBOX_USER_DB.table("camera_upload"),
        kind=KIND_UPLOAD,
        derive=_derive_camera_upload,
    ),
    "pending_upload": TableMap(
        schema=DROPBOX_USER_DB.table("pending_upload"),
        kind=KIND_UPLOAD, name_col="class",
    ),
    "photos": TableMap(
        schema=DROPBOX_USER_DB.table("photos"),
        kind=KIND_FILE, path_col="canon_path",
    ),
    "thumbnail_info": TableMap(
        schema=DROPBOX_USER_DB.table("thumbnail_info"),
        kind=KIND_THUMBNAIL, path_col="dropbox_canon_path",
    ),
    "DropboxAccountPrefs": TableMap(
        schema=DROPBOX_PREFS_SHARED_DB.table("DropboxAccountPrefs"),
        kind=KIND_CONFIG,
    ),
}


def build_account_record(user_scope: str, account: dict, prov: Provenance) -> ArtifactRecord:
    return ArtifactRecord(
        app="dropbox", user_scope=user_scope, kind=KIND_ACCOUNT,
        attributes={"userId": account.get("userId"),
                    "userToken": account.get("userToken")},
        normalized=Normalized(name=str(account.get("userId"))),
        provenance=prov)


def build_app_key_record(user_scope: str, app_key: str, prov: Provenance) -> ArtifactRecord:
    return ArtifactRecord(
        app="dropbox", user_scope=user_scope, kind=KIND_CONFIG,
        attributes={"app_key": app_key},
        normalized=Normalized(name="app_key"),
        provenance=prov)


def build_kv_record(user_scope: str, key: str, value, prov: Provenance) -> ArtifactRecord:
    # the kv table flattens to one attribute per row, named by the row key
    return ArtifactRecord(
        app="dropbox", user_scope=user_scope, kind=KIND_CONFIG,
        attributes={key: value},
        normalized=Normalized(name=key),
        provenance=prov)


def build_thumb_record(user_scope: str, image_path: str, orphaned: bool,
                       variants: list[str], prov: Provenance) -> ArtifactRecord:
    return ArtifactRecord(
        app="dropbox", user_scope=user_scope, kind=KIND_THUMBNAIL,
        attributes={"thumbs_path": image_path, "orphaned": orphaned,
                    "variants": ",".join(variants)},
        normalized=Normalized(path=image_path),
        provenance=prov)


def extract_dropbox(tree, scope, ctx) -> ExtractResult:
    result = ExtractResult(app="dropbox", user_scope=scope.user_id)
    private = scope.app.private_path
    uid = scope.user_id

    app_key = None
    creds_path = private / CREDENTIALS_PREFS
    if creds_path.is_file():
        rel = tree.relative(creds_path)
        result.cred_inputs["sources"] = [rel]
        try:
            prefs = read_prefs_xml(creds_path)
            app_key = prefs.get("app_key")
            if app_key:
                result.records.append(build_app_key_record(
                    uid, app_key, Provenance(rel, "prefs", "app_key")))
            accounts_raw = prefs.get("accounts")
            if accounts_raw:
                for account in plain(parse_json_document(accounts_raw)):
                    if str(account.get("userId")) != uid:
                        continue
                    result.records.append(build_account_record(
                        uid, account, Provenance(rel, "accounts", uid)))
                    result.cred_inputs["user_token"] = account.get("userToken")
            result.cred_inputs["app_key"] = app_key
        except Exception as exc:
            result.warnings.append(f"{rel}: {exc}")

    prefs_db = private / "databases" / "prefs-shared.db"
    if prefs_db.is_file():
        extract_table(result, tree, prefs_db, TABLE_MAPS["DropboxAccountPrefs"],
                      ctx.tz_offset_min)

    file_rows: list[dict] = []
    user_db = private / "databases" / f"{uid}-db.db"
    if user_db.is_file():
        for table in ("dropbox", "albums", "album_item", "camera_upload",
                      "pending_upload", "photos", "thumbnail_info"):
            rows = extract_table(result, tree, user_db, TABLE_MAPS[table],
                                 ctx.tz_offset_min)
            if table == "dropbox":
                file_rows = rows

    # sync-cache notifications database, keyed by app_key
    if app_key:
        notif_db = (private / "app_DropboxSyncCache" / app_key /
                    f"{uid}-notifications")
        if notif_db.is_file():
            rel = tree.relative(notif_db)
            try:
                table = read_sql_table(notif_db, "kv", ["key", "value"])
                result.warnings.extend(f"{rel}: {w}" for w in table.warnings)
                for row in table.dicts():
                    key = str(row.get("key"))
                    result.records.append(build_kv_record(
                        uid, key, row.get("value"), Provenance(rel, "kv", key)))
            except Exception as exc:
                result.warnings.append(f"{rel}: {exc}")

    external = scope.app.external_path
    if external is not None:
        _extract_scratch(result, tree, external, uid, file_rows)
        _extract_thumbs(result, tree, external, uid, file_rows)
        _extract_tmp_and_misc(result, tree, external, uid)
    return result.finish()


def _extract_scratch(result: ExtractResult, tree, external: Path, uid: str,
                     file_rows: list[dict]) -> None:
    scratch = external / "files" / uid / "scratch"
    by_name = {}
    for row in file_rows:
        if row.get("is_dir") == 1 or not row.get("local_hash"):
            continue
        name = row.get("_display_name")
        if name:
            by_name[str(name)] = row
    for path in walk_files(scratch):
        rel = tree.relative(path)
        finding = CacheFileFinding(
            app="dropbox", user_scope=uid, path=rel,
            naming={"kind": "dropbox_scratch", "original_name": path.name},
            size_bytes=path.stat().st_size)
        row = by_name.get(path.name)
        if row is not None:
            expected = str(row["local_hash"]).lower()
            actual = hashlib.md5(path.read_bytes()).hexdigest()
            finding.verified_hash = ("md5", actual == expected)
            result.hash_claims.append(HashClaim(
                app="dropbox", algo="md5", expected_hex=expected, target=rel,
                provenance=Provenance(rel, "dropbox", str(row.get("canon_path")))))
        result.findings.append(finding)


def _extract_thumbs(result: ExtractResult, tree, external: Path, uid: str,
                    file_rows: list[dict]) -> None:
    thumbs = external / "cache" / uid / "thumbs"
    if not thumbs.is_dir():
        return
    canon_paths = {str(row.get("canon_path", "")).lower()
                   for row in file_rows if row.get("canon_path")}
    leaf_dirs = sorted({p.parent for p in walk_files(thumbs)},
                       key=lambda p: p.as_posix())
    for leaf in leaf_dirs:
        image_path = "/" + leaf.relative_to(thumbs).as_posix()
        orphaned = image_path.lower() not in canon_paths
        variants = sorted(p.name for p in leaf.iterdir() if p.is_file())
        rel = tree.relative(leaf)
        result.records.append(build_thumb_record(
            uid, image_path, orphaned, variants,
            Provenance(rel, "thumbs", image_path)))
        for name in variants:
            result.findings.append(CacheFileFinding(
                app="dropbox", user_scope=uid, path=f"{rel}/{name}",
                naming={"kind": "dropbox_thumb", "image_path": image_path,
                        "variant": name},
                size_bytes=(leaf / name).stat().st_size))


def _extract_tmp_and_misc(result: ExtractResult, tree, external: Path, uid: str) -> None:
    for path in walk_files(external / "cache" / uid / "tmp"):
        result.findings.append(CacheFileFinding(
            app="dropbox", user_scope=uid, path=tree.relative(path),
            naming=parse_cache_filename("dropbox", path.name),
            size_bytes=path.stat().st_size))
    for path in walk_files(external / "cache" / uid / "miscthumbs"):
        result.findings.append(CacheFileFinding(
            app="dropbox", user_scope=uid, path=tree.relative(path),
            naming={"kind": "dropbox_thumb_journal"},
            size_bytes=path.stat().st_size))
