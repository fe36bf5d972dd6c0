"""ownCloud artifact extraction.

The preferences file carries the app PIN digits and the selected account;
the filelist database describes every synced file plus public shares, and
external storage mirrors the server directory layout under
/sdcard/owncloud/[username@server].  Passwords are plaintext in
AccountManager, so a dump yields a directly replayable credential.
"""

from __future__ import annotations

from ..records import (
    KIND_ACCOUNT,
    KIND_CONFIG,
    KIND_FILE,
    KIND_FOLDER,
    KIND_SHARE,
    KIND_UPLOAD,
    ArtifactRecord,
    CacheFileFinding,
    ExtractResult,
    Normalized,
    Provenance,
)
from ..schemas import OWNCLOUD_FILELIST_DB, OWNCLOUD_MAIN_DB
from ..stores.prefs import read_prefs_xml
from .common import TableMap, extract_table, walk_files
from .filenames import owncloud_share_url

PACKAGE = "com.owncloud.android"
PREFS_FILE = "com.owncloud.android_preferences.xml"
PREFS_DIRECTIVES = ("instant_upload_on_wifi", "instant_uploading",
                    "select_oc_account", "set_pincode",
                    "PrefPinCode1", "PrefPinCode2", "PrefPinCode3", "PrefPinCode4")


def _derive_share(row: dict, warnings: list) -> dict:
    url = owncloud_share_url(str(row.get("owner_share") or ""),
                             str(row.get("token") or ""))
    return {"parsed_share_url": url} if url else {}


TABLE_MAPS = {
    "filelist": TableMap(
        schema=OWNCLOUD_FILELIST_DB.table("filelist"),
        kind=lambda row: KIND_FOLDER if row.get("content_type") == "DIR" else KIND_FILE,
        name_col="filename", path_col="path",
    ),
    "ocshares": TableMap(
        schema=OWNCLOUD_FILELIST_DB.table("ocshares"),
        kind=KIND_SHARE, path_col="path",
        derive=_derive_share,
    ),
    "instant_upload": TableMap(
        schema=OWNCLOUD_MAIN_DB.table("instant_upload"),
        kind=KIND_UPLOAD, path_col="path",
    ),
}


def build_prefs_record(user_scope: str, directives: dict,
                       prov: Provenance) -> ArtifactRecord:
    return ArtifactRecord(
        app="owncloud", user_scope=user_scope, kind=KIND_CONFIG,
        attributes=directives,
        normalized=Normalized(name=PREFS_FILE),
        provenance=prov)


def build_dump_account_record(user_scope: str, entry, prov: Provenance) -> ArtifactRecord:
    return ArtifactRecord(
        app="owncloud", user_scope=user_scope, kind=KIND_ACCOUNT,
        attributes={"account_name": entry.account_name,
                    "password": "<present>" if entry.password else None},
        normalized=Normalized(name=entry.account_name),
        provenance=prov)


def extract_owncloud(tree, scope, ctx) -> ExtractResult:
    result = ExtractResult(app="owncloud", user_scope=scope.user_id)
    private = scope.app.private_path

    prefs_path = private / "shared_prefs" / PREFS_FILE
    if prefs_path.is_file():
        rel = tree.relative(prefs_path)
        result.cred_inputs.setdefault("sources", []).append(rel)
        try:
            prefs = read_prefs_xml(prefs_path)
            directives = {name: prefs.get(name) for name in PREFS_DIRECTIVES
                          if name in prefs}
            result.records.append(build_prefs_record(
                scope.user_id, directives, Provenance(rel, "prefs", PREFS_FILE)))
            digits = [prefs.raw(f"PrefPinCode{i}") for i in range(1, 5)]
            if prefs.get("set_pincode") and all(digits):
                result.cred_inputs["app_pin"] = "".join(digits)
            result.cred_inputs["select_oc_account"] = prefs.get("select_oc_account")
        except Exception as exc:
            result.warnings.append(f"{rel}: {exc}")

    databases = private / "databases"
    file_rows = []
    if (databases / "filelist").is_file():
        file_rows = extract_table(result, tree, databases / "filelist",
                                  TABLE_MAPS["filelist"], ctx.tz_offset_min)
        extract_table(result, tree, databases / "filelist",
                      TABLE_MAPS["ocshares"], ctx.tz_offset_min)
    if (databases / "ownCloud").is_file():
        extract_table(result, tree, databases / "ownCloud",
                      TABLE_MAPS["instant_upload"], ctx.tz_offset_min)

    _extract_mirror(result, tree, scope, file_rows)
    _ingest_accounts_dump(result, ctx)
    return result.finish()


def _extract_mirror(result: ExtractResult, tree, scope, file_rows) -> None:
    external = scope.app.external_path
    if external is not None:
        mirror = external / scope.user_id
        for path in walk_files(mirror):
            result.findings.append(CacheFileFinding(
                app="owncloud", user_scope=scope.user_id,
                path=tree.relative(path),
                naming={"kind": "owncloud_mirror",
                        "server_path": "/" + path.relative_to(mirror).as_posix()},
                size_bytes=path.stat().st_size))
    # media_path names where each synced file should sit on external storage
    for row in file_rows:
        if row.get("content_type") == "DIR" or not row.get("media_path"):
            continue
        try:
            local = tree.resolve(str(row["media_path"]))
        except ValueError:
            result.warnings.append(f"media_path outside tree: {row['media_path']}")
            continue
        if row.get("keep_in_sync") == 1 and not local.is_file():
            result.warnings.append(f"sync_file_missing: {row['media_path']}")


def _ingest_accounts_dump(result: ExtractResult, ctx) -> None:
    if ctx.accounts_dump is None:
        return
    for entry in ctx.accounts_dump.for_package(PACKAGE):
        if entry.account_name != result.user_scope:
            continue
        prov = Provenance(path="<accounts-dump>", locator="accountmanager",
                          item=entry.account_name)
        result.records.append(build_dump_account_record(
            result.user_scope, entry, prov))
        result.cred_inputs["dump_entry"] = entry
        result.cred_inputs.setdefault("sources", []).append("<accounts-dump>")
