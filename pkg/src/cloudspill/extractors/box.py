"""Box artifact extraction.

Walks the per-user preferences (logged-in users, encryption key, salt
maps), the SQLite databases, the levelDB item store, and the external
cache, decrypting every Box Crypto file whose salt is present and
verifying the SHA-1 embedded in cache filenames against the decrypted
plaintext.
"""

from __future__ import annotations

import hashlib
from base64 import b64decode
from pathlib import Path

from ..crypto import BoxCryptoParams, box_decrypt
from ..errors import CiphertextMalformed, DecryptFailed
from ..records import (
    KIND_ACCOUNT,
    KIND_COMMENT,
    KIND_CONFIG,
    KIND_EVENT,
    KIND_FILE,
    KIND_FOLDER,
    KIND_RECENT,
    KIND_THUMBNAIL,
    ArtifactRecord,
    CacheFileFinding,
    ExtractResult,
    HashClaim,
    Normalized,
    Provenance,
    Timestamp,
)
from ..reporting import FMT_HUMAN_OTHER, normalize_timestamp
from ..schemas import BOX_IMAGECACHE_DB, BOX_LEVELDB_FIELDS, BOX_SQLITE_DB
from ..stores.jsondoc import RawNumber, parse_json_document
from ..stores.leveldb import read_leveldb_snapshot
from ..stores.prefs import read_prefs_xml
from .common import TableMap, extract_table, walk_files
from .filenames import parse_cache_filename

ENCRYPTION_KEY_PREF = "com.box.android.encryptionKey"
USER_INFO_PREF = "com.box.android.MoCoBoxUsers.userInfo"
STORED_USERS_PREF = "storedLoggedInUsers"

BOXITEM_KINDS = {
    "file": KIND_FILE,
    "folder": KIND_FOLDER,
    "comment": KIND_COMMENT,
    "event": KIND_EVENT,
}

_BOXITEM_TS_FIELDS = ("created_at", "content_created_at", "content_modified_at")

TABLE_MAPS = {
    "BoxEvent": TableMap(schema=BOX_SQLITE_DB.table("BoxEvent"),
                         kind=KIND_EVENT, name_col="name"),
    "BoxFile": TableMap(schema=BOX_SQLITE_DB.table("BoxFile"),
                        kind=KIND_FILE, name_col="name", size_col="size"),
    "BoxFolder": TableMap(schema=BOX_SQLITE_DB.table("BoxFolder"),
                          kind=KIND_FOLDER, name_col="name", size_col="size"),
    "BoxRecentFile": TableMap(schema=BOX_SQLITE_DB.table("BoxRecentFile"),
                              kind=KIND_RECENT, name_col="id"),
    "BoxComment": TableMap(schema=BOX_SQLITE_DB.table("BoxComment"),
                           kind=KIND_COMMENT, name_col="id"),
    "files": TableMap(schema=BOX_IMAGECACHE_DB.table("files"),
                      kind=KIND_THUMBNAIL, name_col="image_filename"),
}


def build_account_record(user_scope: str, source_pref: str, info: dict,
                         prov: Provenance) -> ArtifactRecord:
    attributes = {"directive": source_pref}
    attributes.update(info)
    return ArtifactRecord(
        app="box", user_scope=user_scope, kind=KIND_ACCOUNT,
        attributes=attributes,
        normalized=Normalized(name=str(info.get("login") or info.get("userName")
                                       or info.get("id"))),
        provenance=prov)


def build_salts_record(user_scope: str, directive: str, entries: dict,
                       prov: Provenance) -> ArtifactRecord:
    attributes = {"directive": directive}
    attributes.update(entries)
    return ArtifactRecord(
        app="box", user_scope=user_scope, kind=KIND_CONFIG,
        attributes=attributes,
        normalized=Normalized(name=directive),
        provenance=prov)


def build_boxitem_record(user_scope: str, item_type: str, item_id: str,
                         doc: dict, prov: Provenance, tz_offset_min: int,
                         warnings: list) -> ArtifactRecord:
    fields = BOX_LEVELDB_FIELDS[item_type]
    attributes = {name: doc[name] for name in fields if name in doc}
    for name in doc:
        if name not in attributes:
            attributes[name] = doc[name]

    normalized = Normalized(name=str(doc["name"]) if "name" in doc else None)
    size = doc.get("size")
    if isinstance(size, RawNumber):
        exact = size.as_int()
        if exact is None:
            warnings.append(
                f"{prov.path}:{prov.locator}: size {size.text!r} not an exact integer")
        else:
            normalized.size_bytes = exact
    sha1 = doc.get("sha1")
    if sha1:
        normalized.hashes.append(("sha1", str(sha1).lower()))
    for label in _BOXITEM_TS_FIELDS:
        raw = doc.get(label)
        if not raw:
            continue
        utc_ms, warning = normalize_timestamp(str(raw), FMT_HUMAN_OTHER, tz_offset_min)
        if warning:
            warnings.append(f"{prov.path}:{prov.locator}: {warning}")
        normalized.timestamps.append(Timestamp(label=label, utc_ms=utc_ms,
                                               original=str(raw)))
    return ArtifactRecord(
        app="box", user_scope=user_scope, kind=BOXITEM_KINDS[item_type],
        attributes=attributes, normalized=normalized, provenance=prov)


def _read_salts(result: ExtractResult, tree, prefs_path: Path,
                directive: str) -> dict[str, bytes]:
    """Salt map from one of the two salt prefs files; values are base64."""
    salts: dict[str, bytes] = {}
    if not prefs_path.is_file():
        return salts
    rel = tree.relative(prefs_path)
    try:
        prefs = read_prefs_xml(prefs_path)
    except Exception as exc:
        result.warnings.append(f"{rel}: {exc}")
        return salts
    entries = {}
    for name, entry in sorted(prefs.entries.items()):
        entries[name] = entry.raw
        try:
            salts[name] = b64decode(entry.raw, validate=True)
        except Exception:
            result.warnings.append(f"{rel}: salt for file {name} is not base64")
    result.records.append(build_salts_record(
        result.user_scope, directive, entries, Provenance(rel, "prefs", directive)))
    return salts


def extract_box(tree, scope, ctx) -> ExtractResult:
    result = ExtractResult(app="box", user_scope=scope.user_id)
    private = scope.app.private_path
    uid = scope.user_id

    encryption_key = None
    global_prefs = private / "shared_prefs" / "GLOBAL.xml"
    if global_prefs.is_file():
        rel = tree.relative(global_prefs)
        result.cred_inputs["sources"] = [rel]
        try:
            prefs = read_prefs_xml(global_prefs)
            stored = prefs.get(STORED_USERS_PREF)
            if stored:
                for user in parse_json_document(stored):
                    if str(user.get("id")) != uid:
                        continue
                    result.records.append(build_account_record(
                        uid, STORED_USERS_PREF, user,
                        Provenance(rel, STORED_USERS_PREF, uid)))
                    result.cred_inputs["access_token"] = str(user.get("userAuthToken") or "")
                    result.cred_inputs["refresh_token"] = str(user.get("userRefreshToken") or "")
                    result.cred_inputs["username"] = str(user.get("userName") or "")
        except Exception as exc:
            result.warnings.append(f"{rel}: {exc}")

    my_prefs = private / "shared_prefs" / f"myPreference{uid}.xml"
    if my_prefs.is_file():
        rel = tree.relative(my_prefs)
        try:
            prefs = read_prefs_xml(my_prefs)
            encryption_key = prefs.get(ENCRYPTION_KEY_PREF)
            info_raw = prefs.get(USER_INFO_PREF)
            if info_raw:
                info = parse_json_document(info_raw)
                result.records.append(build_account_record(
                    uid, USER_INFO_PREF, info, Provenance(rel, USER_INFO_PREF, uid)))
            if encryption_key:
                result.cred_inputs["encryption_key_present"] = True
        except Exception as exc:
            result.warnings.append(f"{rel}: {exc}")

    download_salts = _read_salts(
        result, tree, private / "shared_prefs" / f"DOWNLOAD_SALTS{uid}.xml",
        f"DOWNLOAD_SALTS{uid}")
    preview_salts = _read_salts(
        result, tree, private / "shared_prefs" / f"PREVIEW_SALTS{uid}.xml",
        f"PREVIEW_SALTS{uid}")

    box_db = private / "databases" / f"BoxSQLiteDB_{uid}"
    if box_db.is_file():
        for table in ("BoxEvent", "BoxFile", "BoxFolder", "BoxRecentFile",
                      "BoxComment"):
            extract_table(result, tree, box_db, TABLE_MAPS[table], ctx.tz_offset_min)

    imagecache_db = private / "databases" / "imagecachedb"
    thumb_rows = []
    if imagecache_db.is_file():
        thumb_rows = extract_table(result, tree, imagecache_db,
                                   TABLE_MAPS["files"], ctx.tz_offset_min)

    leveldb_sha1: dict[str, str] = {}
    leveldb_dir = private / "files" / f"leveldb{uid}"
    if leveldb_dir.is_dir():
        leveldb_sha1 = _extract_leveldb(result, tree, leveldb_dir, ctx)

    _extract_private_files(result, tree, private, thumb_rows)

    if scope.app.external_path is not None and encryption_key:
        _extract_cache(result, tree, scope.app.external_path, uid,
                       encryption_key, download_salts, preview_salts,
                       leveldb_sha1, ctx)
    elif scope.app.external_path is not None:
        result.warnings.append("external cache present but no encryption key found")
    return result.finish()


def _extract_leveldb(result: ExtractResult, tree, leveldb_dir: Path,
                     ctx) -> dict[str, str]:
    rel = tree.relative(leveldb_dir)
    snapshot = read_leveldb_snapshot(leveldb_dir)
    result.warnings.extend(f"{rel}: {w}" for w in snapshot.warnings)
    sha1_by_file_id: dict[str, str] = {}
    for key in sorted(snapshot.pairs):
        try:
            key_text = key.decode("utf-8")
        except UnicodeDecodeError:
            result.warnings.append(f"{rel}: non-UTF8 key {key!r} skipped")
            continue
        if not key_text.startswith("boxitem://"):
            continue
        parts = key_text[len("boxitem://"):].split("/", 1)
        if len(parts) != 2 or parts[0] not in BOXITEM_KINDS:
            result.warnings.append(f"{rel}: unrecognized key {key_text}")
            continue
        item_type, item_id = parts
        try:
            doc = parse_json_document(snapshot.pairs[key].decode("utf-8"))
        except Exception as exc:
            result.warnings.append(f"{rel}: {key_text}: {exc}")
            continue
        prov = Provenance(rel, key_text, item_id)
        result.records.append(build_boxitem_record(
            result.user_scope, item_type, item_id, doc, prov,
            ctx.tz_offset_min, result.warnings))
        if item_type == "file" and doc.get("sha1"):
            sha1_by_file_id[item_id] = str(doc["sha1"]).lower()
    return sha1_by_file_id


def _extract_private_files(result: ExtractResult, tree, private: Path,
                           thumb_rows: list[dict]) -> None:
    for path in walk_files(private / "files" / "previews"):
        result.findings.append(CacheFileFinding(
            app="box", user_scope=result.user_scope, path=tree.relative(path),
            naming=parse_cache_filename("box", path.name),
            encrypted=False, size_bytes=path.stat().st_size))
    cached_names = {str(row.get("image_filename")) for row in thumb_rows}
    for path in walk_files(private / "files" / "thumbnails"):
        naming = parse_cache_filename("box", path.name)
        status = "ok" if path.name in cached_names else "orphan"
        result.findings.append(CacheFileFinding(
            app="box", user_scope=result.user_scope, path=tree.relative(path),
            naming=naming, encrypted=False, status=status,
            size_bytes=path.stat().st_size))


def _decrypt_cache_file(result: ExtractResult, tree, path: Path,
                        encryption_key: str, salts: dict[str, bytes],
                        embedded_sha1: str | None, claim_sha1: str | None,
                        ctx) -> None:
    rel = tree.relative(path)
    naming = parse_cache_filename("box", path.name)
    finding = CacheFileFinding(
        app="box", user_scope=result.user_scope, path=rel, naming=naming,
        encrypted=True, size_bytes=path.stat().st_size)
    result.findings.append(finding)

    file_id = naming.get("file_id")
    if file_id is None or file_id not in salts:
        finding.status = "undecryptable: missing_salt"
        return
    params = BoxCryptoParams(app_encryption_key=encryption_key,
                             file_id=str(file_id), salt=salts[file_id])
    try:
        plaintext = box_decrypt(path.read_bytes(), params)
    except (DecryptFailed, CiphertextMalformed) as exc:
        finding.status = "undecryptable: decrypt_failed"
        result.warnings.append(f"{rel}: {exc}")
        return

    out_rel = finding.decrypted_to = ctx.write_output(
        f"box/{result.user_scope}/{path.parent.name}/{path.name}", plaintext)
    if out_rel is None:
        finding.decrypted_to = None
    expected = embedded_sha1 or claim_sha1
    if expected:
        actual = hashlib.sha1(plaintext).hexdigest()
        finding.verified_hash = ("sha1", actual == expected.lower())
        result.hash_claims.append(HashClaim(
            app="box", algo="sha1", expected_hex=expected.lower(), target=rel,
            transform="box_crypto",
            params={"app_encryption_key": encryption_key,
                    "file_id": str(file_id),
                    "salt_hex": salts[file_id].hex()},
            provenance=Provenance(rel, "cache_filename" if embedded_sha1
                                  else "boxitem://file", str(file_id))))


def _extract_cache(result: ExtractResult, tree, external: Path, uid: str,
                   encryption_key: str, download_salts: dict,
                   preview_salts: dict, leveldb_sha1: dict, ctx) -> None:
    cache = external / uid / "cache"
    for subdir in ("dl_cache", "dl_offline"):
        for path in walk_files(cache / subdir):
            naming = parse_cache_filename("box", path.name)
            embedded = naming.get("sha1") if naming["kind"] == "box_cache" else None
            claim = leveldb_sha1.get(str(naming.get("file_id", "")))
            _decrypt_cache_file(result, tree, path, encryption_key,
                                download_salts, embedded, claim, ctx)
    for path in walk_files(cache / "previews"):
        _decrypt_cache_file(result, tree, path, encryption_key,
                            preview_salts, None, None, ctx)
