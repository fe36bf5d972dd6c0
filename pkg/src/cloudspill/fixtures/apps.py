"""Per-app synthetic tree writers with ground-truth record expectations.

Each gen_* function writes one app's documented files into the tree and
appends the records, findings, credentials and hash verdicts an extraction
run must produce.  Record shapes come from the extractors' own builders
applied to the authored rows; any warning produced while building
expectations indicates generator drift and fails loudly.
"""

from __future__ import annotations

import hashlib
import json
from base64 import b64encode

from ..credentials import (
    KIND_BASIC,
    KIND_ENCRYPTED,
    KIND_KEYPAIR,
    KIND_OAUTH1,
    KIND_OAUTH2,
    KIND_PIN,
    OPAQUE,
    PARTIAL,
    REPLAYABLE,
    CredentialRecord,
)
from ..crypto import BoxCryptoParams, UPM_FIXTURE_MAGIC, box_encrypt, onenote_encrypt_refresh_token, upm_encrypt
from ..extractors import box as box_x
from ..extractors import dropbox as dropbox_x
from ..extractors import evernote as evernote_x
from ..extractors import onedrive as onedrive_x
from ..extractors import onenote as onenote_x
from ..extractors import owncloud as owncloud_x
from ..extractors import upm as upm_x
from ..extractors.common import build_table_record, row_provenance
from ..records import CacheFileFinding, Provenance
from ..accounts import AccountDumpEntry
from ..schemas import (
    BOX_IMAGECACHE_DB,
    BOX_SQLITE_DB,
    DROPBOX_NOTIFICATIONS_DB,
    DROPBOX_PREFS_SHARED_DB,
    DROPBOX_USER_DB,
    EVERNOTE_USER_DB,
    ONEDRIVE_AUTO_UPLOAD_DB,
    ONEDRIVE_CACHED_FILES_DB,
    ONEDRIVE_MANUAL_UPLOAD_DB,
    ONEDRIVE_METADATA_DB,
    ONENOTE_HIERARCHY_DB,
    ONENOTE_SPSQL_DB,
    OWNCLOUD_FILELIST_DB,
    OWNCLOUD_MAIN_DB,
)
from ..stores.jsondoc import parse_json_document, plain
from .leveldb_writer import write_leveldb

BASE_TS = 1398902400000
HOUR = 3600 * 1000

ACCOUNTS_DUMP_PATH = "<accounts-dump>"


def _no_warnings(sink: list, where: str) -> None:
    if sink:
        raise AssertionError(f"fixture expectation drift at {where}: {sink}")


def _expect_rows(expected, app: str, uid: str, tmap, rows: list[dict],
                 rel: str) -> None:
    for index, row in enumerate(rows):
        sink: list = []
        prov = row_provenance(rel, tmap, row, index)
        expected.records.append(build_table_record(app, uid, tmap, row, prov,
                                                   0, sink))
        _no_warnings(sink, f"{app}:{tmap.schema.name}")


def _guid(rng) -> str:
    raw = rng.getrandbits(128)
    hexs = f"{raw:032x}"
    return f"{hexs[:8]}-{hexs[8:12]}-{hexs[12:16]}-{hexs[16:20]}-{hexs[20:]}"


def _iso(ts_ms: int) -> str:
    from datetime import datetime, timezone
    return datetime.fromtimestamp(ts_ms / 1000, tz=timezone.utc).isoformat()


# ---------------------------------------------------------------------------
# Dropbox
# ---------------------------------------------------------------------------

def gen_dropbox(spec, writer, rng, expected, dump_entries) -> None:
    from .generator import UIDS, _pref
    uid = UIDS["dropbox"]
    secrets = spec.secrets
    pkg = "com.dropbox.android"
    private = f"/data/data/{pkg}"
    external = f"/sdcard/Android/data/{pkg}"

    accounts_json = json.dumps(
        [{"userToken": secrets.dropbox_user_token, "userId": uid}])
    creds_rel = writer.write_prefs(
        f"{private}/shared_prefs/dropbox-credentials.xml",
        [_pref("app_key", secrets.dropbox_app_key),
         _pref("accounts", accounts_json)])
    expected.records.append(dropbox_x.build_app_key_record(
        uid, secrets.dropbox_app_key, Provenance(creds_rel, "prefs", "app_key")))
    account = plain(parse_json_document(accounts_json))[0]
    expected.records.append(dropbox_x.build_account_record(
        uid, account, Provenance(creds_rel, "accounts", uid)))
    expected.credentials.append(CredentialRecord(
        app="dropbox", user_scope=uid, kind=KIND_OAUTH1,
        fields={"consumer_key": secrets.dropbox_app_key,
                "token": secrets.dropbox_user_token.split("|")[0],
                "token_secret_half": secrets.dropbox_user_token.split("|")[1],
                "consumer_secret": secrets.dropbox_consumer_secret},
        completeness=REPLAYABLE, provenance=[creds_rel]))

    prefs_rows = [{"LAST_REPORT_HOST_TIME": BASE_TS + 1 * HOUR}]
    rel = writer.write_sqlite(
        f"{private}/databases/prefs-shared.db",
        [(DROPBOX_PREFS_SHARED_DB.table("DropboxAccountPrefs"), prefs_rows)])
    _expect_rows(expected, "dropbox", uid,
                 dropbox_x.TABLE_MAPS["DropboxAccountPrefs"], prefs_rows, rel)

    scratch_content = b"%PDF-1.4 fixture ledger document\n" + bytes(
        rng.randrange(32, 127) for _ in range(512))
    scratch_md5 = hashlib.md5(scratch_content).hexdigest()
    folder_hash = f"{rng.getrandbits(128):032x}"

    def file_row(i: int, cached: bool) -> dict:
        name = f"ledger{i}.pdf"
        return {
            "modified_millis": BASE_TS + (2 + i) * HOUR,
            "bytes": len(scratch_content) if cached else 1024 + i,
            "revision": f"{i + 1}0000000abcd1234",
            "hash": None,
            "is_dir": 0,
            "path": f"/Docs/{name}",
            "canon_path": f"/docs/{name}",
            "mime_type": "application/pdf",
            "thumb_exists": 0,
            "parent_path": "/Docs",
            "canon_parent_path": "/docs",
            "_display_name": name,
            "is_favorite": 1 if i == 0 else 0,
            "local_modified": BASE_TS + (3 + i) * HOUR if cached else None,
            "local_revision": f"{i + 1}0000000abcd1234" if cached else None,
            "local_hash": scratch_md5 if cached else None,
        }

    dropbox_rows = [file_row(0, cached=True)]
    dropbox_rows += [file_row(i, cached=False) for i in range(1, spec.files)]
    dropbox_rows.append({
        "modified_millis": BASE_TS + 6 * HOUR, "bytes": 2001, "revision": "70000000abcd9999",
        "hash": None, "is_dir": 0, "path": "/Photos/pic0.jpg",
        "canon_path": "/photos/pic0.jpg", "mime_type": "image/jpeg",
        "thumb_exists": 1, "parent_path": "/Photos",
        "canon_parent_path": "/photos", "_display_name": "pic0.jpg",
        "is_favorite": 0, "local_modified": None, "local_revision": None,
        "local_hash": None,
    })
    dropbox_rows.append({
        "modified_millis": BASE_TS + 1 * HOUR, "bytes": None,
        "revision": None, "hash": folder_hash, "is_dir": 1, "path": "/Docs",
        "canon_path": "/docs", "mime_type": None, "thumb_exists": 0,
        "parent_path": "/", "canon_parent_path": "/", "_display_name": "Docs",
        "is_favorite": 0, "local_modified": None, "local_revision": None,
        "local_hash": None,
    })

    album_id = "albfixture0000000000aa"
    albums_rows = [{
        "col_id": album_id, "name": "Holiday", "count": 1,
        "cover_image_canon_path": "/photos/pic0.jpg",
        "share_link": "https://www.dropbox.invalid/sc/holiday0",
        "creation_time": BASE_TS + 4 * HOUR, "update_time": BASE_TS + 5 * HOUR,
    }]
    album_item_rows = [{"col_id": album_id, "item_id": "itmfixture0000000000aa",
                        "canon_path": "/photos/pic0.jpg"}]
    camera_rows = [{"local_hash": "2048/IMG_0001.jpg",
                    "server_hash": f"{rng.getrandbits(128):032x}",
                    "uploaded": 1}]
    pending_rows = [{"class": "UploadTask",
                     "data": json.dumps({"mLocalUri": "file:///sdcard/DCIM/IMG_0002.jpg",
                                         "mDropboxDir": "/Photos",
                                         "mDestinationFilename": "IMG_0002.jpg"})}]
    photos_rows = [{"item_id": "phofixture0000000000aa",
                    "canon_path": "/photos/pic0.jpg",
                    "time_taken": BASE_TS + 6 * HOUR}]
    thumb_info_rows = [{"dropbox_canon_path": "/photos/pic0.jpg",
                        "thumb_size": "1024x768_bestfit",
                        "revision": "40000000abcd1234"}]

    rel = writer.write_sqlite(
        f"{private}/databases/{uid}-db.db",
        [(DROPBOX_USER_DB.table("dropbox"), dropbox_rows),
         (DROPBOX_USER_DB.table("albums"), albums_rows),
         (DROPBOX_USER_DB.table("album_item"), album_item_rows),
         (DROPBOX_USER_DB.table("camera_upload"), camera_rows),
         (DROPBOX_USER_DB.table("pending_upload"), pending_rows),
         (DROPBOX_USER_DB.table("photos"), photos_rows),
         (DROPBOX_USER_DB.table("thumbnail_info"), thumb_info_rows)])
    for table, rows in (("dropbox", dropbox_rows), ("albums", albums_rows),
                        ("album_item", album_item_rows),
                        ("camera_upload", camera_rows),
                        ("pending_upload", pending_rows),
                        ("photos", photos_rows),
                        ("thumbnail_info", thumb_info_rows)):
        _expect_rows(expected, "dropbox", uid, dropbox_x.TABLE_MAPS[table],
                     rows, rel)

    kv_rel = writer.write_sqlite(
        f"{private}/app_DropboxSyncCache/{secrets.dropbox_app_key}/{uid}-notifications",
        [(DROPBOX_NOTIFICATIONS_DB.table("kv"),
          [{"key": "app_key", "value": secrets.dropbox_app_key}])])
    expected.records.append(dropbox_x.build_kv_record(
        uid, "app_key", secrets.dropbox_app_key,
        Provenance(kv_rel, "kv", "app_key")))

    # external storage: scratch download, thumbs, tmp, miscthumbs
    scratch_rel = writer.write_bytes(
        f"{external}/files/{uid}/scratch/ledger0.pdf", scratch_content)
    expected.findings.append(CacheFileFinding(
        app="dropbox", user_scope=uid, path=scratch_rel,
        naming={"kind": "dropbox_scratch", "original_name": "ledger0.pdf"},
        verified_hash=("md5", True), size_bytes=len(scratch_content)))
    expected.hash_verdicts[scratch_rel] = "match"

    thumb_bytes = {"px128.jpg": b"\xff\xd8\xff\xe0 fixture thumb 128",
                   "px512.jpg": b"\xff\xd8\xff\xe0 fixture thumb 512"}
    for variant, data in thumb_bytes.items():
        writer.write_bytes(
            f"{external}/cache/{uid}/thumbs/Photos/pic0.jpg/{variant}", data)
    live_rel = writer.rel(f"{external}/cache/{uid}/thumbs/Photos/pic0.jpg")
    expected.records.append(dropbox_x.build_thumb_record(
        uid, "/Photos/pic0.jpg", False, sorted(thumb_bytes),
        Provenance(live_rel, "thumbs", "/Photos/pic0.jpg")))
    for variant, data in sorted(thumb_bytes.items()):
        expected.findings.append(CacheFileFinding(
            app="dropbox", user_scope=uid, path=f"{live_rel}/{variant}",
            naming={"kind": "dropbox_thumb", "image_path": "/Photos/pic0.jpg",
                    "variant": variant},
            size_bytes=len(data)))

    orphan_data = b"\xff\xd8\xff\xe0 fixture orphan thumb"
    writer.write_bytes(
        f"{external}/cache/{uid}/thumbs/Old/gone.jpg/px128.jpg", orphan_data)
    orphan_rel = writer.rel(f"{external}/cache/{uid}/thumbs/Old/gone.jpg")
    expected.records.append(dropbox_x.build_thumb_record(
        uid, "/Old/gone.jpg", True, ["px128.jpg"],
        Provenance(orphan_rel, "thumbs", "/Old/gone.jpg")))
    expected.findings.append(CacheFileFinding(
        app="dropbox", user_scope=uid, path=f"{orphan_rel}/px128.jpg",
        naming={"kind": "dropbox_thumb", "image_path": "/Old/gone.jpg",
                "variant": "px128.jpg"},
        size_bytes=len(orphan_data)))

    tmp_rel = writer.write_bytes(f"{external}/cache/{uid}/tmp/file0.tmp",
                                 b"partial download bytes")
    expected.findings.append(CacheFileFinding(
        app="dropbox", user_scope=uid, path=tmp_rel,
        naming={"kind": "dropbox_tmp", "index": 0},
        size_bytes=len(b"partial download bytes")))

    journal_rel = writer.write_bytes(
        f"{external}/cache/{uid}/miscthumbs/journal",
        b"1024 2048 4096 thumbnail layout data")
    expected.findings.append(CacheFileFinding(
        app="dropbox", user_scope=uid, path=journal_rel,
        naming={"kind": "dropbox_thumb_journal"},
        size_bytes=len(b"1024 2048 4096 thumbnail layout data")))


# ---------------------------------------------------------------------------
# Box
# ---------------------------------------------------------------------------

def gen_box(spec, writer, rng, expected, dump_entries) -> None:
    from .generator import UIDS, _pref
    uid = UIDS["box"]
    secrets = spec.secrets
    pkg = "com.box.android"
    private = f"/data/data/{pkg}"
    external = f"/sdcard/Android/data/{pkg}"

    encryption_key = f"{rng.getrandbits(512):0128x}"
    content_111 = b"box cached document contents " + bytes(
        rng.randrange(32, 127) for _ in range(2019))  # 2048 total
    content_112 = b"box offline document " + bytes(
        rng.randrange(32, 127) for _ in range(1003))
    preview_bytes = b"\xff\xd8\xff\xe0 box preview " + bytes(
        rng.randrange(32, 127) for _ in range(300))
    sha_111 = hashlib.sha1(content_111).hexdigest()
    sha_112 = hashlib.sha1(content_112).hexdigest()
    salt_111 = rng.randbytes(8)
    salt_112 = rng.randbytes(8)
    salt_p111 = rng.randbytes(8)

    stored_users = json.dumps([{
        "id": uid, "userAuthToken": secrets.box_access_token,
        "userRefreshToken": secrets.box_refresh_token,
        "userName": "bob@example.com"}])
    global_rel = writer.write_prefs(
        f"{private}/shared_prefs/GLOBAL.xml",
        [_pref("storedLoggedInUsers", stored_users),
         _pref("currentUser", uid)])
    sink: list = []
    user = parse_json_document(stored_users)[0]
    expected.records.append(box_x.build_account_record(
        uid, box_x.STORED_USERS_PREF, user,
        Provenance(global_rel, box_x.STORED_USERS_PREF, uid)))
    expected.credentials.append(CredentialRecord(
        app="box", user_scope=uid, kind=KIND_OAUTH2,
        fields={"refresh_token": secrets.box_refresh_token,
                "access_token": secrets.box_access_token,
                "username": "bob@example.com",
                "client_id": secrets.box_client_id,
                "client_secret": secrets.box_client_secret},
        completeness=REPLAYABLE, provenance=[global_rel]))

    user_info = json.dumps({
        "login": "bob@example.com", "name": "bob@example.com", "id": uid,
        "avatar_url": f"https://app.box.invalid/api/avatar/large/{uid}",
        "max_upload_size": 2.0e9, "space_amount": 1.0e10,
        "space_used": 1.0e5})
    # json.dumps renders the exponent floats as 2000000000.0 etc., which
    # defeats the exponent-notation fixture; write the document manually
    user_info = ('{"login": "bob@example.com", "name": "bob@example.com", '
                 f'"id": "{uid}", '
                 '"avatar_url": "https://app.box.invalid/api/avatar/large/'
                 f'{uid}", '
                 '"max_upload_size": 2.0E9, "space_amount": 1.0E10, '
                 '"space_used": 1.0E5}')
    my_rel = writer.write_prefs(
        f"{private}/shared_prefs/myPreference{uid}.xml",
        [_pref(box_x.ENCRYPTION_KEY_PREF, encryption_key),
         _pref(box_x.USER_INFO_PREF, user_info)])
    expected.records.append(box_x.build_account_record(
        uid, box_x.USER_INFO_PREF, parse_json_document(user_info),
        Provenance(my_rel, box_x.USER_INFO_PREF, uid)))

    dl_salt_entries = {"111": b64encode(salt_111).decode("ascii"),
                       "112": b64encode(salt_112).decode("ascii")}
    dl_rel = writer.write_prefs(
        f"{private}/shared_prefs/DOWNLOAD_SALTS{uid}.xml",
        [_pref(name, value) for name, value in sorted(dl_salt_entries.items())])
    expected.records.append(box_x.build_salts_record(
        uid, f"DOWNLOAD_SALTS{uid}", dict(sorted(dl_salt_entries.items())),
        Provenance(dl_rel, "prefs", f"DOWNLOAD_SALTS{uid}")))

    pv_salt_entries = {"111": b64encode(salt_p111).decode("ascii")}
    pv_rel = writer.write_prefs(
        f"{private}/shared_prefs/PREVIEW_SALTS{uid}.xml",
        [_pref(name, value) for name, value in sorted(pv_salt_entries.items())])
    expected.records.append(box_x.build_salts_record(
        uid, f"PREVIEW_SALTS{uid}", dict(sorted(pv_salt_entries.items())),
        Provenance(pv_rel, "prefs", f"PREVIEW_SALTS{uid}")))

    event_types = ("ITEM_PREVIEW", "ITEM_UPLOAD", "ITEM_DOWNLOAD",
                   "ITEM_CREATE", "ITEM_SHARED")
    event_rows = [{
        "source_item_type": "file", "event_owner_id": uid,
        "event_type": event_types[i % len(event_types)],
        "source_item_id": "111", "created_at": BASE_TS + (7 + i) * HOUR,
        "user_dismissed": 0, "parent_id": "", "name": f"event_40{i}",
        "modified_at": 0, "size": 0.0, "id": f"40{i}",
    } for i in range(spec.events)]
    file_rows = [
        {"parent_id": "0", "name": "citrus0.pdf", "modified_at": BASE_TS + 8 * HOUR,
         "size": len(content_111), "id": "111"},
        {"parent_id": "0", "name": "violet1.txt", "modified_at": BASE_TS + 9 * HOUR,
         "size": len(content_112), "id": "112"},
    ]
    folder_rows = [{"parent_id": "", "name": "All Files",
                    "modified_at": BASE_TS + 1 * HOUR,
                    "size": len(content_111) + len(content_112), "id": "0"}]
    recent_rows = [{"item_id": "111", "item_type": "file",
                    "recent_item_id": "111", "user_dismissed": "0",
                    "timestamp": BASE_TS + 10 * HOUR, "id": "file_111"}]
    comment_rows = [{"created_at": _iso(BASE_TS + 11 * HOUR), "item_id": "111",
                     "item_type": "file", "id": "300"}]
    rel = writer.write_sqlite(
        f"{private}/databases/BoxSQLiteDB_{uid}",
        [(BOX_SQLITE_DB.table("BoxEvent"), event_rows),
         (BOX_SQLITE_DB.table("BoxFile"), file_rows),
         (BOX_SQLITE_DB.table("BoxFolder"), folder_rows),
         (BOX_SQLITE_DB.table("BoxRecentFile"), recent_rows),
         (BOX_SQLITE_DB.table("BoxComment"), comment_rows)])
    for table, rows in (("BoxEvent", event_rows), ("BoxFile", file_rows),
                        ("BoxFolder", folder_rows),
                        ("BoxRecentFile", recent_rows),
                        ("BoxComment", comment_rows)):
        _expect_rows(expected, "box", uid, box_x.TABLE_MAPS[table], rows, rel)

    thumb_ts = BASE_TS + 10 * HOUR
    thumb_name = f"file_111_{thumb_ts}_128x128.png"
    imagecache_rows = [{"_id": 1, "timestamp": thumb_ts,
                        "url": "file_111_1_small",
                        "image_filename": thumb_name}]
    rel = writer.write_sqlite(f"{private}/databases/imagecachedb",
                              [(BOX_IMAGECACHE_DB.table("files"), imagecache_rows)])
    _expect_rows(expected, "box", uid, box_x.TABLE_MAPS["files"],
                 imagecache_rows, rel)

    # levelDB store: current items in the log, stale/deleted ones compacted
    created_by = ('{"type": "user", "login": "bob@example.com", '
                  '"name": "bob@example.com", "id": "' + uid + '"}')
    permissions = ('{"can_comment": true, "can_delete": true, '
                   '"can_download": true, "can_preview": true, '
                   '"can_rename": true, "can_set_share_access": true, '
                   '"can_share": true, "can_upload": true}')
    parent = '{"type": "folder", "name": "All Files", "id": "0"}'
    docs = {
        "boxitem://file/111": (
            '{"type": "file", "parent": ' + parent + ', "permissions": '
            + permissions + ', "sha1": "' + sha_111 + '", '
            '"name": "citrus0.pdf", "size": 2.048E3, "id": "111", '
            '"path_collection": [' + parent + '], '
            '"shared_link": {"access": "open", '
            '"url": "https://app.box.invalid/s/fixtureshare", '
            '"download_count": 3, '
            '"download_url": "https://app.box.invalid/shared/static/f.pdf", '
            '"preview_count": 5, "is_password_enabled": false, '
            '"permissions": {"can_download": true, "can_preview": true}}, '
            '"comment_count": 1, '
            '"content_created_at": "' + _iso(BASE_TS + 2 * HOUR) + '", '
            '"content_modified_at": "' + _iso(BASE_TS + 8 * HOUR) + '", '
            '"modified_by": ' + created_by + ', '
            '"owned_by": ' + created_by + '}'),
        "boxitem://file/112": (
            '{"type": "file", "parent": ' + parent + ', "permissions": '
            + permissions + ', "sha1": "' + sha_112 + '", '
            '"name": "violet1.txt", "size": 1.024E3, "id": "112", '
            '"path_collection": [' + parent + '], "comment_count": 0, '
            '"content_created_at": "' + _iso(BASE_TS + 3 * HOUR) + '", '
            '"content_modified_at": "' + _iso(BASE_TS + 9 * HOUR) + '", '
            '"modified_by": ' + created_by + ', '
            '"owned_by": ' + created_by + '}'),
        "boxitem://folder/200": (
            '{"type": "folder", "permissions": ' + permissions + ', '
            '"name": "Shared", "size": 1.0E4, "id": "200", '
            '"path_collection": [' + parent + '], '
            '"has_collaborations": false, '
            '"modified_by": ' + created_by + ', '
            '"owned_by": ' + created_by + '}'),
        "boxitem://comment/300": (
            '{"type": "comment", "item": {"type": "file", "id": "111"}, '
            '"message": "Looks good to me", "id": "300", '
            '"created_by": ' + created_by + ', "is_reply_comment": false, '
            '"created_at": "' + _iso(BASE_TS + 11 * HOUR) + '"}'),
        "boxitem://event/400": (
            '{"type": "event", "source": {"type": "file", "id": "111"}, '
            '"event_type": "ITEM_PREVIEW", "event_id": "400", '
            '"created_by": ' + created_by + ', '
            '"created_at": "' + _iso(BASE_TS + 7 * HOUR) + '"}'),
    }
    leveldb_dir = writer.mkdir(f"{private}/files/leveldb{uid}")
    stale = {b"boxitem://file/111": b'{"type": "file", "name": "stale.pdf", "id": "111"}',
             b"boxitem://file/999": b'{"type": "file", "name": "deleted.pdf", "id": "999"}'}
    write_leveldb({key.encode(): value.encode() for key, value in docs.items()},
                  leveldb_dir, deletes=(b"boxitem://file/999",), compacted=stale)
    leveldb_rel = writer.rel(f"{private}/files/leveldb{uid}")
    for key in sorted(docs):
        item_type, item_id = key[len("boxitem://"):].split("/", 1)
        sink = []
        expected.records.append(box_x.build_boxitem_record(
            uid, item_type, item_id, parse_json_document(docs[key]),
            Provenance(leveldb_rel, key, item_id), 0, sink))
        _no_warnings(sink, f"box:{key}")

    # private previews and thumbnails
    private_preview = b"\xff\xd8\xff\xe0 private preview bytes"
    pp_rel = writer.write_bytes(
        f"{private}/files/previews/preview_111_1_320_jpg", private_preview)
    expected.findings.append(CacheFileFinding(
        app="box", user_scope=uid, path=pp_rel,
        naming={"kind": "box_preview_private", "file_id": "111", "size": 320,
                "ext": "jpg"},
        encrypted=False, size_bytes=len(private_preview)))

    thumb_data = b"\x89PNG fixture thumbnail"
    th_rel = writer.write_bytes(f"{private}/files/thumbnails/{thumb_name}",
                                thumb_data)
    expected.findings.append(CacheFileFinding(
        app="box", user_scope=uid, path=th_rel,
        naming={"kind": "box_thumbnail", "category": "file", "item_id": "111",
                "timestamp_ms": thumb_ts, "dims": "128x128", "ext": "png"},
        encrypted=False, size_bytes=len(thumb_data)))
    avatar_name = f"avatar_{uid}_{BASE_TS + 1 * HOUR}.png"
    avatar_data = b"\x89PNG fixture avatar"
    av_rel = writer.write_bytes(f"{private}/files/thumbnails/{avatar_name}",
                                avatar_data)
    expected.findings.append(CacheFileFinding(
        app="box", user_scope=uid, path=av_rel,
        naming={"kind": "box_thumbnail", "category": "avatar", "item_id": uid,
                "timestamp_ms": BASE_TS + 1 * HOUR, "ext": "png"},
        encrypted=False, status="orphan", size_bytes=len(avatar_data)))

    # encrypted external cache
    for subdir, content, file_id, salt, sha in (
            ("dl_cache", content_111, "111", salt_111, sha_111),
            ("dl_offline", content_112, "112", salt_112, sha_112)):
        blob = box_encrypt(content, BoxCryptoParams(
            app_encryption_key=encryption_key, file_id=file_id, salt=salt))
        name = f"{file_id}_{sha}"
        rel = writer.write_bytes(f"{external}/{uid}/cache/{subdir}/{name}", blob)
        out_rel = f"box/{uid}/{subdir}/{name}"
        expected.findings.append(CacheFileFinding(
            app="box", user_scope=uid, path=rel,
            naming={"kind": "box_cache", "file_id": file_id, "sha1": sha},
            encrypted=True, decrypted_to=out_rel, verified_hash=("sha1", True),
            size_bytes=len(blob)))
        expected.hash_verdicts[rel] = "match"
        expected.decrypted_sha1[out_rel] = sha

    preview_name = "preview_111_1_320.jpg"
    blob = box_encrypt(preview_bytes, BoxCryptoParams(
        app_encryption_key=encryption_key, file_id="111", salt=salt_p111))
    rel = writer.write_bytes(f"{external}/{uid}/cache/previews/{preview_name}", blob)
    out_rel = f"box/{uid}/previews/{preview_name}"
    expected.findings.append(CacheFileFinding(
        app="box", user_scope=uid, path=rel,
        naming={"kind": "box_preview", "file_id": "111", "scale": 1,
                "page": 320, "ext": "jpg"},
        encrypted=True, decrypted_to=out_rel, size_bytes=len(blob)))
    expected.decrypted_sha1[out_rel] = hashlib.sha1(preview_bytes).hexdigest()


# ---------------------------------------------------------------------------
# OneDrive
# ---------------------------------------------------------------------------

def gen_onedrive(spec, writer, rng, expected, dump_entries) -> None:
    from .generator import UIDS, WORDS, _pref
    cid = UIDS["onedrive"]
    secrets = spec.secrets
    pkg = "com.microsoft.skydrive"
    private = f"/data/data/{pkg}"
    external = f"/sdcard/Android/data/{pkg}"

    cache_bytes = b"onedrive cached file body " + bytes(
        rng.randrange(32, 127) for _ in range(998))

    item_rows = []
    for i in range(spec.files):
        name = f"{WORDS[i % len(WORDS)]}{i}.txt"
        item_rows.append({
            "_id": i + 1, "parentRid": "root", "ownerCid": cid,
            "resourceId": f"RID!{100 + i}", "parentId": 0,
            "downloadUrl": f"https://apis.live.invalid/v5.0/RID!{100 + i}/content",
            "extension": "txt",
            "lastAccess": BASE_TS + (2 + i) * HOUR,
            "modifiedDateOnClient": BASE_TS + (3 + i) * HOUR,
            "creationDate": BASE_TS + (1 + i) * HOUR,
            "name": name, "ownerName": "Carol Jones",
            "sharingLevel": "Just Me",
            "size": len(cache_bytes) if i == 0 else 512 + i,
            "size_text": "1 KB", "totalCount": 0,
            "contentType": "text/plain", "eTag": f"RID!{100 + i}.{i}",
        })
    rel = writer.write_sqlite(f"{private}/databases/metadata",
                              [(ONEDRIVE_METADATA_DB.table("items"), item_rows)])
    _expect_rows(expected, "onedrive", cid, onedrive_x.TABLE_MAPS["items"],
                 item_rows, rel)

    cached_rows = [{
        "id": 7, "cache_id": "RID!100Download",
        "skydrive_url": item_rows[0]["downloadUrl"], "etag": "RID!100.0",
        "last_access_time": BASE_TS + 5 * HOUR,
        "file_size_bytes": len(cache_bytes), "is_at_internal_storage": "",
    }]
    rel = writer.write_sqlite(
        f"{private}/databases/cached_files_md.db",
        [(ONEDRIVE_CACHED_FILES_DB.table("cached_files_metadata"), cached_rows)])
    _expect_rows(expected, "onedrive", cid,
                 onedrive_x.TABLE_MAPS["cached_files_metadata"], cached_rows, rel)

    auto_rows = [{"_id": 1, "creationDate": BASE_TS + 6 * HOUR,
                  "fileName": "20140501120000Android.jpg",
                  "fileNameOriginal": "IMG_0001.jpg",
                  "filePath": "/sdcard/DCIM/Camera/IMG_0001.jpg",
                  "fileSize": 4096, "loadingProgress": 0}]
    rel = writer.write_sqlite(f"{private}/databases/auto_upload.db",
                              [(ONEDRIVE_AUTO_UPLOAD_DB.table("queue"), auto_rows)])
    _expect_rows(expected, "onedrive", cid, onedrive_x.TABLE_MAPS["auto_queue"],
                 auto_rows, rel)

    manual_rows = [{"_id": 1, "fileName": "20140501130000Android.jpg",
                    "filePath": "/sdcard/DCIM/Camera/IMG_0002.jpg",
                    "fileSize": 2048, "folderOwnerCid": cid,
                    "folderResourceId": "RID!100", "loadingProgress": 2048}]
    rel = writer.write_sqlite(f"{private}/databases/manual_upload_db",
                              [(ONEDRIVE_MANUAL_UPLOAD_DB.table("queue"),
                                manual_rows)])
    _expect_rows(expected, "onedrive", cid,
                 onedrive_x.TABLE_MAPS["manual_queue"], manual_rows, rel)

    # app-config prefs of no evidentiary interest, present for realism
    for i in range(5):
        writer.write_prefs(f"{private}/shared_prefs/skydrive_config{i}.xml",
                           [_pref(f"setting{i}", f"value{i}"),
                            _pref(f"flag{i}", i % 2 == 0)])

    cache_rel = writer.write_bytes(
        f"{external}/cache/SkyDriveCacheFile_7.cachedata", cache_bytes)
    expected.findings.append(CacheFileFinding(
        app="onedrive", user_scope=cid, path=cache_rel,
        naming={"kind": "onedrive_cache", "cache_id": 7,
                "cache_id_row": "RID!100Download"},
        size_bytes=len(cache_bytes)))
    expected.decrypted_sha1[cache_rel] = hashlib.sha1(cache_bytes).hexdigest()

    orphan_bytes = b"orphaned cache data"
    orphan_rel = writer.write_bytes(
        f"{external}/cache/SkyDriveCacheFile_99.cachedata", orphan_bytes)
    expected.findings.append(CacheFileFinding(
        app="onedrive", user_scope=cid, path=orphan_rel,
        naming={"kind": "onedrive_cache", "cache_id": 99},
        status="orphan", size_bytes=len(orphan_bytes)))

    entry = AccountDumpEntry(
        package=pkg, account_name="carol@example.com",
        password=secrets.onedrive_refresh_token,
        userdata={"scope": secrets.onedrive_scope, "user_id": cid,
                  "account_type": "com.microsoft.skydrive",
                  "expires_at": str(BASE_TS + 24 * HOUR)},
        authtokens={"refresh": secrets.onedrive_refresh_token,
                    "access": secrets.onedrive_access_token})
    dump_entries.append(entry)
    expected.records.append(onedrive_x.build_dump_account_record(
        cid, entry, Provenance(ACCOUNTS_DUMP_PATH, "accountmanager",
                               "carol@example.com")))
    expected.credentials.append(CredentialRecord(
        app="onedrive", user_scope=cid, kind=KIND_OAUTH2,
        fields={"refresh_token": secrets.onedrive_refresh_token,
                "access_token": secrets.onedrive_access_token,
                "scope": secrets.onedrive_scope, "user_id": cid,
                "account_type": "com.microsoft.skydrive",
                "expires_at_utc_ms": BASE_TS + 24 * HOUR,
                "client_id": secrets.onedrive_client_id},
        completeness=REPLAYABLE, provenance=[ACCOUNTS_DUMP_PATH]))


# ---------------------------------------------------------------------------
# ownCloud
# ---------------------------------------------------------------------------

def gen_owncloud(spec, writer, rng, expected, dump_entries) -> None:
    from .generator import UIDS, WORDS, _pref
    account = UIDS["owncloud"]
    username, server = account.split("@", 1)
    secrets = spec.secrets
    pkg = "com.owncloud.android"
    private = f"/data/data/{pkg}"

    prefs_entries = [
        _pref("instant_upload_on_wifi", False),
        _pref("instant_uploading", True),
        _pref("select_oc_account", account),
        _pref("set_pincode", True),
        _pref("PrefPinCode1", "1"), _pref("PrefPinCode2", "2"),
        _pref("PrefPinCode3", "3"), _pref("PrefPinCode4", "4"),
    ]
    prefs_rel = writer.write_prefs(
        f"{private}/shared_prefs/{owncloud_x.PREFS_FILE}", prefs_entries)
    directives = {e.name: e.value for e in prefs_entries}
    expected.records.append(owncloud_x.build_prefs_record(
        account, directives,
        Provenance(prefs_rel, "prefs", owncloud_x.PREFS_FILE)))
    expected.credentials.append(CredentialRecord(
        app="owncloud", user_scope=account, kind=KIND_PIN,
        fields={"pin": "1234"}, completeness=PARTIAL,
        provenance=[prefs_rel, ACCOUNTS_DUMP_PATH]))

    mirror_root = f"/sdcard/owncloud/{account}"
    file_contents = {}
    filelist_rows = [{
        "_id": 1, "filename": "Documents", "path": "/Documents/", "parent": 0,
        "modified": BASE_TS + 1 * HOUR, "content_type": "DIR",
        "media_path": None, "file_owner": account,
        "last_sync_date": BASE_TS + 2 * HOUR, "keep_in_sync": 0,
        "last_sync_date_for_data": None,
        "modified_at_last_sync_date_for_data": None, "share_by_link": 0,
        "etag": "5366a3790c3e1",
    }]
    for i in range(spec.files):
        name = f"{WORDS[(i + 3) % len(WORDS)]}{i}.txt"
        content = f"owncloud synced file {i}\n".encode() * (i + 2)
        file_contents[name] = content
        filelist_rows.append({
            "_id": 2 + i, "filename": name, "path": f"/Documents/{name}",
            "parent": 1, "modified": BASE_TS + (2 + i) * HOUR,
            "content_type": "text/plain",
            "media_path": f"{mirror_root}/Documents/{name}",
            "file_owner": account,
            "last_sync_date": BASE_TS + (3 + i) * HOUR,
            "keep_in_sync": 1 if i == 0 else 0,
            "last_sync_date_for_data": BASE_TS + (3 + i) * HOUR,
            "modified_at_last_sync_date_for_data": BASE_TS + (2 + i) * HOUR,
            "share_by_link": 1 if i == 0 else 0,
            "etag": None,
        })
    ocshares_rows = []
    for i in range(spec.shares):
        ocshares_rows.append({
            "_id": 1 + i, "file_source": 2, "item_source": 2,
            "shate_with": "$2a$08$fixtureblowfishhashvalue" if i == 0 else "",
            "path": filelist_rows[1]["path"],
            "shared_date": BASE_TS // 1000 + 7200 + i,
            "expiration_date": BASE_TS // 1000 + 30 * 86400,
            "token": f"sharetok{i}A", "is_directory": 0,
            "owner_share": account,
        })
    rel = writer.write_sqlite(
        f"{private}/databases/filelist",
        [(OWNCLOUD_FILELIST_DB.table("filelist"), filelist_rows),
         (OWNCLOUD_FILELIST_DB.table("ocshares"), ocshares_rows)])
    _expect_rows(expected, "owncloud", account,
                 owncloud_x.TABLE_MAPS["filelist"], filelist_rows, rel)
    _expect_rows(expected, "owncloud", account,
                 owncloud_x.TABLE_MAPS["ocshares"], ocshares_rows, rel)

    upload_rows = [{"_id": 1, "path": "/sdcard/DCIM/Camera/IMG_0003.jpg",
                    "account": account}]
    rel = writer.write_sqlite(
        f"{private}/databases/ownCloud",
        [(OWNCLOUD_MAIN_DB.table("instant_upload"), upload_rows)])
    _expect_rows(expected, "owncloud", account,
                 owncloud_x.TABLE_MAPS["instant_upload"], upload_rows, rel)

    for name, content in sorted(file_contents.items()):
        file_rel = writer.write_bytes(f"{mirror_root}/Documents/{name}", content)
        expected.findings.append(CacheFileFinding(
            app="owncloud", user_scope=account, path=file_rel,
            naming={"kind": "owncloud_mirror",
                    "server_path": f"/Documents/{name}"},
            size_bytes=len(content)))

    entry = AccountDumpEntry(package=pkg, account_name=account,
                             password=secrets.owncloud_password)
    dump_entries.append(entry)
    expected.records.append(owncloud_x.build_dump_account_record(
        account, entry, Provenance(ACCOUNTS_DUMP_PATH, "accountmanager", account)))
    expected.credentials.append(CredentialRecord(
        app="owncloud", user_scope=account, kind=KIND_BASIC,
        fields={"username": username, "password": secrets.owncloud_password,
                "server": server},
        completeness=REPLAYABLE, provenance=[prefs_rel, ACCOUNTS_DUMP_PATH]))


# ---------------------------------------------------------------------------
# Evernote
# ---------------------------------------------------------------------------

def gen_evernote(spec, writer, rng, expected, dump_entries) -> None:
    from .generator import UIDS, WORDS, _pref
    uid = UIDS["evernote"]
    pkg = "com.evernote"
    private = f"/data/data/{pkg}"
    external = f"/sdcard/Android/data/{pkg}"
    web_prefix = "https://www.evernote.invalid/shard/s1"
    db_device_path = f"{external}/files/user-{uid}/user-{uid}.db"

    note_guids = [_guid(rng) for _ in range(max(spec.notes, 1))]
    notebook_guid = _guid(rng)
    tag_guids = [_guid(rng), _guid(rng)]
    resource_guid = _guid(rng)
    resource_hash = bytes.fromhex("ab01") + rng.randbytes(14)
    resource_bytes = b"\x89PNG evernote resource image"
    encrypted_authtoken = b64encode(rng.randbytes(48)).decode("ascii")

    body0 = " ".join(WORDS[(i * 5) % len(WORDS)] for i in range(90))[:500]
    bodies = [body0] + [f"short note body {i}" for i in range(1, len(note_guids))]

    user_pref_entries = [
        _pref("userid", int(uid)),
        _pref("username", "dave"),
        _pref("encrypted_authtoken", encrypted_authtoken),
        _pref("default_notebook", notebook_guid),
        _pref("AcctInfoWebPrefixUrl", web_prefix),
        _pref("email", "dave@example.com"),
        _pref("LAST_USER_OBJECT_SYNC_TIME", BASE_TS + 2 * HOUR, tag="long"),
        _pref("LAST_DB_FILEPATH", db_device_path),
        _pref("Last_server_acc_info_timestamp", BASE_TS + 1 * HOUR, tag="long"),
        _pref("AcctInfoNoteStoreUrl", f"{web_prefix}/notestore"),
    ]
    user_prefs_rel = writer.write_prefs(
        f"{private}/shared_prefs/{uid}.pref.xml", user_pref_entries)
    sink: list = []
    expected.records.append(evernote_x.build_user_prefs_record(
        uid, {e.name: e.value for e in user_pref_entries},
        Provenance(user_prefs_rel, "prefs", f"{uid}.pref"), 0, sink))
    _no_warnings(sink, "evernote:user_prefs")
    expected.credentials.append(CredentialRecord(
        app="evernote", user_scope=uid, kind=KIND_ENCRYPTED,
        fields={"encrypted_authtoken": encrypted_authtoken},
        completeness=OPAQUE, provenance=[user_prefs_rel],
        note="x-thrift replay requires undocumented binary body"))

    counts_entries = [
        _pref("places", 0), _pref("notes", len(note_guids)),
        _pref("sktiches", 0), _pref("tags", len(tag_guids)),
        _pref("notebooks", 1), _pref("snotes", 0),
        _pref("linked notebooks", 0),
    ]
    counts_rel = writer.write_prefs(
        f"{private}/shared_prefs/{uid}_counts.pref.xml", counts_entries)
    expected.records.append(evernote_x.build_config_record(
        uid, "counts", {e.name: e.value for e in counts_entries},
        Provenance(counts_rel, "prefs", "counts")))

    sync_entries = [_pref("SYNC_STATUS_MSG", "Last sync: 1 May 12:00 pm")]
    sync_rel = writer.write_prefs(
        f"{private}/shared_prefs/{uid}_sync_state.pref.xml", sync_entries)
    expected.records.append(evernote_x.build_config_record(
        uid, "sync_state", {e.name: e.value for e in sync_entries},
        Provenance(sync_rel, "prefs", "sync_state")))

    main_entries = [_pref("PREF_USERID_LIST", uid),
                    _pref("PREF_ACTIVE_USERID", int(uid)),
                    _pref("last_viewed_notes", note_guids[0])]
    main_rel = writer.write_prefs(
        f"{private}/shared_prefs/com.evernote_preferences.xml", main_entries)
    expected.records.append(evernote_x.build_config_record(
        uid, "preferences", {e.name: e.value for e in main_entries},
        Provenance(main_rel, "prefs", "preferences")))

    log_messages = ["user login succeeded", "note opened",
                    "note stored to server", "file attached",
                    "sync completed"]
    log_lines = []
    for i in range(spec.events):
        ts = _iso(BASE_TS + (1 + i) * HOUR)
        log_lines.append(f"{ts} uid={uid} {log_messages[i % len(log_messages)]}")
    log_rel = writer.write_text(f"{private}/files/.logs/log_file.txt",
                                "\n".join(log_lines) + "\n")
    for lineno, line in enumerate(log_lines, start=1):
        sink = []
        expected.records.append(evernote_x.build_log_event(
            uid, lineno, line, Provenance(log_rel, "log", str(lineno)), 0, sink))
        _no_warnings(sink, "evernote:log")

    user_dat = b"\xac\xed\x00\x05 fixture serialized blob"
    dat_rel = writer.write_bytes(f"{private}/files/.usercache/user.dat", user_dat)
    expected.records.append(evernote_x.build_opaque_record(
        uid, "user.dat", len(user_dat), Provenance(dat_rel, "file", "user.dat")))

    thumb_bytes = b"\xff\xd8\xff\xe0 evernote thumbnail cache"
    thumb_rel = writer.write_bytes(
        f"{external}/files/user-{uid}/mapthumbdb/thumbnails_data_1.dat",
        thumb_bytes)
    expected.records.append(evernote_x.build_thumbdb_record(
        uid, len(thumb_bytes),
        Provenance(thumb_rel, "file", "thumbnails_data_1.dat")))

    # external note directories
    note_dir_files: dict[str, list[str]] = {}
    for i, guid in enumerate(note_guids):
        base = f"{external}/files/notes/{guid[:3]}/{guid}"
        enml = ('<?xml version="1.0" encoding="UTF-8"?>'
                f"<en-note>{bodies[i]}</en-note>")
        writer.write_text(f"{base}/content.enml", enml)
        files = ["content.enml"]
        if i == 0:
            writer.write_text(f"{base}/note.html",
                              f"<html><body>{bodies[i]}</body></html>")
            writer.write_bytes(f"{base}/{resource_hash.hex()}.dat",
                               resource_bytes)
            files += ["note.html", f"{resource_hash.hex()}.dat"]
        note_dir_files[guid] = sorted(files)
        rel = writer.rel(base)
        expected.records.append(evernote_x.build_note_dir_record(
            uid, guid, sorted(files), Provenance(rel, "note_dir", guid)))

    # the external database
    notes_rows = []
    for i, guid in enumerate(note_guids):
        body = bodies[i]
        notes_rows.append({
            "guid": guid, "notebook_guid": notebook_guid,
            "title": f"Note {i}", "content_length": len(body),
            "content_hash": hashlib.md5(body.encode()).digest(),
            "created": BASE_TS + (1 + i) * HOUR,
            "updated": BASE_TS + (2 + i) * HOUR,
            "deleted": 0, "is_active": 1, "cached": 1,
            "city": "Adelaide", "state": "SA", "country": "AU",
            "latitude": -34.9, "longitude": 138.6, "altitude": 50.0,
            "source": "mobile.android",
            "source_url": "https://evernote.invalid/",
            "note_share_date": BASE_TS + 3 * HOUR if i < spec.shares else 0,
            "note_share_key": f"shkey{i}" if i < spec.shares else None,
            "task_date": 0, "task_complete_date": 0, "task_due_date": 0,
        })
    guid_rows = [{"new_guid": note_guids[0], "old_guid": _guid(rng)}]
    note_tag_rows = [{"note_guid": note_guids[0], "tag_guid": tag_guids[0]}]
    notebook_rows = [{"guid": notebook_guid, "name": "First Notebook",
                      "published": 0}]
    resource_rows = [{
        "guid": resource_guid, "note_guid": note_guids[0],
        "mime": "image/png", "width": 100, "height": 80,
        "hash": resource_hash, "cached": 1, "length": len(resource_bytes),
        "has_recognition": 0, "timestamp": BASE_TS + 4 * HOUR,
        "filename": "px.png", "reco_cached": 0, "ink_signature": None,
    }]
    search_rows = [{"query": "meeting notes", "updated": BASE_TS + 5 * HOUR}]
    index_rows = [{"c0note_guid": note_guids[0], "c1content_id": resource_guid,
                   "c3keywords": body0[:60]}]
    snippet_rows = [{"note_guid": guid, "mime_type": "text/plain",
                     "res_count": 1 if i == 0 else 0,
                     "snippet": bodies[i][:evernote_x.SNIPPET_LENGTH]}
                    for i, guid in enumerate(note_guids)]
    tag_rows = [{"guid": tag_guids[0], "name": "work"},
                {"guid": tag_guids[1], "name": "home"}]

    db_rel = writer.write_sqlite(db_device_path, [
        (EVERNOTE_USER_DB.table("guid_updates"), guid_rows),
        (EVERNOTE_USER_DB.table("note_tag"), note_tag_rows),
        (EVERNOTE_USER_DB.table("notebooks"), notebook_rows),
        (EVERNOTE_USER_DB.table("notes"), notes_rows),
        (EVERNOTE_USER_DB.table("resources"), resource_rows),
        (EVERNOTE_USER_DB.table("search_history"), search_rows),
        (EVERNOTE_USER_DB.table("search_index_content"), index_rows),
        (EVERNOTE_USER_DB.table("snippets"), snippet_rows),
        (EVERNOTE_USER_DB.table("tags"), tag_rows),
    ])
    for table, rows in (("guid_updates", guid_rows), ("note_tag", note_tag_rows),
                        ("notebooks", notebook_rows), ("notes", notes_rows),
                        ("search_history", search_rows),
                        ("search_index_content", index_rows),
                        ("tags", tag_rows)):
        _expect_rows(expected, "evernote", uid, evernote_x.TABLE_MAPS[table],
                     rows, db_rel)
    for i, row in enumerate(notes_rows):
        if row.get("note_share_key"):
            sink = []
            expected.records.append(evernote_x.build_share_record(
                uid, row, web_prefix,
                Provenance(db_rel, "notes:share", row["guid"]), 0, sink))
            _no_warnings(sink, "evernote:share")
    for index, row in enumerate(snippet_rows):
        sink = []
        prov = row_provenance(db_rel, evernote_x.TABLE_MAPS["snippets"], row, index)
        expected.records.append(evernote_x.build_snippet_record(
            uid, row, True, prov, 0, sink))
        _no_warnings(sink, "evernote:snippets")
    for index, row in enumerate(resource_rows):
        sink = []
        prov = row_provenance(db_rel, evernote_x.TABLE_MAPS["resources"], row, index)
        expected.records.append(evernote_x.build_resource_record(
            uid, row, True, prov, 0, sink))
        _no_warnings(sink, "evernote:resources")


# ---------------------------------------------------------------------------
# OneNote
# ---------------------------------------------------------------------------

def gen_onenote(spec, writer, rng, expected, dump_entries) -> None:
    from .generator import UIDS, _pref
    live_id = UIDS["onenote"]
    secrets = spec.secrets
    pkg = "com.microsoft.office.onenote"
    private = f"/data/data/{pkg}"
    external = f"/sdcard/Android/data/{pkg}"

    notebook_guid = _guid(rng)
    section_guids = [_guid(rng) for _ in range(2)]
    note_guids = [_guid(rng) for _ in range(max(spec.notes, 1))]

    prefs_entries = [_pref("KEY_RESUME_VIEW_ID", notebook_guid),
                     _pref("DEFAULT_LIVE_ID", live_id)]
    prefs_rel = writer.write_prefs(
        f"{private}/shared_prefs/{onenote_x.PREFS_FILE}", prefs_entries)
    expected.records.append(onenote_x.build_prefs_record(
        live_id, {e.name: e.value for e in prefs_entries},
        Provenance(prefs_rel, "prefs", onenote_x.PREFS_FILE)))
    writer.write_prefs(f"{private}/shared_prefs/{pkg}.eula2.xml",
                       [_pref("eulaAccepted", True)])

    spm_dir = f"{private}/files/Microsoft/Office Mobile/SPM Data"
    registry_value = f"{private}/files/Microsoft/Office Mobile/SPM Data"
    registry_xml = ("<registry>\n"
                    f'    <key name="SQL DB Path" value="{registry_value}" />\n'
                    "</registry>\n")
    registry_rel = writer.write_text(f"{private}/files/registry.xml", registry_xml)
    expected.records.append(onenote_x.build_registry_record(
        live_id, {"SQL DB Path": registry_value},
        Provenance(registry_rel, "registry", "registry.xml")))

    store_base = f"{spm_dir}/File Store/1000/https/d.docs.live.net/{live_id}"
    for guid in section_guids:
        data = b"ONE fixture section " + guid.encode()
        rel = writer.write_bytes(f"{store_base}/{guid}.one", data)
        expected.records.append(onenote_x.build_section_file_record(
            live_id, guid, len(data), Provenance(rel, "file_store", guid)))

    dav_root = f"https://d.docs.live.invalid/{live_id}"
    config_rows = [
        {"FieldName": "NewDefaultNotebookName", "FieldValue": "Carol's Notebook"},
        {"FieldName": "SkyDriveRootDavUrl", "FieldValue": f"{dav_root}/Documents"},
        {"FieldName": "SkyDriveSignedInUser", "FieldValue": live_id},
    ]
    items_rows = [
        {"ObjectID": notebook_guid, "ListID": _guid(rng), "FolderID": "",
         "SiteID": _guid(rng), "ContentType": "Folder",
         "Created": "20140501 09:00:00", "Modified": "20140501 10:00:00",
         "FileDirRef": "/Documents", "ProgId": "OneNote.Notebook",
         "ServerUrl": "/Documents/Carol's Notebook",
         "EncodedAbsUrl": f"{dav_root}/Documents/Carol%27s%20Notebook",
         "LinkFileName": "Carol's Notebook", "FileType": "",
         "Etag": "20140501 10:00:00", "FileSize": None,
         "LevelDescription": "Shared with: Just me"},
        {"ObjectID": section_guids[0], "ListID": _guid(rng), "FolderID": notebook_guid,
         "SiteID": _guid(rng), "ContentType": "Document",
         "Created": "20140501 10:00:00", "Modified": "20140501 11:00:00",
         "FileDirRef": "/Documents/Carol's Notebook", "ProgId": "",
         "ServerUrl": "/Documents/Carol's Notebook/Quick Notes.one",
         "EncodedAbsUrl": f"{dav_root}/Documents/Carol%27s%20Notebook/Quick%20Notes.one",
         "LinkFileName": "Quick Notes.one", "FileType": "one",
         "Etag": "20140501 11:00:00", "FileSize": 4096,
         "LevelDescription": "Shared with: Just me"},
    ]
    objects_rows = [{
        "ObjectID": section_guids[0], "LastSyncTime": "20140501 11:30:00",
        "Deleted": 0, "IsOnServer": 1,
        "LastSuccessfulSyncTime": "20140501 11:30:00",
        "DisplayTitle": "Quick Notes.one",
        "UrlString": f"serialized:{section_guids[0]}",
        "ResId": section_guids[0], "CreatedTime": "20140501 10:00:00",
    }]
    rel = writer.write_sqlite(f"{spm_dir}/SPSQLStore.sdf", [
        (ONENOTE_SPSQL_DB.table("SPMConfigData"), config_rows),
        (ONENOTE_SPSQL_DB.table("SPMCIItems"), items_rows),
        (ONENOTE_SPSQL_DB.table("SPMCOjects"), objects_rows),
    ])
    for table, rows in (("SPMConfigData", config_rows),
                        ("SPMCIItems", items_rows),
                        ("SPMCOjects", objects_rows)):
        _expect_rows(expected, "onenote", live_id, onenote_x.TABLE_MAPS[table],
                     rows, rel)

    onm_config_rows = [
        {"FieldName": "UnfiledSectionID", "FieldValue": section_guids[1]},
        {"FieldName": "SkyDriveDefaultNotebookID", "FieldValue": notebook_guid},
        {"FieldName": "LastSuccessfulUpdateNBListTime",
         "FieldValue": "20140501 11:00:00"},
    ]
    notebook_rows = [
        {"ObjectID": notebook_guid, "ParentID": notebook_guid,
         "ParentNoteBookID": notebook_guid, "Name": "Carol's Notebook",
         "DisplayName": "Carol's Notebook",
         "LastAccessTime": "19000101 12:00:00",
         "LastModifiedTime": "20140501 10:00:00"},
        {"ObjectID": section_guids[0], "ParentID": notebook_guid,
         "ParentNoteBookID": notebook_guid, "Name": "Quick Notes",
         "DisplayName": "Quick Notes",
         "LastAccessTime": "19000101 12:00:00",
         "LastModifiedTime": "20140501 11:00:00"},
    ]
    section_rows = []
    for i, guid in enumerate(note_guids):
        section_rows.append({
            "ObjectID": guid, "JotID": _guid(rng),
            "ParentID": section_guids[0], "Name": f"Idea {i}",
            "LastAccessTime": "19000101 12:00:00" if i == 0
            else f"20140501 12:{30 + i:02d}:00",
            "LastModifiedTime": f"20140501 12:{45 + i:02d}:00",
            "Viewed": 1, "CreationTime": "20140501 12:00:00",
        })
    rel = writer.write_sqlite(f"{private}/files/OneNote/hierarchy.sdf", [
        (ONENOTE_HIERARCHY_DB.table("OnmConfigData"), onm_config_rows),
        (ONENOTE_HIERARCHY_DB.table("OnmNotebookContent"), notebook_rows),
        (ONENOTE_HIERARCHY_DB.table("OnmSectionContent"), section_rows),
    ])
    for table, rows in (("OnmConfigData", onm_config_rows),
                        ("OnmNotebookContent", notebook_rows),
                        ("OnmSectionContent", section_rows)):
        _expect_rows(expected, "onenote", live_id, onenote_x.TABLE_MAPS[table],
                     rows, rel)

    writer.mkdir(f"{external}/files")  # present but empty on devices

    seed = rng.randbytes(24)
    token_blob = onenote_encrypt_refresh_token(
        secrets.onenote_refresh_token, seed, secrets.onenote_key_material)
    entry = AccountDumpEntry(
        package=pkg, account_name=live_id,
        password=secrets.onenote_key_material,
        userdata={"_SEED": b64encode(seed).decode("ascii"),
                  "_PASSWORD": b64encode(token_blob).decode("ascii"),
                  "_ID": live_id, "LIVE_ID_FRIENDLY_NAME": "Carol Jones",
                  "_LAST_MODIFIED": str(BASE_TS + 12 * HOUR),
                  "scope": "office.onenote_update", "user_id": live_id})
    dump_entries.append(entry)
    expected.credentials.append(CredentialRecord(
        app="onenote", user_scope=live_id, kind=KIND_OAUTH2,
        fields={"refresh_token": secrets.onenote_refresh_token,
                "scope": "office.onenote_update", "user_id": live_id,
                "client_id": secrets.onedrive_client_id},
        completeness=REPLAYABLE, provenance=[ACCOUNTS_DUMP_PATH]))


# ---------------------------------------------------------------------------
# UPM
# ---------------------------------------------------------------------------

def gen_upm(spec, writer, rng, expected, dump_entries) -> None:
    from .generator import UIDS, _pref
    uid = UIDS["upm"]
    secrets = spec.secrets
    pkg = "com.u17od.upm"
    private = f"/data/data/{pkg}"

    sync_entries = [_pref("sync.method", "dropbox")]
    sync_rel = writer.write_prefs(f"{private}/shared_prefs/UPMPrefs.xml",
                                  sync_entries)
    expected.records.append(upm_x.build_config_record(
        uid, "UPMPrefs", {"sync.method": "dropbox"},
        Provenance(sync_rel, "prefs", "UPMPrefs")))

    dbx_entries = [_pref("DROPBOX_SECRET", "upmdropboxsecret"),
                   _pref("DROPBOX_KEY", "upmdropboxkey")]
    dbx_rel = writer.write_prefs(f"{private}/shared_prefs/DROPBOX_PREFS.xml",
                                 dbx_entries)
    expected.records.append(upm_x.build_config_record(
        uid, "DROPBOX_PREFS",
        {"DROPBOX_SECRET": "upmdropboxsecret", "DROPBOX_KEY": "upmdropboxkey"},
        Provenance(dbx_rel, "prefs", "DROPBOX_PREFS")))
    expected.credentials.append(CredentialRecord(
        app="upm", user_scope=uid, kind=KIND_KEYPAIR,
        fields={"consumer_key": "upmdropboxkey",
                "consumer_secret": "upmdropboxsecret"},
        completeness=PARTIAL, provenance=[dbx_rel],
        note="app keypair only; no user token recovered"))

    entries = [{"account": "example.org", "username": "dave",
                "password": f"pw{rng.getrandbits(32):08x}"}]
    plaintext = UPM_FIXTURE_MAGIC + json.dumps(entries).encode("utf-8")
    salt = rng.randbytes(8)
    db_bytes = upm_encrypt(plaintext, secrets.upm_password, salt, header=b"UPM")
    db_rel = writer.write_bytes(f"{private}/files/upm.db", db_bytes)
    expected.records.append(upm_x.build_database_record(
        uid, b"UPM", salt, len(db_bytes), Provenance(db_rel, "upm.db", "header")))
    expected.records.append(upm_x.build_decrypted_record(
        uid, secrets.upm_password, plaintext, f"upm/{uid}/upm.db.decrypted",
        Provenance(db_rel, "upm.db", "decrypted")))
    expected.decrypted_sha1[f"upm/{uid}/upm.db.decrypted"] = \
        hashlib.sha1(plaintext).hexdigest()

    if "dropbox" in spec.apps:
        dropbox_uid = UIDS["dropbox"]
        planted = (f"/sdcard/Android/data/com.dropbox.android/files/"
                   f"{dropbox_uid}/scratch/upm.db")
        planted_rel = writer.write_bytes(planted, db_bytes)
        expected.records.append(upm_x.build_synced_copy_record(
            uid, "dropbox", planted_rel, b"UPM",
            Provenance(planted_rel, "header_scan", planted_rel)))
        expected.findings.append(CacheFileFinding(
            app="dropbox", user_scope=dropbox_uid, path=planted_rel,
            naming={"kind": "dropbox_scratch", "original_name": "upm.db"},
            size_bytes=len(db_bytes)))
