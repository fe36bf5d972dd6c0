"""Structural registry of the documented databases, tables and key layouts.

One entry per storage artifact the extractors understand, shared with the
fixture generator so synthetic trees and readers agree on names.  Column
spellings are kept exactly as found in evidence, including the ownCloud
``shate_with`` misspelling and the OneNote ``SPMCOjects`` table name.

Timestamp metadata marks which columns are timestamps, in which format,
and on which clock (device/server/unknown) where behaviour was observed.
"""

from __future__ import annotations

from dataclasses import dataclass

CLOCK_DEVICE = "device"
CLOCK_SERVER = "server"
CLOCK_UNKNOWN = "unknown"


@dataclass(frozen=True)
class Column:
    name: str
    affinity: str = "TEXT"
    ts_format: str | None = None   # reporting.FMT_* when this column is a timestamp
    clock: str = CLOCK_UNKNOWN


@dataclass(frozen=True)
class TableSchema:
    name: str
    columns: tuple[Column, ...]
    id_column: str | None = None   # provenance item; falls back to row index

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def timestamp_columns(self) -> list[Column]:
        return [c for c in self.columns if c.ts_format]


@dataclass(frozen=True)
class DatabaseSchema:
    device_path: str               # template with {uid} / {app_key} placeholders
    tables: tuple[TableSchema, ...]

    def table(self, name: str) -> TableSchema:
        for table in self.tables:
            if table.name == name:
                return table
        raise KeyError(name)


def _c(name, affinity="TEXT", ts=None, clock=CLOCK_UNKNOWN):
    return Column(name=name, affinity=affinity, ts_format=ts, clock=clock)


# ---------------------------------------------------------------------------
# Dropbox
# ---------------------------------------------------------------------------

DROPBOX_PREFS_SHARED_DB = DatabaseSchema(
    device_path="/data/data/com.dropbox.android/databases/prefs-shared.db",
    tables=(
        TableSchema("DropboxAccountPrefs", (
            _c("LAST_REPORT_HOST_TIME", "INTEGER", ts="epoch_ms", clock=CLOCK_DEVICE),
        )),
    ),
)

DROPBOX_USER_DB = DatabaseSchema(
    device_path="/data/data/com.dropbox.android/databases/{uid}-db.db",
    tables=(
        TableSchema("dropbox", (
            _c("modified_millis", "INTEGER", ts="epoch_ms", clock=CLOCK_SERVER),
            _c("bytes", "INTEGER"),
            _c("revision"),
            _c("hash"),
            _c("is_dir", "INTEGER"),
            _c("path"),
            _c("canon_path"),
            _c("mime_type"),
            _c("thumb_exists", "INTEGER"),
            _c("parent_path"),
            _c("canon_parent_path"),
            _c("_display_name"),
            _c("is_favorite", "INTEGER"),
            _c("local_modified", "INTEGER", ts="epoch_ms", clock=CLOCK_DEVICE),
            _c("local_revision"),
            _c("local_hash"),
        ), id_column="canon_path"),
        TableSchema("albums", (
            _c("col_id"),
            _c("name"),
            _c("count", "INTEGER"),
            _c("cover_image_canon_path"),
            _c("share_link"),
            _c("creation_time", "INTEGER", ts="epoch_ms"),
            _c("update_time", "INTEGER", ts="epoch_ms"),
        ), id_column="col_id"),
        TableSchema("album_item", (
            _c("col_id"),
            _c("item_id"),
            _c("canon_path"),
        ), id_column="item_id"),
        TableSchema("camera_upload", (
            _c("local_hash"),
            _c("server_hash"),
            _c("uploaded", "INTEGER"),
        ), id_column="local_hash"),
        TableSchema("pending_upload", (
            _c("class"),
            _c("data"),
        )),
        TableSchema("photos", (
            _c("item_id"),
            _c("canon_path"),
            _c("time_taken", "INTEGER", ts="epoch_ms"),
        ), id_column="item_id"),
        TableSchema("thumbnail_info", (
            _c("dropbox_canon_path"),
            _c("thumb_size"),
            _c("revision"),
        ), id_column="dropbox_canon_path"),
    ),
)

DROPBOX_NOTIFICATIONS_DB = DatabaseSchema(
    device_path=("/data/data/com.dropbox.android/app_DropboxSyncCache/"
                 "{app_key}/{uid}-notifications"),
    tables=(
        TableSchema("kv", (
            _c("key"),
            _c("value"),
        ), id_column="key"),
    ),
)

# ---------------------------------------------------------------------------
# Box
# ---------------------------------------------------------------------------

BOX_SQLITE_DB = DatabaseSchema(
    device_path="/data/data/com.box.android/databases/BoxSQLiteDB_{uid}",
    tables=(
        TableSchema("BoxEvent", (
            _c("source_item_type"),
            _c("event_owner_id"),
            _c("event_type"),
            _c("source_item_id"),
            _c("created_at", "INTEGER", ts="epoch_ms"),
            _c("user_dismissed", "INTEGER"),
            _c("parent_id"),
            _c("name"),
            _c("modified_at", "INTEGER"),  # observed constant 0, not a timestamp
            _c("size", "REAL"),
            _c("id"),
        ), id_column="id"),
        TableSchema("BoxFile", (
            _c("parent_id"),
            _c("name"),
            _c("modified_at", "INTEGER", ts="epoch_ms"),
            _c("size", "INTEGER"),
            _c("id"),
        ), id_column="id"),
        TableSchema("BoxFolder", (
            _c("parent_id"),
            _c("name"),
            _c("modified_at", "INTEGER", ts="epoch_ms"),
            _c("size", "INTEGER"),
            _c("id"),
        ), id_column="id"),
        TableSchema("BoxRecentFile", (
            _c("item_id"),
            _c("item_type"),
            _c("recent_item_id"),
            _c("user_dismissed"),
            _c("timestamp", "INTEGER", ts="epoch_ms"),
            _c("id"),
        ), id_column="id"),
        TableSchema("BoxComment", (
            _c("created_at", ts="human_readable_other"),
            _c("item_id"),
            _c("item_type"),
            _c("id"),
        ), id_column="id"),
    ),
)

BOX_IMAGECACHE_DB = DatabaseSchema(
    device_path="/data/data/com.box.android/databases/imagecachedb",
    tables=(
        TableSchema("files", (
            _c("_id", "INTEGER"),
            _c("timestamp", "INTEGER", ts="epoch_ms"),
            _c("url"),
            _c("image_filename"),
        ), id_column="_id"),
    ),
)

# attribute inventories for the levelDB boxitem:// JSON documents
BOX_LEVELDB_FIELDS = {
    "comment": ("type", "item", "message", "id", "created_by",
                "is_reply_comment", "created_at"),
    "file": ("type", "parent", "permissions", "sha1", "name", "size", "id",
             "path_collection", "shared_link", "comment_count",
             "content_created_at", "content_modified_at", "modified_by",
             "owned_by"),
    "folder": ("type", "permissions", "name", "size", "id", "path_collection",
               "has_collaborations", "modified_by", "owned_by"),
    "event": ("type", "source", "event_type", "event_id", "created_by",
              "created_at"),
}

# ---------------------------------------------------------------------------
# OneDrive
# ---------------------------------------------------------------------------

ONEDRIVE_METADATA_DB = DatabaseSchema(
    device_path="/data/data/com.microsoft.skydrive/databases/metadata",
    tables=(
        TableSchema("items", (
            _c("_id", "INTEGER"),
            _c("parentRid"),
            _c("ownerCid"),
            _c("resourceId"),
            _c("parentId", "INTEGER"),
            _c("downloadUrl"),
            _c("extension"),
            _c("lastAccess", "INTEGER", ts="epoch_ms", clock=CLOCK_DEVICE),
            _c("modifiedDateOnClient", "INTEGER", ts="epoch_ms"),
            _c("creationDate", "INTEGER", ts="epoch_ms"),
            _c("name"),
            _c("ownerName"),
            _c("sharingLevel"),
            _c("size", "INTEGER"),
            _c("size_text"),
            _c("totalCount", "INTEGER"),
            _c("contentType"),
            _c("eTag"),
        ), id_column="resourceId"),
    ),
)

ONEDRIVE_CACHED_FILES_DB = DatabaseSchema(
    device_path="/data/data/com.microsoft.skydrive/databases/cached_files_md.db",
    tables=(
        TableSchema("cached_files_metadata", (
            _c("id", "INTEGER"),
            _c("cache_id"),
            _c("skydrive_url"),
            _c("etag"),
            _c("last_access_time", "INTEGER", ts="epoch_ms", clock=CLOCK_DEVICE),
            _c("file_size_bytes", "INTEGER"),
            _c("is_at_internal_storage"),
        ), id_column="id"),
    ),
)

ONEDRIVE_AUTO_UPLOAD_DB = DatabaseSchema(
    device_path="/data/data/com.microsoft.skydrive/databases/auto_upload.db",
    tables=(
        TableSchema("queue", (
            _c("_id", "INTEGER"),
            _c("creationDate", "INTEGER", ts="epoch_ms", clock=CLOCK_DEVICE),
            _c("fileName"),
            _c("fileNameOriginal"),
            _c("filePath"),
            _c("fileSize", "INTEGER"),
            _c("loadingProgress", "INTEGER"),
        ), id_column="_id"),
    ),
)

ONEDRIVE_MANUAL_UPLOAD_DB = DatabaseSchema(
    device_path="/data/data/com.microsoft.skydrive/databases/manual_upload_db",
    tables=(
        TableSchema("queue", (
            _c("_id", "INTEGER"),
            _c("fileName"),
            _c("filePath"),
            _c("fileSize", "INTEGER"),
            _c("folderOwnerCid"),
            _c("folderResourceId"),
            _c("loadingProgress", "INTEGER"),
        ), id_column="_id"),
    ),
)

# AccountManager material for OneDrive arrives via the operator dump; these
# are the dump keys the extractor understands.
ONEDRIVE_DUMP_KEYS = ("password", "authtoken.refresh", "authtoken.access",
                      "userdata.scope", "userdata.user_id",
                      "userdata.account_type", "userdata.expires_at")

# ---------------------------------------------------------------------------
# ownCloud
# ---------------------------------------------------------------------------

OWNCLOUD_FILELIST_DB = DatabaseSchema(
    device_path="/data/data/com.owncloud.android/databases/filelist",
    tables=(
        TableSchema("filelist", (
            _c("_id", "INTEGER"),
            _c("filename"),
            _c("path"),
            _c("parent", "INTEGER"),
            _c("modified", "INTEGER", ts="epoch_ms", clock=CLOCK_SERVER),
            _c("content_type"),
            _c("media_path"),
            _c("file_owner"),
            _c("last_sync_date", "INTEGER", ts="epoch_ms", clock=CLOCK_DEVICE),
            _c("keep_in_sync", "INTEGER"),
            _c("last_sync_date_for_data", "INTEGER", ts="epoch_ms",
               clock=CLOCK_DEVICE),
            _c("modified_at_last_sync_date_for_data", "INTEGER", ts="epoch_ms",
               clock=CLOCK_SERVER),
            _c("share_by_link", "INTEGER"),
            _c("etag"),
        ), id_column="_id"),
        TableSchema("ocshares", (
            _c("_id", "INTEGER"),
            _c("file_source", "INTEGER"),
            _c("item_source", "INTEGER"),
            _c("shate_with"),  # [sic] in the app's schema
            _c("path"),
            _c("shared_date", "INTEGER", ts="epoch_s"),
            _c("expiration_date", "INTEGER", ts="epoch_s"),
            _c("token"),
            _c("is_directory", "INTEGER"),
            _c("owner_share"),
        ), id_column="_id"),
    ),
)

OWNCLOUD_MAIN_DB = DatabaseSchema(
    device_path="/data/data/com.owncloud.android/databases/ownCloud",
    tables=(
        TableSchema("instant_upload", (
            _c("_id", "INTEGER"),
            _c("path"),
            _c("account"),
        ), id_column="_id"),
    ),
)

# ---------------------------------------------------------------------------
# Evernote (database lives on external storage under files/user-{uid}/)
# ---------------------------------------------------------------------------

EVERNOTE_USER_DB = DatabaseSchema(
    device_path="/sdcard/Android/data/com.evernote/files/user-{uid}/user-{uid}.db",
    tables=(
        TableSchema("guid_updates", (
            _c("new_guid"),
            _c("old_guid"),
        ), id_column="new_guid"),
        TableSchema("note_tag", (
            _c("note_guid"),
            _c("tag_guid"),
        )),
        TableSchema("notebooks", (
            _c("guid"),
            _c("name"),
            _c("published", "INTEGER"),
        ), id_column="guid"),
        TableSchema("notes", (
            _c("guid"),
            _c("notebook_guid"),
            _c("title"),
            _c("content_length", "INTEGER"),
            _c("content_hash", "BLOB"),
            _c("created", "INTEGER", ts="epoch_ms"),
            _c("updated", "INTEGER", ts="epoch_ms"),
            _c("deleted", "INTEGER", ts="epoch_ms"),  # 0 means never deleted
            _c("is_active", "INTEGER"),
            _c("cached", "INTEGER"),
            _c("city"),
            _c("state"),
            _c("country"),
            _c("latitude", "REAL"),
            _c("longitude", "REAL"),
            _c("altitude", "REAL"),
            _c("source"),
            _c("source_url"),
            _c("note_share_date", "INTEGER", ts="epoch_ms"),
            _c("note_share_key"),
            _c("task_date", "INTEGER", ts="epoch_ms"),
            _c("task_complete_date", "INTEGER", ts="epoch_ms"),
            _c("task_due_date", "INTEGER", ts="epoch_ms"),
        ), id_column="guid"),
        TableSchema("resources", (
            _c("guid"),
            _c("note_guid"),
            _c("mime"),
            _c("width", "INTEGER"),
            _c("height", "INTEGER"),
            _c("hash", "BLOB"),
            _c("cached", "INTEGER"),
            _c("length", "INTEGER"),
            _c("has_recognition", "INTEGER"),
            _c("timestamp", "INTEGER", ts="epoch_ms"),
            _c("filename"),
            _c("reco_cached", "INTEGER"),
            _c("ink_signature"),
        ), id_column="guid"),
        TableSchema("search_history", (
            _c("query"),
            _c("updated", "INTEGER", ts="epoch_ms", clock=CLOCK_DEVICE),
        ), id_column="query"),
        TableSchema("search_index_content", (
            _c("c0note_guid"),
            _c("c1content_id"),
            _c("c3keywords"),
        ), id_column="c0note_guid"),
        TableSchema("snippets", (
            _c("note_guid"),
            _c("mime_type"),
            _c("res_count", "INTEGER"),
            _c("snippet"),
        ), id_column="note_guid"),
        TableSchema("tags", (
            _c("guid"),
            _c("name"),
        ), id_column="guid"),
    ),
)

# ---------------------------------------------------------------------------
# OneNote (.sdf files are SQLite format 3 under the hood)
# ---------------------------------------------------------------------------

ONENOTE_SPSQL_DB = DatabaseSchema(
    device_path=("/data/data/com.microsoft.office.onenote/files/Microsoft/"
                 "Office Mobile/SPM Data/SPSQLStore.sdf"),
    tables=(
        TableSchema("SPMConfigData", (
            _c("FieldName"),
            _c("FieldValue"),
        ), id_column="FieldName"),
        TableSchema("SPMCIItems", (
            _c("ObjectID"),
            _c("ListID"),
            _c("FolderID"),
            _c("SiteID"),
            _c("ContentType"),
            _c("Created", ts="human_ymd_hms"),
            _c("Modified", ts="human_ymd_hms"),
            _c("FileDirRef"),
            _c("ProgId"),
            _c("ServerUrl"),
            _c("LinkFileName"),
            _c("EncodedAbsUrl"),
            _c("FileType"),
            _c("Etag"),
            _c("FileSize", "INTEGER"),
            _c("LevelDescription"),
        ), id_column="ObjectID"),
        TableSchema("SPMCOjects", (  # table name spelled as found on disk
            _c("ObjectID"),
            _c("LastSyncTime", ts="human_ymd_hms", clock=CLOCK_DEVICE),
            _c("Deleted", "INTEGER"),
            _c("IsOnServer", "INTEGER"),
            _c("LastSuccessfulSyncTime", ts="human_ymd_hms", clock=CLOCK_DEVICE),
            _c("DisplayTitle"),
            _c("UrlString"),
            _c("ResId"),
            _c("CreatedTime", ts="human_ymd_hms"),
        ), id_column="ObjectID"),
    ),
)

ONENOTE_HIERARCHY_DB = DatabaseSchema(
    device_path="/data/data/com.microsoft.office.onenote/files/OneNote/hierarchy.sdf",
    tables=(
        TableSchema("OnmConfigData", (
            _c("FieldName"),
            _c("FieldValue"),
        ), id_column="FieldName"),
        TableSchema("OnmNotebookContent", (
            _c("ObjectID"),
            _c("ParentID"),
            _c("ParentNoteBookID"),
            _c("Name"),
            _c("DisplayName"),
            _c("LastAccessTime", ts="human_ymd_hms"),
            _c("LastModifiedTime", ts="human_ymd_hms"),
        ), id_column="ObjectID"),
        TableSchema("OnmSectionContent", (
            _c("ObjectID"),
            _c("JotID"),
            _c("ParentID"),
            _c("Name"),
            _c("LastAccessTime", ts="human_ymd_hms"),
            _c("LastModifiedTime", ts="human_ymd_hms"),
            _c("Viewed", "INTEGER"),
            _c("CreationTime", ts="human_ymd_hms"),
        ), id_column="ObjectID"),
    ),
)

ALL_DATABASES = {
    "dropbox": (DROPBOX_PREFS_SHARED_DB, DROPBOX_USER_DB, DROPBOX_NOTIFICATIONS_DB),
    "box": (BOX_SQLITE_DB, BOX_IMAGECACHE_DB),
    "onedrive": (ONEDRIVE_METADATA_DB, ONEDRIVE_CACHED_FILES_DB,
                 ONEDRIVE_AUTO_UPLOAD_DB, ONEDRIVE_MANUAL_UPLOAD_DB),
    "owncloud": (OWNCLOUD_FILELIST_DB, OWNCLOUD_MAIN_DB),
    "evernote": (EVERNOTE_USER_DB,),
    "onenote": (ONENOTE_SPSQL_DB, ONENOTE_HIERARCHY_DB),
}
