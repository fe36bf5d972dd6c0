"""Cache filename grammars and small composite-string parsers.

Unmatched names parse to kind "unknown" rather than erroring: cache
directories accumulate stray files and a carver must keep walking.
"""

from __future__ import annotations

import re

from ..errors import FormatInvalid

_BOX_CACHE_RE = re.compile(r"(?P<file_id>\d+)_(?P<sha1>[0-9a-f]{40})")
_BOX_PREVIEW_CACHE_RE = re.compile(
    r"preview_(?P<file_id>\d+)_(?P<scale>\d+)_(?P<page>\d+)\.(?P<ext>[A-Za-z0-9]+)")
_BOX_PREVIEW_PRIVATE_RE = re.compile(
    r"preview_(?P<file_id>\d+)_1_(?P<size>\d+)_(?P<ext>[A-Za-z0-9]+)")
_BOX_THUMBNAIL_RE = re.compile(
    r"(?P<category>onecloudapp|file|avatar)_(?P<item_id>\d+)_(?P<timestamp_ms>\d{13})"
    r"(?:_(?P<dims>\d+x\d+))?\.(?P<ext>[A-Za-z0-9]+)")
_ONEDRIVE_CACHE_RE = re.compile(r"SkyDriveCacheFile_(?P<cache_id>\d+)\.cachedata")
_DROPBOX_TMP_RE = re.compile(r"file(?P<index>\d+)\.tmp")


def parse_cache_filename(app: str, name: str) -> dict:
    """Parse one cache filename into its grammar fields; never raises."""
    if app == "box":
        match = _BOX_CACHE_RE.fullmatch(name)
        if match:
            return {"kind": "box_cache", "file_id": match["file_id"],
                    "sha1": match["sha1"]}
        match = _BOX_PREVIEW_CACHE_RE.fullmatch(name)
        if match:
            return {"kind": "box_preview", "file_id": match["file_id"],
                    "scale": int(match["scale"]), "page": int(match["page"]),
                    "ext": match["ext"]}
        match = _BOX_PREVIEW_PRIVATE_RE.fullmatch(name)
        if match:
            return {"kind": "box_preview_private", "file_id": match["file_id"],
                    "size": int(match["size"]), "ext": match["ext"]}
        match = _BOX_THUMBNAIL_RE.fullmatch(name)
        if match:
            parsed = {"kind": "box_thumbnail", "category": match["category"],
                      "item_id": match["item_id"],
                      "timestamp_ms": int(match["timestamp_ms"]),
                      "ext": match["ext"]}
            if match["dims"]:
                parsed["dims"] = match["dims"]
            return parsed
    elif app == "onedrive":
        match = _ONEDRIVE_CACHE_RE.fullmatch(name)
        if match:
            return {"kind": "onedrive_cache", "cache_id": int(match["cache_id"])}
    elif app == "dropbox":
        match = _DROPBOX_TMP_RE.fullmatch(name)
        if match:
            return {"kind": "dropbox_tmp", "index": int(match["index"])}
    return {"kind": "unknown"}


def parse_camera_upload_hash(value: str) -> tuple[int, str]:
    """Split the size-slash-filename composite in camera_upload.local_hash."""
    if "/" not in value:
        raise FormatInvalid(f"no '/' in camera upload hash: {value!r}")
    left, right = value.split("/", 1)
    if not left.isdigit():
        raise FormatInvalid(f"non-numeric size in camera upload hash: {value!r}")
    return int(left), right


def split_etag(etag: str) -> tuple[str, int]:
    """Split an eTag into (resourceId, version); version follows the last dot."""
    resource_id, sep, version = etag.rpartition(".")
    if not sep or not version.isdigit():
        raise FormatInvalid(f"eTag not in resourceId.version form: {etag!r}")
    return resource_id, int(version)


def owncloud_share_url(owner_share: str, token: str) -> str | None:
    """Rebuild the public share URL from the owner's server and the token."""
    if "@" not in owner_share or not token:
        return None
    server = owner_share.rsplit("@", 1)[1]
    return f"http://{server}/owncloud/public.php?service=files&t={token}"


def revision_suffix(revision: str) -> str | None:
    """Last 8 characters of a sync revision code (shared per directory)."""
    if revision and len(revision) >= 8:
        return revision[-8:]
    return None
