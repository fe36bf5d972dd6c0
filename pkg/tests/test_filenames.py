"""Cache filename grammar and composite-string parsers."""

from __future__ import annotations

import pytest

from cloudspill.errors import FormatInvalid
from cloudspill.extractors.filenames import (
    owncloud_share_url,
    parse_cache_filename,
    parse_camera_upload_hash,
    revision_suffix,
    split_etag,
)

EMPTY_SHA1 = "da39a3ee5e6b4b0d3255bfef95601890afd80709"


def test_box_cache_name():
    parsed = parse_cache_filename("box", f"42_{EMPTY_SHA1}")
    assert parsed == {"kind": "box_cache", "file_id": "42", "sha1": EMPTY_SHA1}


def test_box_preview_cache_name():
    parsed = parse_cache_filename("box", "preview_99_1_320.jpg")
    assert parsed == {"kind": "box_preview", "file_id": "99", "scale": 1,
                      "page": 320, "ext": "jpg"}


def test_box_preview_private_name():
    parsed = parse_cache_filename("box", "preview_99_1_320_jpg")
    assert parsed["kind"] == "box_preview_private"


def test_box_thumbnail_categories():
    parsed = parse_cache_filename("box", "avatar_67890_1398938400000.png")
    assert parsed["category"] == "avatar"
    assert parsed["timestamp_ms"] == 1398938400000
    parsed = parse_cache_filename("box", "file_1_1398938400000_64x64.jpeg")
    assert parsed["category"] == "file"
    assert parsed["dims"] == "64x64"


def test_onedrive_cache_name():
    parsed = parse_cache_filename("onedrive", "SkyDriveCacheFile_7.cachedata")
    assert parsed == {"kind": "onedrive_cache", "cache_id": 7}


def test_unknown_names():
    assert parse_cache_filename("box", "readme.txt") == {"kind": "unknown"}
    assert parse_cache_filename("onedrive", "readme.txt") == {"kind": "unknown"}
    assert parse_cache_filename("evernote", "anything") == {"kind": "unknown"}


def test_camera_upload_hash():
    assert parse_camera_upload_hash("1024/photo.jpg") == (1024, "photo.jpg")
    assert parse_camera_upload_hash("0/a") == (0, "a")
    with pytest.raises(FormatInvalid):
        parse_camera_upload_hash("photo.jpg")
    with pytest.raises(FormatInvalid):
        parse_camera_upload_hash("x/photo.jpg")


def test_split_etag():
    assert split_etag("RID!101.3") == ("RID!101", 3)
    assert split_etag("a.b.c.12") == ("a.b.c", 12)
    with pytest.raises(FormatInvalid):
        split_etag("noversion")
    with pytest.raises(FormatInvalid):
        split_etag("x.y")


def test_owncloud_share_url():
    url = owncloud_share_url("alice@cloud.example.org", "T0k3n")
    assert url == ("http://cloud.example.org/owncloud/public.php"
                   "?service=files&t=T0k3n")
    assert owncloud_share_url("not-an-account", "t") is None
    assert owncloud_share_url("a@b", "") is None


def test_revision_suffix():
    assert revision_suffix("30000000abcd1234") == "abcd1234"
    assert revision_suffix("short") is None
