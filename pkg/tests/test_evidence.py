"""Evidence tree opening, discovery and digest behaviour."""

from __future__ import annotations

import shutil

import pytest

from cloudspill.errors import TreeNotFound
from cloudspill.evidence import (
    APP_ORDER,
    discover_apps,
    discover_user_ids,
    open_tree,
    tree_digest,
)


def test_open_tree_missing(tmp_path):
    with pytest.raises(TreeNotFound):
        open_tree(tmp_path / "nope", "combined")


def test_open_tree_not_a_directory(tmp_path):
    f = tmp_path / "file"
    f.write_text("x")
    with pytest.raises(TreeNotFound):
        open_tree(f, "combined")


def test_open_empty_tree(tmp_path):
    tree = open_tree(tmp_path, "combined")
    assert discover_apps(tree) == []


def test_discover_all_seven(fixture_run):
    apps = discover_apps(fixture_run.tree)
    assert [a.app for a in apps] == list(APP_ORDER)
    for identity in apps:
        assert identity.private_path.name == identity.package_name


def test_discovery_order_is_enum_order(fixture_run):
    apps = [a.app for a in discover_apps(fixture_run.tree)]
    assert apps == sorted(apps, key=APP_ORDER.index)


def test_upm_has_no_external_path(tmp_path):
    (tmp_path / "data/data/com.u17od.upm").mkdir(parents=True)
    tree = open_tree(tmp_path, "combined")
    apps = discover_apps(tree)
    assert [a.app for a in apps] == ["upm"]
    assert apps[0].external_path is None


def test_owncloud_external_is_sdcard_owncloud(fixture_run):
    identity = next(a for a in discover_apps(fixture_run.tree)
                    if a.app == "owncloud")
    assert identity.external_path is not None
    assert identity.external_path.name == "owncloud"
    assert identity.external_path.parent.name == "sdcard"


def test_discover_dropbox_user(fixture_run):
    identity = next(a for a in discover_apps(fixture_run.tree)
                    if a.app == "dropbox")
    discovery = discover_user_ids(fixture_run.tree, identity)
    assert [s.user_id for s in discovery.scopes] == ["12345"]
    assert discovery.scopes[0].discovery_source == "prefs_file"


def test_discover_upm_default_scope(fixture_run):
    identity = next(a for a in discover_apps(fixture_run.tree)
                    if a.app == "upm")
    discovery = discover_user_ids(fixture_run.tree, identity)
    assert [(s.user_id, s.discovery_source) for s in discovery.scopes] == \
        [("default", "directory_name")]


def test_discover_box_two_leveldb_dirs(tmp_path):
    for uid in ("111", "222"):
        (tmp_path / f"data/data/com.box.android/files/leveldb{uid}").mkdir(
            parents=True)
    tree = open_tree(tmp_path, "combined")
    identity = discover_apps(tree)[0]
    discovery = discover_user_ids(tree, identity)
    assert [s.user_id for s in discovery.scopes] == ["111", "222"]
    assert all(s.discovery_source == "directory_name" for s in discovery.scopes)


def test_scope_sources_exist(fixture_run):
    for identity in discover_apps(fixture_run.tree):
        for scope in discover_user_ids(fixture_run.tree, identity).scopes:
            assert (fixture_run.tree.root / scope.source_path).exists()


def test_unparsable_prefs_degrades_to_warning(tmp_path):
    prefs = tmp_path / "data/data/com.dropbox.android/shared_prefs"
    prefs.mkdir(parents=True)
    (prefs / "dropbox-credentials.xml").write_text("<map><broken")
    db_dir = tmp_path / "data/data/com.dropbox.android/databases"
    db_dir.mkdir(parents=True)
    (db_dir / "999-db.db").write_bytes(b"SQLite format 3\x00" + b"\x00" * 80)
    tree = open_tree(tmp_path, "combined")
    discovery = discover_user_ids(tree, discover_apps(tree)[0])
    assert discovery.warnings
    assert [s.user_id for s in discovery.scopes] == ["999"]


def test_digest_deterministic(fixture_run):
    assert tree_digest(fixture_run.tree) == tree_digest(fixture_run.tree)


def test_digest_changes_on_flip(tmp_path, fixture_run):
    copy = tmp_path / "copy"
    shutil.copytree(fixture_run.tree.root, copy)
    tree = open_tree(copy, "combined")
    before = tree_digest(tree)
    target = copy / "data/data/com.u17od.upm/files/upm.db"
    data = bytearray(target.read_bytes())
    data[0] ^= 0x01
    target.write_bytes(bytes(data))
    assert tree_digest(tree) != before


def test_digest_covers_symlinks_without_following(tmp_path):
    (tmp_path / "real.txt").write_text("data")
    (tmp_path / "link").symlink_to("/etc/passwd")
    tree = open_tree(tmp_path, "combined")
    digest = tree_digest(tree)  # must not read through the link
    assert len(digest) == 64


def test_split_layout_resolution(tmp_path):
    (tmp_path / "internal/com.u17od.upm").mkdir(parents=True)
    (tmp_path / "external/Android/data/com.dropbox.android").mkdir(parents=True)
    tree = open_tree(tmp_path, "split")
    assert tree.resolve("/data/data/com.u17od.upm").is_dir()
    assert tree.resolve(
        "/sdcard/Android/data/com.dropbox.android").is_dir()
    apps = discover_apps(tree)
    assert [a.app for a in apps] == ["upm"]


def test_resolve_refuses_parent_escapes(fixture_run):
    with pytest.raises(ValueError):
        fixture_run.tree.resolve("/data/data/../../../etc/passwd")


def test_extraction_never_reads_through_symlinks(tmp_path):
    secret = tmp_path / "outside"
    secret.mkdir()
    (secret / "victim.bin").write_bytes(b"outside evidence")
    root = tmp_path / "evidence"
    scratch = root / "sdcard/Android/data/com.dropbox.android/files/1/scratch"
    scratch.mkdir(parents=True)
    (root / "data/data/com.dropbox.android").mkdir(parents=True)
    (scratch / "escape").symlink_to(secret)          # directory link
    (scratch / "file.lnk").symlink_to(secret / "victim.bin")
    (scratch / "real.txt").write_bytes(b"inside")
    from cloudspill.evidence import safe_files
    names = [p.name for p in safe_files(scratch.parent)]
    assert names == ["real.txt"]
