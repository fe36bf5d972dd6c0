"""Evidence tree handling: open, app discovery, user-scope discovery, digest.

An evidence tree is an extracted Android filesystem (mounted image or
`adb pull` output), never a raw block image.  Two layouts are supported:

* combined - one root holding both ``data/data/...`` and ``sdcard/...``
* split    - one root holding ``internal/`` (= /data/data) and
             ``external/`` (= /sdcard)

The layout is operator-declared; nothing here guesses.  Every read goes
through resolve(), which refuses to escape the root, and symlinks inside
evidence are recorded but never followed.
"""

from __future__ import annotations

import hashlib
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import TreeNotFound
from .stores.jsondoc import parse_json_document, plain
from .stores.prefs import read_prefs_xml
from .stores.sqlite import read_sql_table

LAYOUT_COMBINED = "combined"
LAYOUT_SPLIT = "split"

APP_DROPBOX = "dropbox"
APP_BOX = "box"
APP_ONEDRIVE = "onedrive"
APP_OWNCLOUD = "owncloud"
APP_EVERNOTE = "evernote"
APP_ONENOTE = "onenote"
APP_UPM = "upm"

# enum order fixes discovery/report ordering
APP_ORDER = (APP_DROPBOX, APP_BOX, APP_ONEDRIVE, APP_OWNCLOUD,
             APP_EVERNOTE, APP_ONENOTE, APP_UPM)

PACKAGE_NAMES = {
    APP_DROPBOX: "com.dropbox.android",
    APP_BOX: "com.box.android",
    APP_ONEDRIVE: "com.microsoft.skydrive",
    APP_OWNCLOUD: "com.owncloud.android",
    APP_EVERNOTE: "com.evernote",
    APP_ONENOTE: "com.microsoft.office.onenote",
    APP_UPM: "com.u17od.upm",
}

# ownCloud mirrors files at /sdcard/owncloud, not under Android/data
EXTERNAL_DEVICE_PATHS = {
    app: (f"/sdcard/Android/data/{pkg}" if app != APP_OWNCLOUD else "/sdcard/owncloud")
    for app, pkg in PACKAGE_NAMES.items()
}

SOURCE_DIRECTORY = "directory_name"
SOURCE_PREFS = "prefs_file"
SOURCE_DATABASE = "database_filename"


@dataclass(frozen=True)
class EvidenceTree:
    root: Path
    layout: str

    def resolve(self, device_path: str) -> Path:
        """Map an absolute on-device path to a path inside this tree."""
        if not device_path.startswith("/"):
            raise ValueError(f"device path must be absolute: {device_path}")
        parts = device_path.strip("/").split("/")
        if self.layout == LAYOUT_SPLIT:
            if parts[:2] == ["data", "data"]:
                mapped = ["internal"] + parts[2:]
            elif parts[:1] == ["sdcard"]:
                mapped = ["external"] + parts[1:]
            else:
                mapped = parts
        else:
            mapped = parts
        candidate = self.root.joinpath(*mapped)
        # containment: no escape via .. components in evidence-derived strings
        if ".." in mapped:
            raise ValueError(f"refusing path with parent references: {device_path}")
        return candidate

    def relative(self, path: Path) -> str:
        """Tree-relative provenance string with / separators."""
        return path.relative_to(self.root).as_posix()


@dataclass(frozen=True)
class AppIdentity:
    app: str
    package_name: str
    private_path: Path
    external_path: Path | None


@dataclass(frozen=True)
class UserScope:
    app: AppIdentity
    user_id: str
    discovery_source: str
    source_path: str  # tree-relative path of the file/dir that named this user


@dataclass
class UserDiscovery:
    scopes: list[UserScope] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def open_tree(root: str | Path, layout: str = LAYOUT_COMBINED) -> EvidenceTree:
    root = Path(root)
    if not root.exists():
        raise TreeNotFound(f"evidence root does not exist: {root}")
    if not root.is_dir():
        raise TreeNotFound(f"evidence root is not a directory: {root}")
    if layout not in (LAYOUT_COMBINED, LAYOUT_SPLIT):
        raise ValueError(f"unknown layout: {layout}")
    return EvidenceTree(root=root, layout=layout)


def walk_tree(root: Path):
    """Every path under root, sorted, never descending into symlinks."""
    entries = []
    for dirpath, dirnames, filenames in os.walk(root, followlinks=False):
        base = Path(dirpath)
        for name in dirnames + filenames:
            entries.append(base / name)
    entries.sort(key=lambda p: p.relative_to(root).as_posix())
    return entries


def safe_files(directory: Path):
    """Regular files under a directory, sorted; symlinks recorded upstream
    by the digest but never read by extractors."""
    if not directory.is_dir():
        return []
    return [p for p in walk_tree(directory)
            if p.is_file() and not p.is_symlink()]


def tree_digest(tree: EvidenceTree) -> str:
    """Deterministic SHA-256 over relative paths and file contents.

    Symlink targets are hashed as text (links are never followed);
    unreadable files contribute an error sentinel instead of aborting.
    """
    digest = hashlib.sha256()
    for path in walk_tree(tree.root):
        rel = path.relative_to(tree.root).as_posix()
        digest.update(rel.encode("utf-8"))
        digest.update(b"\x00")
        if path.is_symlink():
            digest.update(b"L" + str(path.readlink()).encode("utf-8", "replace"))
        elif path.is_dir():
            digest.update(b"D")
        else:
            digest.update(b"F")
            try:
                with open(path, "rb") as handle:
                    for chunk in iter(lambda: handle.read(1 << 16), b""):
                        digest.update(chunk)
            except OSError:
                digest.update(b"<unreadable>")
        digest.update(b"\x00")
    return digest.hexdigest()


def discover_apps(tree: EvidenceTree) -> list[AppIdentity]:
    found = []
    for app in APP_ORDER:
        pkg = PACKAGE_NAMES[app]
        private = tree.resolve(f"/data/data/{pkg}")
        if not private.is_dir():
            continue
        external = tree.resolve(EXTERNAL_DEVICE_PATHS[app])
        found.append(AppIdentity(
            app=app,
            package_name=pkg,
            private_path=private,
            external_path=external if external.is_dir() else None,
        ))
    return found


def _add_scope(result: UserDiscovery, seen: set[str], app: AppIdentity,
               user_id: str, source: str, source_path: Path, tree: EvidenceTree) -> None:
    user_id = str(user_id)
    if not user_id or user_id in seen:
        return
    seen.add(user_id)
    result.scopes.append(UserScope(
        app=app, user_id=user_id, discovery_source=source,
        source_path=tree.relative(source_path)))


def _prefs_or_warn(result: UserDiscovery, path: Path):
    try:
        return read_prefs_xml(path)
    except Exception as exc:
        result.warnings.append(f"unparsable prefs file {path.name}: {exc}")
        return None


def discover_user_ids(tree: EvidenceTree, app: AppIdentity) -> UserDiscovery:
    result = UserDiscovery()
    seen: set[str] = set()
    private = app.private_path

    if app.app == APP_DROPBOX:
        creds = private / "shared_prefs" / "dropbox-credentials.xml"
        if creds.is_file():
            prefs = _prefs_or_warn(result, creds)
            if prefs is not None and "accounts" in prefs:
                try:
                    accounts = plain(parse_json_document(prefs.get("accounts")))
                    for account in accounts:
                        _add_scope(result, seen, app, account.get("userId", ""),
                                   SOURCE_PREFS, creds, tree)
                except Exception as exc:
                    result.warnings.append(f"accounts JSON unparsable: {exc}")
        db_dir = private / "databases"
        if db_dir.is_dir():
            for entry in sorted(db_dir.iterdir()):
                match = re.fullmatch(r"(\d+)-db\.db", entry.name)
                if match:
                    _add_scope(result, seen, app, match.group(1),
                               SOURCE_DATABASE, entry, tree)

    elif app.app == APP_BOX:
        files_dir = private / "files"
        if files_dir.is_dir():
            for entry in sorted(files_dir.iterdir()):
                match = re.fullmatch(r"leveldb(\d+)", entry.name)
                if match and entry.is_dir():
                    _add_scope(result, seen, app, match.group(1),
                               SOURCE_DIRECTORY, entry, tree)
        prefs_dir = private / "shared_prefs"
        if prefs_dir.is_dir():
            for entry in sorted(prefs_dir.iterdir()):
                match = re.fullmatch(r"myPreference(\d+)\.xml", entry.name)
                if match:
                    _add_scope(result, seen, app, match.group(1),
                               SOURCE_PREFS, entry, tree)

    elif app.app == APP_EVERNOTE:
        prefs_dir = private / "shared_prefs"
        if prefs_dir.is_dir():
            for entry in sorted(prefs_dir.iterdir()):
                match = re.fullmatch(r"(\d+)\.pref\.xml", entry.name)
                if match:
                    _add_scope(result, seen, app, match.group(1),
                               SOURCE_PREFS, entry, tree)
        if app.external_path is not None:
            files_dir = app.external_path / "files"
            if files_dir.is_dir():
                for entry in sorted(files_dir.iterdir()):
                    match = re.fullmatch(r"user-(\d+)", entry.name)
                    if match and entry.is_dir():
                        _add_scope(result, seen, app, match.group(1),
                                   SOURCE_DIRECTORY, entry, tree)

    elif app.app == APP_OWNCLOUD:
        prefs_path = private / "shared_prefs" / "com.owncloud.android_preferences.xml"
        if prefs_path.is_file():
            prefs = _prefs_or_warn(result, prefs_path)
            if prefs is not None and prefs.get("select_oc_account"):
                _add_scope(result, seen, app, prefs.get("select_oc_account"),
                           SOURCE_PREFS, prefs_path, tree)
        filelist_db = private / "databases" / "filelist"
        if filelist_db.is_file():
            try:
                rows = read_sql_table(filelist_db, "filelist", ["file_owner"])
                if not rows.missing and "file_owner" in rows.columns:
                    idx = rows.columns.index("file_owner")
                    for owner in sorted({r[idx] for r in rows.rows if r[idx]}):
                        _add_scope(result, seen, app, owner,
                                   SOURCE_DATABASE, filelist_db, tree)
            except Exception as exc:
                result.warnings.append(f"filelist unreadable: {exc}")

    elif app.app == APP_ONENOTE:
        prefs_path = (private / "shared_prefs" /
                      "com.microsoft.office.onenote_preferences.xml")
        if prefs_path.is_file():
            prefs = _prefs_or_warn(result, prefs_path)
            if prefs is not None and prefs.get("DEFAULT_LIVE_ID"):
                _add_scope(result, seen, app, prefs.get("DEFAULT_LIVE_ID"),
                           SOURCE_PREFS, prefs_path, tree)

    elif app.app == APP_ONEDRIVE:
        metadata_db = private / "databases" / "metadata"
        if metadata_db.is_file():
            try:
                rows = read_sql_table(metadata_db, "items", ["ownerCid"])
                if not rows.missing and "ownerCid" in rows.columns:
                    idx = rows.columns.index("ownerCid")
                    for cid in sorted({str(r[idx]) for r in rows.rows if r[idx]}):
                        _add_scope(result, seen, app, cid,
                                   SOURCE_DATABASE, metadata_db, tree)
            except Exception as exc:
                result.warnings.append(f"metadata db unreadable: {exc}")

    elif app.app == APP_UPM:
        _add_scope(result, seen, app, "default", SOURCE_DIRECTORY,
                   app.private_path, tree)

    return result
