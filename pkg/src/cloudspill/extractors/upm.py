"""Universal Password Manager artifact extraction.

UPM keeps everything in one encrypted database (salt at bytes 3..10) and
two preferences files naming the sync method and the Dropbox app keypair
it syncs with.  When the user linked a cloud service, a copy of upm.db
lands in that app's upload area, so the other apps' cache locations are
searched for files with a matching header signature.
"""

from __future__ import annotations

import hashlib

from ..crypto import UPM_FIXTURE_MAGIC, upm_brute_force, upm_parse_header
from ..errors import UpmImageTooShort
from ..records import (
    KIND_CONFIG,
    ArtifactRecord,
    ExtractResult,
    Normalized,
    Provenance,
)
from ..stores.prefs import read_prefs_xml

# upload areas of the cloud apps that can host a synced upm.db copy
_SEARCH_ROOTS = (
    ("dropbox", "/sdcard/Android/data/com.dropbox.android/files"),
    ("onedrive", "/sdcard/Android/data/com.microsoft.skydrive/cache"),
    ("owncloud", "/sdcard/owncloud"),
)


def build_config_record(user_scope: str, name: str, directives: dict,
                        prov: Provenance) -> ArtifactRecord:
    return ArtifactRecord(app="upm", user_scope=user_scope, kind=KIND_CONFIG,
                          attributes=directives,
                          normalized=Normalized(name=name), provenance=prov)


def build_database_record(user_scope: str, header: bytes, salt: bytes,
                          size: int, prov: Provenance) -> ArtifactRecord:
    return ArtifactRecord(
        app="upm", user_scope=user_scope, kind=KIND_CONFIG,
        attributes={"header": header, "salt": salt, "size_bytes": size,
                    "encrypted": True},
        normalized=Normalized(name="upm.db", size_bytes=size),
        provenance=prov)


def build_decrypted_record(user_scope: str, password: str, plaintext: bytes,
                           decrypted_to: str | None, prov: Provenance,
                           candidate_only: bool = False) -> ArtifactRecord:
    attributes = {"decrypted": True, "password": password,
                  "plaintext_size": len(plaintext),
                  "plaintext_sha256": hashlib.sha256(plaintext).hexdigest(),
                  "decrypted_to": decrypted_to}
    if candidate_only:
        # no plaintext magic to check against: padding success alone
        attributes["candidate_only"] = True
    return ArtifactRecord(
        app="upm", user_scope=user_scope, kind=KIND_CONFIG,
        attributes=attributes,
        normalized=Normalized(name="upm.db (decrypted)",
                              size_bytes=len(plaintext)),
        provenance=prov)


def build_synced_copy_record(user_scope: str, host_app: str, rel_path: str,
                             header: bytes, prov: Provenance) -> ArtifactRecord:
    return ArtifactRecord(
        app="upm", user_scope=user_scope, kind=KIND_CONFIG,
        attributes={"parsed_upm_header_match": True, "host_app": host_app,
                    "header": header, "path": rel_path},
        normalized=Normalized(name=rel_path.rsplit("/", 1)[-1], path=rel_path),
        provenance=prov)


def extract_upm(tree, scope, ctx) -> ExtractResult:
    result = ExtractResult(app="upm", user_scope=scope.user_id)
    private = scope.app.private_path
    uid = scope.user_id
    prefs_dir = private / "shared_prefs"

    for filename, keys, label in (
            ("UPMPrefs.xml", ("sync.method",), "UPMPrefs"),
            ("DROPBOX_PREFS.xml", ("DROPBOX_SECRET", "DROPBOX_KEY"), "DROPBOX_PREFS")):
        path = prefs_dir / filename
        if not path.is_file():
            continue
        rel = tree.relative(path)
        try:
            prefs = read_prefs_xml(path)
            directives = {key: prefs.get(key) for key in keys if key in prefs}
            result.records.append(build_config_record(
                uid, label, directives, Provenance(rel, "prefs", label)))
            if label == "DROPBOX_PREFS":
                result.cred_inputs["dropbox_key"] = directives.get("DROPBOX_KEY")
                result.cred_inputs["dropbox_secret"] = directives.get("DROPBOX_SECRET")
                result.cred_inputs.setdefault("sources", []).append(rel)
        except Exception as exc:
            result.warnings.append(f"{rel}: {exc}")

    header = None
    db_path = private / "files" / "upm.db"
    if db_path.is_file():
        rel = tree.relative(db_path)
        data = db_path.read_bytes()
        try:
            image = upm_parse_header(data)
        except UpmImageTooShort as exc:
            result.warnings.append(f"{rel}: UpmImageTooShort: {exc}")
            image = None
        if image is not None:
            header = image.header
            result.records.append(build_database_record(
                uid, image.header, image.salt, len(data),
                Provenance(rel, "upm.db", "header")))
            if ctx.upm_candidates:
                magic = UPM_FIXTURE_MAGIC if ctx.upm_magic_check else None
                found = upm_brute_force(image, ctx.upm_candidates,
                                        iterations=ctx.upm_iterations,
                                        magic=magic)
                if found is None:
                    result.warnings.append(
                        f"{rel}: no candidate password decrypted the database")
                else:
                    password, plaintext = found
                    out = ctx.write_output(f"upm/{uid}/upm.db.decrypted", plaintext)
                    result.records.append(build_decrypted_record(
                        uid, password, plaintext, out,
                        Provenance(rel, "upm.db", "decrypted"),
                        candidate_only=not ctx.upm_magic_check))

    if header is not None:
        _search_synced_copies(result, tree, uid, header)
    return result.finish()


def _search_synced_copies(result: ExtractResult, tree, uid: str,
                          header: bytes) -> None:
    for host_app, device_root in _SEARCH_ROOTS:
        try:
            root = tree.resolve(device_root)
        except ValueError:
            continue
        if not root.is_dir():
            continue
        from ..evidence import safe_files
        for path in safe_files(root):
            if path.stat().st_size < len(header):
                continue
            with open(path, "rb") as handle:
                if handle.read(len(header)) != header:
                    continue
            rel = tree.relative(path)
            result.records.append(build_synced_copy_record(
                uid, host_app, rel, header, Provenance(rel, "header_scan", rel)))
