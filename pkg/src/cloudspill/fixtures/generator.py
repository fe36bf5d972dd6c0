"""Deterministic synthetic evidence trees with a ground-truth manifest.

Every documented path, filename grammar, table and cipher gets exercised
at least once.  The generator writes evidence through standard writers
(sqlite3, XML templates, the levelDB log/table writer, the package's own
encryptors) and simultaneously computes the records an extraction run must
produce, using the extractors' record builders on the rows it authored.
The store readers, walkers, joins and decryption in between are exactly
what the manifest round trip proves.

Output layout under the target directory:

    evidence/           the synthetic tree (combined or split layout)
    accounts_dump.txt   operator-side AccountManager dump
    secrets.json        operator-side static app secrets
    manifest.json       ground truth (cloudspill-manifest/1)
"""

from __future__ import annotations

import json
import random
import sqlite3
from dataclasses import dataclass, field
from pathlib import Path

from ..accounts import serialize_accounts_dump
from ..errors import FixtureError
from ..evidence import APP_ORDER, EvidenceTree, LAYOUT_COMBINED
from ..schemas import TableSchema
from ..stores.prefs import PrefsEntry, serialize_prefs_xml

# 2014-05-01T00:00:00Z; all fixture timestamps are fixed offsets from this
BASE_TS = 1398902400000
HOUR = 3600 * 1000

WORDS = ("ledger", "harbor", "citrus", "violet", "summit", "meadow",
         "copper", "branch", "lantern", "drift", "quarry", "anchor")

MANIFEST_SCHEMA = "cloudspill-manifest/1"

UIDS = {
    "dropbox": "12345",
    "box": "67890",
    "onedrive": "ab12cd34",
    "owncloud": "alice@cloud.example.org",
    "evernote": "24680",
    "onenote": "a1b2c3d4e5f60718",
    "upm": "default",
}

CORRUPTIONS = ("flip_box_cache_byte", "remove_box_salt", "truncate_upm_db",
               "malform_prefs_xml")


@dataclass(frozen=True)
class FixtureSecrets:
    upm_password: str = "correct-battery"
    dropbox_user_token: str = "dbtoken123|dbsecrethalf456"
    dropbox_app_key: str = "fixtureappkey01"
    dropbox_consumer_secret: str = "staticconsumersecret"  # operator-side
    box_client_id: str = "boxclientid01"                   # operator-side
    box_client_secret: str = "boxclientsecret02"           # operator-side
    box_refresh_token: str = "boxrefresh0c0ffee"
    box_access_token: str = "boxaccess0decade"
    onedrive_client_id: str = "0x00001111"                 # operator-side
    onedrive_refresh_token: str = "odrefreshtok"
    onedrive_access_token: str = "odaccesstok"
    onedrive_scope: str = "wl.skydrive wl.offline_access"
    onenote_refresh_token: str = "onrefresh-fixture-token"
    onenote_key_material: str = "accountmanagerpassword"
    owncloud_password: str = "plaintextpw"


@dataclass(frozen=True)
class FixtureSpec:
    seed: int = 1
    apps: tuple[str, ...] = APP_ORDER
    files: int = 3
    notes: int = 2
    events: int = 3
    shares: int = 1
    corruptions: tuple[str, ...] = ()
    secrets: FixtureSecrets = field(default_factory=FixtureSecrets)
    layout: str = LAYOUT_COMBINED

    def as_dict(self) -> dict:
        payload = {
            "seed": self.seed,
            "apps": list(self.apps),
            "files": self.files,
            "notes": self.notes,
            "events": self.events,
            "shares": self.shares,
            "corruptions": list(self.corruptions),
            "layout": self.layout,
        }
        return payload


class FixtureWriter:
    """Path mapping plus the standard on-disk writers."""

    def __init__(self, evidence_root: Path, layout: str):
        self.tree = EvidenceTree(root=evidence_root, layout=layout)

    def path(self, device_path: str) -> Path:
        target = self.tree.resolve(device_path)
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    def rel(self, device_path: str) -> str:
        return self.tree.relative(self.tree.resolve(device_path))

    def write_bytes(self, device_path: str, data: bytes) -> str:
        self.path(device_path).write_bytes(data)
        return self.rel(device_path)

    def write_text(self, device_path: str, text: str) -> str:
        self.path(device_path).write_text(text, encoding="utf-8")
        return self.rel(device_path)

    def write_prefs(self, device_path: str, entries: list[PrefsEntry]) -> str:
        return self.write_text(device_path, serialize_prefs_xml(entries))

    def mkdir(self, device_path: str) -> Path:
        target = self.tree.resolve(device_path)
        target.mkdir(parents=True, exist_ok=True)
        return target

    def write_sqlite(self, device_path: str,
                     tables: list[tuple[TableSchema, list[dict]]]) -> str:
        target = self.path(device_path)
        conn = sqlite3.connect(target)
        try:
            for schema, rows in tables:
                columns = ", ".join(f'"{c.name}" {c.affinity}'
                                    for c in schema.columns)
                conn.execute(f'CREATE TABLE "{schema.name}" ({columns})')
                marks = ",".join("?" * len(schema.columns))
                for row in rows:
                    conn.execute(
                        f'INSERT INTO "{schema.name}" VALUES ({marks})',
                        tuple(row.get(c.name) for c in schema.columns))
            conn.commit()
        finally:
            conn.close()
        return self.rel(device_path)


def _pref(name: str, value, tag: str | None = None) -> PrefsEntry:
    if tag is None:
        if isinstance(value, bool):
            tag = "boolean"
        elif isinstance(value, int):
            tag = "long" if abs(value) > 2**31 else "int"
        else:
            tag = "string"
    if tag == "boolean":
        raw = "true" if value else "false"
    else:
        raw = str(value)
    return PrefsEntry(name=name, tag=tag, value=value, raw=raw)


@dataclass
class Expected:
    """Ground truth accumulated while generating one app."""

    records: list = field(default_factory=list)
    findings: list = field(default_factory=list)
    credentials: list = field(default_factory=list)
    hash_verdicts: dict = field(default_factory=dict)   # target rel -> verdict
    decrypted_sha1: dict = field(default_factory=dict)  # out rel -> sha1
    warnings: list = field(default_factory=list)        # expected substrings


def generate_fixture(spec: FixtureSpec, out: str | Path) -> dict:
    """Write the tree and operator files; return the manifest dict."""
    out = Path(out)
    if out.exists() and any(out.iterdir()):
        raise FixtureError(f"refusing to write fixture into non-empty {out}")
    evidence = out / "evidence"
    evidence.mkdir(parents=True, exist_ok=True)
    writer = FixtureWriter(evidence, spec.layout)
    rng = random.Random(spec.seed)

    expected = Expected()
    dump_entries: list[AccountDumpEntry] = []
    generators = {
        "dropbox": _gen_dropbox,
        "box": _gen_box,
        "onedrive": _gen_onedrive,
        "owncloud": _gen_owncloud,
        "evernote": _gen_evernote,
        "onenote": _gen_onenote,
        "upm": _gen_upm,
    }
    for app in APP_ORDER:
        if app in spec.apps:
            generators[app](spec, writer, rng, expected, dump_entries)

    for name in spec.corruptions:
        corrupt(writer, name, expected)

    dump_text = serialize_accounts_dump(dump_entries)
    (out / "accounts_dump.txt").write_text(dump_text, encoding="utf-8")

    operator_secrets = {
        "dropbox": {"consumer_secret": spec.secrets.dropbox_consumer_secret},
        "box": {"client_id": spec.secrets.box_client_id,
                "client_secret": spec.secrets.box_client_secret},
        "onedrive": {"client_id": spec.secrets.onedrive_client_id},
        "onenote": {"client_id": spec.secrets.onedrive_client_id},
    }
    (out / "secrets.json").write_text(
        json.dumps(operator_secrets, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")

    records = sorted(expected.records, key=lambda r: r.sort_key())
    findings = sorted(expected.findings, key=lambda f: f.sort_key())
    dated = sum(1 for r in records for t in r.normalized.timestamps
                if t.utc_ms is not None)
    undated = sum(1 for r in records for t in r.normalized.timestamps
                  if t.utc_ms is None)
    manifest = {
        "schema": MANIFEST_SCHEMA,
        "spec": spec.as_dict(),
        "uids": {app: UIDS[app] for app in spec.apps},
        "upm_password": spec.secrets.upm_password,
        "expected_records": [r.as_dict() for r in records],
        "expected_findings": [f.as_dict() for f in findings],
        "expected_credentials": [c.as_dict() for c in
                                 sorted(expected.credentials,
                                        key=lambda c: c.sort_key())],
        "expected_hash_verdicts": dict(sorted(expected.hash_verdicts.items())),
        "expected_decrypted_sha1": dict(sorted(expected.decrypted_sha1.items())),
        "expected_timeline": {"dated": dated, "undated": undated},
        "expected_warnings": sorted(expected.warnings),
        "record_count": len(records),
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest


# ---------------------------------------------------------------------------
# corruption plan
# ---------------------------------------------------------------------------

def corrupt(writer: FixtureWriter, name: str, expected: Expected) -> None:
    """Apply one named defect and adjust the ground truth accordingly."""
    if name == "flip_box_cache_byte":
        uid = UIDS["box"]
        cache = writer.tree.resolve(
            f"/sdcard/Android/data/com.box.android/{uid}/cache/dl_cache")
        targets = sorted(cache.iterdir()) if cache.is_dir() else []
        if not targets:
            raise FixtureError("flip_box_cache_byte: no dl_cache file present")
        target = targets[0]
        data = bytearray(target.read_bytes())
        # a mid-file flip garbles two plaintext blocks but leaves the final
        # padding block intact, so decryption "succeeds" and the SHA-1
        # cross-check is what flags the tampering
        data[len(data) // 2] ^= 0x01
        target.write_bytes(bytes(data))
        rel = writer.tree.relative(target)
        expected.hash_verdicts[rel] = "mismatch"
        for finding in expected.findings:
            if finding.path == rel:
                finding.verified_hash = ("sha1", False)
        expected.decrypted_sha1.pop(
            f"box/{uid}/dl_cache/{target.name}", None)
    elif name == "remove_box_salt":
        uid = UIDS["box"]
        device = f"/data/data/com.box.android/shared_prefs/DOWNLOAD_SALTS{uid}.xml"
        path = writer.tree.resolve(device)
        if not path.is_file():
            raise FixtureError("remove_box_salt: salts file missing")
        # rewrite without the dl_offline file's salt entry
        import xml.etree.ElementTree as ET
        root = ET.fromstring(path.read_text(encoding="utf-8"))
        victims = [el for el in root if el.get("name", "").endswith("2")]
        if not victims:
            raise FixtureError("remove_box_salt: no removable salt entry")
        victim = victims[0].get("name")
        entries = [_pref(el.get("name"), el.text or "") for el in root
                   if el.get("name") != victim]
        writer.write_prefs(device, entries)
        rel = writer.rel(device)
        for finding in expected.findings:
            if (finding.app == "box" and finding.naming.get("file_id") == victim
                    and finding.encrypted):
                finding.status = "undecryptable: missing_salt"
                finding.verified_hash = None
                finding.decrypted_to = None
                expected.hash_verdicts.pop(finding.path, None)
                expected.decrypted_sha1.pop(
                    f"box/{uid}/dl_offline/{Path(finding.path).name}", None)
        for record in expected.records:
            if (record.app == "box" and record.kind == "config_directive"
                    and record.attributes.get("directive") == f"DOWNLOAD_SALTS{uid}"):
                record.attributes.pop(victim, None)
    elif name == "truncate_upm_db":
        device = "/data/data/com.u17od.upm/files/upm.db"
        path = writer.tree.resolve(device)
        if not path.is_file():
            raise FixtureError("truncate_upm_db: upm.db missing")
        path.write_bytes(path.read_bytes()[:5])
        # with no readable header there is no database record, no decryption
        # and no header-signature scan across the other apps
        expected.records = [
            r for r in expected.records
            if not (r.app == "upm" and
                    r.provenance.locator in ("upm.db", "header_scan"))]
        expected.decrypted_sha1.pop("upm/default/upm.db.decrypted", None)
        expected.warnings.append("UpmImageTooShort")
    elif name == "malform_prefs_xml":
        device = f"/data/data/com.evernote/shared_prefs/{UIDS['evernote']}_counts.pref.xml"
        path = writer.tree.resolve(device)
        if not path.is_file():
            raise FixtureError("malform_prefs_xml: counts prefs missing")
        text = path.read_text(encoding="utf-8")
        path.write_text(text.replace("</map>", "</ma"), encoding="utf-8")
        rel = writer.rel(device)
        expected.records = [
            r for r in expected.records
            if not (r.app == "evernote" and r.provenance.path == rel)]
        expected.warnings.append(rel)
    else:
        raise FixtureError(f"unknown corruption {name!r}")


# ---------------------------------------------------------------------------
# per-app generators (imported lazily to keep this module readable)
# ---------------------------------------------------------------------------

from . import apps as _apps  # noqa: E402  (circular-safe: apps imports nothing back)

_gen_dropbox = _apps.gen_dropbox
_gen_box = _apps.gen_box
_gen_onedrive = _apps.gen_onedrive
_gen_owncloud = _apps.gen_owncloud
_gen_evernote = _apps.gen_evernote
_gen_onenote = _apps.gen_onenote
_gen_upm = _apps.gen_upm
