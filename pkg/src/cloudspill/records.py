"""Normalized artifact model shared by all extractors.

Attributes keep the verbatim names and values found in evidence (including
documented misspellings); normalization is additive and lives in the
``normalized`` facts, never replacing the raw material.  Provenance always
points at a real file in the tree.
"""

from __future__ import annotations

import binascii
from dataclasses import dataclass, field

from .stores.jsondoc import RawNumber, compact

KIND_ACCOUNT = "account"
KIND_FILE = "file_entry"
KIND_FOLDER = "folder_entry"
KIND_EVENT = "event"
KIND_NOTE = "note"
KIND_NOTEBOOK = "notebook"
KIND_SECTION = "section"
KIND_RESOURCE = "resource"
KIND_SHARE = "share"
KIND_COMMENT = "comment"
KIND_ALBUM = "album"
KIND_UPLOAD = "upload_queue_item"
KIND_RECENT = "recent_file"
KIND_THUMBNAIL = "thumbnail"
KIND_SEARCH = "search_query"
KIND_LOG_EVENT = "log_event"
KIND_CONFIG = "config_directive"

RECORD_KINDS = frozenset({
    KIND_ACCOUNT, KIND_FILE, KIND_FOLDER, KIND_EVENT, KIND_NOTE,
    KIND_NOTEBOOK, KIND_SECTION, KIND_RESOURCE, KIND_SHARE, KIND_COMMENT,
    KIND_ALBUM, KIND_UPLOAD, KIND_RECENT, KIND_THUMBNAIL, KIND_SEARCH,
    KIND_LOG_EVENT, KIND_CONFIG,
})


def attr_value(value):
    """Canonicalize one attribute value for records and reports.

    Bytes become lowercase hex (binary hashes are recorded, never
    interpreted); JSON numbers keep their on-disk spelling; containers
    from JSON documents collapse to a compact canonical string.
    """
    if isinstance(value, bytes):
        return binascii.hexlify(value).decode("ascii")
    if isinstance(value, RawNumber):
        return value.text
    if isinstance(value, (dict, list)):
        return compact(value)
    return value


@dataclass(frozen=True)
class Provenance:
    path: str      # tree-relative evidence path
    locator: str   # table name, kv key, prefs group, or filename grammar
    item: str      # row key / record id within the locator

    def as_list(self) -> list[str]:
        return [self.path, self.locator, self.item]

    def sort_key(self) -> tuple[str, str, str]:
        return (self.path, self.locator, self.item)


@dataclass
class Timestamp:
    label: str
    utc_ms: int | None
    original: str
    clock: str = "unknown"  # device | server | unknown
    resolution: str = "ms"  # ms | s

    def as_list(self):
        return [self.label, self.utc_ms, self.original, self.clock, self.resolution]


@dataclass
class Normalized:
    name: str | None = None
    path: str | None = None
    size_bytes: int | None = None
    timestamps: list[Timestamp] = field(default_factory=list)
    hashes: list[tuple[str, str]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "path": self.path,
            "size_bytes": self.size_bytes,
            "timestamps": [ts.as_list() for ts in self.timestamps],
            "hashes": [list(h) for h in self.hashes],
        }


@dataclass
class ArtifactRecord:
    app: str
    user_scope: str
    kind: str
    attributes: dict[str, object]
    normalized: Normalized
    provenance: Provenance

    def as_dict(self) -> dict:
        # attributes serialize as pairs so source column order survives
        # canonical sorted-key JSON emission
        return {
            "app": self.app,
            "user_scope": self.user_scope,
            "kind": self.kind,
            "attributes": [[k, attr_value(v)] for k, v in self.attributes.items()],
            "normalized": self.normalized.as_dict(),
            "provenance": self.provenance.as_list(),
        }

    def sort_key(self):
        return (self.app, *self.provenance.sort_key(), self.kind, self.user_scope)


@dataclass
class CacheFileFinding:
    app: str
    user_scope: str
    path: str                          # tree-relative
    naming: dict[str, object] = field(default_factory=dict)
    encrypted: bool = False
    decrypted_to: str | None = None    # output-dir-relative
    verified_hash: tuple[str, bool] | None = None  # (algo, matches)
    status: str = "ok"                 # ok | undecryptable: ... | orphan
    size_bytes: int | None = None

    def as_dict(self) -> dict:
        return {
            "app": self.app,
            "user_scope": self.user_scope,
            "path": self.path,
            "naming": {k: attr_value(v) for k, v in self.naming.items()},
            "encrypted": self.encrypted,
            "decrypted_to": self.decrypted_to,
            "verified_hash": list(self.verified_hash) if self.verified_hash else None,
            "status": self.status,
            "size_bytes": self.size_bytes,
        }

    def sort_key(self):
        return (self.app, self.path, self.status)


@dataclass
class HashClaim:
    """A recorded hash that verify runs can recompute independently.

    transform "none" hashes the evidence file as-is; "box_crypto" decrypts
    in memory first using the recorded parameters.
    """

    app: str
    algo: str           # md5 | sha1
    expected_hex: str
    target: str         # tree-relative evidence path
    transform: str = "none"
    params: dict = field(default_factory=dict)
    provenance: Provenance | None = None

    def as_dict(self) -> dict:
        return {
            "app": self.app,
            "algo": self.algo,
            "expected_hex": self.expected_hex,
            "target": self.target,
            "transform": self.transform,
            "params": dict(self.params),
            "provenance": self.provenance.as_list() if self.provenance else None,
        }

    def sort_key(self):
        return (self.app, self.target, self.algo, self.expected_hex)


@dataclass
class ExtractResult:
    app: str
    user_scope: str
    records: list[ArtifactRecord] = field(default_factory=list)
    findings: list[CacheFileFinding] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    hash_claims: list[HashClaim] = field(default_factory=list)
    cred_inputs: dict = field(default_factory=dict)

    def finish(self) -> "ExtractResult":
        self.records.sort(key=lambda r: r.sort_key())
        self.findings.sort(key=lambda f: f.sort_key())
        self.hash_claims.sort(key=lambda c: c.sort_key())
        self.warnings.sort()
        return self
