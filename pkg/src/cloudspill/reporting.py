"""Timestamp normalization, bundle assembly, report emission, hash verify.

Reports are canonical: same inputs produce identical bytes regardless of
extraction order, and every normalized timestamp keeps its original text.
Human-readable timestamps are interpreted in an operator-supplied device
timezone (default UTC) which is recorded in the report header.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import __version__
from .crypto import BoxCryptoParams, box_decrypt, crypto_profile
from .errors import CiphertextMalformed, DecryptFailed
from .records import ArtifactRecord, ExtractResult, HashClaim

REPORT_SCHEMA = "cloudspill-report/1"

FMT_EPOCH_MS = "epoch_ms"
FMT_EPOCH_S = "epoch_s"
FMT_YMD_HMS = "human_ymd_hms"
FMT_HUMAN_OTHER = "human_readable_other"

# the never-accessed sentinel written by OneNote
SENTINEL_YMD = "19000101 12:00:00"

_YMD_HMS_RE = re.compile(r"(\d{4})(\d{2})(\d{2}) (\d{2}):(\d{2}):(\d{2})")


def normalize_timestamp(raw, fmt: str, tz_offset_min: int = 0):
    """Convert one raw timestamp to UTC milliseconds.

    Returns (utc_ms | None, warning | None).  Blank values are legitimate
    absences (None, no warning); unparsable values are None with a warning
    and the caller keeps the original text either way.
    """
    if raw is None or raw == "":
        return None, None

    if fmt == FMT_EPOCH_MS or fmt == FMT_EPOCH_S:
        try:
            value = int(str(raw).strip())
        except ValueError:
            return None, f"unparsable epoch timestamp: {raw!r}"
        return (value * 1000 if fmt == FMT_EPOCH_S else value), None

    text = str(raw).strip()
    if fmt == FMT_YMD_HMS:
        if text == SENTINEL_YMD:
            return None, None
        match = _YMD_HMS_RE.fullmatch(text)
        if not match:
            return None, f"unparsable timestamp: {raw!r}"
        year, month, day, hour, minute, second = (int(g) for g in match.groups())
        try:
            moment = datetime(year, month, day, hour, minute, second,
                              tzinfo=timezone.utc)
        except ValueError as exc:
            return None, f"invalid calendar date {raw!r}: {exc}"
        utc_ms = int(moment.timestamp() * 1000) - tz_offset_min * 60_000
        return utc_ms, None

    if fmt == FMT_HUMAN_OTHER:
        try:
            moment = datetime.fromisoformat(text)
        except ValueError:
            return None, f"unparsable timestamp: {raw!r}"
        if moment.tzinfo is None:
            moment = moment.replace(tzinfo=timezone.utc)
            return int(moment.timestamp() * 1000) - tz_offset_min * 60_000, None
        return int(moment.timestamp() * 1000), None

    return None, f"unknown timestamp format {fmt!r}"


# ---------------------------------------------------------------------------
# bundle
# ---------------------------------------------------------------------------

@dataclass
class ArtifactBundle:
    tree_digest: str
    layout: str
    tz_offset_min: int = 0
    acquired_at_utc_ms: int | None = None
    tool_version: str = __version__
    crypto: dict = field(default_factory=crypto_profile)
    results: list[ExtractResult] = field(default_factory=list)
    credentials: list = field(default_factory=list)  # CredentialRecord

    def all_records(self) -> list[ArtifactRecord]:
        records = [r for result in self.results for r in result.records]
        records.sort(key=lambda r: r.sort_key())
        return records

    def all_claims(self) -> list[HashClaim]:
        claims = [c for result in self.results for c in result.hash_claims]
        claims.sort(key=lambda c: c.sort_key())
        return claims

    def as_dict(self) -> dict:
        apps: dict[str, dict] = {}

        def app_entry(app: str) -> dict:
            return apps.setdefault(app, {
                "scopes": [], "records": [], "findings": [],
                "credentials": [], "hash_claims": [], "warnings": [],
            })

        for result in sorted(self.results, key=lambda r: (r.app, r.user_scope)):
            entry = app_entry(result.app)
            entry["scopes"].append(result.user_scope)
            entry["records"].extend(r.as_dict() for r in
                                    sorted(result.records, key=lambda r: r.sort_key()))
            entry["findings"].extend(f.as_dict() for f in
                                     sorted(result.findings, key=lambda f: f.sort_key()))
            entry["hash_claims"].extend(c.as_dict() for c in
                                        sorted(result.hash_claims, key=lambda c: c.sort_key()))
            entry["warnings"].extend(sorted(result.warnings))
        for cred in sorted(self.credentials, key=lambda c: c.sort_key()):
            app_entry(cred.app)["credentials"].append(cred.as_dict())
        return {
            "schema": REPORT_SCHEMA,
            "tool_version": self.tool_version,
            "tree_digest": self.tree_digest,
            "layout": self.layout,
            "tz_offset_min": self.tz_offset_min,
            "acquired_at_utc_ms": self.acquired_at_utc_ms,
            "crypto_profile": self.crypto,
            "apps": apps,
        }


# ---------------------------------------------------------------------------
# timeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimelineEntry:
    utc_ms: int | None
    label: str
    app: str
    kind: str
    summary: str
    provenance: str
    original_text: str
    clock: str = "unknown"

    def as_row(self) -> list:
        return ["" if self.utc_ms is None else self.utc_ms,
                self.label, self.app, self.kind, self.summary,
                self.provenance, self.original_text]


def build_timeline(bundle: ArtifactBundle) -> list[TimelineEntry]:
    """One entry per (record, timestamp) pair; dated ascending, undated last."""
    entries = []
    for record in bundle.all_records():
        summary = (record.normalized.name or record.normalized.path
                   or record.provenance.item)
        provenance = "|".join(record.provenance.as_list())
        for ts in record.normalized.timestamps:
            entries.append(TimelineEntry(
                utc_ms=ts.utc_ms,
                label=ts.label,
                app=record.app,
                kind=record.kind,
                summary=str(summary),
                provenance=provenance,
                original_text=ts.original,
                clock=ts.clock,
            ))
    dated = [e for e in entries if e.utc_ms is not None]
    undated = [e for e in entries if e.utc_ms is None]
    dated.sort(key=lambda e: (e.utc_ms, e.provenance, e.label))
    undated.sort(key=lambda e: (e.provenance, e.label))
    return dated + undated


# ---------------------------------------------------------------------------
# emitters
# ---------------------------------------------------------------------------

def emit_json(payload: dict) -> bytes:
    return (json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)
            + "\n").encode("utf-8")


CSV_COLUMNS = ["utc_ms", "label", "app", "kind", "summary", "provenance",
               "original_text"]


def emit_csv_timeline(entries: list[TimelineEntry]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for entry in entries:
        writer.writerow(entry.as_row())
    return buf.getvalue().encode("utf-8")


# ---------------------------------------------------------------------------
# hash verification
# ---------------------------------------------------------------------------

VERDICT_MATCH = "match"
VERDICT_MISMATCH = "mismatch"
VERDICT_MISSING = "missing"


def _hash_bytes(algo: str, data: bytes) -> str:
    return hashlib.new(algo, data).hexdigest()


def verify_hashes(bundle: ArtifactBundle, tree) -> dict:
    """Recompute every recorded hash claim against the evidence tree."""
    verdicts = []
    counts = {VERDICT_MATCH: 0, VERDICT_MISMATCH: 0, VERDICT_MISSING: 0}
    for claim in bundle.all_claims():
        target = tree.root / claim.target
        verdict = VERDICT_MISSING
        detail = None
        if target.is_file():
            data = target.read_bytes()
            if claim.transform == "box_crypto":
                params = BoxCryptoParams(
                    app_encryption_key=claim.params["app_encryption_key"],
                    file_id=str(claim.params["file_id"]),
                    salt=bytes.fromhex(claim.params["salt_hex"]),
                )
                try:
                    data = box_decrypt(data, params)
                except (DecryptFailed, CiphertextMalformed) as exc:
                    verdicts.append({"claim": claim.as_dict(),
                                     "verdict": VERDICT_MISMATCH,
                                     "detail": f"decrypt failed: {exc}"})
                    counts[VERDICT_MISMATCH] += 1
                    continue
            actual = _hash_bytes(claim.algo, data)
            if actual == claim.expected_hex.lower():
                verdict = VERDICT_MATCH
            else:
                verdict = VERDICT_MISMATCH
                detail = f"actual {claim.algo} {actual}"
        verdicts.append({"claim": claim.as_dict(), "verdict": verdict,
                         "detail": detail})
        counts[verdict] += 1
    return {
        "schema": "cloudspill-verify/1",
        "tree_digest": bundle.tree_digest,
        "counts": counts,
        "verdicts": verdicts,
    }
