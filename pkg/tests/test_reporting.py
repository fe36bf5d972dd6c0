"""Bundle assembly, timeline, emitters and hash verification."""

from __future__ import annotations

import csv
import io
import random

from cloudspill.records import (
    ArtifactRecord,
    ExtractResult,
    HashClaim,
    Normalized,
    Provenance,
    Timestamp,
)
from cloudspill.reporting import (
    ArtifactBundle,
    TimelineEntry,
    build_timeline,
    emit_csv_timeline,
    emit_json,
    verify_hashes,
)


def _record(app="dropbox", item="a", timestamps=()):
    return ArtifactRecord(
        app=app, user_scope="1", kind="file_entry",
        attributes={"name": item},
        normalized=Normalized(name=item, timestamps=list(timestamps)),
        provenance=Provenance("path/db", "table", item))


def _bundle(records, claims=()):
    result = ExtractResult(app="dropbox", user_scope="1",
                           records=list(records), hash_claims=list(claims))
    return ArtifactBundle(tree_digest="d", layout="combined", results=[result])


def test_timeline_counts_and_sections():
    records = [
        _record(item="a", timestamps=[Timestamp("modified", 300, "300"),
                                      Timestamp("created", 100, "100")]),
        _record(item="b", timestamps=[Timestamp("modified", 200, "200"),
                                      Timestamp("seen", None, "19000101 12:00:00")]),
    ]
    entries = build_timeline(_bundle(records))
    assert len(entries) == 4
    dated = [e for e in entries if e.utc_ms is not None]
    assert [e.utc_ms for e in dated] == [100, 200, 300]
    assert entries[-1].utc_ms is None
    assert entries[-1].original_text == "19000101 12:00:00"


def test_timeline_empty_bundle():
    assert build_timeline(_bundle([])) == []


def test_timeline_provenance_resolves_to_records():
    records = [_record(item="a", timestamps=[Timestamp("t", 1, "1")])]
    bundle = _bundle(records)
    entries = build_timeline(bundle)
    known = {"|".join(r.provenance.as_list()) for r in bundle.all_records()}
    assert all(e.provenance in known for e in entries)


def test_emit_json_deterministic():
    payload = {"b": 1, "a": [1, 2, {"z": None}]}
    assert emit_json(payload) == emit_json(payload)
    assert emit_json(payload).endswith(b"\n")


def test_emit_json_stable_under_input_reordering():
    records = [_record(item=c) for c in "abc"]
    shuffled = list(records)
    random.Random(3).shuffle(shuffled)
    a = emit_json(_bundle(records).as_dict())
    b = emit_json(_bundle(shuffled).as_dict())
    assert a == b


def test_csv_quoting_and_nulls():
    entries = [
        TimelineEntry(utc_ms=None, label="l", app="a", kind="k",
                      summary='has,comma and "quotes"', provenance="p",
                      original_text="o"),
        TimelineEntry(utc_ms=5, label="l", app="a", kind="k",
                      summary="plain", provenance="p", original_text="o"),
    ]
    blob = emit_csv_timeline(entries)
    rows = list(csv.reader(io.StringIO(blob.decode())))
    assert rows[0] == ["utc_ms", "label", "app", "kind", "summary",
                       "provenance", "original_text"]
    assert rows[1][0] == ""  # null utc_ms
    assert rows[1][4] == 'has,comma and "quotes"'
    assert rows[2][0] == "5"


def test_emit_csv_deterministic():
    entries = [TimelineEntry(1, "l", "a", "k", "s", "p", "o")]
    assert emit_csv_timeline(entries) == emit_csv_timeline(entries)


def test_verify_hashes_match_mismatch_missing(tmp_path):
    good = tmp_path / "good.bin"
    good.write_bytes(b"payload")
    import hashlib
    claims = [
        HashClaim(app="dropbox", algo="md5",
                  expected_hex=hashlib.md5(b"payload").hexdigest(),
                  target="good.bin"),
        HashClaim(app="dropbox", algo="md5",
                  expected_hex="0" * 32, target="good.bin"),
        HashClaim(app="dropbox", algo="md5",
                  expected_hex="0" * 32, target="gone.bin"),
    ]
    bundle = _bundle([], claims)

    class FakeTree:
        root = tmp_path

    report = verify_hashes(bundle, FakeTree())
    assert report["counts"] == {"match": 1, "mismatch": 1, "missing": 1}


def test_verify_detects_single_corruption(corrupted_run):
    report = verify_hashes(corrupted_run.bundle, corrupted_run.tree)
    assert report["counts"]["mismatch"] == 1


def test_full_fixture_timeline_counts(fixture_run):
    entries = build_timeline(fixture_run.bundle)
    dated = sum(1 for e in entries if e.utc_ms is not None)
    undated = len(entries) - dated
    want = fixture_run.manifest["expected_timeline"]
    assert {"dated": dated, "undated": undated} == want


def test_timeline_monotonic(fixture_run):
    entries = build_timeline(fixture_run.bundle)
    dated = [e.utc_ms for e in entries if e.utc_ms is not None]
    assert dated == sorted(dated)
    # undated entries are segregated at the end
    tail = [e.utc_ms for e in entries[len(dated):]]
    assert all(v is None for v in tail)


def test_report_includes_crypto_profile(fixture_run):
    payload = fixture_run.bundle.as_dict()
    assert payload["schema"] == "cloudspill-report/1"
    assert payload["crypto_profile"]["upm"]["kdf"] == "pkcs12-sha256"
    assert payload["crypto_profile"]["box"]["kdf_iterations"] == 1


def test_report_nests_credentials_per_app(fixture_run):
    payload = fixture_run.bundle.as_dict()
    assert "credentials" not in payload  # nested under each app instead
    assert payload["apps"]["owncloud"]["credentials"]
    kinds = {c["kind"] for app in payload["apps"].values()
             for c in app["credentials"]}
    assert {"oauth1_plaintext", "oauth2_refresh", "basic_password",
            "encrypted_token", "app_pin", "app_keypair"} <= kinds
