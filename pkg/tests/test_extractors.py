"""Per-app extractor behaviour over the generated fixture tree."""

from __future__ import annotations

from cloudspill.evidence import discover_apps, discover_user_ids, open_tree
from cloudspill.extractors import EXTRACTORS, run_extractors
from cloudspill.extractors.common import ExtractorContext
from cloudspill.records import KIND_NOTEBOOK, KIND_SECTION


def result_for(run, app):
    return next(r for r in run.results if r.app == app)


def records_of(run, app, kind=None, locator=None):
    result = result_for(run, app)
    records = result.records
    if kind:
        records = [r for r in records if r.kind == kind]
    if locator:
        records = [r for r in records if r.provenance.locator == locator]
    return records


# --- dropbox -----------------------------------------------------------------

def test_dropbox_scratch_hash_verified(fixture_run):
    result = result_for(fixture_run, "dropbox")
    scratch = [f for f in result.findings
               if f.naming.get("kind") == "dropbox_scratch"
               and f.naming.get("original_name") == "ledger0.pdf"]
    assert scratch and scratch[0].verified_hash == ("md5", True)


def test_dropbox_orphaned_thumbnail_flagged(fixture_run):
    thumbs = records_of(fixture_run, "dropbox", kind="thumbnail")
    by_path = {r.attributes.get("thumbs_path"): r for r in thumbs
               if "thumbs_path" in r.attributes}
    assert by_path["/Old/gone.jpg"].attributes["orphaned"] is True
    assert by_path["/Photos/pic0.jpg"].attributes["orphaned"] is False


def test_dropbox_empty_private_dir(tmp_path):
    (tmp_path / "data/data/com.dropbox.android/shared_prefs").mkdir(parents=True)
    prefs = (tmp_path / "data/data/com.dropbox.android/shared_prefs/"
             "dropbox-credentials.xml")
    prefs.write_text("<?xml version='1.0'?><map>"
                     "<string name=\"accounts\">"
                     '[{"userToken": "a|b", "userId": "42"}]</string></map>')
    tree = open_tree(tmp_path, "combined")
    identity = discover_apps(tree)[0]
    scope = discover_user_ids(tree, identity).scopes[0]
    result = EXTRACTORS["dropbox"](tree, scope, ExtractorContext())
    assert all(r.kind == "account" for r in result.records)
    assert result.findings == []


def test_dropbox_camera_upload_parse(fixture_run):
    rows = records_of(fixture_run, "dropbox", locator="camera_upload")
    assert rows[0].attributes["parsed_size_bytes"] == 2048
    assert rows[0].attributes["parsed_filename"] == "IMG_0001.jpg"


def test_dropbox_revision_suffix_surfaced(fixture_run):
    rows = records_of(fixture_run, "dropbox", locator="dropbox")
    suffixes = {r.attributes.get("parsed_revision_suffix") for r in rows
                if r.attributes.get("revision")}
    assert "abcd1234" in suffixes


def test_dropbox_kv_app_key(fixture_run):
    rows = records_of(fixture_run, "dropbox", locator="kv")
    assert rows[0].attributes == {"app_key": "fixtureappkey01"}


# --- box ---------------------------------------------------------------------

def test_box_cache_decrypts_and_verifies(fixture_run):
    result = result_for(fixture_run, "box")
    caches = [f for f in result.findings if f.naming.get("kind") == "box_cache"]
    assert len(caches) == 2
    for finding in caches:
        assert finding.encrypted is True
        assert finding.status == "ok"
        assert finding.verified_hash == ("sha1", True)
        assert finding.decrypted_to
        assert (fixture_run.output_dir / finding.decrypted_to).is_file()


def test_box_preview_decrypts(fixture_run):
    result = result_for(fixture_run, "box")
    previews = [f for f in result.findings
                if f.naming.get("kind") == "box_preview" and f.encrypted]
    assert previews and previews[0].status == "ok"
    assert previews[0].decrypted_to


def test_box_recent_file_composite_id(fixture_run):
    rows = records_of(fixture_run, "box", locator="BoxRecentFile")
    row = rows[0]
    composite = f"{row.attributes['item_type']}_{row.attributes['recent_item_id']}"
    assert row.attributes["id"] == composite
    assert row.normalized.name == composite


def test_box_leveldb_event_record(fixture_run):
    events = records_of(fixture_run, "box", kind="event",
                        locator="boxitem://event/400")
    assert events and events[0].attributes["event_type"] == "ITEM_PREVIEW"


def test_box_leveldb_size_exponent_normalized(fixture_run):
    files = records_of(fixture_run, "box", locator="boxitem://file/111")
    record = files[0]
    assert record.attributes["size"].text == "2.048E3"
    assert record.normalized.size_bytes == 2048


def test_box_missing_salt_flagged(corrupted_run):
    result = result_for(corrupted_run, "box")
    statuses = {f.path: f.status for f in result.findings}
    assert "undecryptable: missing_salt" in statuses.values()


def test_box_account_records_cover_user_info(fixture_run):
    accounts = records_of(fixture_run, "box", kind="account")
    directives = {r.attributes.get("directive") for r in accounts}
    assert {"storedLoggedInUsers", "com.box.android.MoCoBoxUsers.userInfo"} \
        <= directives


# --- onedrive ----------------------------------------------------------------

def test_onedrive_etag_split(fixture_run):
    items = records_of(fixture_run, "onedrive", locator="items")
    first = next(r for r in items if r.attributes["eTag"] == "RID!100.0")
    assert first.attributes["parsed_etag_resource_id"] == "RID!100"
    assert first.attributes["parsed_etag_version"] == 0


def test_onedrive_manual_upload_complete(fixture_run):
    db_rel = "data/data/com.microsoft.skydrive/databases/manual_upload_db"
    rows = [r for r in records_of(fixture_run, "onedrive", locator="queue")
            if r.provenance.path == db_rel]
    assert rows and rows[0].attributes["parsed_complete"] is True


def test_onedrive_auto_upload_incomplete(fixture_run):
    db_rel = "data/data/com.microsoft.skydrive/databases/auto_upload.db"
    rows = [r for r in records_of(fixture_run, "onedrive", locator="queue")
            if r.provenance.path == db_rel]
    assert rows and rows[0].attributes["parsed_complete"] is False


def test_onedrive_cache_join_and_orphan(fixture_run):
    result = result_for(fixture_run, "onedrive")
    by_id = {f.naming.get("cache_id"): f for f in result.findings}
    assert by_id[7].status == "ok"
    assert by_id[7].naming["cache_id_row"] == "RID!100Download"
    assert by_id[99].status == "orphan"


def test_onedrive_missing_dump_warns(fixture_run):
    tree = fixture_run.tree
    identity = next(a for a in discover_apps(tree) if a.app == "onedrive")
    scope = discover_user_ids(tree, identity).scopes[0]
    result = EXTRACTORS["onedrive"](tree, scope, ExtractorContext())
    assert any("no_account_dump" in w for w in result.warnings)


# --- owncloud ----------------------------------------------------------------

def test_owncloud_pin_reassembled(fixture_run):
    result = result_for(fixture_run, "owncloud")
    assert result.cred_inputs["app_pin"] == "1234"
    pins = [c for c in fixture_run.credentials
            if c.app == "owncloud" and c.kind == "app_pin"]
    assert pins and pins[0].fields["pin"] == "1234"


def test_owncloud_share_url(fixture_run):
    shares = records_of(fixture_run, "owncloud", kind="share")
    assert shares
    assert shares[0].attributes["parsed_share_url"].endswith("&t=sharetok0A")
    assert shares[0].attributes["shate_with"]  # verbatim misspelled column


def test_owncloud_share_second_resolution(fixture_run):
    shares = records_of(fixture_run, "owncloud", kind="share")
    ts = {t.label: t for t in shares[0].normalized.timestamps}
    assert ts["shared_date"].resolution == "s"
    assert ts["shared_date"].utc_ms == int(shares[0].attributes["shared_date"]) * 1000


def test_owncloud_missing_sync_file_warns(tmp_path, fixture_run):
    import shutil
    copy = tmp_path / "copy"
    shutil.copytree(fixture_run.tree.root, copy)
    # remove the keep_in_sync=1 file from the external mirror
    kept = next(r for r in records_of(fixture_run, "owncloud", locator="filelist")
                if r.attributes.get("keep_in_sync") == 1)
    victim = copy / kept.attributes["media_path"].lstrip("/")
    victim.unlink()
    tree = open_tree(copy, "combined")
    identity = next(a for a in discover_apps(tree) if a.app == "owncloud")
    scope = discover_user_ids(tree, identity).scopes[0]
    result = EXTRACTORS["owncloud"](tree, scope, ExtractorContext())
    assert any("sync_file_missing" in w for w in result.warnings)


def test_owncloud_dir_rows_are_folders(fixture_run):
    folders = records_of(fixture_run, "owncloud", kind="folder_entry")
    assert folders and folders[0].attributes["content_type"] == "DIR"


# --- evernote ----------------------------------------------------------------

def test_evernote_snippet_length_and_match(fixture_run):
    snippets = records_of(fixture_run, "evernote", locator="snippets")
    longest = max(snippets, key=lambda r: len(r.attributes["snippet"]))
    assert len(longest.attributes["snippet"]) == 193
    assert all(r.attributes["parsed_matches_content"] is True for r in snippets)


def test_evernote_active_state(fixture_run):
    notes = records_of(fixture_run, "evernote", kind="note", locator="notes")
    assert notes
    assert all(r.attributes["parsed_state"] == "active" for r in notes)
    # deleted == 0 must not produce a timeline timestamp
    for record in notes:
        assert "deleted" not in {t.label for t in record.normalized.timestamps}


def test_evernote_resource_filename_from_hash(fixture_run):
    resources = records_of(fixture_run, "evernote", kind="resource")
    record = resources[0]
    hash_hex = record.attributes["hash"].hex()  # raw BLOB, hex in reports
    assert hash_hex.startswith("ab01")
    assert record.attributes["parsed_resource_filename"] == hash_hex + ".dat"
    assert record.attributes["parsed_resource_file_present"] is True
    assert dict(record.as_dict()["attributes"])["hash"] == hash_hex


def test_evernote_share_url(fixture_run):
    shares = records_of(fixture_run, "evernote", kind="share")
    assert shares
    url = shares[0].attributes["parsed_share_url"]
    assert "/sh/" in url and url.endswith("/shkey0")


def test_evernote_log_events(fixture_run):
    events = records_of(fixture_run, "evernote", kind="log_event")
    assert len(events) == 3
    assert all(e.attributes["uid"] == "24680" for e in events)
    assert all(e.normalized.timestamps for e in events)


def test_evernote_missing_db_cited(tmp_path, fixture_run):
    import shutil
    copy = tmp_path / "copy"
    shutil.copytree(fixture_run.tree.root, copy)
    db = copy / "sdcard/Android/data/com.evernote/files/user-24680/user-24680.db"
    db.unlink()
    tree = open_tree(copy, "combined")
    identity = next(a for a in discover_apps(tree) if a.app == "evernote")
    scope = discover_user_ids(tree, identity).scopes[0]
    result = EXTRACTORS["evernote"](tree, scope, ExtractorContext())
    assert any("LAST_DB_FILEPATH" in w for w in result.warnings)


# --- onenote -----------------------------------------------------------------

def test_onenote_sentinel_timestamp_null(fixture_run):
    rows = records_of(fixture_run, "onenote", locator="OnmNotebookContent")
    for record in rows:
        ts = {t.label: t for t in record.normalized.timestamps}
        assert ts["LastAccessTime"].utc_ms is None
        assert ts["LastAccessTime"].original == "19000101 12:00:00"


def test_onenote_notebook_root_flag(fixture_run):
    rows = records_of(fixture_run, "onenote", locator="OnmNotebookContent")
    roots = [r for r in rows if r.attributes["is_notebook_root"]]
    others = [r for r in rows if not r.attributes["is_notebook_root"]]
    assert roots and all(r.kind == KIND_NOTEBOOK for r in roots)
    assert others and all(r.kind == KIND_SECTION for r in others)


def test_onenote_refresh_token_decrypted(fixture_run):
    result = result_for(fixture_run, "onenote")
    assert result.cred_inputs["refresh_token"] == "onrefresh-fixture-token"


def test_onenote_registry_path(fixture_run):
    registry = records_of(fixture_run, "onenote", locator="registry")
    assert registry
    assert registry[0].attributes["SQL DB Path"].endswith("SPM Data")


def test_onenote_section_files(fixture_run):
    sections = records_of(fixture_run, "onenote", locator=None)
    one_files = [r for r in sections if r.provenance.locator == "file_store"]
    assert len(one_files) == 2
    assert all(r.normalized.name.endswith(".one") for r in one_files)


# --- upm ---------------------------------------------------------------------

def test_upm_decrypted_record(fixture_run):
    result = result_for(fixture_run, "upm")
    decrypted = [r for r in result.records
                 if r.attributes.get("decrypted") is True]
    assert decrypted
    assert decrypted[0].attributes["password"] == \
        fixture_run.manifest["upm_password"]
    out = fixture_run.output_dir / "upm/default/upm.db.decrypted"
    assert out.is_file()
    assert out.read_bytes().startswith(b"UPMDB1")


def test_upm_no_candidates_keeps_encrypted_blob(fixture_run):
    tree = fixture_run.tree
    identity = next(a for a in discover_apps(tree) if a.app == "upm")
    scope = discover_user_ids(tree, identity).scopes[0]
    result = EXTRACTORS["upm"](tree, scope, ExtractorContext())
    kinds = {r.attributes.get("decrypted") for r in result.records}
    assert True not in kinds
    encrypted = [r for r in result.records
                 if r.attributes.get("encrypted") is True]
    assert encrypted and encrypted[0].attributes["salt"]


def test_upm_cross_app_copy_found(fixture_run):
    result = result_for(fixture_run, "upm")
    linked = [r for r in result.records
              if r.attributes.get("parsed_upm_header_match")]
    assert linked and linked[0].attributes["host_app"] == "dropbox"
    assert linked[0].attributes["path"].endswith("scratch/upm.db")


def test_truncated_upm_warns(corrupted_run):
    result = result_for(corrupted_run, "upm")
    assert any("UpmImageTooShort" in w for w in result.warnings)


# --- cross-cutting -----------------------------------------------------------

def test_provenance_paths_exist(fixture_run):
    for record in fixture_run.records():
        path = record.provenance.path
        if path == "<accounts-dump>":
            continue
        assert (fixture_run.tree.root / path).exists(), path


def test_parallel_extraction_matches_serial(fixture_run, tmp_path):
    from cloudspill.accounts import load_accounts_dump
    ctx = ExtractorContext(
        output_dir=tmp_path / "dec",
        accounts_dump=load_accounts_dump(fixture_run.root / "accounts_dump.txt"),
        upm_candidates=[fixture_run.manifest["upm_password"]])
    parallel = run_extractors(fixture_run.tree, ctx, jobs=4)
    serial = fixture_run.results
    assert [r.app for r in parallel] == [r.app for r in serial]
    for a, b in zip(parallel, serial):
        assert [x.as_dict() for x in a.records] == [x.as_dict() for x in b.records]


def test_box_size_not_exact_integer_warns():
    from cloudspill.extractors.box import build_boxitem_record
    from cloudspill.records import Provenance
    from cloudspill.stores.jsondoc import parse_json_document
    doc = parse_json_document('{"type": "file", "name": "x", "id": "9", '
                              '"size": 1.5E0}')
    warnings = []
    record = build_boxitem_record("1", "file", "9", doc,
                                  Provenance("p", "boxitem://file/9", "9"),
                                  0, warnings)
    assert record.normalized.size_bytes is None
    assert warnings and "1.5E0" in warnings[0]
    assert dict(record.as_dict()["attributes"])["size"] == "1.5E0"
