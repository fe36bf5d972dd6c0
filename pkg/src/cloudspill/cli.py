"""Operator command surface.

Commands: scan, extract, creds, timeline, verify, fixture.  Exit codes:
0 success, 1 hard error, 2 success with warnings, 64 usage error.  All
outputs land under --out, which must never sit inside the evidence root.
Configuration comes from flags or a JSON config file; on conflict the
file wins and a warning says so.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .accounts import load_accounts_dump
from .credentials import (
    apply_expiry,
    load_endpoints,
    load_secrets,
    reconstruct_credentials,
)
from .errors import CloudspillError
from .evidence import APP_ORDER, open_tree, tree_digest
from .extractors import run_extractors
from .extractors.common import ExtractorContext
from .fixtures.generator import CORRUPTIONS, FixtureSpec, generate_fixture
from .reporting import (
    ArtifactBundle,
    build_timeline,
    emit_csv_timeline,
    emit_json,
    verify_hashes,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_WARNINGS = 2
EXIT_USAGE = 64


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cloudspill",
        description="Read-only forensic extraction for seven Android cloud apps")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--root", help="evidence tree root directory")
        p.add_argument("--layout", choices=["combined", "split"],
                       default="combined")
        p.add_argument("--out", help="output directory (never inside --root)")
        p.add_argument("--apps", help="comma-separated app filter")
        p.add_argument("--accounts-dump", dest="accounts_dump",
                       help="AccountManager dump file")
        p.add_argument("--secrets", help="operator secrets JSON")
        p.add_argument("--endpoints", help="endpoint templates JSON")
        p.add_argument("--tz-offset-min", dest="tz_offset_min", type=int,
                       default=0, help="device timezone offset in minutes")
        p.add_argument("--wordlist", help="UPM password candidates, one per line")
        p.add_argument("--upm-iterations", dest="upm_iterations", type=int,
                       default=20, help="PBE iteration count for upm.db")
        p.add_argument("--upm-no-magic", dest="upm_no_magic",
                       action="store_true",
                       help="treat any padding-valid decryption as a "
                            "candidate plaintext (real-evidence mode)")
        p.add_argument("--allow-network", dest="allow_network",
                       action="store_true")
        p.add_argument("--acquired-at", dest="acquired_at", type=int,
                       help="acquisition timestamp (UTC ms)")
        p.add_argument("--now", dest="now", type=int,
                       help="operator clock for expiry checks (UTC ms)")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--config", help="JSON config file; wins over flags")

    for name in ("scan", "extract", "creds", "timeline", "verify"):
        add_common(sub.add_parser(name))

    fixture = sub.add_parser("fixture")
    fixture.add_argument("--out", required=True)
    fixture.add_argument("--seed", type=int, default=1)
    fixture.add_argument("--layout", choices=["combined", "split"],
                         default="combined")
    fixture.add_argument("--apps", help="comma-separated app subset")
    fixture.add_argument("--corruptions",
                         help=f"comma-separated subset of {','.join(CORRUPTIONS)}")
    return parser


def _apply_config_file(args: argparse.Namespace, warnings: list[str]) -> None:
    if not getattr(args, "config", None):
        return
    loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
    for key, value in loaded.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            warnings.append(f"config: unknown key {key!r} ignored")
            continue
        current = getattr(args, attr)
        if current not in (None, False, 0, "combined", 1) and current != value:
            warnings.append(
                f"config: {key}={value!r} overrides flag value {current!r}")
        setattr(args, attr, value)


def _check_paths(args, out_required: bool = False) -> tuple[Path, Path | None]:
    if not args.root:
        raise UsageError("--root is required")
    root = Path(args.root).resolve()
    if out_required and not args.out:
        raise UsageError("--out is required for this command")
    out = Path(args.out).resolve() if args.out else None
    if out is not None and root in (out, *out.parents):
        raise UsageError("output directory must not sit inside the evidence root")
    return root, out


class UsageError(Exception):
    pass


def _context(args, out: Path | None) -> ExtractorContext:
    ctx = ExtractorContext(tz_offset_min=args.tz_offset_min,
                           upm_iterations=args.upm_iterations,
                           upm_magic_check=not args.upm_no_magic)
    if out is not None:
        ctx.output_dir = out / "decrypted"
    if args.accounts_dump:
        ctx.accounts_dump = load_accounts_dump(args.accounts_dump)
    if args.wordlist:
        candidates = Path(args.wordlist).read_text(encoding="utf-8").splitlines()
        ctx.upm_candidates = [c for c in candidates if c]
    return ctx


def _run_pipeline(args):
    root, out = _check_paths(args)
    tree = open_tree(root, args.layout)
    digest = tree_digest(tree)
    ctx = _context(args, out)
    apps = args.apps.split(",") if args.apps else None
    if apps:
        unknown = set(apps) - set(APP_ORDER)
        if unknown:
            raise UsageError(f"unknown apps: {', '.join(sorted(unknown))}")
    results = run_extractors(tree, ctx, apps=apps, jobs=args.jobs)

    secrets = load_secrets(args.secrets)
    creds = []
    for result in results:
        creds.extend(reconstruct_credentials(result.app, result.user_scope,
                                             result.cred_inputs, secrets))
    apply_expiry(creds, args.acquired_at, args.now)

    from .crypto import crypto_profile
    bundle = ArtifactBundle(tree_digest=digest, layout=args.layout,
                            tz_offset_min=args.tz_offset_min,
                            acquired_at_utc_ms=args.acquired_at,
                            crypto=crypto_profile(args.upm_iterations),
                            results=results, credentials=creds)
    return tree, bundle


def _warning_count(bundle: ArtifactBundle) -> int:
    # an extraction that found nothing at all is success-with-warnings
    if not bundle.results:
        return 1
    return sum(len(result.warnings) for result in bundle.results)


def _write(out: Path | None, name: str, data: bytes) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_bytes(data)


def cmd_scan(args) -> int:
    root, _ = _check_paths(args)
    tree = open_tree(root, args.layout)
    from .evidence import discover_apps, discover_user_ids
    lines = []
    warned = False
    for identity in discover_apps(tree):
        discovery = discover_user_ids(tree, identity)
        warned = warned or bool(discovery.warnings)
        scopes = ",".join(s.user_id for s in discovery.scopes) or "-"
        external = "yes" if identity.external_path else "no"
        lines.append(f"{identity.app}\t{identity.package_name}\t"
                     f"users={scopes}\texternal={external}")
    print("\n".join(lines) if lines else "no supported apps found")
    return EXIT_WARNINGS if warned else EXIT_OK


def cmd_extract(args) -> int:
    _, out = _check_paths(args, out_required=True)
    tree, bundle = _run_pipeline(args)
    _write(out, "report.json", emit_json(bundle.as_dict()))
    entries = build_timeline(bundle)
    _write(out, "timeline.csv", emit_csv_timeline(entries))
    after = tree_digest(tree)
    if after != bundle.tree_digest:
        print("FATAL: evidence tree changed during extraction", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_WARNINGS if _warning_count(bundle) else EXIT_OK


def cmd_creds(args) -> int:
    from .credentials import KIND_OAUTH2, build_refresh_request
    _, out = _check_paths(args, out_required=True)
    _, bundle = _run_pipeline(args)
    endpoints = load_endpoints(args.endpoints)
    entries = []
    for cred in sorted(bundle.credentials, key=lambda c: c.sort_key()):
        entry = cred.as_dict()
        if cred.kind == KIND_OAUTH2:
            entry["refresh_request"] = \
                build_refresh_request(cred, endpoints).as_dict()
        entries.append(entry)
    payload = {
        "schema": "cloudspill-credentials/1",
        "tree_digest": bundle.tree_digest,
        "credentials": entries,
    }
    _write(out, "credentials.json", emit_json(payload))
    return EXIT_WARNINGS if _warning_count(bundle) else EXIT_OK


def cmd_timeline(args) -> int:
    _, out = _check_paths(args, out_required=True)
    _, bundle = _run_pipeline(args)
    entries = build_timeline(bundle)
    _write(out, "timeline.csv", emit_csv_timeline(entries))
    return EXIT_WARNINGS if _warning_count(bundle) else EXIT_OK


def cmd_verify(args) -> int:
    _, out = _check_paths(args, out_required=True)
    tree, bundle = _run_pipeline(args)
    report = verify_hashes(bundle, tree)
    _write(out, "verify.json", emit_json(report))
    if report["counts"]["mismatch"] or report["counts"]["missing"]:
        return EXIT_WARNINGS
    return EXIT_WARNINGS if _warning_count(bundle) else EXIT_OK


def cmd_fixture(args) -> int:
    apps = tuple(args.apps.split(",")) if args.apps else APP_ORDER
    corruptions = tuple(args.corruptions.split(",")) if args.corruptions else ()
    spec = FixtureSpec(seed=args.seed, apps=apps, corruptions=corruptions,
                       layout=args.layout)
    manifest = generate_fixture(spec, Path(args.out))
    print(f"fixture written to {args.out}: {manifest['record_count']} records")
    return EXIT_OK


COMMANDS = {
    "scan": cmd_scan,
    "extract": cmd_extract,
    "creds": cmd_creds,
    "timeline": cmd_timeline,
    "verify": cmd_verify,
    "fixture": cmd_fixture,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; remap to the documented code
        if exc.code not in (0, None):
            return EXIT_USAGE
        return 0
    config_warnings: list[str] = []
    try:
        if args.command != "fixture":
            _apply_config_file(args, config_warnings)
        for warning in config_warnings:
            print(warning, file=sys.stderr)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CloudspillError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
