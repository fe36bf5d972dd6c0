"""Per-app extractors and the run orchestrator.

Each extractor is independent per (app, user scope) pair and reads only
through the evidence tree, so the orchestrator can fan them out across a
thread pool; results assemble in a fixed order regardless of parallelism.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from ..evidence import APP_ORDER, EvidenceTree, discover_apps, discover_user_ids
from ..records import ExtractResult
from .box import extract_box
from .common import ExtractorContext
from .dropbox import extract_dropbox
from .evernote import extract_evernote
from .onedrive import extract_onedrive
from .onenote import extract_onenote
from .owncloud import extract_owncloud
from .upm import extract_upm

EXTRACTORS = {
    "dropbox": extract_dropbox,
    "box": extract_box,
    "onedrive": extract_onedrive,
    "owncloud": extract_owncloud,
    "evernote": extract_evernote,
    "onenote": extract_onenote,
    "upm": extract_upm,
}


def run_extractors(tree: EvidenceTree, ctx: ExtractorContext,
                   apps: list[str] | None = None,
                   jobs: int = 1) -> list[ExtractResult]:
    """Discover apps and user scopes, run every matching extractor."""
    wanted = set(apps) if apps else set(APP_ORDER)
    tasks = []
    discovery_warnings: list[tuple[str, list[str]]] = []
    for identity in discover_apps(tree):
        if identity.app not in wanted:
            continue
        discovery = discover_user_ids(tree, identity)
        if discovery.warnings:
            discovery_warnings.append((identity.app, discovery.warnings))
        for scope in discovery.scopes:
            tasks.append((identity.app, scope))

    def run_one(task):
        app, scope = task
        return EXTRACTORS[app](tree, scope, ctx)

    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_one, tasks))
    else:
        results = [run_one(task) for task in tasks]

    for app, warnings in discovery_warnings:
        for result in results:
            if result.app == app:
                result.warnings.extend(warnings)
                result.warnings.sort()
                break
    results.sort(key=lambda r: (APP_ORDER.index(r.app), r.user_scope))
    return results
