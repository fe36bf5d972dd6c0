from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import pytest

from cloudspill.accounts import load_accounts_dump
from cloudspill.credentials import reconstruct_credentials, load_secrets
from cloudspill.evidence import open_tree, tree_digest
from cloudspill.extractors import run_extractors
from cloudspill.extractors.common import ExtractorContext
from cloudspill.fixtures.generator import CORRUPTIONS, FixtureSpec, generate_fixture
from cloudspill.reporting import ArtifactBundle


@dataclass
class FixtureRun:
    """A generated fixture plus one full extraction over it."""

    root: Path
    manifest: dict
    tree: object
    digest: str
    results: list
    credentials: list
    output_dir: Path

    @property
    def bundle(self) -> ArtifactBundle:
        return ArtifactBundle(tree_digest=self.digest, layout="combined",
                              results=self.results,
                              credentials=self.credentials)

    def records(self):
        return [r for result in self.results for r in result.records]

    def findings(self):
        return [f for result in self.results for f in result.findings]

    def warnings(self):
        return [w for result in self.results for w in result.warnings]


def _run_fixture(base: Path, corruptions=()) -> FixtureRun:
    out = base / "fixture"
    manifest = generate_fixture(FixtureSpec(seed=1, corruptions=tuple(corruptions)),
                                out)
    tree = open_tree(out / "evidence", "combined")
    digest = tree_digest(tree)
    output_dir = base / "output" / "decrypted"
    ctx = ExtractorContext(
        output_dir=output_dir,
        accounts_dump=load_accounts_dump(out / "accounts_dump.txt"),
        upm_candidates=[manifest["upm_password"], "notit", "alsowrong"])
    results = run_extractors(tree, ctx)
    secrets = load_secrets(out / "secrets.json")
    credentials = []
    for result in results:
        credentials.extend(reconstruct_credentials(
            result.app, result.user_scope, result.cred_inputs, secrets))
    return FixtureRun(root=out, manifest=manifest, tree=tree, digest=digest,
                      results=results, credentials=credentials,
                      output_dir=output_dir)


@pytest.fixture(scope="session")
def fixture_run(tmp_path_factory) -> FixtureRun:
    return _run_fixture(tmp_path_factory.mktemp("clean"))


@pytest.fixture(scope="session")
def corrupted_run(tmp_path_factory) -> FixtureRun:
    return _run_fixture(tmp_path_factory.mktemp("corrupt"), CORRUPTIONS)


def canon(items) -> list[str]:
    """Order-insensitive canonical form for record/finding comparison."""
    return sorted(json.dumps(item if isinstance(item, dict) else item.as_dict(),
                             sort_keys=True, default=str)
                  for item in items)
