"""Operator-produced AccountManager dump parsing.

The acquisition side exports Android's account store with privileged
tooling; this toolkit only consumes the resulting text document.  Grammar
(documented in the README): UTF-8 text, records separated by blank lines,
one ``name=value`` pair per line, ``#`` starts a comment.  Recognized
names are ``package``, ``account_name``, ``password`` and the repeated
``userdata.<key>`` / ``authtoken.<type>`` forms.  Values keep everything
after the first ``=`` verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class AccountDumpEntry:
    package: str = ""
    account_name: str = ""
    password: str | None = None
    userdata: dict[str, str] = field(default_factory=dict)
    authtokens: dict[str, str] = field(default_factory=dict)
    source: str = ""


@dataclass
class AccountsDump:
    entries: list[AccountDumpEntry] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    source: str = ""

    def for_package(self, package: str) -> list[AccountDumpEntry]:
        return [e for e in self.entries if e.package == package]


def parse_accounts_dump(text: str, source: str = "<memory>") -> AccountsDump:
    dump = AccountsDump(source=source)
    current: AccountDumpEntry | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            if current is not None:
                dump.entries.append(current)
                current = None
            continue
        if stripped.startswith("#"):
            continue
        if "=" not in stripped:
            dump.warnings.append(f"{source}:{lineno}: ignored line without '='")
            continue
        name, value = stripped.split("=", 1)
        name = name.strip()
        if current is None:
            current = AccountDumpEntry(source=source)
        if name == "package":
            current.package = value
        elif name == "account_name":
            current.account_name = value
        elif name == "password":
            current.password = value
        elif name.startswith("userdata."):
            current.userdata[name[len("userdata."):]] = value
        elif name.startswith("authtoken."):
            current.authtokens[name[len("authtoken."):]] = value
        else:
            dump.warnings.append(f"{source}:{lineno}: unknown field {name!r}")
    if current is not None:
        dump.entries.append(current)
    return dump


def load_accounts_dump(path: str | Path) -> AccountsDump:
    path = Path(path)
    return parse_accounts_dump(path.read_text(encoding="utf-8"), source=str(path))


def serialize_accounts_dump(entries: list[AccountDumpEntry]) -> str:
    """Emit the dump grammar (fixture support)."""
    blocks = []
    for entry in entries:
        lines = [f"package={entry.package}",
                 f"account_name={entry.account_name}"]
        if entry.password is not None:
            lines.append(f"password={entry.password}")
        for key in sorted(entry.userdata):
            lines.append(f"userdata.{key}={entry.userdata[key]}")
        for key in sorted(entry.authtokens):
            lines.append(f"authtoken.{key}={entry.authtokens[key]}")
        blocks.append("\n".join(lines))
    return "# AccountManager dump\n" + "\n\n".join(blocks) + "\n"
