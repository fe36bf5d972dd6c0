"""Android shared-preferences XML reader.

These files are a <map> of typed tags:

    <string name="app_key">abc123</string>
    <boolean name="set_pincode" value="true" />
    <int name="userid" value="1234" />
    <long name="LAST_SYNC" value="1398902400000" />

The reader is lossless: each entry keeps the raw text exactly as found so
reports can reproduce the evidence verbatim, alongside the typed value.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import PrefsMalformed

_VALUE_ATTR_TAGS = {"boolean", "int", "long", "float"}


@dataclass(frozen=True)
class PrefsEntry:
    name: str
    tag: str
    value: object        # str | bool | int | float
    raw: str             # text exactly as stored


@dataclass
class PrefsMap:
    source: str
    entries: dict[str, PrefsEntry] = field(default_factory=dict)

    def get(self, name: str, default=None):
        entry = self.entries.get(name)
        return entry.value if entry is not None else default

    def raw(self, name: str, default=None):
        entry = self.entries.get(name)
        return entry.raw if entry is not None else default

    def __contains__(self, name: str) -> bool:
        return name in self.entries


def _byte_offset(data: bytes, line: int, column: int) -> int:
    # ElementTree reports (line, column); map back to a byte offset
    lines = data.split(b"\n")
    prefix = sum(len(l) + 1 for l in lines[:line - 1])
    return prefix + column


def _typed(tag: str, raw: str):
    if tag == "boolean":
        return raw == "true"
    if tag in ("int", "long"):
        try:
            return int(raw)
        except ValueError:
            return raw
    if tag == "float":
        try:
            return float(raw)
        except ValueError:
            return raw
    return raw


def read_prefs_xml(path: str | Path) -> PrefsMap:
    path = Path(path)
    data = path.read_bytes()
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, column = exc.position
        raise PrefsMalformed(str(path), _byte_offset(data, line, column), exc.msg) from None

    prefs = PrefsMap(source=str(path))
    for element in root:
        name = element.get("name")
        if name is None:
            continue
        tag = element.tag
        if tag in _VALUE_ATTR_TAGS:
            raw = element.get("value", "")
        elif tag == "string":
            raw = element.text or ""
        else:
            # unknown tag (e.g. string sets): keep its serialized body
            raw = (element.text or "").strip() or ET.tostring(element, encoding="unicode").strip()
        prefs.entries[name] = PrefsEntry(name=name, tag=tag, value=_typed(tag, raw), raw=raw)
    return prefs


def serialize_prefs_xml(entries: list[PrefsEntry]) -> str:
    """Re-emit entries in the shared-preferences dialect.

    Used by tests to check losslessness and by the fixture generator; the
    evidence-reading path never calls this.
    """
    lines = ["<?xml version='1.0' encoding='utf-8' standalone='yes' ?>", "<map>"]
    for entry in entries:
        if entry.tag in _VALUE_ATTR_TAGS:
            lines.append(f'    <{entry.tag} name="{_esc(entry.name)}" value="{_esc(entry.raw)}" />')
        else:
            lines.append(f'    <string name="{_esc(entry.name)}">{_esc_text(entry.raw)}</string>')
    lines.append("</map>")
    return "\n".join(lines) + "\n"


def _esc(value: str) -> str:
    return (value.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _esc_text(value: str) -> str:
    return value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
