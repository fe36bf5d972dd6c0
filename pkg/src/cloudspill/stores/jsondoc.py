"""JSON parsing that keeps the original textual form of every number.

Several apps store byte counts in exponential notation (e.g. "1.0E5");
forensic output must be able to show exactly what was on disk, so numbers
parse into RawNumber wrappers that compare like their numeric value but
remember their source text.
"""

from __future__ import annotations

import json

from ..errors import JsonMalformed


class RawNumber:
    """A JSON number plus the exact text it was parsed from."""

    __slots__ = ("value", "text")

    def __init__(self, text: str):
        self.text = text
        try:
            self.value = int(text)
        except ValueError:
            self.value = float(text)

    def as_int(self):
        """The exact integer value, or None when not exactly integral."""
        if isinstance(self.value, int):
            return self.value
        if self.value == int(self.value):
            return int(self.value)
        return None

    def __eq__(self, other):
        if isinstance(other, RawNumber):
            return self.value == other.value
        return self.value == other

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return f"RawNumber({self.text!r})"

    def __str__(self):
        return self.text


def parse_json_document(text: str):
    """Parse JSON preserving key order and raw number text."""
    try:
        return json.loads(text, parse_int=RawNumber, parse_float=RawNumber,
                          parse_constant=RawNumber)
    except json.JSONDecodeError as exc:
        raise JsonMalformed(exc.pos, exc.msg) from None


def plain(value):
    """Recursively strip RawNumber wrappers back to plain values."""
    if isinstance(value, RawNumber):
        return value.value
    if isinstance(value, dict):
        return {k: plain(v) for k, v in value.items()}
    if isinstance(value, list):
        return [plain(v) for v in value]
    return value


def compact(value) -> str:
    """Canonical compact serialization with raw number texts intact."""
    if isinstance(value, RawNumber):
        return value.text
    if isinstance(value, dict):
        inner = ",".join(f"{json.dumps(k, ensure_ascii=False)}:{compact(v)}"
                         for k, v in value.items())
        return "{" + inner + "}"
    if isinstance(value, list):
        return "[" + ",".join(compact(v) for v in value) + "]"
    return json.dumps(value, ensure_ascii=False)
