"""Minimal levelDB store writer for fixture generation.

Produces stores the snapshot reader can consume: CURRENT/MANIFEST
plumbing, a write-ahead log, and optionally one sorted table holding
"compacted" entries at older sequence numbers so the newest-wins merge
path gets exercised.  This writer never touches evidence; it exists so the
reader can be proven by round trip.
"""

from __future__ import annotations

import struct
from pathlib import Path

from ..stores.leveldb import (
    COMPRESSION_NONE,
    KIND_DELETE,
    KIND_VALUE,
    LOG_BLOCK_SIZE,
    LOG_HEADER_SIZE,
    RECORD_FIRST,
    RECORD_FULL,
    RECORD_LAST,
    RECORD_MIDDLE,
    TABLE_MAGIC,
    crc32c_masked,
)

COMPARATOR_NAME = b"leveldb.BytewiseComparator"
RESTART_INTERVAL = 16

_EDIT_COMPARATOR = 1
_EDIT_LOG_NUMBER = 2
_EDIT_NEXT_FILE = 3
_EDIT_LAST_SEQUENCE = 4
_EDIT_NEW_FILE = 7


def encode_varint(value: int) -> bytes:
    out = bytearray()
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def _internal_key(user_key: bytes, sequence: int, kind: int) -> bytes:
    return user_key + struct.pack("<Q", (sequence << 8) | kind)


class _LogWriter:
    def __init__(self):
        self._buf = bytearray()

    def add_record(self, payload: bytes) -> None:
        offset = 0
        first = True
        while True:
            block_left = LOG_BLOCK_SIZE - len(self._buf) % LOG_BLOCK_SIZE
            if block_left < LOG_HEADER_SIZE:
                self._buf.extend(b"\x00" * block_left)
                continue
            avail = block_left - LOG_HEADER_SIZE
            fragment = payload[offset:offset + avail]
            offset += len(fragment)
            end = offset >= len(payload)
            if first and end:
                rtype = RECORD_FULL
            elif first:
                rtype = RECORD_FIRST
            elif end:
                rtype = RECORD_LAST
            else:
                rtype = RECORD_MIDDLE
            crc = crc32c_masked(bytes([rtype]) + fragment)
            self._buf.extend(struct.pack("<IHB", crc, len(fragment), rtype))
            self._buf.extend(fragment)
            first = False
            if end:
                return

    def contents(self) -> bytes:
        return bytes(self._buf)


def encode_batch(sequence: int, ops: list[tuple[int, bytes, bytes]]) -> bytes:
    """ops: (kind, key, value) triples; sequence numbers ascend from ``sequence``."""
    out = bytearray(struct.pack("<QI", sequence, len(ops)))
    for kind, key, value in ops:
        out.append(kind)
        out.extend(encode_varint(len(key)))
        out.extend(key)
        if kind == KIND_VALUE:
            out.extend(encode_varint(len(value)))
            out.extend(value)
    return bytes(out)


class _BlockBuilder:
    def __init__(self, restart_interval: int = RESTART_INTERVAL):
        self._buf = bytearray()
        self._restarts = [0]
        self._counter = 0
        self._last_key = b""
        self._interval = restart_interval

    def add(self, key: bytes, value: bytes) -> None:
        shared = 0
        if self._counter < self._interval:
            max_shared = min(len(key), len(self._last_key))
            while shared < max_shared and key[shared] == self._last_key[shared]:
                shared += 1
        else:
            self._restarts.append(len(self._buf))
            self._counter = 0
        self._buf.extend(encode_varint(shared))
        self._buf.extend(encode_varint(len(key) - shared))
        self._buf.extend(encode_varint(len(value)))
        self._buf.extend(key[shared:])
        self._buf.extend(value)
        self._last_key = key
        self._counter += 1

    def finish(self) -> bytes:
        out = bytearray(self._buf)
        for restart in self._restarts:
            out.extend(struct.pack("<I", restart))
        out.extend(struct.pack("<I", len(self._restarts)))
        return bytes(out)


def _emit_block(out: bytearray, contents: bytes) -> tuple[int, int]:
    """Append contents + trailer; return the (offset, size) handle."""
    offset = len(out)
    out.extend(contents)
    out.append(COMPRESSION_NONE)
    out.extend(struct.pack("<I", crc32c_masked(contents + bytes([COMPRESSION_NONE]))))
    return offset, len(contents)


def build_table(entries: list[tuple[bytes, int, int, bytes]],
                block_target: int = 4096) -> bytes:
    """Serialize (user_key, sequence, kind, value) entries into a table file.

    Internal-key order: ascending user key, descending sequence.
    """
    ordered = sorted(entries, key=lambda e: (e[0], -e[1], -e[2]))
    out = bytearray()
    index: list[tuple[bytes, int, int]] = []

    block = _BlockBuilder()
    block_bytes = 0
    last_key = b""
    for user_key, sequence, kind, value in ordered:
        ikey = _internal_key(user_key, sequence, kind)
        block.add(ikey, value)
        block_bytes += len(ikey) + len(value)
        last_key = ikey
        if block_bytes >= block_target:
            handle = _emit_block(out, block.finish())
            index.append((last_key, *handle))
            block = _BlockBuilder()
            block_bytes = 0
    if block_bytes or not index:
        handle = _emit_block(out, block.finish())
        index.append((last_key, *handle))

    meta_handle = _emit_block(out, _BlockBuilder().finish())

    index_block = _BlockBuilder(restart_interval=1)
    for last_key, offset, size in index:
        index_block.add(last_key, encode_varint(offset) + encode_varint(size))
    index_handle = _emit_block(out, index_block.finish())

    footer = bytearray()
    footer.extend(encode_varint(meta_handle[0]))
    footer.extend(encode_varint(meta_handle[1]))
    footer.extend(encode_varint(index_handle[0]))
    footer.extend(encode_varint(index_handle[1]))
    footer.extend(b"\x00" * (40 - len(footer)))
    footer.extend(struct.pack("<Q", TABLE_MAGIC))
    out.extend(footer)
    return bytes(out)


def _version_edit(log_number: int, next_file: int, last_sequence: int,
                  table_file: tuple[int, int, bytes, bytes] | None) -> bytes:
    out = bytearray()
    out.extend(encode_varint(_EDIT_COMPARATOR))
    out.extend(encode_varint(len(COMPARATOR_NAME)))
    out.extend(COMPARATOR_NAME)
    out.extend(encode_varint(_EDIT_LOG_NUMBER))
    out.extend(encode_varint(log_number))
    out.extend(encode_varint(_EDIT_NEXT_FILE))
    out.extend(encode_varint(next_file))
    out.extend(encode_varint(_EDIT_LAST_SEQUENCE))
    out.extend(encode_varint(last_sequence))
    if table_file is not None:
        number, size, smallest, largest = table_file
        out.extend(encode_varint(_EDIT_NEW_FILE))
        out.extend(encode_varint(0))  # level
        out.extend(encode_varint(number))
        out.extend(encode_varint(size))
        out.extend(encode_varint(len(smallest)))
        out.extend(smallest)
        out.extend(encode_varint(len(largest)))
        out.extend(largest)
    return bytes(out)


def write_leveldb(pairs: dict[bytes, bytes], directory: str | Path, *,
                  deletes: tuple[bytes, ...] = (),
                  compacted: dict[bytes, bytes] | None = None) -> None:
    """Write a readable store: ``pairs`` then ``deletes`` go to the log;
    ``compacted`` entries land in a sorted table at older sequences."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    sequence = 1
    table_info = None
    if compacted:
        entries = []
        for key in sorted(compacted):
            entries.append((key, sequence, KIND_VALUE, compacted[key]))
            sequence += 1
        table_bytes = build_table(entries)
        (directory / "000004.ldb").write_bytes(table_bytes)
        ordered = sorted(entries, key=lambda e: (e[0], -e[1], -e[2]))
        table_info = (4, len(table_bytes),
                      _internal_key(ordered[0][0], ordered[0][1], ordered[0][2]),
                      _internal_key(ordered[-1][0], ordered[-1][1], ordered[-1][2]))

    log = _LogWriter()
    ops = [(KIND_VALUE, key, pairs[key]) for key in sorted(pairs)]
    ops.extend((KIND_DELETE, key, b"") for key in deletes)
    if ops:
        log.add_record(encode_batch(sequence, ops))
        sequence += len(ops)
    (directory / "000003.log").write_bytes(log.contents())

    manifest = _LogWriter()
    manifest.add_record(_version_edit(3, 5, sequence - 1, table_info))
    (directory / "MANIFEST-000002").write_bytes(manifest.contents())
    (directory / "CURRENT").write_text("MANIFEST-000002\n", encoding="utf-8")
    (directory / "LOCK").write_bytes(b"")
