"""Read-only levelDB snapshot reader.

Implements just enough of the on-disk format to recover the latest value
of every key from a store directory: the 32 KiB-block write-ahead log
(*.log), sorted tables (*.ldb / *.sst, uncompressed blocks), and the
newest-wins merge across both, honoring sequence numbers and tombstones.
Compaction, repair and the MANIFEST version history are out of scope; the
merge considers every data file present, which is the right posture for a
forensic snapshot.

Corruption never raises: bad blocks are skipped and reported as warnings
so a partially damaged store still yields its readable keys.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

LOG_BLOCK_SIZE = 32768
LOG_HEADER_SIZE = 7

RECORD_FULL = 1
RECORD_FIRST = 2
RECORD_MIDDLE = 3
RECORD_LAST = 4

BATCH_HEADER_SIZE = 12
KIND_DELETE = 0
KIND_VALUE = 1

TABLE_MAGIC = 0xDB4775248B80FB57
TABLE_FOOTER_SIZE = 48
BLOCK_TRAILER_SIZE = 5
COMPRESSION_NONE = 0
COMPRESSION_SNAPPY = 1

_CRC_MASK_DELTA = 0xA282EAD8


def _make_crc32c_table() -> list[int]:
    poly = 0x82F63B78
    table = []
    for i in range(256):
        crc = i
        for _ in range(8):
            crc = (crc >> 1) ^ poly if crc & 1 else crc >> 1
        table.append(crc)
    return table


_CRC32C_TABLE = _make_crc32c_table()


def crc32c(data: bytes, crc: int = 0) -> int:
    crc ^= 0xFFFFFFFF
    for byte in data:
        crc = _CRC32C_TABLE[(crc ^ byte) & 0xFF] ^ (crc >> 8)
    return crc ^ 0xFFFFFFFF


def crc32c_masked(data: bytes) -> int:
    crc = crc32c(data)
    return (((crc >> 15) | (crc << 17)) + _CRC_MASK_DELTA) & 0xFFFFFFFF


def decode_varint(buf: bytes, pos: int) -> tuple[int, int]:
    """Return (value, new_pos); raises ValueError on truncation."""
    result = 0
    shift = 0
    while True:
        if pos >= len(buf):
            raise ValueError("truncated varint")
        byte = buf[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return result, pos
        shift += 7
        if shift > 63:
            raise ValueError("varint too long")


@dataclass
class KvSnapshot:
    source: str
    pairs: dict[bytes, bytes] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class _Entry:
    key: bytes
    sequence: int
    kind: int
    value: bytes


# ---------------------------------------------------------------------------
# log format
# ---------------------------------------------------------------------------

def _iter_log_payloads(data: bytes, name: str, warnings: list[str]):
    """Reassemble logical records from the physical block/fragment layout."""
    pos = 0
    pending: list[bytes] = []
    while pos < len(data):
        block_left = LOG_BLOCK_SIZE - pos % LOG_BLOCK_SIZE
        if block_left < LOG_HEADER_SIZE:
            pos += block_left  # zero-filled trailer
            continue
        if pos + LOG_HEADER_SIZE > len(data):
            break
        stored_crc, length, rtype = struct.unpack_from("<IHB", data, pos)
        if stored_crc == 0 and length == 0 and rtype == 0:
            pos += block_left  # preallocated empty region
            continue
        body_start = pos + LOG_HEADER_SIZE
        body_end = body_start + length
        if length > block_left - LOG_HEADER_SIZE or body_end > len(data):
            warnings.append(f"{name}: truncated record at offset {pos}; stopping")
            break
        body = data[body_start:body_end]
        if crc32c_masked(bytes([rtype]) + body) != stored_crc:
            warnings.append(f"{name}: checksum mismatch at offset {pos}; block skipped")
            pos += block_left
            pending = []
            continue
        pos = body_end

        if rtype == RECORD_FULL:
            pending = []
            yield body
        elif rtype == RECORD_FIRST:
            pending = [body]
        elif rtype == RECORD_MIDDLE:
            if pending:
                pending.append(body)
        elif rtype == RECORD_LAST:
            if pending:
                pending.append(body)
                yield b"".join(pending)
                pending = []
        else:
            warnings.append(f"{name}: unknown record type {rtype} at offset {pos}")
            pending = []


def _parse_batch(payload: bytes, name: str, warnings: list[str]) -> list[_Entry]:
    if len(payload) < BATCH_HEADER_SIZE:
        warnings.append(f"{name}: write batch shorter than header; skipped")
        return []
    sequence, count = struct.unpack_from("<QI", payload, 0)
    entries: list[_Entry] = []
    pos = BATCH_HEADER_SIZE
    try:
        for i in range(count):
            kind = payload[pos]
            pos += 1
            klen, pos = decode_varint(payload, pos)
            key = payload[pos:pos + klen]
            if len(key) != klen:
                raise ValueError("truncated key")
            pos += klen
            value = b""
            if kind == KIND_VALUE:
                vlen, pos = decode_varint(payload, pos)
                value = payload[pos:pos + vlen]
                if len(value) != vlen:
                    raise ValueError("truncated value")
                pos += vlen
            elif kind != KIND_DELETE:
                raise ValueError(f"unknown batch entry kind {kind}")
            entries.append(_Entry(key=bytes(key), sequence=sequence + i,
                                  kind=kind, value=bytes(value)))
    except (ValueError, IndexError) as exc:
        warnings.append(f"{name}: corrupt write batch ({exc}); partial entries kept")
    return entries


def _read_log_file(path: Path, warnings: list[str]) -> list[_Entry]:
    try:
        data = path.read_bytes()
    except OSError as exc:
        warnings.append(f"{path.name}: unreadable ({exc})")
        return []
    entries: list[_Entry] = []
    for payload in _iter_log_payloads(data, path.name, warnings):
        entries.extend(_parse_batch(payload, path.name, warnings))
    return entries


# ---------------------------------------------------------------------------
# sorted-table format
# ---------------------------------------------------------------------------

def _decode_block(raw: bytes, name: str, offset: int,
                  warnings: list[str]) -> bytes | None:
    """Verify trailer checksum and return uncompressed block contents."""
    if len(raw) < BLOCK_TRAILER_SIZE:
        warnings.append(f"{name}: block at {offset} shorter than trailer; skipped")
        return None
    contents, compression = raw[:-BLOCK_TRAILER_SIZE], raw[-BLOCK_TRAILER_SIZE]
    stored_crc = struct.unpack_from("<I", raw, len(raw) - 4)[0]
    if crc32c_masked(raw[:-4]) != stored_crc:
        warnings.append(f"{name}: block checksum mismatch at {offset}; skipped")
        return None
    if compression == COMPRESSION_NONE:
        return contents
    if compression == COMPRESSION_SNAPPY:
        try:
            import snappy  # optional; stores written by real apps may need it
        except ImportError:
            warnings.append(
                f"{name}: snappy-compressed block at {offset} and no snappy "
                "module available; skipped")
            return None
        try:
            return snappy.uncompress(contents)
        except Exception as exc:
            warnings.append(f"{name}: snappy block at {offset} failed ({exc}); skipped")
            return None
    warnings.append(f"{name}: unknown compression {compression} at {offset}; skipped")
    return None


def _iter_block_entries(block: bytes):
    """Yield (key, value) pairs from one block, applying prefix sharing."""
    if len(block) < 4:
        raise ValueError("block too small")
    num_restarts = struct.unpack_from("<I", block, len(block) - 4)[0]
    data_end = len(block) - 4 - 4 * num_restarts
    if data_end < 0:
        raise ValueError("restart array larger than block")
    pos = 0
    key = b""
    while pos < data_end:
        shared, pos = decode_varint(block, pos)
        non_shared, pos = decode_varint(block, pos)
        value_len, pos = decode_varint(block, pos)
        if shared > len(key) or pos + non_shared + value_len > data_end:
            raise ValueError("entry overruns block")
        key = key[:shared] + block[pos:pos + non_shared]
        pos += non_shared
        value = block[pos:pos + value_len]
        pos += value_len
        yield key, value


def _split_internal_key(ikey: bytes) -> tuple[bytes, int, int]:
    if len(ikey) < 8:
        raise ValueError("internal key shorter than trailer")
    trailer = struct.unpack_from("<Q", ikey, len(ikey) - 8)[0]
    return ikey[:-8], trailer >> 8, trailer & 0xFF


def _read_table_file(path: Path, warnings: list[str]) -> list[_Entry]:
    try:
        data = path.read_bytes()
    except OSError as exc:
        warnings.append(f"{path.name}: unreadable ({exc})")
        return []
    if len(data) < TABLE_FOOTER_SIZE:
        warnings.append(f"{path.name}: shorter than table footer; skipped")
        return []
    footer = data[-TABLE_FOOTER_SIZE:]
    magic = struct.unpack_from("<Q", footer, TABLE_FOOTER_SIZE - 8)[0]
    if magic != TABLE_MAGIC:
        warnings.append(f"{path.name}: bad table magic; skipped")
        return []
    try:
        meta_off, pos = decode_varint(footer, 0)
        meta_size, pos = decode_varint(footer, pos)
        index_off, pos = decode_varint(footer, pos)
        index_size, pos = decode_varint(footer, pos)
    except ValueError as exc:
        warnings.append(f"{path.name}: corrupt footer ({exc}); skipped")
        return []

    def read_block(offset: int, size: int) -> bytes | None:
        raw = data[offset:offset + size + BLOCK_TRAILER_SIZE]
        if len(raw) != size + BLOCK_TRAILER_SIZE:
            warnings.append(f"{path.name}: block at {offset} out of bounds; skipped")
            return None
        return _decode_block(raw, path.name, offset, warnings)

    index_block = read_block(index_off, index_size)
    if index_block is None:
        return []

    entries: list[_Entry] = []
    try:
        handles = [value for _, value in _iter_block_entries(index_block)]
    except ValueError as exc:
        warnings.append(f"{path.name}: corrupt index block ({exc}); skipped")
        return []
    for handle in handles:
        try:
            off, hpos = decode_varint(handle, 0)
            size, _ = decode_varint(handle, hpos)
        except ValueError:
            warnings.append(f"{path.name}: corrupt block handle; entry skipped")
            continue
        block = read_block(off, size)
        if block is None:
            continue
        try:
            for ikey, value in _iter_block_entries(block):
                user_key, sequence, kind = _split_internal_key(ikey)
                entries.append(_Entry(key=user_key, sequence=sequence,
                                      kind=kind, value=value))
        except ValueError as exc:
            warnings.append(f"{path.name}: corrupt data block at {off} ({exc}); skipped")
    return entries


# ---------------------------------------------------------------------------
# snapshot merge
# ---------------------------------------------------------------------------

def read_leveldb_snapshot(directory: str | Path) -> KvSnapshot:
    directory = Path(directory)
    snapshot = KvSnapshot(source=str(directory))
    if not directory.is_dir():
        snapshot.warnings.append(f"{directory}: not a directory")
        return snapshot

    files = sorted(directory.iterdir())
    log_files = [f for f in files if f.suffix == ".log"]
    table_files = [f for f in files if f.suffix in (".ldb", ".sst")]
    if not any((directory / name).exists() for name in ("CURRENT",)):
        snapshot.warnings.append("no CURRENT file; directory may not be a levelDB store")
    if not log_files and not table_files:
        snapshot.warnings.append("no log or table files found; empty snapshot")
        return snapshot

    entries: list[_Entry] = []
    for path in table_files:
        entries.extend(_read_table_file(path, snapshot.warnings))
    for path in log_files:
        entries.extend(_read_log_file(path, snapshot.warnings))

    newest: dict[bytes, _Entry] = {}
    for entry in entries:
        current = newest.get(entry.key)
        if current is None or entry.sequence > current.sequence:
            newest[entry.key] = entry
    for key in sorted(newest):
        entry = newest[key]
        if entry.kind == KIND_VALUE:
            snapshot.pairs[key] = entry.value
    return snapshot
