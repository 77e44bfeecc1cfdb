"""Relevance-zone pattern table: all-match queries, smallest-valid
selection, binary persistence, merging.

Entries are grouped by exact zone bitmask, then by a Zobrist-style hash of
the zone-masked contents, so a query costs one probe per distinct zone
shape. Buckets are immutable tuples and are replaced (never mutated) on
insert, so query results held by concurrent readers stay valid; writers
serialize on a lock.

File format (little-endian): magic ``RZT1``, u8 version, u8 board size,
u32 entry count; per entry the zone bitmask (bit i = point i, packed
byte-wise), u8 to_move (0 black / 1 white), u8 outcome (1 = attacker win),
u16 zone size, then 2-bit cell codes (0 empty / 1 black / 2 white) for
zone points in ascending order, four per byte, low bits first; finally a
u32 CRC32 of everything before it.
"""

from __future__ import annotations

import struct
import threading
import zlib
from typing import IO, Optional, Union

from .board import BLACK, WHITE, BoardPosition, Geometry, iter_bits, popcount
from .zones import RZPattern, matches

MAGIC = b"RZT1"
VERSION = 1


class TableError(Exception):
    pass


class CorruptFile(TableError):
    pass


class VersionMismatch(TableError):
    pass


class BoardSizeMismatch(TableError):
    pass


class RZTable:
    def __init__(self, n: int):
        self.n = n
        self.geo = Geometry.get(n)
        self.entries: list[RZPattern] = []
        self._by_key: dict[tuple, int] = {}
        # zone bitmask -> masked content hash -> tuple of entry ids
        self.zone_index: dict[int, dict[int, tuple[int, ...]]] = {}
        self.stats = {"inserts": 0, "duplicates": 0, "hits": 0, "misses": 0}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.entries)

    def _content_hash(self, zone: int, black: int, white: int) -> int:
        h = 0
        zs = self.geo.z_stone
        for p in iter_bits(black & zone):
            h ^= zs[BLACK][p]
        for p in iter_bits(white & zone):
            h ^= zs[WHITE][p]
        return h

    def insert(self, pattern: RZPattern) -> int:
        """Deduplicated insert; returns the entry id (existing on duplicates)."""
        if pattern.n != self.n:
            raise BoardSizeMismatch(
                f"pattern for size {pattern.n} in a size-{self.n} table")
        if pattern.outcome != "white_win":
            raise ValueError("only attacker-win patterns are storable")
        if not pattern.ko_free:
            raise ValueError("only ko-free patterns are storable")
        key = pattern.key()
        with self._lock:
            existing = self._by_key.get(key)
            if existing is not None:
                self.stats["duplicates"] += 1
                return existing
            eid = len(self.entries)
            self.entries.append(pattern)
            self._by_key[key] = eid
            h = self._content_hash(pattern.zone, pattern.black, pattern.white)
            buckets = self.zone_index.get(pattern.zone)
            if buckets is None:
                buckets = self.zone_index[pattern.zone] = {}
            buckets[h] = buckets.get(h, ()) + (eid,)
            self.stats["inserts"] += 1
            return eid

    def lookup_all(self, pos: BoardPosition) -> list[RZPattern]:
        """Exactly the entries matching `pos`, in ascending id order."""
        if pos.ko_ban is not None:
            return []
        ids: list[int] = []
        for zone, buckets in list(self.zone_index.items()):
            h = self._content_hash(zone, pos.black, pos.white)
            for eid in buckets.get(h, ()):
                if matches(self.entries[eid], pos):
                    ids.append(eid)
        ids.sort()
        if ids:
            self.stats["hits"] += 1
        else:
            self.stats["misses"] += 1
        return [self.entries[eid] for eid in ids]

    def lookup_best(self, pos: BoardPosition, constraint=None) -> Optional[RZPattern]:
        """Smallest matching entry whose zone avoids the constraint;
        ties go to the lowest entry id."""
        forbidden = constraint.forbidden if constraint is not None else 0
        best = None
        best_size = None
        for pat in self.lookup_all(pos):
            if pat.zone & forbidden:
                continue
            size = popcount(pat.zone)
            if best is None or size < best_size:
                best, best_size = pat, size
        return best

    # -- persistence ------------------------------------------------------

    def save(self, dest: Union[str, IO[bytes]]):
        payload = bytearray()
        payload += MAGIC
        payload += struct.pack("<BBI", VERSION, self.n, len(self.entries))
        zone_bytes = (self.n * self.n + 7) // 8
        for pat in self.entries:
            payload += pat.zone.to_bytes(zone_bytes, "little")
            payload += struct.pack("<BBH", 1 if pat.to_move == WHITE else 0,
                                   1, popcount(pat.zone))
            cells = pat.contents()
            packed = bytearray((len(cells) + 3) // 4)
            for i, cell in enumerate(cells):
                packed[i // 4] |= cell << (2 * (i % 4))
            payload += packed
        payload += struct.pack("<I", zlib.crc32(bytes(payload)) & 0xFFFFFFFF)
        if isinstance(dest, str):
            with open(dest, "wb") as fh:
                fh.write(payload)
        else:
            dest.write(bytes(payload))

    @classmethod
    def load(cls, source: Union[str, IO[bytes]],
             expect_size: Optional[int] = None) -> "RZTable":
        if isinstance(source, str):
            with open(source, "rb") as fh:
                data = fh.read()
        else:
            data = source.read()
        if len(data) < 14 or data[:4] != MAGIC:
            raise CorruptFile("bad magic")
        body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
        if zlib.crc32(body) & 0xFFFFFFFF != crc:
            raise CorruptFile("checksum mismatch")
        version, n, count = struct.unpack("<BBI", body[4:10])
        if version != VERSION:
            raise VersionMismatch(f"file version {version}, expected {VERSION}")
        if not 5 <= n <= 9:
            raise CorruptFile(f"board size {n} out of range")
        if expect_size is not None and n != expect_size:
            raise BoardSizeMismatch(
                f"table is for size {n}, session uses {expect_size}")
        table = cls(n)
        zone_bytes = (n * n + 7) // 8
        off = 10
        try:
            for _ in range(count):
                zone = int.from_bytes(body[off:off + zone_bytes], "little")
                off += zone_bytes
                to_move_code, outcome_code, k = struct.unpack(
                    "<BBH", body[off:off + 4])
                off += 4
                if outcome_code != 1:
                    raise CorruptFile("unknown outcome code")
                if popcount(zone) != k or zone >> (n * n):
                    raise CorruptFile("zone bitmask and size disagree")
                packed = body[off:off + (k + 3) // 4]
                if len(packed) < (k + 3) // 4:
                    raise CorruptFile("truncated entry")
                off += (k + 3) // 4
                black = white = 0
                for i, p in enumerate(iter_bits(zone)):
                    cell = packed[i // 4] >> (2 * (i % 4)) & 3
                    if cell == 1:
                        black |= 1 << p
                    elif cell == 2:
                        white |= 1 << p
                    elif cell != 0:
                        raise CorruptFile("unknown cell code")
                table.insert(RZPattern(
                    n, zone, black, white,
                    WHITE if to_move_code else BLACK, True))
        except struct.error:
            raise CorruptFile("truncated file") from None
        if off != len(body):
            raise CorruptFile("trailing bytes")
        return table


def merge(a: RZTable, b: RZTable) -> RZTable:
    """Union of two tables with deduplication; stats are summed."""
    if a.n != b.n:
        raise BoardSizeMismatch(f"cannot merge sizes {a.n} and {b.n}")
    out = RZTable(a.n)
    for pat in a.entries:
        out.insert(pat)
    for pat in b.entries:
        out.insert(pat)
    out.stats = {k: a.stats[k] + b.stats[k] for k in a.stats}
    return out
