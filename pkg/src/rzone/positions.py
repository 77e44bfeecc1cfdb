"""Text and SGF position I/O plus ASCII zone rendering.

Native format: N lines of N characters from {., X, O}, then `to_move: B|W`,
optionally `ko: <col><row>` (column letter a.., row number 1.. from the top
line) and `passes: 0|1`.
"""

from __future__ import annotations

import re
from typing import Optional

from .board import BLACK, WHITE, BoardPosition, Geometry, initial_position

COLS = "abcdefghi"


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int = 0):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class ValidationError(Exception):
    """A syntactically valid diagram that violates a position invariant."""


def point_name(point: int, n: int) -> str:
    r, c = divmod(point, n)
    return f"{COLS[c]}{r + 1}"


def parse_point(name: str, n: int) -> int:
    m = re.fullmatch(r"([a-i])([1-9])", name.strip())
    if not m:
        raise ValueError(f"bad point name {name!r}")
    c = COLS.index(m.group(1))
    r = int(m.group(2)) - 1
    if c >= n or r >= n:
        raise ValueError(f"point {name!r} off a size-{n} board")
    return r * n + c


def parse_position(text: str) -> BoardPosition:
    """Parse the native text format into a validated BoardPosition."""
    lines = [ln for ln in (raw.strip() for raw in text.splitlines())
             if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty position text", 1)
    n = len(lines[0])
    if not 5 <= n <= 9:
        raise ParseError(f"first row has {n} cells; board size must be 5..9", 1)
    if len(lines) < n + 1:
        raise ParseError(f"expected {n} rows plus a to_move line", len(lines))
    black, white = [], []
    for r in range(n):
        row = lines[r]
        if len(row) != n:
            raise ParseError(f"row has {len(row)} cells, expected {n}", r + 1)
        for c, ch in enumerate(row):
            if ch == "X":
                black.append(r * n + c)
            elif ch == "O":
                white.append(r * n + c)
            elif ch != ".":
                raise ParseError(f"unknown cell {ch!r}", r + 1, c + 1)
    to_move: Optional[int] = None
    ko_ban: Optional[int] = None
    passes = 0
    for i, ln in enumerate(lines[n:], start=n + 1):
        key, _, val = ln.partition(":")
        key, val = key.strip(), val.strip()
        if key == "to_move":
            if val not in ("B", "W"):
                raise ParseError(f"to_move must be B or W, got {val!r}", i)
            to_move = BLACK if val == "B" else WHITE
        elif key == "ko":
            try:
                ko_ban = parse_point(val, n)
            except ValueError as e:
                raise ParseError(str(e), i) from None
        elif key == "passes":
            if val not in ("0", "1"):
                raise ParseError(f"passes must be 0 or 1, got {val!r}", i)
            passes = int(val)
        else:
            raise ParseError(f"unknown directive {key!r}", i)
    if to_move is None:
        raise ParseError("missing to_move line", len(lines))
    try:
        return initial_position(n, black, white, to_move, ko_ban, passes)
    except ValueError as e:
        raise ValidationError(str(e)) from None


def format_position(pos: BoardPosition) -> str:
    n = pos.size
    rows = []
    for r in range(n):
        rows.append("".join(".XO"[pos.cell(r * n + c)] for c in range(n)))
    rows.append("to_move: " + ("B" if pos.to_move == BLACK else "W"))
    if pos.ko_ban is not None:
        rows.append(f"ko: {point_name(pos.ko_ban, n)}")
    if pos.pass_streak:
        rows.append(f"passes: {pos.pass_streak}")
    return "\n".join(rows) + "\n"


def parse_sgf(text: str) -> BoardPosition:
    """Minimal SGF subset: SZ, AB/AW setup stones, PL for side to move."""
    m = re.search(r"SZ\[(\d+)\]", text)
    if not m:
        raise ParseError("SGF is missing SZ", 1)
    n = int(m.group(1))
    if not 5 <= n <= 9:
        raise ParseError(f"SGF board size {n} out of range 5..9", 1)

    def setup(prop: str) -> list[int]:
        pts = []
        for block in re.finditer(prop + r"((?:\[[a-i]{2}\])+)", text):
            for coord in re.finditer(r"\[([a-i])([a-i])\]", block.group(1)):
                c = COLS.index(coord.group(1))
                r = COLS.index(coord.group(2))
                if c >= n or r >= n:
                    raise ParseError(f"SGF stone {coord.group(0)} off board", 1)
                pts.append(r * n + c)
        return pts

    pl = re.search(r"PL\[([BW])\]", text)
    to_move = BLACK if pl is None or pl.group(1) == "B" else WHITE
    try:
        return initial_position(n, setup("AB"), setup("AW"), to_move)
    except ValueError as e:
        raise ValidationError(str(e)) from None


def render_zone(pos: BoardPosition, zone: int, constraint: int = 0) -> str:
    """ASCII board: zone cells bracketed, constraint cells hash-marked."""
    n = pos.size
    if zone & ~pos.geo.full or constraint & ~pos.geo.full:
        raise ValueError("zone or constraint does not fit the board")
    out = []
    for r in range(n):
        cells = []
        for c in range(n):
            p = r * n + c
            ch = ".XO"[pos.cell(p)]
            if zone & (1 << p):
                cells.append(f"[{ch}]")
            elif constraint & (1 << p):
                cells.append(f"#{ch}#")
            else:
                cells.append(f" {ch} ")
        out.append("".join(cells))
    return "\n".join(out) + "\n"
