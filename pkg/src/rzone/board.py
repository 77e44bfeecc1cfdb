"""Killall-Go rules engine on bitboards.

A board point is an integer index in [0, N*N), row-major from the top-left.
Stone sets, liberty sets and zones are all plain ints used as bitsets
(bit i = point i), which keeps flood fills and set algebra cheap.

Positions are immutable; `play` returns a new position. Superko is
path-based: a move is illegal if the resulting digest already occurred on
the current search path.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

EMPTY, BLACK, WHITE = 0, 1, 2
PASS = -1

ONGOING, WHITE_WIN, BLACK_WIN = "ongoing", "white_win", "black_win"

MASK64 = (1 << 64) - 1

# Benson adjudications are pure functions of the stone configuration and get
# probed for every child of every expansion; a shared cache pays for itself
# many times over within one solve and across re-solves of the same problem.
_BENSON_CACHE_SIZE = 1 << 19


class IllegalMove(Exception):
    def __init__(self, message: str, reason: str = ""):
        super().__init__(message)
        self.reason = reason


def opponent(color: int) -> int:
    return BLACK + WHITE - color


class Geometry:
    """Per-board-size constants: edge masks, neighbor bitsets, Zobrist keys."""

    _instances: dict[int, "Geometry"] = {}

    def __init__(self, n: int):
        if not 5 <= n <= 9:
            raise ValueError(f"board size must be in [5, 9], got {n}")
        self.n = n
        self.area = n * n
        self.full = (1 << self.area) - 1
        col_w = 0
        for r in range(n):
            col_w |= 1 << (r * n)
        self.not_col_w = self.full ^ col_w          # sources that may shift west
        self.not_col_e = self.full ^ (col_w << (n - 1))
        self.neighbors = []
        self.neighbor_bits = []
        for p in range(self.area):
            r, c = divmod(p, n)
            nbrs = []
            if r > 0:
                nbrs.append(p - n)
            if c > 0:
                nbrs.append(p - 1)
            if c < n - 1:
                nbrs.append(p + 1)
            if r < n - 1:
                nbrs.append(p + n)
            self.neighbors.append(tuple(nbrs))
            bits = 0
            for q in nbrs:
                bits |= 1 << q
            self.neighbor_bits.append(bits)
        # squared distance to the board center, doubled coordinates so the
        # key stays integral for even N
        self.center_dist = []
        for p in range(self.area):
            r, c = divmod(p, n)
            self.center_dist.append((2 * r - (n - 1)) ** 2 + (2 * c - (n - 1)) ** 2)
        rng = random.Random(0x52E4C0DE ^ n)
        self.z_stone = {
            BLACK: [rng.getrandbits(64) for _ in range(self.area)],
            WHITE: [rng.getrandbits(64) for _ in range(self.area)],
        }
        self.z_ko = [rng.getrandbits(64) for _ in range(self.area)]
        self.z_white_to_move = rng.getrandbits(64)

    @classmethod
    def get(cls, n: int) -> "Geometry":
        geo = cls._instances.get(n)
        if geo is None:
            geo = cls._instances[n] = Geometry(n)
        return geo

    def spread(self, bits: int) -> int:
        """All points orthogonally adjacent to `bits` (may overlap bits)."""
        return (
            ((bits & self.not_col_e) << 1)
            | ((bits & self.not_col_w) >> 1)
            | ((bits << self.n) & self.full)
            | (bits >> self.n)
        )

    def components(self, bits: int) -> list[int]:
        """Orthogonally-connected components of a bitset, ascending seed order."""
        out = []
        rem = bits
        while rem:
            comp = rem & -rem
            while True:
                grown = (comp | self.spread(comp)) & bits
                if grown == comp:
                    break
                comp = grown
            out.append(comp)
            rem &= ~comp
        return out


def iter_bits(bits: int) -> Iterator[int]:
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def popcount(bits: int) -> int:
    return bits.bit_count()


@dataclass(frozen=True)
class Block:
    """A maximal same-color chain with its exact liberty set."""

    color: int
    stones_bits: int
    liberties_bits: int

    @property
    def stones(self) -> frozenset[int]:
        return frozenset(iter_bits(self.stones_bits))

    @property
    def liberties(self) -> frozenset[int]:
        return frozenset(iter_bits(self.liberties_bits))


def _zobrist(geo: Geometry, black: int, white: int, to_move: int,
             ko_ban: Optional[int]) -> int:
    h = 0
    zs = geo.z_stone
    for p in iter_bits(black):
        h ^= zs[BLACK][p]
    for p in iter_bits(white):
        h ^= zs[WHITE][p]
    if to_move == WHITE:
        h ^= geo.z_white_to_move
    if ko_ban is not None:
        h ^= geo.z_ko[ko_ban]
    return h


def apply_point_move(geo: Geometry, black: int, white: int, color: int,
                     point: int):
    """Resolve a stone placement on raw bitboards.

    Returns (new_black, new_white, captured_bits, new_ko_ban) or None when
    the move is suicide. Occupancy/ko checks are the caller's business.
    """
    bit = 1 << point
    mover = (black if color == BLACK else white) | bit
    opp = white if color == BLACK else black
    empty_after = geo.full ^ mover ^ opp

    captured = 0
    nbr = geo.neighbor_bits[point]
    if nbr & opp:
        for comp in geo.components(nbr & opp):
            # grow the adjacent opponent stones into their full block
            blk = comp
            while True:
                grown = (blk | geo.spread(blk)) & opp
                if grown == blk:
                    break
                blk = grown
            if not (geo.spread(blk) & empty_after):
                captured |= blk
    opp &= ~captured
    empty_after |= captured

    own = bit
    while True:
        grown = (own | geo.spread(own)) & mover
        if grown == own:
            break
        own = grown
    own_libs = geo.spread(own) & empty_after
    if not own_libs:
        return None  # suicide

    ko_ban = None
    if popcount(captured) == 1 and own == bit and popcount(own_libs) == 1:
        ko_ban = captured.bit_length() - 1

    if color == BLACK:
        return mover, opp, captured, ko_ban
    return opp, mover, captured, ko_ban


class BoardPosition:
    """Immutable game state: stones, side to move, ko ban, pass streak,
    and the digests seen along the current search path."""

    __slots__ = ("geo", "black", "white", "to_move", "ko_ban", "pass_streak",
                 "path_hashes", "digest", "last_move", "_blocks")

    def __init__(self, geo: Geometry, black: int, white: int, to_move: int,
                 ko_ban: Optional[int], pass_streak: int,
                 path_hashes: frozenset[int], digest: int,
                 last_move: Optional[int]):
        self.geo = geo
        self.black = black
        self.white = white
        self.to_move = to_move
        self.ko_ban = ko_ban
        self.pass_streak = pass_streak
        self.path_hashes = path_hashes
        self.digest = digest
        self.last_move = last_move
        self._blocks = None

    @property
    def size(self) -> int:
        return self.geo.n

    @property
    def empty(self) -> int:
        return self.geo.full ^ self.black ^ self.white

    def cell(self, point: int) -> int:
        bit = 1 << point
        if self.black & bit:
            return BLACK
        if self.white & bit:
            return WHITE
        return EMPTY

    @property
    def cells(self) -> tuple[int, ...]:
        return tuple(self.cell(p) for p in range(self.geo.area))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BoardPosition)
            and self.geo.n == other.geo.n
            and self.black == other.black
            and self.white == other.white
            and self.to_move == other.to_move
            and self.ko_ban == other.ko_ban
            and self.pass_streak == other.pass_streak
        )

    def __hash__(self) -> int:
        return hash((self.digest, self.pass_streak))

    def __repr__(self) -> str:
        rows = []
        for r in range(self.geo.n):
            rows.append("".join(".XO"[self.cell(r * self.geo.n + c)]
                                for c in range(self.geo.n)))
        return "BoardPosition<{} {} ko={} passes={}>".format(
            "/".join(rows), "BW"[self.to_move == WHITE], self.ko_ban,
            self.pass_streak)


def initial_position(n: int, black=(), white=(), to_move: int = BLACK,
                     ko_ban: Optional[int] = None,
                     pass_streak: int = 0) -> BoardPosition:
    """Build and validate a root position from explicit stone lists."""
    geo = Geometry.get(n)
    b = w = 0
    for p in black:
        b |= 1 << p
    for p in white:
        w |= 1 << p
    if b & w:
        raise ValueError("black and white stones overlap")
    if (b | w) & ~geo.full:
        raise ValueError("stone off board")
    if to_move not in (BLACK, WHITE):
        raise ValueError("to_move must be BLACK or WHITE")
    if pass_streak not in (0, 1, 2):
        raise ValueError("pass_streak must be 0, 1 or 2")
    empty = geo.full ^ b ^ w
    for stones in (b, w):
        for comp in geo.components(stones):
            if not (geo.spread(comp) & empty):
                raise ValueError("zero-liberty block on board")
    if ko_ban is not None:
        if not 0 <= ko_ban < geo.area:
            raise ValueError("ko ban off board")
        if (b | w) & (1 << ko_ban):
            raise ValueError("ko ban must be an empty point")
    digest = _zobrist(geo, b, w, to_move, ko_ban)
    return BoardPosition(geo, b, w, to_move, ko_ban, pass_streak,
                         frozenset((digest,)), digest, None)


def blocks(pos: BoardPosition) -> list[Block]:
    """All maximal chains on the board, with exact liberty sets."""
    if pos._blocks is None:
        geo = pos.geo
        empty = pos.empty
        out = []
        for color, stones in ((BLACK, pos.black), (WHITE, pos.white)):
            for comp in geo.components(stones):
                out.append(Block(color, comp, geo.spread(comp) & empty))
        pos._blocks = out
    return pos._blocks


def _child_digest(pos: BoardPosition, black: int, white: int,
                  ko_ban: Optional[int]) -> int:
    geo = pos.geo
    h = pos.digest
    zs = geo.z_stone
    for p in iter_bits(black ^ pos.black):
        h ^= zs[BLACK][p]
    for p in iter_bits(white ^ pos.white):
        h ^= zs[WHITE][p]
    h ^= geo.z_white_to_move  # side always flips
    if pos.ko_ban is not None:
        h ^= geo.z_ko[pos.ko_ban]
    if ko_ban is not None:
        h ^= geo.z_ko[ko_ban]
    return h


def play(pos: BoardPosition, move: int) -> BoardPosition:
    """Apply a legal move (point index or PASS); raises IllegalMove otherwise."""
    geo = pos.geo
    if move == PASS:
        digest = pos.digest ^ geo.z_white_to_move
        if pos.ko_ban is not None:
            digest ^= geo.z_ko[pos.ko_ban]
        return BoardPosition(geo, pos.black, pos.white, opponent(pos.to_move),
                             None, pos.pass_streak + 1,
                             pos.path_hashes | {digest}, digest, PASS)
    if not 0 <= move < geo.area:
        raise IllegalMove(f"point {move} off board", "off_board")
    if (pos.black | pos.white) & (1 << move):
        raise IllegalMove(f"point {move} occupied", "occupied")
    if move == pos.ko_ban:
        raise IllegalMove(f"point {move} is the ko ban", "ko")
    res = apply_point_move(geo, pos.black, pos.white, pos.to_move, move)
    if res is None:
        raise IllegalMove(f"point {move} is suicide", "suicide")
    black, white, _captured, ko_ban = res
    digest = _child_digest(pos, black, white, ko_ban)
    if digest in pos.path_hashes:
        raise IllegalMove(f"point {move} repeats a position on this path", "superko")
    return BoardPosition(geo, black, white, opponent(pos.to_move), ko_ban, 0,
                         pos.path_hashes | {digest}, digest, move)


def legal_moves(pos: BoardPosition) -> list[int]:
    """Every legal point move plus PASS (always last)."""
    geo = pos.geo
    out = []
    for point in iter_bits(pos.empty):
        if point == pos.ko_ban:
            continue
        res = apply_point_move(geo, pos.black, pos.white, pos.to_move, point)
        if res is None:
            continue
        if _child_digest(pos, res[0], res[1], res[3]) in pos.path_hashes:
            continue
        out.append(point)
    out.append(PASS)
    return out


@lru_cache(maxsize=_BENSON_CACHE_SIZE)
def _benson_zone(n: int, black: int, white: int, color: int) -> int:
    """Union of color's unconditionally alive chains and their vital regions
    (0 when none). Pure function of the stone configuration."""
    geo = Geometry.get(n)
    mine = black if color == BLACK else white
    if not mine:
        return 0
    empty = geo.full ^ black ^ white
    chains = geo.components(mine)
    chain_libs = [geo.spread(ch) & empty for ch in chains]
    # maximal regions of non-color points; every such region borders only
    # color stones (or the edge) by maximality
    regions = []
    for reg in geo.components(geo.full ^ mine):
        reg_empties = reg & empty
        border = geo.spread(reg) & mine
        adj = frozenset(i for i, ch in enumerate(chains) if ch & border)
        regions.append((reg, reg_empties, adj))

    alive = set(range(len(chains)))
    live_regions = list(range(len(regions)))
    while True:
        vital_count = [0] * len(chains)
        vital_of = [[] for _ in range(len(chains))]
        for ri in live_regions:
            reg, reg_empties, adj = regions[ri]
            for ci in adj:
                if ci in alive and not (reg_empties & ~chain_libs[ci]):
                    vital_count[ci] += 1
                    vital_of[ci].append(ri)
        new_alive = {ci for ci in alive if vital_count[ci] >= 2}
        new_regions = [ri for ri in live_regions
                       if regions[ri][2] <= new_alive]
        if new_alive == alive and len(new_regions) == len(live_regions):
            break
        alive, live_regions = new_alive, new_regions
        if not alive:
            return 0
    zone = 0
    for ci in alive:
        zone |= chains[ci]
        for ri in vital_of[ci]:
            zone |= regions[ri][0]
    return zone


def benson_alive(pos: BoardPosition, color: int) -> tuple[list[Block], int]:
    """Unconditionally alive blocks of `color` and their life zone bitset."""
    zone = _benson_zone(pos.geo.n, pos.black, pos.white, color)
    if not zone:
        return [], 0
    mine = pos.black if color == BLACK else pos.white
    alive = [b for b in blocks(pos)
             if b.color == color and b.stones_bits & zone & mine]
    return alive, zone


def white_life_zone(pos: BoardPosition) -> int:
    return _benson_zone(pos.geo.n, pos.black, pos.white, WHITE)


def adjudicate(pos: BoardPosition) -> str:
    """WHITE_WIN on unconditional white life, BLACK_WIN at double pass
    without it, ONGOING otherwise."""
    if white_life_zone(pos):
        return WHITE_WIN
    if pos.pass_streak >= 2:
        return BLACK_WIN
    return ONGOING


def digest(pos: BoardPosition) -> int:
    """64-bit position identity over (cells, to_move, ko_ban)."""
    return pos.digest
