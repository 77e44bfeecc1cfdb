"""Zone calculus: closure, proof-tree propagation, pattern extraction.

A zone is an int bitset over board points. The defining property: once a
zone has been attached to a proven position, play outside the zone can
never change which side wins. Everything here is geared to making that
hold conservatively:

* `closure` expands a zone so every chain touching it lies wholly inside,
  liberties included — so no outside move can capture into the zone.
* `sound_closure` additionally seals in-zone suicide points: whether the
  defender may legally play on an in-zone empty point must be decided by
  zone contents alone, so the blocks adjacent to such points are pulled in
  as well.
* `or_propagate` / `refutation_zone` add the played point and the chains
  whose fate the move's legality and captures depend on.
* `and_closure` iterates the defender-side fixed point: every legal
  defender move inside the zone (plus the pass) needs a refutation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .board import (BLACK, EMPTY, PASS, WHITE, BoardPosition, IllegalMove,
                    apply_point_move, blocks, iter_bits, play, popcount)

WHITE_WIN_OUTCOME = "white_win"


def zone_size(zone: int) -> int:
    return popcount(zone)


def zone_to_hex(zone: int, n: int) -> str:
    """Lowercase hex, most-significant nibble first, fixed width."""
    width = (n * n + 3) // 4
    if zone >> (n * n):
        raise ValueError("zone has bits outside the board")
    return format(zone, f"0{width}x")


def zone_from_hex(text: str, n: int) -> int:
    width = (n * n + 3) // 4
    if len(text) != width:
        raise ValueError(f"zone hex must be {width} digits for size {n}")
    zone = int(text, 16)
    if zone >> (n * n):
        raise ValueError("zone hex has bits outside the board")
    return zone


def closure(pos: BoardPosition, zone: int) -> int:
    """Smallest superset where every chain intersecting it is wholly
    contained, liberties included."""
    z = zone
    blist = blocks(pos)
    changed = True
    while changed:
        changed = False
        for b in blist:
            if b.stones_bits & z:
                ext = b.stones_bits | b.liberties_bits
                if ext & ~z:
                    z |= ext
                    changed = True
    return z


def _black_suicide(pos: BoardPosition, point: int) -> bool:
    return apply_point_move(pos.geo, pos.black, pos.white, BLACK, point) is None


def sound_closure(pos: BoardPosition, zone: int) -> int:
    """`closure` plus sealing of in-zone suicide points.

    If an empty in-zone point is suicide for the defender, the chains next
    to it decide that; they must sit inside the zone or outside play could
    turn the point into a legal (unrefuted) defender move.
    """
    geo = pos.geo
    z = closure(pos, zone)
    while True:
        grow = 0
        for p in iter_bits(z & pos.empty):
            if _black_suicide(pos, p):
                adj_stones = geo.neighbor_bits[p] & (pos.black | pos.white)
                if adj_stones & ~z:
                    grow |= adj_stones
        if not grow:
            return z
        z = closure(pos, z | grow)


def _move_expansion(pos: BoardPosition, move: int, child_zone: int) -> int:
    """Or-style propagation of a child zone through the move that reached it:
    adds the point, the mover's resulting chain with its liberties, and every
    adjacent opponent chain with its pre-move liberties."""
    if move == PASS:
        return sound_closure(pos, child_zone)
    geo = pos.geo
    z = child_zone | (1 << move)
    child = play(pos, move)
    mover_bits = child.black if pos.to_move == BLACK else child.white
    own = 1 << move
    while True:
        grown = (own | geo.spread(own)) & mover_bits
        if grown == own:
            break
        own = grown
    z |= own | (geo.spread(own) & child.empty)
    for b in blocks(pos):
        if b.color != pos.to_move and b.stones_bits & geo.neighbor_bits[move]:
            z |= b.stones_bits | b.liberties_bits
    return sound_closure(pos, z)


def or_propagate(pos: BoardPosition, move: int, child_zone: int) -> int:
    """Zone of an attacker node proven through `move` with a child zone."""
    return _move_expansion(pos, move, child_zone)


def refutation_zone(pos: BoardPosition, move: int, child_zone: int) -> int:
    """Expanded zone credited to one refuted defender move; the defender-side
    analogue of `or_propagate`, fed into `and_closure`."""
    return _move_expansion(pos, move, child_zone)


@dataclass
class AndClosure:
    zone: Optional[int]
    missing: list[int]
    path_dependent: bool = False


def and_closure(pos: BoardPosition, refutations: dict[int, int]) -> AndClosure:
    """Defender-node fixed point.

    `refutations` maps already-refuted defender moves to their expanded
    zones (see `refutation_zone`). Returns the closed union once every
    legal defender point move inside it, plus PASS, has an entry;
    otherwise lists the missing moves. `path_dependent` reports that some
    in-zone move was only illegal through path superko, which poisons
    pattern storage for the proof.
    """
    union = 0
    for z in refutations.values():
        union |= z
    z = sound_closure(pos, union)
    missing = []
    path_dependent = False
    if PASS not in refutations:
        missing.append(PASS)
    for p in iter_bits(z & pos.empty):
        if p in refutations:
            continue
        if p == pos.ko_ban:
            continue
        try:
            play(pos, p)
        except IllegalMove as e:
            if e.reason == "superko":
                path_dependent = True
            continue
        missing.append(p)
    if missing:
        return AndClosure(None, missing, path_dependent)
    return AndClosure(z, [], path_dependent)


@dataclass(frozen=True)
class RZPattern:
    """Zone contents plus side to move for a proven attacker win.

    `black`/`white` hold the in-zone stones; points of the zone not in
    either set are empty. Only ko-free patterns are storable.
    """

    n: int
    zone: int
    black: int
    white: int
    to_move: int
    ko_free: bool
    outcome: str = WHITE_WIN_OUTCOME

    @property
    def size(self) -> int:
        return popcount(self.zone)

    def contents(self) -> tuple[int, ...]:
        """Cell states for zone points in ascending point order."""
        out = []
        for p in iter_bits(self.zone):
            bit = 1 << p
            out.append(BLACK if self.black & bit
                       else WHITE if self.white & bit else EMPTY)
        return tuple(out)

    def key(self) -> tuple[int, int, int, int]:
        return (self.zone, self.black, self.white, self.to_move)


def pattern_of(pos: BoardPosition, zone: int, ko_free: bool) -> RZPattern:
    """Extract the pattern for a proven position; `zone` must already be
    closed. Positions under an active ko ban are not extractable."""
    if pos.ko_ban is not None:
        raise ValueError("cannot extract a pattern under an active ko ban")
    if zone & ~pos.geo.full:
        raise ValueError("zone does not fit the board")
    return RZPattern(pos.geo.n, zone, pos.black & zone, pos.white & zone,
                     pos.to_move, ko_free)


def matches(pattern: RZPattern, pos: BoardPosition) -> bool:
    """True when the position reproduces the pattern's zone contents and
    side to move, with no ko ban active."""
    if pattern.n != pos.geo.n:
        raise ValueError("board size mismatch")
    return (pos.ko_ban is None
            and pos.to_move == pattern.to_move
            and pos.black & pattern.zone == pattern.black
            and pos.white & pattern.zone == pattern.white)
