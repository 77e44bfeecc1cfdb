"""Exhaustive minimax oracle over the engine rules.

Independent check for the proof search: no zones, no pattern tables, no
transposition reuse; plain full enumeration. Rules are taken straight from
the board module (stone resolution, digests, Benson adjudication); the
path-superko set is maintained push/pop style for speed.
"""

import sys

from rzone.board import (BLACK, BLACK_WIN, WHITE, WHITE_WIN,
                         _benson_zone, apply_point_move, iter_bits, opponent)


class OracleBudgetExceeded(Exception):
    pass


def minimax_status(pos, node_cap=5_000_000, depth_cap=300):
    """Game-theoretic status (WHITE_WIN or BLACK_WIN) by brute force."""
    geo = pos.geo
    n = geo.n
    z_black, z_white = geo.z_stone[BLACK], geo.z_stone[WHITE]
    z_ko = geo.z_ko
    z_wtm = geo.z_white_to_move
    counter = [0]
    path = set(pos.path_hashes)
    if sys.getrecursionlimit() < depth_cap + 1000:
        sys.setrecursionlimit(depth_cap + 1000)

    def visit(black, white, to_move, ko_ban, streak, h, depth):
        counter[0] += 1
        if counter[0] > node_cap:
            raise OracleBudgetExceeded(f"oracle exceeded {node_cap} nodes")
        if depth > depth_cap:
            raise OracleBudgetExceeded(f"oracle exceeded depth {depth_cap}")
        if _benson_zone(n, black, white, WHITE):
            return WHITE_WIN
        if streak >= 2:
            return BLACK_WIN
        want = WHITE_WIN if to_move == WHITE else BLACK_WIN
        lose = BLACK_WIN if want == WHITE_WIN else WHITE_WIN
        other = opponent(to_move)
        # pass first: every dive bottoms out at a double-pass adjudication in
        # two plies, keeping the DFS out of pathological mutual-fill lines
        ch = h ^ z_wtm
        if ko_ban is not None:
            ch ^= z_ko[ko_ban]
        known = ch in path
        if not known:
            path.add(ch)
        won = visit(black, white, other, None, streak + 1, ch, depth + 1)
        if not known:
            path.discard(ch)
        if won == want:
            return want
        for move in iter_bits(geo.full ^ black ^ white):
            if move == ko_ban:
                continue
            res = apply_point_move(geo, black, white, to_move, move)
            if res is None:
                continue
            nb, nw, _, nko = res
            ch = h ^ z_wtm
            for p in iter_bits(nb ^ black):
                ch ^= z_black[p]
            for p in iter_bits(nw ^ white):
                ch ^= z_white[p]
            if ko_ban is not None:
                ch ^= z_ko[ko_ban]
            if nko is not None:
                ch ^= z_ko[nko]
            if ch in path:
                continue
            path.add(ch)
            won = visit(nb, nw, other, nko, 0, ch, depth + 1)
            path.discard(ch)
            if won == want:
                return want
        return lose

    result = visit(pos.black, pos.white, pos.to_move, pos.ko_ban,
                   pos.pass_streak, pos.digest, 0)
    return result, counter[0]
