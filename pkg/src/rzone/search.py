"""Budgeted AND-OR proof search for the attacker (White) win.

Depth-first proof-number search with the usual two-threshold recursion.
White is the OR player. Defender (AND) nodes are expanded lazily against
the growing refutation zone: only the pass and the legal defender moves
inside the current zone union need refuting; by zone soundness, moves
outside a completed union cannot change the result.

Wherever a zone is produced (terminal life, child propagation, completed
defender unions, pattern-table hits) it is checked against the forbidden
region; a colliding node counts as unproven and alternatives are searched.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from functools import lru_cache
from typing import TYPE_CHECKING, Optional

from .board import (BLACK, PASS, WHITE, BoardPosition, Geometry,
                    _benson_zone, apply_point_move, iter_bits, opponent,
                    popcount)
from .zones import RZPattern, or_propagate, refutation_zone, sound_closure

if TYPE_CHECKING:
    from .table import RZTable

INF = 1 << 40          # exact marker: proven dn / disproven pn / blocked pn
CAP = INF - 1          # ceiling for every computed (finite) pn/dn sum

PROVEN, DISPROVEN, UNKNOWN = "proven", "disproven", "unknown"


@dataclass(frozen=True)
class Constraint:
    """Region no returned zone may intersect (0 = unconstrained)."""

    forbidden: int = 0


@dataclass(frozen=True)
class Budget:
    """Expansion allowance; one expansion generates one node's children."""

    max_expansions: int

    def __post_init__(self):
        if self.max_expansions < 0:
            raise ValueError("budget must be non-negative")


@dataclass
class TreeNode:
    digest: int
    kind: str                 # "or" | "and"
    move: Optional[int]       # move from parent, None at root
    zone: int
    children: list["TreeNode"] = field(default_factory=list)
    leaf: Optional[str] = None  # "benson" | "table" for proven leaves


@dataclass
class SolutionTree:
    root: TreeNode

    def nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children)

    def __len__(self) -> int:
        return sum(1 for _ in self.nodes())


@dataclass
class SolveResult:
    status: str
    zone: Optional[int]
    expansions_used: int
    tree: Optional[SolutionTree]
    table_hits: int = 0
    ko_free: bool = False


class _OutOfBudget(Exception):
    pass


class _Inconsistent(Exception):
    """Proof records disagree with replay from the root (table or
    transposition reuse across paths); no solution tree can be rebuilt."""


@lru_cache(maxsize=1 << 17)
def _benson_sound_zone(n: int, black: int, white: int) -> int:
    """Closed zone certifying unconditional white life (0 when none)."""
    raw = _benson_zone(n, black, white, WHITE)
    if not raw:
        return 0
    geo = Geometry.get(n)
    pos = BoardPosition(geo, black, white, BLACK, None, 0, frozenset(), 0, None)
    return sound_closure(pos, raw)


class _Child:
    __slots__ = ("move", "black", "white", "ko_ban", "captured", "digest",
                 "order_key")

    def __init__(self, move, black, white, ko_ban, captured, digest,
                 order_key):
        self.move = move
        self.black = black
        self.white = white
        self.ko_ban = ko_ban
        self.captured = captured
        self.digest = digest
        self.order_key = order_key


def _min_block_liberties(geo: Geometry, stones: int, empty: int) -> Optional[int]:
    if not stones:
        return None
    best = None
    for comp in geo.components(stones):
        libs = popcount(geo.spread(comp) & empty)
        if best is None or libs < best:
            best = libs
    return best


def _point_children(pos: BoardPosition) -> list[_Child]:
    """Pseudo-legal point moves (occupancy, ko and suicide applied; superko
    left to the caller), sorted by the ordering cascade."""
    geo = pos.geo
    mover = pos.to_move
    mover_bits = pos.black if mover == BLACK else pos.white
    empty = pos.empty
    pre_min = _min_block_liberties(geo, mover_bits, empty)
    last = pos.last_move if pos.last_move not in (None, PASS) else None
    if last is not None:
        lr, lc = divmod(last, geo.n)
    out = []
    for point in iter_bits(empty):
        if point == pos.ko_ban:
            continue
        res = apply_point_move(geo, pos.black, pos.white, mover, point)
        if res is None:
            continue
        black, white, captured, ko_ban = res
        new_mover_bits = black if mover == BLACK else white
        new_empty = geo.full ^ black ^ white
        post_min = _min_block_liberties(geo, new_mover_bits, new_empty)
        raises_min = pre_min is not None and post_min is not None and post_min > pre_min
        if last is not None:
            r, c = divmod(point, geo.n)
            near = abs(r - lr) + abs(c - lc)
        else:
            near = 0
        key = (0 if captured else 1, 0 if raises_min else 1, near,
               geo.center_dist[point], point)
        digest = pos.digest
        zs = geo.z_stone
        for p in iter_bits(black ^ pos.black):
            digest ^= zs[BLACK][p]
        for p in iter_bits(white ^ pos.white):
            digest ^= zs[WHITE][p]
        digest ^= geo.z_white_to_move
        if pos.ko_ban is not None:
            digest ^= geo.z_ko[pos.ko_ban]
        if ko_ban is not None:
            digest ^= geo.z_ko[ko_ban]
        out.append(_Child(point, black, white, ko_ban, captured, digest, key))
    out.sort(key=lambda k: k.order_key)
    return out


def _pass_child(pos: BoardPosition) -> _Child:
    geo = pos.geo
    digest = pos.digest ^ geo.z_white_to_move
    if pos.ko_ban is not None:
        digest ^= geo.z_ko[pos.ko_ban]
    return _Child(PASS, pos.black, pos.white, None, 0, digest, None)


def order_moves(pos: BoardPosition) -> list[int]:
    """Deterministic move ranking: captures, then moves raising the mover's
    weakest-chain liberty count, then closeness to the last move, then
    center distance, then point index; pass last."""
    moves = [k.move for k in _point_children(pos)
             if k.digest not in pos.path_hashes]
    moves.append(PASS)
    return moves


class _Rec:
    """Proof record for one (digest, pass_streak) state."""

    __slots__ = ("kind", "zone", "win_move", "ko_sub", "path_dep")

    def __init__(self, kind, zone, win_move=None, ko_sub=False,
                 path_dep=False):
        self.kind = kind          # "benson" | "table" | "or" | "and"
        self.zone = zone
        self.win_move = win_move
        self.ko_sub = ko_sub
        self.path_dep = path_dep


class _Solver:
    def __init__(self, root: BoardPosition, constraint: Constraint,
                 budget: Budget, table: Optional["RZTable"], use_tt: bool,
                 enforce_interior: bool, pattern_log):
        self.root = root
        self.geo = root.geo
        self.forbidden = constraint.forbidden
        self.max_expansions = budget.max_expansions
        self.table = table
        self.use_tt = use_tt
        self.enforce_interior = enforce_interior
        self.pattern_log = pattern_log
        self.expansions = 0
        self.table_hits = 0
        # pass streak changes terminal adjudication, so it is part of the
        # state identity everywhere results are reused
        self.records: dict[tuple[int, int], _Rec] = {}
        self.tt: dict[tuple[int, int], tuple[int, int]] = {}
        self.kids_cache: dict[int, list[_Child]] = {}
        self.or_zone_cache: dict[tuple[int, int, int], int] = {}
        self.refut_cache: dict[tuple[int, int, int], int] = {}
        self.or_blocked: dict[tuple[int, int], set[int]] = {}

    # -- node/child evaluation ------------------------------------------

    def _violates(self, zone: int) -> bool:
        return bool(zone & self.forbidden)

    def _note_proven(self, black, white, to_move, ko_ban, pass_streak,
                     digest, rec: _Rec):
        self.records[(digest, pass_streak)] = rec
        if rec.kind == "table" or rec.ko_sub or rec.path_dep:
            return
        if ko_ban is not None or pass_streak != 0:
            return
        if self.table is None and self.pattern_log is None:
            return
        pat = RZPattern(self.geo.n, rec.zone, black & rec.zone,
                        white & rec.zone, to_move, True)
        if self.table is not None:
            self.table.insert(pat)
        if self.pattern_log is not None:
            pos = BoardPosition(self.geo, black, white, to_move, ko_ban,
                                pass_streak, frozenset(), digest, None)
            self.pattern_log.append((pos, pat))

    def _state(self, black, white, to_move, ko_ban, pass_streak,
               digest) -> tuple[int, int]:
        """(pn, dn) for a node identified by its contents; may create proof
        records for terminals and table hits."""
        skey = (digest, pass_streak)
        if skey in self.records:
            return 0, INF
        life = _benson_sound_zone(self.geo.n, black, white)
        if life:
            if self._violates(life):
                return INF, CAP
            self._note_proven(black, white, to_move, ko_ban, pass_streak,
                              digest, _Rec("benson", life))
            return 0, INF
        if pass_streak >= 2:
            return INF, 0
        ent = self.tt.get(skey)
        if ent is not None:
            return ent
        if (self.table is not None and ko_ban is None and pass_streak == 0
                and len(self.table) > 0):
            pos = BoardPosition(self.geo, black, white, to_move, ko_ban,
                                pass_streak, frozenset(), digest, None)
            hit = self.table.lookup_best(pos, Constraint(self.forbidden))
            if hit is not None:
                self.table_hits += 1
                self.records[skey] = _Rec("table", hit.zone)
                return 0, INF
        # mobility initialization: proving an OR node needs one move, refuting
        # it needs them all (and dually for AND nodes); without it pn/dn carry
        # no cost signal and the search oscillates between root moves
        room = popcount(self.geo.full ^ black ^ white) + 1
        if to_move == WHITE:
            return 1, room
        return room, 1

    def _child_streak(self, pos: BoardPosition, k: _Child) -> int:
        return pos.pass_streak + 1 if k.move == PASS else 0

    def _child_state(self, pos: BoardPosition, k: _Child) -> tuple[int, int]:
        return self._state(k.black, k.white, opponent(pos.to_move), k.ko_ban,
                           self._child_streak(pos, k), k.digest)

    def _child_rec(self, pos: BoardPosition, k: _Child) -> Optional[_Rec]:
        return self.records.get((k.digest, self._child_streak(pos, k)))

    def _children(self, pos: BoardPosition):
        kids = self.kids_cache.get(pos.digest)
        if kids is None:
            kids = _point_children(pos)
            kids.append(_pass_child(pos))
            self.kids_cache[pos.digest] = kids
        live, excluded = [], []
        for k in kids:
            if k.move != PASS and k.digest in pos.path_hashes:
                excluded.append(k.move)
            else:
                live.append(k)
        return live, excluded

    def _materialize(self, pos: BoardPosition, k: _Child) -> BoardPosition:
        return BoardPosition(self.geo, k.black, k.white,
                             opponent(pos.to_move), k.ko_ban,
                             self._child_streak(pos, k),
                             pos.path_hashes | {k.digest}, k.digest, k.move)

    # -- zone propagation -------------------------------------------------

    def _or_zone(self, pos: BoardPosition, k: _Child) -> int:
        key = (pos.digest, pos.pass_streak, k.move)
        z = self.or_zone_cache.get(key)
        if z is None:
            z = or_propagate(pos, k.move, self._child_rec(pos, k).zone)
            self.or_zone_cache[key] = z
        return z

    def _refut_zone(self, pos: BoardPosition, k: _Child) -> int:
        key = (pos.digest, pos.pass_streak, k.move)
        z = self.refut_cache.get(key)
        if z is None:
            z = refutation_zone(pos, k.move, self._child_rec(pos, k).zone)
            self.refut_cache[key] = z
        return z

    # -- df-pn --------------------------------------------------------------

    def _mid(self, pos: BoardPosition, tpn: int, tdn: int) -> tuple[int, int]:
        pn, dn = self._state(pos.black, pos.white, pos.to_move, pos.ko_ban,
                             pos.pass_streak, pos.digest)
        if pn == 0 or dn == 0 or pn >= tpn or dn >= tdn:
            return pn, dn
        if self.expansions >= self.max_expansions:
            raise _OutOfBudget
        self.expansions += 1
        kids, excluded = self._children(pos)
        if pos.to_move == WHITE:
            pn, dn = self._mid_or(pos, kids, tpn, tdn)
        else:
            pn, dn = self._mid_and(pos, kids, excluded, tpn, tdn)
        if self.use_tt and pn != 0:
            self.tt[(pos.digest, pos.pass_streak)] = (pn, dn)
        return pn, dn

    def _mid_or(self, pos, kids, tpn, tdn):
        blocked = self.or_blocked.setdefault((pos.digest, pos.pass_streak),
                                             set())
        while True:
            states = []
            for k in kids:
                cpn, cdn = self._child_state(pos, k)
                if cpn == 0:
                    if k.move in blocked:
                        cpn = INF
                    else:
                        z = self._or_zone(pos, k)
                        if self.enforce_interior and self._violates(z):
                            blocked.add(k.move)
                            cpn = INF
                        else:
                            crec = self._child_rec(pos, k)
                            rec = _Rec("or", z, win_move=k.move,
                                       ko_sub=crec.ko_sub or k.ko_ban is not None,
                                       path_dep=crec.path_dep)
                            self._note_proven(pos.black, pos.white,
                                              pos.to_move, pos.ko_ban,
                                              pos.pass_streak, pos.digest,
                                              rec)
                            return 0, INF
                states.append((k, cpn, cdn))
            pn = INF
            dn = 0
            best = second = None
            for item in states:
                cpn = item[1]
                if cpn < pn:
                    pn = cpn
                if best is None or cpn < best[1]:
                    second = best
                    best = item
                elif second is None or cpn < second[1]:
                    second = item
                dn += item[2]
                if dn > CAP:
                    dn = CAP
            if dn == 0:
                return INF, 0
            if pn >= tpn or dn >= tdn:
                return pn, dn
            k, _, best_dn = best
            pn2 = second[1] if second is not None else INF
            child_tpn = min(tpn, pn2 + 1)
            child_tdn = INF if tdn >= INF else min(tdn - dn + best_dn, CAP)
            self._mid(self._materialize(pos, k), child_tpn, child_tdn)

    def _mid_and(self, pos, kids, excluded, tpn, tdn):
        by_move = {k.move: k for k in kids}
        while True:
            refut: dict[int, int] = {}
            zone = 0
            required = [PASS]
            while True:
                progressed = False
                for m in required:
                    if m in refut:
                        continue
                    k = by_move[m]
                    if self._child_rec(pos, k) is not None:
                        ez = self._refut_zone(pos, k)
                        refut[m] = ez
                        zone |= ez
                        progressed = True
                if not progressed:
                    break
                required = [PASS] + [k.move for k in kids
                                     if k.move != PASS and zone >> k.move & 1]
            if self.enforce_interior and refut and self._violates(zone):
                # the refutation union can only grow; permanently blocked
                return INF, CAP
            missing = [m for m in required if m not in refut]
            if not missing:
                ko_sub = path_dep = False
                for m in required:
                    k = by_move[m]
                    if k.ko_ban is not None:
                        ko_sub = True
                    crec = self._child_rec(pos, k)
                    ko_sub = ko_sub or crec.ko_sub
                    path_dep = path_dep or crec.path_dep
                if any(zone >> m & 1 for m in excluded):
                    path_dep = True
                rec = _Rec("and", zone, ko_sub=ko_sub, path_dep=path_dep)
                self._note_proven(pos.black, pos.white, pos.to_move,
                                  pos.ko_ban, pos.pass_streak, pos.digest,
                                  rec)
                return 0, INF
            pn = 0
            dn = CAP
            states = {}
            fresh_proof = False
            for m in required:
                k = by_move[m]
                cpn, cdn = self._child_state(pos, k)
                states[m] = (cpn, cdn)
                if cdn == 0:
                    return INF, 0
                if m in refut:
                    continue
                if cpn == 0:
                    # proven during evaluation (terminal or table hit);
                    # fold it into the union before anything else
                    fresh_proof = True
                else:
                    pn = min(pn + cpn, CAP)
                if cdn < dn:
                    dn = cdn
            if fresh_proof:
                continue
            if pn >= tpn or dn >= tdn:
                return pn, dn
            best_m = None
            best_dn = second_dn = INF + 1
            for m in missing:
                cdn = states[m][1]
                if best_m is None or cdn < best_dn:
                    second_dn = best_dn
                    best_m, best_dn = m, cdn
                elif cdn < second_dn:
                    second_dn = cdn
            child_tdn = min(tdn, second_dn + 1)
            child_tpn = (INF if tpn >= INF
                         else min(tpn - pn + states[best_m][0], CAP))
            self._mid(self._materialize(pos, by_move[best_m]),
                      child_tpn, child_tdn)

    # -- solution tree ------------------------------------------------------

    def _extract_tree(self) -> SolutionTree:
        from .board import IllegalMove, play

        budget = [200_000]

        def build(pos: BoardPosition, move: Optional[int]) -> TreeNode:
            budget[0] -= 1
            if budget[0] <= 0:
                raise _Inconsistent("solution tree too large to extract")
            rec = self.records.get((pos.digest, pos.pass_streak))
            if rec is None:
                raise _Inconsistent("missing proof record during replay")
            kind = "or" if pos.to_move == WHITE else "and"
            node = TreeNode(pos.digest, kind, move, rec.zone)
            if rec.kind in ("benson", "table"):
                node.leaf = rec.kind
                return node
            if rec.kind == "or":
                child = play(pos, rec.win_move)
                node.children.append(build(child, rec.win_move))
                return node
            moves = [PASS]
            for p in iter_bits(rec.zone & pos.empty):
                moves.append(p)
            for m in moves:
                try:
                    child = play(pos, m)
                except IllegalMove:
                    continue
                node.children.append(build(child, m))
            return node

        return SolutionTree(build(self.root, None))

    # -- driver ---------------------------------------------------------------

    def run(self) -> SolveResult:
        if sys.getrecursionlimit() < 20000:
            sys.setrecursionlimit(20000)
        dn = None
        try:
            _, dn = self._mid(self.root, INF, INF)
        except _OutOfBudget:
            pass
        rec = self.records.get((self.root.digest, self.root.pass_streak))
        if rec is not None:
            if self._violates(rec.zone):
                # reachable only with interior enforcement off
                return SolveResult(UNKNOWN, None, self.expansions, None,
                                   self.table_hits)
            try:
                tree = self._extract_tree()
            except _Inconsistent:
                tree = SolutionTree(TreeNode(
                    self.root.digest,
                    "or" if self.root.to_move == WHITE else "and",
                    None, rec.zone))
            ko_free = (not rec.ko_sub and not rec.path_dep
                       and self.root.ko_ban is None
                       and self.root.pass_streak == 0)
            return SolveResult(PROVEN, rec.zone, self.expansions, tree,
                               self.table_hits, ko_free)
        if dn == 0:
            return SolveResult(DISPROVEN, None, self.expansions, None,
                               self.table_hits)
        return SolveResult(UNKNOWN, None, self.expansions, None,
                           self.table_hits)


def solve(pos: BoardPosition, constraint: Optional[Constraint] = None,
          budget: Optional[Budget] = None, table: Optional["RZTable"] = None,
          *, use_tt: bool = True, enforce_interior: bool = True,
          pattern_log: Optional[list] = None) -> SolveResult:
    """Prove the attacker win from `pos` under a forbidden-region constraint.

    Returns PROVEN with the root zone and solution tree, DISPROVEN when the
    defender's win is established, or UNKNOWN on budget exhaustion or when
    every candidate zone collides with the constraint.
    """
    if constraint is None:
        constraint = Constraint(0)
    if budget is None:
        budget = Budget(100_000)
    solver = _Solver(pos, constraint, budget, table, use_tt,
                     enforce_interior, pattern_log)
    return solver.run()


def extract_tree(result: SolveResult) -> SolutionTree:
    """Solution tree of a proven solve; rejects non-proven results."""
    if result.status != PROVEN or result.tree is None:
        raise ValueError("solution tree requires a proven result")
    return result.tree
