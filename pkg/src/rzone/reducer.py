"""Iterative zone reduction: re-solve under growing forbidden regions.

One run: an unconstrained baseline solve, then rounds that lock everything
outside the current best zone, additionally ban one chosen inner point,
and re-solve. Successes shrink the zone; failed points go to a ledger and
are never retried; the run stops after `k` consecutive failures.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .board import BoardPosition, iter_bits, popcount
from .search import Budget, Constraint, SolutionTree, SolveResult, solve
from .zones import RZPattern, pattern_of, zone_to_hex

RANDOM, EROSION, HEATMAP = "random", "erosion", "heatmap"
STRATEGIES = (RANDOM, EROSION, HEATMAP)

REDUCED, IRREDUCIBLE, UNSOLVED = "reduced", "irreducible", "unsolved"
SUCCESS, FAIL = "success", "fail"


@dataclass
class ReductionConfig:
    strategy: str = HEATMAP
    init_budget: int = 100_000
    iter_budget: int = 20_000
    k: int = 5                      # consecutive-failure stop threshold
    seed: int = 0
    use_rzt: bool = True
    heatmap_empty_only: bool = False
    leaf_only_constraint: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.init_budget <= 0 or self.iter_budget <= 0:
            raise ValueError("budgets must be positive")


@dataclass
class FailedLedger:
    """Inner points whose banning made an iteration fail; never retried."""

    points: set[int] = field(default_factory=set)

    def add(self, point: int):
        self.points.add(point)

    def __contains__(self, point: int) -> bool:
        return point in self.points


@dataclass
class IterationRecord:
    round: int
    chosen_point: int
    constraint_size: int
    status: str                     # SUCCESS | FAIL
    zone_size_after: Optional[int]
    expansions_used: int


@dataclass
class ReductionReport:
    problem_id: str
    status: str                     # REDUCED | IRREDUCIBLE | UNSOLVED
    initial_zone: Optional[int]
    final_zone: Optional[int]
    final_pattern: Optional[RZPattern]
    iterations: list[IterationRecord]
    strategy: str
    seed: int
    init_budget: int
    iter_budget: int
    k: int
    init_expansions: int = 0
    board_size: int = 0

    @property
    def initial_size(self) -> Optional[int]:
        return popcount(self.initial_zone) if self.initial_zone is not None else None

    @property
    def final_size(self) -> Optional[int]:
        return popcount(self.final_zone) if self.final_zone is not None else None

    @property
    def reduction_rate(self) -> Optional[float]:
        if self.initial_zone is None:
            return None
        return self.final_size / self.initial_size

    def to_json_dict(self) -> dict:
        n = self.board_size
        return {
            "problem_id": self.problem_id,
            "status": self.status,
            "initial_size": self.initial_size,
            "final_size": self.final_size,
            "reduction_rate": self.reduction_rate,
            "initial_zone": zone_to_hex(self.initial_zone, n)
            if self.initial_zone is not None else None,
            "final_zone": zone_to_hex(self.final_zone, n)
            if self.final_zone is not None else None,
            "iterations": [
                {
                    "round": it.round,
                    "point": it.chosen_point,
                    "constraint_size": it.constraint_size,
                    "status": it.status,
                    "zone_size_after": it.zone_size_after,
                    "expansions": it.expansions_used,
                }
                for it in self.iterations
            ],
            "strategy": self.strategy,
            "seed": self.seed,
            "budgets": {"init": self.init_budget, "iter": self.iter_budget},
            "k": self.k,
        }


def build_constraint(best_zone: int, chosen_point: int, full: int) -> Constraint:
    """Forbid everything outside the best zone plus the chosen inner point."""
    if not best_zone >> chosen_point & 1:
        raise ValueError("chosen point must lie inside the current zone")
    return Constraint((full ^ best_zone) | (1 << chosen_point))


def heat(tree: SolutionTree, area: int) -> list[int]:
    """Per-point count of solution-tree nodes whose zone covers the point."""
    counts = [0] * area
    for node in tree.nodes():
        for p in iter_bits(node.zone):
            counts[p] += 1
    return counts


def select_point(strategy: str, best_zone: int, pos: BoardPosition,
                 ledger: FailedLedger, tree: Optional[SolutionTree],
                 rng: random.Random,
                 heatmap_empty_only: bool = False) -> Optional[int]:
    """Next inner point to ban, or None when no point is eligible."""
    eligible = [p for p in iter_bits(best_zone) if p not in ledger]
    if strategy == EROSION:
        eligible = [p for p in eligible if pos.empty >> p & 1]
    elif strategy == HEATMAP and heatmap_empty_only:
        eligible = [p for p in eligible if pos.empty >> p & 1]
    if not eligible:
        return None
    if strategy == RANDOM:
        return rng.choice(eligible)
    if strategy == EROSION:
        geo = pos.geo
        outside = geo.full ^ best_zone

        def external(p):
            return popcount(geo.neighbor_bits[p] & outside)

        best = max(external(p) for p in eligible)
        return min(p for p in eligible if external(p) == best)
    # heatmap: least-covered point across the solution tree
    counts = heat(tree, pos.geo.area)
    low = min(counts[p] for p in eligible)
    return min(p for p in eligible if counts[p] == low)


def reduce_zone(pos: BoardPosition, cfg: ReductionConfig, table=None,
                problem_id: str = "") -> ReductionReport:
    """Full reduction run; see the module docstring for the loop shape."""
    rng = random.Random(cfg.seed)
    rzt = table if cfg.use_rzt else None
    base = solve(pos, Constraint(0), Budget(cfg.init_budget), rzt,
                 enforce_interior=not cfg.leaf_only_constraint)
    report = ReductionReport(
        problem_id=problem_id, status=UNSOLVED, initial_zone=None,
        final_zone=None, final_pattern=None, iterations=[],
        strategy=cfg.strategy, seed=cfg.seed, init_budget=cfg.init_budget,
        iter_budget=cfg.iter_budget, k=cfg.k,
        init_expansions=base.expansions_used, board_size=pos.geo.n)
    if base.status != "proven":
        return report

    best_zone = base.zone
    best_tree = base.tree
    best_ko_free = base.ko_free
    report.initial_zone = best_zone
    ledger = FailedLedger()
    fails_in_row = 0
    rounds = 0
    while fails_in_row < cfg.k:
        point = select_point(cfg.strategy, best_zone, pos, ledger, best_tree,
                             rng, cfg.heatmap_empty_only)
        if point is None:
            break
        constraint = build_constraint(best_zone, point, pos.geo.full)
        res = solve(pos, constraint, Budget(cfg.iter_budget), rzt,
                    enforce_interior=not cfg.leaf_only_constraint)
        rounds += 1
        if res.status == "proven":
            best_zone = res.zone
            best_tree = res.tree
            best_ko_free = res.ko_free
            fails_in_row = 0
            report.iterations.append(IterationRecord(
                rounds, point, popcount(constraint.forbidden), SUCCESS,
                popcount(res.zone), res.expansions_used))
        else:
            ledger.add(point)
            fails_in_row += 1
            report.iterations.append(IterationRecord(
                rounds, point, popcount(constraint.forbidden), FAIL, None,
                res.expansions_used))

    report.final_zone = best_zone
    report.status = REDUCED if best_zone != report.initial_zone else IRREDUCIBLE
    if pos.ko_ban is None:
        report.final_pattern = pattern_of(pos, best_zone, best_ko_free)
    return report
