"""Exhaustive reference solvers for tiny instances.

Used as ground truth in tests. ``exact_opt`` enumerates every type-level
split and, per machine type, every way to spread it over that type's machines
up to machine relabelling. ``naive_exact_opt`` enumerates raw per-machine
assignments with no reduction and serves as the cross-check.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import BudgetExceededError, MalformedGraphError
from .model import Instance, MachineLevelSchedule, SolutionReport, energy, profit_rate
from .rounding import BMatching, SlotGraph

_SLACK = 1e-12
_MAX_BRUTE_EDGES = 12


@dataclasses.dataclass(frozen=True)
class OracleBudget:
    max_states: int = 10**7

    def __post_init__(self):
        if self.max_states < 1:
            raise ValueError("max_states must be positive")


class _Counter:
    def __init__(self, budget: OracleBudget):
        self.budget = budget
        self.states = 0

    def tick(self, n: int = 1) -> None:
        self.states += n
        if self.states > self.budget.max_states:
            raise BudgetExceededError(f"enumeration exceeded {self.budget.max_states} states")


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All ways to write ``total`` as an ordered sum of ``parts`` nonnegative ints."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def _sorted_splits(column: tuple[int, ...], machines: int, floor: tuple[int, ...] | None) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Split ``column`` into ``machines`` count vectors in lexicographically nondecreasing order."""
    if machines == 1:
        if floor is None or column >= floor:
            yield (column,)
        return
    for v in itertools.product(*(range(c + 1) for c in column)):
        if floor is not None and v < floor:
            continue
        rest = tuple(c - a for c, a in zip(column, v))
        # remaining machines hold vectors >= v, so v cannot exceed their share
        if rest < v:
            continue
        for tail in _sorted_splits(rest, machines - 1, v):
            yield (v,) + tail


def _better(rate: float, best: float | None) -> bool:
    return best is None or rate > best + _SLACK * max(1.0, abs(best))


def exact_opt(inst: Instance, budget: OracleBudget = OracleBudget()) -> SolutionReport:
    """Maximum profit rate over all machine-level schedules, with a witness."""
    counter = _Counter(budget)
    T, M = inst.etc.shape

    @lru_cache(maxsize=None)
    def column_extremes(j: int, column: tuple[int, ...]):
        """(min makespan, split, max makespan, split) for one machine type."""
        etc = inst.etc[:, j]
        lo = hi = None
        for split in _sorted_splits(column, inst.machines_per_type[j], None):
            counter.tick()
            ms = max(float(np.dot(v, etc)) for v in split)
            if lo is None or ms < lo[0]:
                lo = (ms, split)
            if hi is None or ms > hi[0]:
                hi = (ms, split)
        return lo[0], lo[1], hi[0], hi[1]

    best_rate = None
    best = None
    for rows in itertools.product(*(compositions(t, M) for t in inst.tasks_per_type)):
        counter.tick()
        x = np.array(rows, dtype=np.int64).reshape(T, M)
        e = energy(inst, x)
        num = inst.price - inst.energy_cost * e
        cols = [column_extremes(j, tuple(int(v) for v in x[:, j])) for j in range(M)]
        # a positive numerator wants the shortest makespan, a negative one the longest
        pick = (0, 1) if num >= 0 else (2, 3)
        ms = max(c[pick[0]] for c in cols)
        rate = profit_rate(inst, e, ms)
        if _better(rate, best_rate):
            best_rate = rate
            best = (x, [c[pick[1]] for c in cols], ms, e)
    x, splits, ms, e = best
    sched = MachineLevelSchedule(tuple(np.array(s, dtype=np.int64).reshape(len(s), T) for s in splits))
    return SolutionReport(sched, ms, e, best_rate, None, "ORACLE")


def naive_exact_opt(inst: Instance, budget: OracleBudget = OracleBudget()) -> SolutionReport:
    """Same optimum as ``exact_opt``, enumerating every per-machine assignment."""
    counter = _Counter(budget)
    T = inst.n_task_types
    machines = [(j, k) for j, mj in enumerate(inst.machines_per_type) for k in range(mj)]
    etc_by_machine = np.array([[inst.etc[i, j] for i in range(T)] for j, _ in machines])
    w_by_machine = np.array([[inst.energy_per_task[i, j] for i in range(T)] for j, _ in machines])
    best_rate = None
    best = None
    for rows in itertools.product(*(compositions(t, len(machines)) for t in inst.tasks_per_type)):
        counter.tick()
        a = np.array(rows, dtype=np.int64).T  # (machines, task types)
        ms = float((a * etc_by_machine).sum(axis=1).max())
        e = float((a * w_by_machine).sum())
        rate = profit_rate(inst, e, ms)
        if _better(rate, best_rate):
            best_rate = rate
            best = (a, ms, e)
    a, ms, e = best
    blocks, start = [], 0
    for mj in inst.machines_per_type:
        blocks.append(a[start : start + mj])
        start += mj
    return SolutionReport(MachineLevelSchedule(tuple(blocks)), ms, e, best_rate, None, "ORACLE")


def brute_b_matching(g: SlotGraph) -> BMatching:
    """Minimum-weight saturating b-matching by trying every edge subset."""
    if len(g.edges) > _MAX_BRUTE_EDGES:
        raise ValueError(f"brute force limited to {_MAX_BRUTE_EDGES} edges, got {len(g.edges)}")
    need = sum(g.demand)
    best = None
    for subset in itertools.combinations(range(len(g.edges)), need):
        chosen = [g.edges[e] for e in subset]
        slots = {(e.machine_type, e.slot) for e in chosen}
        if len(slots) < len(chosen):
            continue
        cover = [0] * len(g.demand)
        for e in chosen:
            cover[e.task] += 1
        if tuple(cover) != tuple(g.demand):
            continue
        w = math.fsum(e.weight for e in chosen)
        if best is None or w < best.total_weight:
            best = BMatching(chosen, w)
    if best is None:
        raise MalformedGraphError("no matching covers every task-type demand")
    return best
