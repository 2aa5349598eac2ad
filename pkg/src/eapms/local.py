"""Assigning a machine type's task counts to its individual machines.

Classic LPT places tasks one at a time. ``batch_lpt`` produces the same load
profile but places all tasks of a type in one pass over the machines, so its
work depends on the number of task types and machines, not on the task count.

For a type with ``n`` tasks of length ``d`` the batch pass computes the water
level ``AL``: the height at which the machines currently below it absorb
exactly ``n * d`` of work. Each machine then takes ``floor((AL - L_k) / d)``
tasks. Exactly the LPT start times ``<= AL - d`` get taken, and at most
``M_j`` tasks are left over for ordinary LPT steps.
"""

from __future__ import annotations

import dataclasses
import heapq
import math
from typing import Iterable, Sequence

import numpy as np

from .model import Instance, MachineLevelSchedule, TypeLevelSchedule


def n_ik(avg_load: float, load: float, etc_ij: float) -> int:
    """Tasks of length ``etc_ij`` that fit between ``load`` and ``avg_load``."""
    if not etc_ij > 0:
        raise ValueError("task length must be positive")
    return max(math.floor((avg_load - load) / etc_ij), 0)


def classic_lpt(durations: Iterable[float], m: int) -> np.ndarray:
    """Longest-first list scheduling; ties go to the lowest machine index."""
    if m < 1:
        raise ValueError("need at least one machine")
    heap = [(0.0, k) for k in range(m)]
    loads = np.zeros(m)
    for d in sorted(durations, reverse=True):
        load, k = heapq.heappop(heap)
        loads[k] = load + d
        heapq.heappush(heap, (loads[k], k))
    return loads


def water_level(loads: np.ndarray, work: float) -> float:
    """Level ``AL`` with ``sum(max(AL - L_k, 0)) == work``."""
    ls = np.sort(loads)
    prefix = 0.0
    for m in range(1, len(ls) + 1):
        prefix += ls[m - 1]
        level = (prefix + work) / m
        if m == len(ls) or ls[m] >= level:
            return level
    raise AssertionError("unreachable")


@dataclasses.dataclass(frozen=True)
class BatchStep:
    task_type: int
    machine: int
    count: int
    level: float
    load_before: float
    load_after: float


@dataclasses.dataclass
class BatchResult:
    assignment: np.ndarray  # (machines, task types)
    loads: np.ndarray
    steps: list[BatchStep]
    leftovers: dict[int, int]
    iterations: int


def batch_lpt_column(etc_col: Sequence[float], machines: int, counts: Sequence[int]) -> BatchResult:
    """Batch LPT for one machine type given per-task-type lengths and counts."""
    etc_col = np.asarray(etc_col, dtype=float)
    counts = [int(c) for c in counts]
    if len(counts) != len(etc_col):
        raise ValueError("one count per task type expected")
    if any(c < 0 for c in counts):
        raise ValueError(f"task counts must be nonnegative: {counts}")
    if machines < 1:
        raise ValueError("need at least one machine")

    T = len(counts)
    loads = np.zeros(machines)
    assignment = np.zeros((machines, T), dtype=np.int64)
    steps: list[BatchStep] = []
    leftovers: dict[int, int] = {}
    iterations = 0
    for i in sorted(range(T), key=lambda i: (-etc_col[i], i)):
        d = etc_col[i]
        remaining = counts[i]
        level = water_level(loads, remaining * d)
        for k in range(machines):
            iterations += 1
            take = min(remaining, n_ik(level, loads[k], d))
            if take > 0:
                before = loads[k]
                loads[k] = before + take * d
                assignment[k, i] += take
                remaining -= take
                steps.append(BatchStep(i, k, take, level, before, loads[k]))
        leftovers[i] = remaining
        if remaining:
            heap = [(loads[k], k) for k in range(machines)]
            heapq.heapify(heap)
            for _ in range(remaining):
                load, k = heapq.heappop(heap)
                loads[k] = load + d
                assignment[k, i] += 1
                heapq.heappush(heap, (loads[k], k))
    return BatchResult(assignment, loads, steps, leftovers, iterations)


def batch_lpt(inst: Instance, j: int, counts: Sequence[int]) -> BatchResult:
    return batch_lpt_column(inst.etc[:, j], inst.machines_per_type[j], counts)


def assign_machines(inst: Instance, sched: TypeLevelSchedule) -> tuple[MachineLevelSchedule, list[BatchResult]]:
    """Expand type-level counts into a machine-level schedule, one batch pass per machine type."""
    sched.check(inst)
    runs = [batch_lpt(inst, j, sched.x[:, j]) for j in range(inst.n_machine_types)]
    return MachineLevelSchedule(tuple(r.assignment for r in runs)), runs
