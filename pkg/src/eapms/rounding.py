"""Rounding a fractional type-level assignment through a slot graph.

Each machine type gets ``ceil(sum of fractional parts)`` slots. Task types are
laid into the slots in order of nonincreasing running time, each slot holding
one unit of fractional mass, and a minimum-weight b-matching picks which task
types receive one extra task in each slot. A slot absorbs at most one task,
and any task in slot ``s`` is no longer than every task in slot ``s - 1``.
That is what bounds the rounded load.
"""

from __future__ import annotations

import dataclasses
import heapq
import math

import numpy as np

from .errors import MalformedGraphError
from .model import Instance, TypeLevelSchedule

SNAP_TOL = 1e-9
_ROWSUM_TOL = 1e-6


@dataclasses.dataclass(frozen=True)
class SlotEdge:
    task: int
    machine_type: int
    slot: int
    weight: float


@dataclasses.dataclass
class SlotGraph:
    demand: tuple[int, ...]
    slots_per_type: tuple[int, ...]
    edges: list[SlotEdge]

    @property
    def slot_nodes(self) -> list[tuple[int, int]]:
        return [(j, s) for j, k in enumerate(self.slots_per_type) for s in range(k)]


@dataclasses.dataclass
class BMatching:
    edges: list[SlotEdge]
    total_weight: float


def snap(x: np.ndarray, tol: float = SNAP_TOL) -> np.ndarray:
    x = np.array(x, dtype=float)
    near = np.abs(x - np.round(x)) <= tol
    x[near] = np.round(x[near])
    x[x < 0] = 0.0
    return x


def build_slot_graph(inst: Instance, x: np.ndarray) -> SlotGraph:
    x = snap(x)
    if x.shape != inst.etc.shape:
        raise ValueError(f"fractional solution has shape {x.shape}, expected {inst.etc.shape}")
    row_sums = x.sum(axis=1)
    if np.any(np.abs(row_sums - np.round(row_sums)) > _ROWSUM_TOL):
        raise ValueError(f"row sums {row_sums.tolist()} are not integral")
    floors = np.floor(x)
    frac = x - floors
    demand = tuple(int(v) for v in np.round(row_sums) - floors.sum(axis=1))
    w = inst.energy_per_task

    slots = []
    edges: list[SlotEdge] = []
    for j in range(inst.n_machine_types):
        total = float(frac[:, j].sum())
        k = 0 if total <= SNAP_TOL else math.ceil(total - SNAP_TOL)
        slots.append(k)
        order = sorted(range(inst.n_task_types), key=lambda i: (-inst.etc[i, j], i))
        cum = 0.0
        for i in order:
            f = frac[i, j]
            if f <= 0:
                continue
            start, end = cum, cum + f
            cum = end
            # the mass of type i occupies (start, end]; slot s (0-based) covers (s, s+1]
            first = min(math.floor(start + SNAP_TOL), k - 1)
            last = min(max(math.ceil(end - SNAP_TOL) - 1, first), k - 1)
            for s in range(first, last + 1):
                edges.append(SlotEdge(i, j, s, float(w[i, j])))
    return SlotGraph(demand, tuple(slots), edges)


def min_weight_b_matching(g: SlotGraph) -> BMatching:
    """Minimum-weight matching covering task type i exactly ``demand[i]`` times.

    Solved as a min-cost flow source -> task types -> slots -> sink with unit
    slot capacities, by successive shortest paths with node potentials.
    """
    need = sum(g.demand)
    if need == 0:
        return BMatching([], 0.0)
    slot_ids = {node: idx for idx, node in enumerate(g.slot_nodes)}
    T = len(g.demand)
    src, sink = 0, 1
    task_node = lambda i: 2 + i  # noqa: E731
    slot_node = lambda sid: 2 + T + sid  # noqa: E731
    n = 2 + T + len(slot_ids)

    # arcs are stored in pairs; arc a ^ 1 is the residual reverse of arc a
    head: list[list[int]] = [[] for _ in range(n)]
    to: list[int] = []
    cap: list[int] = []
    cost: list[float] = []

    def add_arc(u: int, v: int, c: int, w: float) -> int:
        for a, b, c_, w_ in ((u, v, c, w), (v, u, 0, -w)):
            head[a].append(len(to))
            to.append(b)
            cap.append(c_)
            cost.append(w_)
        return len(to) - 2

    for i, b in enumerate(g.demand):
        if b:
            add_arc(src, task_node(i), b, 0.0)
    edge_arcs = []
    for e in g.edges:
        sid = slot_ids.get((e.machine_type, e.slot))
        if sid is None:
            raise MalformedGraphError(f"edge {e} points at a missing slot")
        edge_arcs.append(add_arc(task_node(e.task), slot_node(sid), 1, e.weight))
    for sid in range(len(slot_ids)):
        add_arc(slot_node(sid), sink, 1, 0.0)

    potential = [0.0] * n
    flow = 0
    while flow < need:
        dist = [math.inf] * n
        prev_arc = [-1] * n
        dist[src] = 0.0
        heap = [(0.0, src)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for a in head[u]:
                if cap[a] <= 0:
                    continue
                v = to[a]
                nd = d + max(cost[a] + potential[u] - potential[v], 0.0)
                if nd < dist[v] - 1e-15:
                    dist[v] = nd
                    prev_arc[v] = a
                    heapq.heappush(heap, (nd, v))
        if math.isinf(dist[sink]):
            raise MalformedGraphError(f"only {flow} of {need} task demands can be matched")
        for v in range(n):
            if not math.isinf(dist[v]):
                potential[v] += dist[v]
        v = sink
        while v != src:
            a = prev_arc[v]
            cap[a] -= 1
            cap[a ^ 1] += 1
            v = to[a ^ 1]
        flow += 1

    chosen = [e for e, a in zip(g.edges, edge_arcs) if cap[a] == 0]
    return BMatching(chosen, math.fsum(e.weight for e in chosen))


def apply_matching(inst: Instance, x: np.ndarray, matching: BMatching) -> TypeLevelSchedule:
    xhat = np.floor(snap(x)).astype(np.int64)
    for e in matching.edges:
        xhat[e.task, e.machine_type] += 1
    return TypeLevelSchedule(xhat)


def round_schedule(inst: Instance, x: np.ndarray) -> TypeLevelSchedule:
    """Round a feasible fractional assignment to integer counts without adding energy."""
    g = build_slot_graph(inst, x)
    return apply_matching(inst, x, min_weight_b_matching(g))
