import itertools

import numpy as np

from eapms.lp import LinearProgram
from eapms.model import Instance, e_min
from eapms.rounding import SlotEdge, SlotGraph


def instance_a(price=10.0, cost=1.0):
    return Instance((2, 1), (1, 1), [[1, 2], [3, 1]], [[2, 1], [1, 2]], price, cost)


def single_cell(tasks=1, machines=1, etc=2.0, apc=1.0, price=10.0, cost=1.0):
    return Instance((tasks,), (machines,), [[etc]], [[apc]], price, cost)


def random_instance(rng, max_types=3, max_mtypes=2, max_tasks=4, max_machines=2, gamma=None, min_tasks=0):
    T = int(rng.integers(1, max_types + 1))
    M = int(rng.integers(1, max_mtypes + 1))
    tasks = [int(v) for v in rng.integers(min_tasks, max_tasks + 1, size=T)]
    if sum(tasks) == 0:
        tasks[int(rng.integers(T))] = max(1, min_tasks)
    machines = [int(v) for v in rng.integers(1, max_machines + 1, size=M)]
    etc = 1.0 - rng.random((T, M))
    apc = 1.0 - rng.random((T, M))
    inst = Instance(tuple(tasks), tuple(machines), etc, apc, 0.0, 1.0)
    g = float(rng.uniform(1.0, 1.5)) if gamma is None else gamma
    return inst.with_price(g * e_min(inst))


def is_basic(lp: LinearProgram, x, tol=1e-9):
    """Positive variables plus slacks of non-tight inequalities have independent columns."""
    cols = []
    m = len(lp.constraints)
    for v in np.flatnonzero(x > tol):
        cols.append(np.array([c.coeffs[v] for c in lp.constraints]))
    for r, c in enumerate(lp.constraints):
        if c.relation != "=" and abs(c.coeffs @ x - c.rhs) > tol:
            e = np.zeros(m)
            e[r] = 1.0
            cols.append(e)
    if not cols:
        return True
    return np.linalg.matrix_rank(np.array(cols).T, tol=1e-9) == len(cols)


def all_type_level(inst):
    """Every integer type-level split of the instance's tasks."""
    from eapms.oracle import compositions

    M = inst.n_machine_types
    for rows in itertools.product(*(compositions(t, M) for t in inst.tasks_per_type)):
        yield np.array(rows, dtype=np.int64).reshape(inst.n_task_types, M)


def random_graph(rng, max_edges=8):
    """A random slot graph that always admits a perfect cover of its demand."""
    while True:
        T = int(rng.integers(1, 4))
        slots = tuple(int(v) for v in rng.integers(1, 3, size=int(rng.integers(1, 3))))
        pairs = [(i, j, s) for i in range(T) for j, k in enumerate(slots) for s in range(k)]
        n = int(rng.integers(1, min(max_edges, len(pairs)) + 1))
        picked = [pairs[p] for p in rng.choice(len(pairs), size=n, replace=False)]
        # small integer weights make ties common, which is where matchers go wrong
        edges = [SlotEdge(i, j, s, float(rng.integers(1, 5))) for i, j, s in picked]
        demand = [0] * T
        used = set()
        for e in edges:
            if (e.machine_type, e.slot) not in used and rng.random() < 0.7:
                used.add((e.machine_type, e.slot))
                demand[e.task] += 1
        g = SlotGraph(tuple(demand), slots, edges)
        if sum(demand) > 0:
            return g
