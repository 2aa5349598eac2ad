"""Problem instance, schedules and the scalar metrics of a schedule.

An instance has ``T`` task types and ``M`` machine types. ``etc[i, j]`` is the
time one task of type ``i`` takes on one machine of type ``j`` and
``apc[i, j]`` the power it draws there, so ``apc * etc`` is the energy per
task. Machines are assumed off when idle; energy therefore depends only on
how many tasks of each type land on each machine type.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Sequence

import numpy as np

from .errors import DegenerateInstanceError, InvalidInstanceError


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclasses.dataclass(frozen=True, eq=False)
class Instance:
    tasks_per_type: tuple[int, ...]
    machines_per_type: tuple[int, ...]
    etc: np.ndarray
    apc: np.ndarray
    price: float
    energy_cost: float

    def __post_init__(self):
        tasks = tuple(int(t) for t in self.tasks_per_type)
        machines = tuple(int(m) for m in self.machines_per_type)
        etc = np.array(self.etc, dtype=float)
        apc = np.array(self.apc, dtype=float)
        shape = (len(tasks), len(machines))
        if not tasks or not machines:
            raise InvalidInstanceError("need at least one task type and one machine type")
        for name, mat in (("etc", etc), ("apc", apc)):
            if mat.shape != shape:
                raise InvalidInstanceError(f"{name} has shape {mat.shape}, expected {shape}")
            bad = np.argwhere(~(mat > 0) | ~np.isfinite(mat))
            if len(bad):
                i, j = (int(v) for v in bad[0])
                raise InvalidInstanceError(
                    f"{name}[{i}][{j}] = {mat[i, j]!r} must be a positive finite number"
                )
        if any(t < 0 for t in tasks):
            raise InvalidInstanceError(f"task counts must be nonnegative: {tasks}")
        if sum(tasks) == 0:
            raise InvalidInstanceError("instance has no tasks")
        if any(m < 1 for m in machines):
            raise InvalidInstanceError(f"every machine type needs at least one machine: {machines}")
        if not math.isfinite(self.price):
            raise InvalidInstanceError("price must be finite")
        if not (self.energy_cost >= 0 and math.isfinite(self.energy_cost)):
            raise InvalidInstanceError("energy cost must be a nonnegative finite number")
        object.__setattr__(self, "tasks_per_type", tasks)
        object.__setattr__(self, "machines_per_type", machines)
        object.__setattr__(self, "etc", _frozen(etc))
        object.__setattr__(self, "apc", _frozen(apc))
        object.__setattr__(self, "price", float(self.price))
        object.__setattr__(self, "energy_cost", float(self.energy_cost))

    @property
    def n_task_types(self) -> int:
        return len(self.tasks_per_type)

    @property
    def n_machine_types(self) -> int:
        return len(self.machines_per_type)

    @property
    def energy_per_task(self) -> np.ndarray:
        """``apc * etc``: energy drawn by one task of type i on machine type j."""
        return self.apc * self.etc

    def with_price(self, price: float) -> Instance:
        return dataclasses.replace(self, price=price)

    def with_tasks(self, tasks_per_type: Sequence[int]) -> Instance:
        return dataclasses.replace(self, tasks_per_type=tuple(tasks_per_type))

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.tasks_per_type == other.tasks_per_type
            and self.machines_per_type == other.machines_per_type
            and np.array_equal(self.etc, other.etc)
            and np.array_equal(self.apc, other.apc)
            and self.price == other.price
            and self.energy_cost == other.energy_cost
        )

    __hash__ = None  # type: ignore[assignment]


@dataclasses.dataclass(frozen=True, eq=False)
class TypeLevelSchedule:
    """Integer task counts ``x[i, j]`` per (task type, machine type)."""

    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x)
        if x.ndim != 2:
            raise ValueError("type-level schedule must be a 2-D matrix")
        if np.any(x < 0) or not np.all(np.equal(np.mod(x, 1), 0)):
            raise ValueError("type-level counts must be nonnegative integers")
        object.__setattr__(self, "x", _frozen(x.astype(np.int64)))

    def check(self, inst: Instance) -> None:
        if self.x.shape != inst.etc.shape:
            raise ValueError(f"schedule shape {self.x.shape} does not match instance {inst.etc.shape}")
        sums = tuple(int(s) for s in self.x.sum(axis=1))
        if sums != inst.tasks_per_type:
            raise ValueError(f"row sums {sums} differ from task counts {inst.tasks_per_type}")

    def __eq__(self, other):
        if not isinstance(other, TypeLevelSchedule):
            return NotImplemented
        return np.array_equal(self.x, other.x)

    __hash__ = None  # type: ignore[assignment]


@dataclasses.dataclass(frozen=True, eq=False)
class MachineLevelSchedule:
    """Per-machine counts: ``x[j][k, i]`` tasks of type i on machine k of type j."""

    x: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = []
        for block in self.x:
            b = np.array(block, dtype=np.int64)
            if b.ndim != 2 or np.any(b < 0):
                raise ValueError("each machine-type block must be a (machines, task types) count matrix")
            blocks.append(_frozen(b))
        object.__setattr__(self, "x", tuple(blocks))

    @classmethod
    def empty(cls, inst: Instance) -> MachineLevelSchedule:
        return cls(tuple(np.zeros((m, inst.n_task_types), dtype=np.int64) for m in inst.machines_per_type))

    def type_level(self) -> TypeLevelSchedule:
        return TypeLevelSchedule(np.stack([b.sum(axis=0) for b in self.x], axis=1))

    def check(self, inst: Instance) -> None:
        if len(self.x) != inst.n_machine_types:
            raise ValueError("schedule has the wrong number of machine types")
        for j, b in enumerate(self.x):
            if b.shape != (inst.machines_per_type[j], inst.n_task_types):
                raise ValueError(f"block {j} has shape {b.shape}")

    def machine_loads(self, inst: Instance) -> list[np.ndarray]:
        return [b @ inst.etc[:, j] for j, b in enumerate(self.x)]

    def __eq__(self, other):
        if not isinstance(other, MachineLevelSchedule):
            return NotImplemented
        return len(self.x) == len(other.x) and all(np.array_equal(a, b) for a, b in zip(self.x, other.x))

    __hash__ = None  # type: ignore[assignment]


METHODS = ("TTB", "TMS", "ORACLE", "MIN_ENERGY")


@dataclasses.dataclass
class SolutionReport:
    schedule: MachineLevelSchedule
    makespan: float
    energy: float
    profit_rate: float
    ms_candidate: float | None
    method: str
    label: str = ""
    warnings: list[str] = dataclasses.field(default_factory=list)
    diagnostics: object = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if not self.label:
            self.label = self.method

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "label": self.label,
            "makespan": self.makespan,
            "energy": self.energy,
            "profit_rate": self.profit_rate,
            "ms_candidate": self.ms_candidate,
            "type_level": self.schedule.type_level().x.tolist(),
            "machine_level": [b.tolist() for b in self.schedule.x],
            "warnings": list(self.warnings),
        }


def finish_time(inst: Instance, sched: MachineLevelSchedule, j: int, k: int) -> float:
    if not (0 <= j < inst.n_machine_types and 0 <= k < inst.machines_per_type[j]):
        raise IndexError(f"machine ({j}, {k}) out of range")
    return float(sched.x[j][k] @ inst.etc[:, j])


def makespan(inst: Instance, sched: MachineLevelSchedule) -> float:
    sched.check(inst)
    return max(float(loads.max()) for loads in sched.machine_loads(inst))


def energy(inst: Instance, sched: TypeLevelSchedule | MachineLevelSchedule | np.ndarray) -> float:
    """Total energy of a schedule; accepts type-level counts or a fractional matrix."""
    if isinstance(sched, MachineLevelSchedule):
        sched = sched.type_level()
    x = sched.x if isinstance(sched, TypeLevelSchedule) else np.asarray(sched, dtype=float)
    if x.shape != inst.etc.shape:
        raise ValueError(f"schedule shape {x.shape} does not match instance {inst.etc.shape}")
    return float(np.sum(x * inst.energy_per_task))


def profit_rate(inst: Instance, energy: float, makespan: float) -> float:
    if not makespan > 0:
        raise DegenerateInstanceError(f"profit rate undefined for makespan {makespan!r}")
    return (inst.price - inst.energy_cost * energy) / makespan


def e_min(inst: Instance) -> float:
    """Least energy any assignment can use when makespan is ignored."""
    return float(np.dot(inst.tasks_per_type, inst.energy_per_task.min(axis=1)))


def evaluate(inst: Instance, sched: MachineLevelSchedule) -> tuple[float, float, float]:
    """(makespan, energy, profit rate) of a machine-level schedule."""
    ms = makespan(inst, sched)
    e = energy(inst, sched)
    return ms, e, profit_rate(inst, e, ms)
