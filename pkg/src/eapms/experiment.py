"""Instance files, the random instance generator and CSV experiment runs.

Instance files are JSON::

    {
      "task_types": [{"count": 2}, {"count": 1}],
      "machine_types": [{"count": 1}, {"count": 1}],
      "etc": [[1, 2], [3, 1]],
      "apc": [[2, 1], [1, 2]],
      "price": 10,
      "energy_cost": 1
    }

Random instances come from NumPy's PCG64 generator seeded with
``SeedSequence([seed, q])``, so experiment ``q`` of a given seed is the same
on every platform.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import EapmsError, InstanceParseError, InvalidSpecError
from .model import Instance, SolutionReport, e_min
from .oracle import OracleBudget, exact_opt
from .solver import SweepConfig, tms_solve, ttb_solve

CSV_COLUMNS = (
    "method", "gamma", "q", "seed", "tasks", "makespan", "energy",
    "profit_rate", "ms_candidate", "wall_ms", "error",
)
METHODS = ("ttb", "tms", "oracle")


def _field(doc: dict, key: str, where: str = "") -> Any:
    if key not in doc:
        raise InstanceParseError(f"{where}missing field {key!r}")
    return doc[key]


def _number(v: Any, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InstanceParseError(f"{where}: expected a number, got {v!r}")
    return float(v)


def _counts(doc: dict, key: str) -> list[int]:
    items = _field(doc, key)
    if not isinstance(items, list) or not items:
        raise InstanceParseError(f"{key}: expected a nonempty list")
    out = []
    for n, item in enumerate(items):
        if not isinstance(item, dict) or "count" not in item:
            raise InstanceParseError(f"{key}[{n}]: expected an object with a 'count' field")
        c = item["count"]
        if isinstance(c, bool) or not isinstance(c, int):
            raise InstanceParseError(f"{key}[{n}].count: expected an integer, got {c!r}")
        out.append(c)
    return out


def _matrix(doc: dict, key: str, rows: int, cols: int) -> list[list[float]]:
    mat = _field(doc, key)
    if not isinstance(mat, list) or len(mat) != rows:
        raise InstanceParseError(f"{key}: expected {rows} rows")
    out = []
    for i, row in enumerate(mat):
        if not isinstance(row, list) or len(row) != cols:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise InstanceParseError(f"{key}[{i}]: expected {cols} entries, got {got}")
        out.append([_number(v, f"{key}[{i}][{j}]") for j, v in enumerate(row)])
    return out


def instance_from_dict(doc: Any) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceParseError("instance document must be a JSON object")
    tasks = _counts(doc, "task_types")
    machines = _counts(doc, "machine_types")
    etc = _matrix(doc, "etc", len(tasks), len(machines))
    apc = _matrix(doc, "apc", len(tasks), len(machines))
    price = _number(_field(doc, "price"), "price")
    cost = _number(_field(doc, "energy_cost"), "energy_cost")
    return Instance(tuple(tasks), tuple(machines), np.array(etc), np.array(apc), price, cost)


def instance_to_dict(inst: Instance) -> dict:
    return {
        "task_types": [{"count": t} for t in inst.tasks_per_type],
        "machine_types": [{"count": m} for m in inst.machines_per_type],
        "etc": inst.etc.tolist(),
        "apc": inst.apc.tolist(),
        "price": inst.price,
        "energy_cost": inst.energy_cost,
    }


def load_instance(path: str | Path) -> Instance:
    """Read and validate an instance file.

    Raises InstanceParseError for malformed documents and InvalidInstanceError
    for well-formed documents with invalid values.
    """
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return instance_from_dict(doc)


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst), indent=2) + "\n")


@dataclasses.dataclass(frozen=True)
class ExperimentSpec:
    gamma: tuple[float, ...] = (1.2,)
    replications: int = 1
    seed: int = 0
    task_types: int = 30
    machine_types: int = 9
    machines_per_type: int = 40
    tasks_per_q: int = 150
    epsilon: float = 0.1
    methods: tuple[str, ...] = ("ttb", "tms")
    oracle_budget: int = 10**6
    instance: str | None = None  # fixed instance file; replaces the generator

    def __post_init__(self):
        gamma = (self.gamma,) if isinstance(self.gamma, (int, float)) else tuple(self.gamma)
        object.__setattr__(self, "gamma", tuple(float(g) for g in gamma))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.gamma or any(not g > 0 for g in self.gamma):
            raise InvalidSpecError(f"gamma values must be positive: {self.gamma}")
        if self.replications < 1:
            raise InvalidSpecError("replications must be at least 1")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise InvalidSpecError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        if min(self.task_types, self.machine_types, self.machines_per_type) < 1 or self.tasks_per_q < 1:
            raise InvalidSpecError("generator sizes must be positive")

    @classmethod
    def from_dict(cls, doc: dict) -> ExperimentSpec:
        if not isinstance(doc, dict):
            raise InstanceParseError("experiment spec must be a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise InstanceParseError(f"unknown experiment spec keys: {sorted(unknown)}")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise InstanceParseError(f"experiment spec: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> ExperimentSpec:
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InstanceParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        return cls.from_dict(doc)


def gen_random(spec: ExperimentSpec, q: int) -> Instance:
    """Random instance number ``q``: ``tasks_per_q * q`` tasks, entries uniform in (0, 1]."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([spec.seed % 2**64, q])))
    T, M = spec.task_types, spec.machine_types
    etc = 1.0 - rng.random((T, M))
    apc = 1.0 - rng.random((T, M))
    total = spec.tasks_per_q * q
    base, extra = divmod(total, T)
    tasks = tuple(base + (1 if i < extra else 0) for i in range(T))
    inst = Instance(tasks, (spec.machines_per_type,) * M, etc, apc, 0.0, 1.0)
    return inst.with_price(spec.gamma[0] * e_min(inst))


def _solve(method: str, inst: Instance, spec: ExperimentSpec) -> SolutionReport:
    if method == "ttb":
        return ttb_solve(inst, SweepConfig(epsilon=spec.epsilon))
    if method == "tms":
        return tms_solve(inst)
    return exact_opt(inst, OracleBudget(spec.oracle_budget))


def _rows_for(spec: ExperimentSpec, q: int) -> list[dict]:
    base = load_instance(spec.instance) if spec.instance else gen_random(spec, q)
    rows = []
    for gamma in spec.gamma:
        inst = base.with_price(gamma * e_min(base))
        for method in spec.methods:
            row = dict.fromkeys(CSV_COLUMNS, "")
            row.update(method=method.upper(), gamma=gamma, q=q, seed=spec.seed, tasks=sum(inst.tasks_per_type))
            start = time.perf_counter()
            try:
                rep = _solve(method, inst, spec)
            except EapmsError as exc:
                row["error"] = f"{type(exc).__name__}: {exc}"
            else:
                row.update(
                    makespan=rep.makespan,
                    energy=rep.energy,
                    profit_rate=rep.profit_rate,
                    ms_candidate="" if rep.ms_candidate is None else rep.ms_candidate,
                    error="; ".join(rep.warnings),
                )
            row["wall_ms"] = round((time.perf_counter() - start) * 1000, 3)
            rows.append(row)
    return rows


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> list[dict]:
    """One row per (q, gamma, method), ordered by q, then gamma, then method."""
    qs = [1] if spec.instance else list(range(1, spec.replications + 1))
    if jobs > 1 and len(qs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_rows_for, [spec] * len(qs), qs))
    else:
        chunks = [_rows_for(spec, q) for q in qs]
    return [row for chunk in chunks for row in chunk]


def write_csv(rows: Sequence[dict], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row[k]) for k in CSV_COLUMNS})


def _fmt(v: Any) -> Any:
    if isinstance(v, float) and math.isfinite(v):
        return repr(v)
    return v
