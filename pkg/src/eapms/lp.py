"""Linear programs, a two-phase simplex solver and the scheduling LP builders.

The solver works on a dense tableau. It always ends on a basic solution,
which the rounding step depends on: a vertex of the energy relaxation has at
most ``T + M`` positive entries, keeping the slot graph small.
"""

from __future__ import annotations

import dataclasses
import enum
from typing import Hashable, Sequence

import numpy as np

from .errors import CandidateInfeasibleError
from .model import Instance

FEAS_TOL = 1e-9
_COST_TOL = 1e-10
_PIVOT_TOL = 1e-9
_MAX_ITER = 50_000
_DEGENERATE_STREAK = 50

RELATIONS = ("<=", "=", ">=")


class LpStatus(enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"


@dataclasses.dataclass(frozen=True)
class Constraint:
    coeffs: np.ndarray
    relation: str
    rhs: float


@dataclasses.dataclass
class LinearProgram:
    """``min|max objective @ x`` subject to the constraints and ``x >= 0``."""

    objective: np.ndarray
    constraints: list[Constraint] = dataclasses.field(default_factory=list)
    sense: str = "min"
    labels: tuple[Hashable, ...] = ()

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        if self.labels and len(self.labels) != self.n_vars:
            raise ValueError("one label per variable expected")
        for con in self.constraints:
            self._check(con)

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    def _check(self, con: Constraint) -> None:
        if con.relation not in RELATIONS:
            raise ValueError(f"unknown relation {con.relation!r}")
        if con.coeffs.shape != (self.n_vars,):
            raise ValueError(f"constraint has {con.coeffs.shape} coefficients, program has {self.n_vars} variables")

    def add(self, coeffs: Sequence[float], relation: str, rhs: float) -> None:
        con = Constraint(np.asarray(coeffs, dtype=float), relation, float(rhs))
        self._check(con)
        self.constraints.append(con)


@dataclasses.dataclass
class LpSolution:
    values: np.ndarray
    objective_value: float
    status: LpStatus
    basis: frozenset[int] = frozenset()
    iterations: int = 0

    def positive_count(self, tol: float = FEAS_TOL) -> int:
        return int(np.count_nonzero(self.values > tol))


def _run_simplex(tab: np.ndarray, basis: list[int], allowed: np.ndarray) -> tuple[bool, int]:
    """Pivot ``tab`` (last row = reduced costs, last column = rhs) to optimality.

    Dantzig's rule, falling back to Bland's rule after a streak of degenerate
    pivots so cycling cannot occur. Returns (bounded, iterations).
    """
    m = tab.shape[0] - 1
    it = 0
    streak = 0
    while True:
        d = tab[m, :-1]
        candidates = np.flatnonzero((d < -_COST_TOL) & allowed)
        if candidates.size == 0:
            return True, it
        bland = streak >= _DEGENERATE_STREAK
        col = int(candidates[0]) if bland else int(candidates[np.argmin(d[candidates])])
        column = tab[:m, col]
        rows = np.flatnonzero(column > _PIVOT_TOL)
        if rows.size == 0:
            return False, it
        ratios = tab[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        streak = streak + 1 if tab[row, -1] <= 1e-12 else 0
        _pivot(tab, row, col)
        basis[row] = col
        it += 1
        if it > _MAX_ITER:
            raise RuntimeError("simplex iteration limit exceeded")


def _pivot(tab: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    factors = tab[:, col].copy()
    factors[row] = 0.0
    tab -= np.outer(factors, tab[row])


def _price_out(tab: np.ndarray, basis: list[int], cost: np.ndarray) -> None:
    m = tab.shape[0] - 1
    tab[m, :-1] = cost
    tab[m, -1] = 0.0
    for r, b in enumerate(basis):
        if tab[m, b] != 0.0:
            tab[m] -= tab[m, b] * tab[r]


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve ``lp`` with the two-phase simplex method.

    Infeasible and unbounded programs are reported through ``status``.
    """
    n = lp.n_vars
    rows = [(c.coeffs.copy(), c.relation, c.rhs) for c in lp.constraints]
    # rhs made nonnegative so slacks or artificials give a starting basis
    for r, (a, rel, b) in enumerate(rows):
        if b < 0:
            rows[r] = (-a, {"<=": ">=", ">=": "<=", "=": "="}[rel], -b)
    m = len(rows)
    n_slack = sum(rel != "=" for _, rel, _ in rows)
    n_art = sum(rel != "<=" for _, rel, _ in rows)
    width = n + n_slack + n_art
    A = np.zeros((m, width))
    b = np.array([r[2] for r in rows], dtype=float)
    basis: list[int] = []
    is_art = np.zeros(width, dtype=bool)
    s = n
    a_col = n + n_slack
    for r, (coeffs, rel, _) in enumerate(rows):
        A[r, :n] = coeffs
        if rel == "<=":
            A[r, s] = 1.0
            basis.append(s)
            s += 1
        else:
            if rel == ">=":
                A[r, s] = -1.0
                s += 1
            A[r, a_col] = 1.0
            is_art[a_col] = True
            basis.append(a_col)
            a_col += 1

    sign = 1.0 if lp.sense == "min" else -1.0
    cost = np.zeros(width)
    cost[:n] = sign * lp.objective

    if m == 0:
        if np.any(cost[:n] < -_COST_TOL):
            return LpSolution(np.zeros(n), float("nan"), LpStatus.UNBOUNDED)
        return LpSolution(np.zeros(n), 0.0, LpStatus.OPTIMAL)

    tab = np.zeros((m + 1, width + 1))
    tab[:m, :width] = A
    tab[:m, -1] = b
    iterations = 0

    if n_art:
        _price_out(tab, basis, is_art.astype(float))
        _, iterations = _run_simplex(tab, basis, np.ones(width, dtype=bool))
        if -tab[m, -1] > FEAS_TOL * max(1.0, float(np.abs(b).max())):
            return LpSolution(np.zeros(n), float("nan"), LpStatus.INFEASIBLE, iterations=iterations)
        # drive artificials out of the basis; rows where that fails are redundant
        keep = []
        for r in range(m):
            if is_art[basis[r]]:
                cols = np.flatnonzero((np.abs(tab[r, :width]) > _PIVOT_TOL) & ~is_art)
                if cols.size:
                    _pivot(tab, r, int(cols[0]))
                    basis[r] = int(cols[0])
                    keep.append(r)
            else:
                keep.append(r)
        if len(keep) < m:
            tab = tab[keep + [m]]
            basis = [basis[r] for r in keep]
            A, b = A[keep], b[keep]
            m = len(keep)

    _price_out(tab, basis, cost)
    bounded, more = _run_simplex(tab, basis, ~is_art)
    iterations += more
    if not bounded:
        return LpSolution(np.zeros(n), float("nan"), LpStatus.UNBOUNDED, iterations=iterations)

    full = np.zeros(width)
    xb = tab[:m, -1].copy()
    if m:
        try:
            # recompute basic values from the original rows to shed pivoting error
            refined = np.linalg.solve(A[:, basis], b)
            if np.all(refined > -1e-7):
                xb = refined
        except np.linalg.LinAlgError:
            pass
    full[basis] = xb
    x = full[:n]
    x[(x < 0) & (x > -1e-7)] = 0.0
    x[np.abs(x) < 1e-13] = 0.0
    return LpSolution(
        values=x,
        objective_value=float(lp.objective @ x),
        status=LpStatus.OPTIMAL,
        basis=frozenset(int(v) for v in basis if v < n),
        iterations=iterations,
    )


def max_violation(lp: LinearProgram, x: np.ndarray) -> float:
    """Largest constraint or sign violation of ``x``."""
    worst = float(max(0.0, -x.min())) if len(x) else 0.0
    for con in lp.constraints:
        lhs = float(con.coeffs @ x)
        if con.relation == "<=":
            worst = max(worst, lhs - con.rhs)
        elif con.relation == ">=":
            worst = max(worst, con.rhs - lhs)
        else:
            worst = max(worst, abs(lhs - con.rhs))
    return worst


def allowed_pairs(inst: Instance, ms: float) -> np.ndarray:
    """Mask of (i, j) pairs whose single-task time fits within ``ms``."""
    return inst.etc <= ms * (1 + 1e-12)


def build_energy_lp(inst: Instance, ms: float) -> LinearProgram:
    """Energy-minimizing relaxation for a fixed makespan target ``ms``.

    Only pairs with ``etc[i, j] <= ms`` get a variable; ``labels`` holds
    the ``(i, j)`` pair of each variable.
    """
    if not ms > 0:
        raise ValueError(f"makespan target must be positive, got {ms!r}")
    allowed = allowed_pairs(inst, ms)
    for i, t in enumerate(inst.tasks_per_type):
        if t > 0 and not allowed[i].any():
            raise CandidateInfeasibleError(ms, i)
    pairs = [(int(i), int(j)) for i, j in zip(*np.nonzero(allowed))]
    w = inst.energy_per_task
    lp = LinearProgram(np.array([w[i, j] for i, j in pairs]), sense="min", labels=tuple(pairs))
    for i, t in enumerate(inst.tasks_per_type):
        row = np.array([1.0 if p[0] == i else 0.0 for p in pairs])
        if row.any():
            lp.add(row, "=", t)
    for j, mj in enumerate(inst.machines_per_type):
        row = np.array([inst.etc[p] / mj if p[1] == j else 0.0 for p in pairs])
        if row.any():
            lp.add(row, "<=", ms)
    return lp


def pairs_to_matrix(inst: Instance, lp: LinearProgram, values: np.ndarray) -> np.ndarray:
    x = np.zeros(inst.etc.shape)
    for (i, j), v in zip(lp.labels, values):
        x[i, j] = v
    return x


@dataclasses.dataclass
class EnergyLpResult:
    x: np.ndarray
    energy: float
    solution: LpSolution
    program: LinearProgram


def solve_energy_lp(inst: Instance, ms: float) -> EnergyLpResult | None:
    """Solve the energy relaxation at ``ms``; ``None`` when it is infeasible.

    Raises CandidateInfeasibleError when a task type has no admissible machine type.
    """
    lp = build_energy_lp(inst, ms)
    sol = solve_lp(lp)
    if sol.status is not LpStatus.OPTIMAL:
        return None
    x = pairs_to_matrix(inst, lp, sol.values)
    return EnergyLpResult(x, float(np.sum(x * inst.energy_per_task)), sol, lp)


def build_tms_lp(inst: Instance) -> LinearProgram:
    """Linearized profit-rate program; variable 0 is the reciprocal makespan ``r``.

    The remaining variables are ``z[i, j] = r * x[i, j]`` in row-major order.
    """
    T, M = inst.etc.shape
    w = inst.energy_per_task
    labels: list[Hashable] = ["r"] + [(i, j) for i in range(T) for j in range(M)]
    obj = np.concatenate([[inst.price], -inst.energy_cost * w.ravel()])
    lp = LinearProgram(obj, sense="max", labels=tuple(labels))
    for i, t in enumerate(inst.tasks_per_type):
        row = np.zeros(1 + T * M)
        row[0] = -t
        row[1 + i * M : 1 + (i + 1) * M] = 1.0
        lp.add(row, "=", 0.0)
    for j, mj in enumerate(inst.machines_per_type):
        row = np.zeros(1 + T * M)
        row[1 + j :: M] = inst.etc[:, j] / mj
        lp.add(row, "<=", 1.0)
    return lp


def fractional_makespan_lb(inst: Instance) -> float:
    """Smallest makespan reachable when tasks may be split across machines of a type."""
    T, M = inst.etc.shape
    nv = T * M + 1
    obj = np.zeros(nv)
    obj[-1] = 1.0
    lp = LinearProgram(obj, sense="min")
    for i, t in enumerate(inst.tasks_per_type):
        row = np.zeros(nv)
        row[i * M : (i + 1) * M] = 1.0
        lp.add(row, "=", t)
    for j, mj in enumerate(inst.machines_per_type):
        row = np.zeros(nv)
        row[j : T * M : M] = inst.etc[:, j] / mj
        row[-1] = -1.0
        lp.add(row, "<=", 0.0)
    sol = solve_lp(lp)
    if sol.status is not LpStatus.OPTIMAL:
        raise RuntimeError(f"makespan bound LP ended {sol.status.value}")
    return float(sol.values[-1])
