"""Profit-rate solvers built from the LP, rounding and batch-LPT pieces.

``ttb_solve`` tries a geometric ladder of makespan targets between a lower
and an upper bound. Each target gets an energy LP, slot-graph rounding and
batch LPT, and the realized schedule with the best profit per unit time
wins. ``tms_solve`` is the single-LP baseline: it linearizes the profit rate
through the reciprocal of a fractional makespan bound and rounds each row by
largest remainder.
"""

from __future__ import annotations

import dataclasses
import logging
import math

import numpy as np

from . import lp as lpmod
from .errors import CandidateInfeasibleError, SweepError
from .local import assign_machines
from .model import Instance, SolutionReport, TypeLevelSchedule, evaluate, makespan
from .rounding import apply_matching, build_slot_graph, min_weight_b_matching, snap

log = logging.getLogger(__name__)

UB_RULES = ("energy", "apc")
_PROFIT_TIE = 1e-12


@dataclasses.dataclass(frozen=True)
class SweepConfig:
    epsilon: float = 0.1
    max_candidates: int = 10_000
    # "energy": each type to its least-energy machine type; "apc": least average power
    ub_rule: str = "energy"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be at least 1")
        if self.ub_rule not in UB_RULES:
            raise ValueError(f"ub_rule must be one of {UB_RULES}")


@dataclasses.dataclass
class CandidateResult:
    t: int
    ms: float
    status: str  # "ok", "no-machine" or "lp-infeasible"
    lp_energy: float | None = None
    lp_positive: int | None = None
    lp_rows: int | None = None
    graph_edges: int | None = None
    rounded_energy: float | None = None
    makespan: float | None = None
    profit_rate: float | None = None
    type_level: np.ndarray | None = None


@dataclasses.dataclass
class SweepDiagnostics:
    lower_bound: float
    upper_bound: float
    candidates: list[CandidateResult] = dataclasses.field(default_factory=list)
    lp_solves: int = 0
    matchings: int = 0
    lpt_iterations: int = 0

    @property
    def skipped(self) -> int:
        return sum(c.status != "ok" for c in self.candidates)


def greedy_schedule(inst: Instance, rule: str = "energy") -> TypeLevelSchedule:
    """Send every task of a type to one machine type, chosen by ``rule``."""
    score = inst.energy_per_task if rule == "energy" else inst.apc
    x = np.zeros(inst.etc.shape, dtype=np.int64)
    for i, t in enumerate(inst.tasks_per_type):
        x[i, int(np.argmin(score[i]))] = t
    return TypeLevelSchedule(x)


def upper_bound_ub(inst: Instance, rule: str = "energy") -> float:
    sched, _ = assign_machines(inst, greedy_schedule(inst, rule))
    return makespan(inst, sched)


def candidate_makespans(lb: float, ub: float, cfg: SweepConfig = SweepConfig()) -> list[float]:
    """Targets ``lb * (1 + eps)**t`` for t = 0, 1, ... until one reaches ``ub``."""
    if not lb > 0:
        raise ValueError(f"lower bound must be positive, got {lb!r}")
    if ub < lb:
        raise ValueError(f"upper bound {ub!r} is below lower bound {lb!r}")
    steps = max(0, math.ceil(math.log(ub / lb) / math.log1p(cfg.epsilon) - 1e-12))
    out = [lb * (1 + cfg.epsilon) ** t for t in range(steps + 1)]
    if out[-1] < ub:
        if out[-1] >= ub * (1 - 1e-9):
            out[-1] = ub
        else:
            out.append(lb * (1 + cfg.epsilon) ** len(out))
    if len(out) > cfg.max_candidates:
        needed = (ub / lb) ** (1 / max(cfg.max_candidates - 1, 1)) - 1
        raise SweepError(
            f"{len(out)} makespan candidates exceed the cap of {cfg.max_candidates}; "
            f"use epsilon >= {needed:.3g}"
        )
    return out


def _better(a: tuple[float, float, float, int], b: tuple[float, float, float, int] | None) -> bool:
    """Order by profit rate (desc), then makespan, energy and ladder index."""
    if b is None:
        return True
    scale = max(1.0, abs(a[0]), abs(b[0]))
    if a[0] > b[0] + _PROFIT_TIE * scale:
        return True
    if a[0] < b[0] - _PROFIT_TIE * scale:
        return False
    return a[1:] < b[1:]


def ttb_solve(inst: Instance, cfg: SweepConfig = SweepConfig()) -> SolutionReport:
    lb = lpmod.fractional_makespan_lb(inst)
    ub = upper_bound_ub(inst, cfg.ub_rule)
    diag = SweepDiagnostics(lb, ub)
    best_key = None
    best = None
    for t, ms in enumerate(candidate_makespans(lb, max(ub, lb), cfg)):
        cand = CandidateResult(t, ms, "ok")
        diag.candidates.append(cand)
        try:
            program = lpmod.build_energy_lp(inst, ms)
        except CandidateInfeasibleError:
            cand.status = "no-machine"
            continue
        sol = lpmod.solve_lp(program)
        diag.lp_solves += 1
        if sol.status is not lpmod.LpStatus.OPTIMAL:
            cand.status = "lp-infeasible"
            continue
        x = lpmod.pairs_to_matrix(inst, program, sol.values)
        graph = build_slot_graph(inst, x)
        matching = min_weight_b_matching(graph)
        diag.matchings += 1
        xhat = apply_matching(inst, x, matching)
        sched, runs = assign_machines(inst, xhat)
        diag.lpt_iterations += sum(r.iterations for r in runs)
        ms_real, e, rate = evaluate(inst, sched)
        cand.lp_energy = sol.objective_value
        cand.lp_positive = sol.positive_count()
        cand.lp_rows = len(program.constraints)
        cand.graph_edges = len(graph.edges)
        cand.rounded_energy = e
        cand.makespan = ms_real
        cand.profit_rate = rate
        cand.type_level = xhat.x
        key = (rate, ms_real, e, t)
        if _better(key, best_key):
            best_key = key
            best = SolutionReport(sched, ms_real, e, rate, ms, "TTB", diagnostics=diag)
    if best is None:
        raise SweepError("no makespan candidate produced a schedule")
    log.debug("TTB: %d candidates, %d skipped, best MS=%g", len(diag.candidates), diag.skipped, best.ms_candidate)
    return best


@dataclasses.dataclass
class TmsDiagnostics:
    lp_objective: float
    reciprocal_makespan: float
    fractional_x: np.ndarray | None


def largest_remainder_round(x: np.ndarray, totals) -> np.ndarray:
    """Round each row down, then add the missing units to its largest remainders."""
    x = snap(x)
    out = np.floor(x).astype(np.int64)
    for i, total in enumerate(totals):
        missing = int(total) - int(out[i].sum())
        if missing <= 0:
            continue
        rem = x[i] - out[i]
        order = sorted(range(len(rem)), key=lambda j: (-rem[j], j))
        for j in order[:missing]:
            out[i, j] += 1
    return out


def min_energy_solve(inst: Instance, rule: str = "energy") -> SolutionReport:
    sched, _ = assign_machines(inst, greedy_schedule(inst, rule))
    ms, e, rate = evaluate(inst, sched)
    return SolutionReport(sched, ms, e, rate, None, "MIN_ENERGY")


def tms_solve(inst: Instance) -> SolutionReport:
    program = lpmod.build_tms_lp(inst)
    sol = lpmod.solve_lp(program)
    T, M = inst.etc.shape
    r = float(sol.values[0]) if sol.status is lpmod.LpStatus.OPTIMAL else 0.0
    if r <= 1e-12:
        report = min_energy_solve(inst)
        report.method = "TMS"
        report.label = "TMS-reconstructed"
        report.warnings.append("degenerate linearized LP (r = 0); fell back to the min-energy schedule")
        report.diagnostics = TmsDiagnostics(sol.objective_value, r, None)
        return report
    x = sol.values[1:].reshape(T, M) / r
    xhat = TypeLevelSchedule(largest_remainder_round(x, inst.tasks_per_type))
    sched, _ = assign_machines(inst, xhat)
    ms, e, rate = evaluate(inst, sched)
    return SolutionReport(
        sched, ms, e, rate, 1.0 / r, "TMS",
        label="TMS-reconstructed",
        diagnostics=TmsDiagnostics(sol.objective_value, r, x),
    )
