import numpy as np
import pytest

from eapms.errors import SweepError
from eapms.lp import fractional_makespan_lb
from eapms.model import Instance, makespan
from eapms.oracle import exact_opt
from eapms.solver import (
    SweepConfig,
    candidate_makespans,
    greedy_schedule,
    largest_remainder_round,
    tms_solve,
    ttb_solve,
    upper_bound_ub,
)

from helpers import instance_a, random_instance, single_cell


def slow_fast_instance():
    # one task; the fast machine type burns ten times the power
    return Instance((1,), (1, 1), [[1.0, 10.0]], [[10.0, 1.0]], 20.0, 1.0)


class TestCandidates:
    def test_powers_of_two(self):
        assert candidate_makespans(1.0, 4.0, SweepConfig(epsilon=1.0)) == pytest.approx([1, 2, 4])

    def test_equal_bounds(self):
        assert candidate_makespans(5.0, 5.0) == [5.0]

    def test_one_step_covers(self):
        assert candidate_makespans(1.0, 1.05, SweepConfig(epsilon=0.1)) == pytest.approx([1.0, 1.1])

    def test_last_value_reaches_ub(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            lb = float(rng.uniform(0.1, 5))
            ub = lb * float(rng.uniform(1, 50))
            eps = float(rng.uniform(0.01, 1))
            c = candidate_makespans(lb, ub, SweepConfig(epsilon=eps))
            assert c[-1] >= ub and c[0] == lb
            assert len(c) == 1 or c[-2] < ub

    def test_cap_error_names_epsilon(self):
        with pytest.raises(SweepError, match="epsilon >="):
            candidate_makespans(1.0, 1e6, SweepConfig(epsilon=0.001, max_candidates=100))

    @pytest.mark.parametrize("lb,ub", [(0.0, 1.0), (-1.0, 1.0), (2.0, 1.0)])
    def test_contract(self, lb, ub):
        with pytest.raises(ValueError):
            candidate_makespans(lb, ub)

    def test_config_validation(self):
        for kwargs in (dict(epsilon=0.0), dict(max_candidates=0), dict(ub_rule="power")):
            with pytest.raises(ValueError):
                SweepConfig(**kwargs)


class TestUpperBound:
    def test_instance_a(self):
        inst = instance_a()
        assert greedy_schedule(inst).x.tolist() == [[2, 0], [0, 1]]
        assert upper_bound_ub(inst) == 2.0

    def test_single_cell(self):
        inst = single_cell(tasks=3, machines=2, etc=1.5)
        assert upper_bound_ub(inst) == 3.0
        assert upper_bound_ub(inst) >= fractional_makespan_lb(inst)

    def test_strictly_above_lower_bound(self):
        inst = slow_fast_instance()
        lb = fractional_makespan_lb(inst)
        assert lb == pytest.approx(10 / 11)
        assert upper_bound_ub(inst) == 1.0 > lb
        assert upper_bound_ub(inst, "apc") == 10.0

    def test_never_below_lower_bound(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            inst = random_instance(rng, max_types=5, max_mtypes=3, max_tasks=10, max_machines=4)
            for rule in ("energy", "apc"):
                assert upper_bound_ub(inst, rule) >= fractional_makespan_lb(inst) - 1e-12


class TestTtb:
    def test_instance_a(self):
        rep = ttb_solve(instance_a(), SweepConfig(epsilon=0.1))
        assert rep.profit_rate == 2.0
        assert rep.schedule.type_level().x.tolist() == [[2, 0], [0, 1]]
        assert rep.method == "TTB"
        d = rep.diagnostics
        assert d.lower_bound == pytest.approx(5 / 3) and d.upper_bound == 2.0
        assert d.matchings == len(d.candidates) - d.skipped

    def test_single_cell(self):
        inst = single_cell(tasks=3, machines=2, etc=1.0, apc=1.0, price=10.0)
        rep = ttb_solve(inst)
        assert rep.schedule.type_level().x.tolist() == [[3]]
        assert rep.makespan == 2.0 and rep.energy == 3.0
        assert rep.profit_rate == 3.5

    def test_apc_rule_still_solves(self):
        inst = slow_fast_instance()
        a = ttb_solve(inst, SweepConfig(ub_rule="energy"))
        b = ttb_solve(inst, SweepConfig(ub_rule="apc"))
        # energy per task ties at 10; the fast machine wins on profit rate
        assert a.profit_rate == b.profit_rate == 10.0
        assert len(b.diagnostics.candidates) > len(a.diagnostics.candidates)

    def test_break_even_price(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            inst = random_instance(rng, max_types=4, max_mtypes=3, max_tasks=8, max_machines=3, gamma=1.0)
            assert abs(ttb_solve(inst).profit_rate) <= 1e-6

    def test_ratio_and_bracketing_on_small_instances(self):
        rng = np.random.default_rng(13)
        eps = 0.1
        for _ in range(30):
            inst = random_instance(rng)
            rep = ttb_solve(inst, SweepConfig(epsilon=eps))
            opt = exact_opt(inst)
            if opt.profit_rate > 0:
                assert rep.profit_rate >= opt.profit_rate / (2 + 2 * eps) - 1e-9
            assert rep.makespan <= 2 * rep.ms_candidate + 1e-9
            opt_ms = makespan(inst, opt.schedule)
            cands = [c.ms for c in rep.diagnostics.candidates]
            if opt_ms >= cands[0]:
                assert any(opt_ms <= c <= (1 + eps) * opt_ms * (1 + 1e-12) for c in cands)

    def test_deterministic(self):
        inst = random_instance(np.random.default_rng(1), max_types=4, max_tasks=9)
        a, b = ttb_solve(inst), ttb_solve(inst)
        assert a.profit_rate == b.profit_rate and a.ms_candidate == b.ms_candidate
        assert all(np.array_equal(p, q) for p, q in zip(a.schedule.x, b.schedule.x))


class TestTms:
    def test_single_cell(self):
        rep = tms_solve(single_cell(tasks=1, etc=2.0, apc=1.0, price=10.0, cost=1.0))
        assert rep.profit_rate == 4.0
        assert rep.label == "TMS-reconstructed"
        assert rep.ms_candidate == pytest.approx(2.0)

    def test_instance_a_not_above_ttb(self):
        assert tms_solve(instance_a()).profit_rate <= ttb_solve(instance_a()).profit_rate + 1e-12

    def test_zero_price_falls_back(self):
        rep = tms_solve(instance_a(price=0.0))
        assert rep.warnings and "min-energy" in rep.warnings[0]
        assert rep.energy == 6.0

    def test_largest_remainder(self):
        x = np.array([[2.0, 0.0], [0.4, 0.6], [1.5, 1.5]])
        assert largest_remainder_round(x, (2, 1, 3)).tolist() == [[2, 0], [0, 1], [2, 1]]

    def test_rows_preserved(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            inst = random_instance(rng, max_types=4, max_mtypes=3, max_tasks=9, max_machines=3)
            rep = tms_solve(inst)
            assert rep.schedule.type_level().x.sum(axis=1).tolist() == list(inst.tasks_per_type)
