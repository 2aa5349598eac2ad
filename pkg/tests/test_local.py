import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eapms.local import assign_machines, batch_lpt_column, classic_lpt, n_ik, water_level
from eapms.model import TypeLevelSchedule, makespan

from helpers import instance_a


def expand(etc_col, counts):
    return [d for d, c in zip(etc_col, counts) for _ in range(c)]


def check_level_invariant(res, etc_col, tol=1e-9):
    for s in res.steps:
        d = etc_col[s.task_type]
        assert s.level - d - tol < s.load_after <= s.level + tol


class TestHelpers:
    @pytest.mark.parametrize("al,load,d,expected", [(10, 3, 4, 1), (10, 3, 2, 3), (10, 10, 2, 0), (10, 12, 2, 0), (10, 9.5, 1, 0)])
    def test_n_ik(self, al, load, d, expected):
        assert n_ik(al, load, d) == expected

    def test_n_ik_rejects_zero_length(self):
        with pytest.raises(ValueError):
            n_ik(1.0, 0.0, 0.0)

    def test_classic_lpt(self):
        # the textbook case where LPT is not optimal: (7, 5) instead of (6, 6)
        assert sorted(classic_lpt([3, 3, 2, 2, 2], 2)) == [5, 7]
        assert classic_lpt([], 3).tolist() == [0, 0, 0]
        assert classic_lpt([1, 1], 3).tolist() == [1, 1, 0]

    def test_water_level_uses_only_machines_below_it(self):
        assert water_level(np.array([10.0, 0.0, 0.0]), 2.0) == 1.0
        assert water_level(np.array([0.0, 0.0]), 4.0) == 2.0
        assert water_level(np.array([1.0, 3.0]), 4.0) == 4.0


class TestBatchLpt:
    def test_single_type(self):
        res = batch_lpt_column([1.0], 2, [5])
        assert sorted(res.loads) == [2.0, 3.0]
        assert res.assignment[:, 0].sum() == 5

    def test_tall_machine_gets_nothing(self):
        # averaging over all machines would give (10, 2, 0); longest-first gives (10, 1, 1)
        res = batch_lpt_column([10.0, 1.0], 3, [1, 2])
        assert sorted(res.loads) == [1.0, 1.0, 10.0]
        assert sorted(classic_lpt([10.0, 1.0, 1.0], 3)) == [1.0, 1.0, 10.0]

    def test_zero_counts(self):
        res = batch_lpt_column([2.0, 1.0], 3, [0, 0])
        assert res.loads.tolist() == [0.0, 0.0, 0.0]
        assert res.steps == []

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            batch_lpt_column([1.0], 2, [1, 2])
        with pytest.raises(ValueError):
            batch_lpt_column([1.0], 2, [-1])
        with pytest.raises(ValueError):
            batch_lpt_column([1.0], 0, [1])

    def test_iterations_do_not_grow_with_counts(self):
        small = batch_lpt_column([0.7, 0.3, 0.5], 4, [3, 2, 5])
        large = batch_lpt_column([0.7, 0.3, 0.5], 4, [3000, 2000, 5000])
        assert small.iterations == large.iterations == 12

    def test_leftovers_at_most_machines(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            m = int(rng.integers(1, 6))
            etc = 1.0 - rng.random(4)
            res = batch_lpt_column(etc, m, rng.integers(0, 40, size=4))
            assert all(v <= m for v in res.leftovers.values())
            check_level_invariant(res, etc)

    def test_assign_machines_instance_a(self):
        inst = instance_a()
        sched, runs = assign_machines(inst, TypeLevelSchedule([[2, 0], [0, 1]]))
        assert makespan(inst, sched) == 2.0
        assert len(runs) == 2


lengths = st.lists(st.integers(1, 20), min_size=1, max_size=6)


@settings(max_examples=200)
@given(lengths, st.data(), st.integers(1, 5))
def test_matches_classic_lpt_integer_lengths(etc, data, m):
    counts = data.draw(st.lists(st.integers(0, 50), min_size=len(etc), max_size=len(etc)))
    res = batch_lpt_column(etc, m, counts)
    # integer lengths: sums are exact, so loads must agree exactly
    assert sorted(res.loads) == sorted(classic_lpt(expand(etc, counts), m))
    check_level_invariant(res, etc)


@settings(max_examples=200)
@given(st.lists(st.floats(1e-3, 1.0), min_size=1, max_size=6), st.data(), st.integers(1, 5))
def test_matches_classic_lpt_float_lengths(etc, data, m):
    counts = data.draw(st.lists(st.integers(0, 50), min_size=len(etc), max_size=len(etc)))
    res = batch_lpt_column(etc, m, counts)
    expected = np.sort(classic_lpt(expand(etc, counts), m))
    np.testing.assert_allclose(np.sort(res.loads), expected, rtol=1e-12, atol=1e-12)
