import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qram_interference.model import (
    Configuration,
    InterferencePattern,
    JobList,
    ResourceBudget,
    Task,
    base_configuration,
    duty,
    partition_budget,
)


def job(name, r, u):
    return Configuration(name, r, 1.0, r, u)


def test_duty_empty_pattern():
    assert duty(InterferencePattern(1.0)) == 0.0


def test_duty_single_interval():
    assert duty(InterferencePattern(1.0, [(0.0, 0.6)])) == pytest.approx(0.6, abs=1e-12)


def test_duty_two_intervals():
    # (0.7 + 0.7) / 2.0
    pattern = InterferencePattern(2.0, [(0.0, 0.7), (1.0, 1.7)])
    assert duty(pattern) == pytest.approx(0.7, abs=1e-12)


@pytest.mark.parametrize(
    "intervals, expected",
    [([(0.0, 0.6)], (0.6, 0.4)), ([], (0.0, 1.0)), ([(0.1, 0.8)], (0.7, 0.3))],
)
def test_partition_budget(intervals, expected):
    budget = partition_budget(InterferencePattern(1.0, intervals))
    assert budget.r_i == pytest.approx(expected[0], abs=1e-12)
    assert budget.r_ni == pytest.approx(expected[1], abs=1e-12)


@given(st.lists(st.floats(0.0, 1.0), max_size=20))
def test_partition_sums_to_one(points):
    edges = sorted(set(points))
    intervals = [(a, b) for a, b in zip(edges[::2], edges[1::2]) if b > a]
    budget = partition_budget(InterferencePattern(1.0, intervals))
    assert abs(budget.r_i + budget.r_ni - 1.0) <= 1e-12
    assert 0.0 <= budget.r_i <= 1.0


@pytest.mark.parametrize(
    "intervals",
    [[(0.5, 0.4)], [(0.0, 0.5), (0.4, 0.6)], [(0.2, 1.5)], [(0.3, 0.3)]],
)
def test_pattern_rejects_bad_intervals(intervals):
    with pytest.raises(ValueError):
        InterferencePattern(1.0, intervals)


def test_free_intervals_complement():
    pattern = InterferencePattern(1.0, [(0.1, 0.3), (0.5, 1.0)])
    assert pattern.free_intervals() == [(0.0, 0.1), (0.3, 0.5)]


def test_base_configuration():
    base = base_configuration()
    assert base.is_base and base.resource == 0 and base.utility == 0


@pytest.mark.parametrize("r, u", [(1.5, 1.0), (-0.1, 1.0), (0.5, -1.0)])
def test_configuration_rejects_out_of_range(r, u):
    with pytest.raises(ValueError):
        Configuration("x", 0.01, 1.0, r, u)


def test_job_list_requires_base_first_and_strict_increase():
    base = base_configuration()
    with pytest.raises(ValueError):
        JobList([job("a", 0.1, 1.0)])
    with pytest.raises(ValueError):
        JobList([base, job("a", 0.2, 1.0), job("b", 0.3, 1.0)])
    with pytest.raises(ValueError):
        JobList([base, job("a", 0.2, 1.0), job("b", 0.2, 2.0)])


def test_scaled_job_list_keeps_resources():
    jl = JobList([base_configuration(), job("a", 0.2, 1.0), job("b", 0.5, 1.5)])
    alt = jl.scaled(0.5)
    assert [c.resource for c in alt] == [c.resource for c in jl]
    assert [c.utility for c in alt] == [0, 0.5, 0.75]
    assert len(jl.scaled(0.0)) == 1


def test_task_alternative_iff_prone():
    jl = JobList([base_configuration(), job("a", 0.2, 1.0)])
    with pytest.raises(ValueError):
        Task("t", jl, prone=True)
    with pytest.raises(ValueError):
        Task("t", jl, prone=False, alternative_list=jl)
    Task("t", jl, prone=True, alternative_list=jl.scaled(0.5))


def test_task_alternative_must_mirror_resources():
    jl = JobList([base_configuration(), job("a", 0.2, 1.0)])
    other = JobList([base_configuration(), job("a", 0.3, 0.5)])
    with pytest.raises(ValueError):
        Task("t", jl, prone=True, alternative_list=other)


def test_budget_rejects_negative():
    with pytest.raises(ValueError):
        ResourceBudget(-0.1, 0.5)
    assert math.isclose(ResourceBudget(0.25, 0.5).total, 0.75)
