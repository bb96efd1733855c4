"""Acceptance criteria, one test each.

Every test appends a PASS/FAIL line to the acceptance summary printed at
the end of the pytest run, then asserts, so a failing criterion both
shows up in the summary and fails the suite.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from qram_interference.cli import main
from qram_interference.joblist import concave_majorant, marginal_ratios
from qram_interference.model import (
    Configuration,
    InterferencePattern,
    JobList,
    ListKind,
    ResourceBudget,
    Task,
    base_configuration,
    partition_budget,
)
from qram_interference.optimizer import (
    allocate_interference_aware,
    classic_allocate,
    oracle_allocate,
)
from qram_interference.scenario import (
    ScenarioParams,
    Strategy,
    config_utility,
    example_one_budget,
    example_one_tasks,
    generate_scenario,
    run_all,
    type_job_list,
)
from qram_interference.scheduler import DwellClass, interference_overlap

ORDER = (
    Strategy.COGNITIVE_MITIGATION,
    Strategy.STANDARD_MITIGATION,
    Strategy.AWARE_NO_MITIGATION,
    Strategy.UNAWARE_NO_MITIGATION,
)


def record(name, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_golden_three_task_example():
    start = time.perf_counter()
    result = allocate_interference_aware(example_one_tasks(), example_one_budget())
    traditional = classic_allocate(example_one_tasks(), 1.0, use_alternative=True)
    elapsed = time.perf_counter() - start

    exact = allocate_interference_aware(example_one_tasks(Fraction), example_one_budget(Fraction))
    exact_trad = classic_allocate(example_one_tasks(Fraction), Fraction(1), use_alternative=True)

    t1, t2, t3 = (result.state_of(t) for t in ("T1", "T2", "T3"))
    checks = [
        exact.total_utility == Fraction(21, 10),
        exact.remaining == ResourceBudget(Fraction(0), Fraction(1, 10)),
        exact_trad.total_utility == Fraction(9, 5),
        math.isclose(result.total_utility, 2.1, abs_tol=1e-12),
        math.isclose(result.remaining.r_i, 0.0, abs_tol=1e-12),
        math.isclose(result.remaining.r_ni, 0.1, abs_tol=1e-12),
        math.isclose(traditional.total_utility, 1.8, abs_tol=1e-12),
        t2.flag_non_interfered and t2.selected_list is ListKind.STANDARD and t2.draw_i == 0,
        not t3.flag_non_interfered and math.isclose(t3.draw_i, t3.resource, abs_tol=1e-12),
        t1.selected_list is ListKind.ALTERNATIVE,
        elapsed < 0.010,
    ]
    record("golden three-task example", all(checks),
           f"utility {float(exact.total_utility)}, traditional {float(exact_trad.total_utility)}, "
           f"{elapsed * 1e3:.2f} ms")


def test_budget_partition():
    ok = True
    parts = []
    for share, expect in ((0.6, (0.6, 0.4)), (0.7, (0.7, 0.3))):
        budget = partition_budget(InterferencePattern(1.0, ((0.0, share),)))
        parts.append(f"{share} -> ({budget.r_i:.12g}, {budget.r_ni:.12g})")
        ok &= math.isclose(budget.r_i, expect[0], abs_tol=1e-12)
        ok &= math.isclose(budget.r_ni, expect[1], abs_tol=1e-12)
        ok &= abs(budget.total - 1.0) <= 1e-12
    record("budget partition", ok, "; ".join(parts))


def _random_task(rng, tid):
    points = [base_configuration()] + [
        Configuration((tid, k), 0.01, 1.0, rng.uniform(0.01, 0.5), rng.uniform(0.05, 1.0))
        for k in range(rng.randint(1, 8))
    ]
    std = concave_majorant(points)
    std = JobList(std.jobs[:5])  # base plus at most four hull jobs
    if rng.random() < 0.5:
        return Task(tid, std)
    return Task(tid, std, prone=True, alternative_list=std.scaled(rng.uniform(0.2, 0.95)))


def test_greedy_never_beats_exhaustive_optimum():
    rng = random.Random(20240601)
    start = time.perf_counter()
    gaps, violations = [], 0
    n = 250
    for _ in range(n):
        tasks = [_random_task(rng, k) for k in range(rng.randint(1, 5))]
        budget = ResourceBudget(rng.uniform(0, 1), rng.uniform(0, 1))
        greedy = allocate_interference_aware(tasks, budget).total_utility
        best = oracle_allocate(tasks, budget).total_utility
        if greedy > best + 1e-9:
            violations += 1
        gaps.append(best - greedy)
    elapsed = time.perf_counter() - start
    record("greedy <= oracle", violations == 0 and elapsed < 30.0,
           f"{n} instances, {violations} violations, mean gap {np.mean(gaps):.4f}, "
           f"{elapsed:.1f} s")


def test_scheduler_safety():
    worst_overlap = 0.0
    worst_balance = 0.0
    for seed in range(100):
        scenario = generate_scenario(seed)
        for outcome in run_all(scenario).values():
            schedule, allocation = outcome.schedule, outcome.allocation
            worst_overlap = max(worst_overlap, interference_overlap(
                schedule, scenario.pattern, kinds=(DwellClass.STANDARD_FLAGGED,)))
            for state, task in zip(allocation.states, allocation.tasks):
                owed = float(state.resource) * scenario.pattern.horizon
                got = schedule.placed_time(task.id) + schedule.unplaced_time(task.id)
                worst_balance = max(worst_balance, abs(got - owed))
    record("scheduler safety", worst_overlap == 0.0 and worst_balance <= 1e-9,
           f"flagged overlap {worst_overlap} s, worst balance error {worst_balance:.2e}")


def test_strategy_ordering(reference_mc):
    summary = reference_mc.summary
    means = [summary[s].mean for s in ORDER]
    stds = {s: summary[s].std for s in Strategy}
    cog = reference_mc.normalized(Strategy.COGNITIVE_MITIGATION)
    std_mit = reference_mc.normalized(Strategy.STANDARD_MITIGATION)
    wins = int(np.sum(cog > std_mit))
    values = np.concatenate([reference_mc.normalized(s) for s in Strategy])
    checks = [
        all(a > b for a, b in zip(means, means[1:])),
        wins >= 99,
        min(stds, key=stds.get) is Strategy.COGNITIVE_MITIGATION,
        bool(np.all(values > 0)) and bool(np.all(values <= 1 + 1e-6)),
        len(cog) == 100,
        reference_mc.elapsed < 300.0,
    ]
    detail = ", ".join(f"{s.value} {summary[s].mean:.3f}+-{summary[s].std:.3f}" for s in ORDER)
    record("strategy ordering", all(checks),
           f"{detail}; cognitive wins {wins}/100, {reference_mc.elapsed:.1f} s")


def test_job_lists_concave_and_monotone():
    params = ScenarioParams()
    ok = True
    for ttype in params.types():
        jobs = type_job_list(params, ttype)
        res = [c.resource for c in jobs]
        util = [c.utility for c in jobs]
        ok &= all(b > a for a, b in zip(res, res[1:])) and all(b > a for a, b in zip(util, util[1:]))
        ratios = marginal_ratios(jobs)
        ok &= all(b <= a + 1e-12 for a, b in zip(ratios, ratios[1:]))
    for seed in range(20):
        for task in generate_scenario(seed).tasks:
            for jobs in filter(None, (task.standard_list, task.alternative_list)):
                ratios = marginal_ratios(jobs)
                ok &= all(b <= a + 1e-12 for a, b in zip(ratios, ratios[1:]))
    delta = params.delta_ms / 1000.0
    dwells = sorted(d / 1000.0 for d in params.dwell_choices_ms)
    for ttype in params.types():
        revisits = sorted(f * ttype.tau for f in params.revisit_factors)
        grid = np.array([[config_utility(d, r, ttype.tau, ttype.weight, delta) for r in revisits]
                         for d in dwells])
        ok &= bool(np.all(np.diff(grid, axis=0) > 0)) and bool(np.all(np.diff(grid, axis=1) < 0))
    record("job lists concave and monotone", ok)


@pytest.mark.slow
def test_montecarlo_is_deterministic(tmp_path):
    outs = [tmp_path / "a", tmp_path / "b"]
    codes = [main(["montecarlo", "--out", str(o), "--workers", "4"]) for o in outs]
    same = all(
        (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
        for name in ("runs.csv", "summary.csv")
    )
    record("montecarlo determinism", codes == [0, 0] and same,
           "runs.csv and summary.csv byte-identical")
