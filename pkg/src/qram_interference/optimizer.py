"""Greedy Q-RAM allocation with and without interference awareness.

Both allocators repeatedly upgrade the task with the best marginal
utility per unit of time. The interference-aware variant splits the time
budget into an interference-possible share ``r_i`` and an
interference-free share ``r_ni``:

* tasks not exposed to the interferer, and exposed tasks running a
  mitigated (alternative) configuration, draw from ``r_i`` first and
  spill the surplus into ``r_ni``;
* exposed tasks in their standard configuration must fit entirely into
  ``r_ni`` and are flagged non-interfered so the scheduler keeps them out
  of the interferer's on-time. When ``r_ni`` is too small the task moves
  to its alternative list for good.

Every configuration change refunds the task's previous draws and charges
the new requirement in full.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Hashable, Optional, Sequence

import numpy as np

from .model import (
    TOL,
    AllocationState,
    ListKind,
    ResourceBudget,
    Task,
    initial_states,
)


@dataclass(frozen=True)
class Upgrade:
    task: Hashable
    from_list: ListKind
    from_index: int
    to_list: ListKind
    to_index: int
    delta_utility: float
    delta_resource: float


@dataclass
class AllocationResult:
    tasks: tuple[Task, ...]
    states: list[AllocationState]
    initial: ResourceBudget
    remaining: ResourceBudget
    upgrade_log: list[Upgrade] = field(default_factory=list)

    @property
    def total_utility(self) -> float:
        return sum(s.utility for s in self.states)

    def state_of(self, task_id: Hashable) -> AllocationState:
        for task, state in zip(self.tasks, self.states):
            if task.id == task_id:
                return state
        raise KeyError(task_id)

    def check(self) -> None:
        """Assert per-task invariants and budget conservation."""
        for task, state in zip(self.tasks, self.states):
            state.check(task)
        drawn_i = sum((s.draw_i for s in self.states), 0.0)
        drawn_ni = sum((s.draw_ni for s in self.states), 0.0)
        assert self.remaining.r_i >= 0 and self.remaining.r_ni >= 0
        assert abs(self.initial.r_i - self.remaining.r_i - drawn_i) <= TOL
        assert abs(self.initial.r_ni - self.remaining.r_ni - drawn_ni) <= TOL

    def to_dict(self) -> dict:
        return {
            "total_utility": float(self.total_utility),
            "initial": [float(self.initial.r_i), float(self.initial.r_ni)],
            "remaining": [float(self.remaining.r_i), float(self.remaining.r_ni)],
            "tasks": [
                {
                    "task": task.id,
                    "prone": task.prone,
                    "list": state.selected_list.value,
                    "index": state.selected_index,
                    "resource": float(state.resource),
                    "utility": float(state.utility),
                    "flag_non_interfered": state.flag_non_interfered,
                    "draw_i": float(state.draw_i),
                    "draw_ni": float(state.draw_ni),
                }
                for task, state in zip(self.tasks, self.states)
            ],
            "upgrades": [
                {
                    "task": u.task,
                    "from": [u.from_list.value, u.from_index],
                    "to": [u.to_list.value, u.to_index],
                    "delta_utility": float(u.delta_utility),
                    "delta_resource": float(u.delta_resource),
                }
                for u in self.upgrade_log
            ],
        }


@dataclass(frozen=True)
class Candidate:
    position: int
    task: Hashable
    ratio: float


def _clamp(x):
    return 0 * x if abs(x) < TOL else x


def _ratio(task: Task, state: AllocationState):
    """Marginal utility per resource of the task's next job, or None."""
    if state.blocked:
        return None
    jobs = task.job_list(state.active_list)
    nxt = state.current_index + 1
    if nxt >= len(jobs):
        return None
    job = jobs[nxt]
    return (job.utility - state.utility) / (job.resource - state.resource)


def select_next_upgrade(
    states: Sequence[AllocationState], tasks: Sequence[Task]
) -> Optional[Candidate]:
    """Best utility-to-resource ratio among tasks with a next job; ties go to the smaller id."""
    best: Optional[Candidate] = None
    for pos, (task, state) in enumerate(zip(tasks, states)):
        ratio = _ratio(task, state)
        if ratio is None:
            continue
        if best is None or ratio > best.ratio or (ratio == best.ratio and task.id < best.task):
            best = Candidate(pos, task.id, ratio)
    return best


class _CandidateHeap:
    """Same choice as :func:`select_next_upgrade`, kept incrementally.

    Only the task that just changed needs its ratio refreshed, so stale
    entries are skipped by version number.
    """

    def __init__(self, tasks, states):
        self.tasks, self.states = tasks, states
        self.version = [0] * len(tasks)
        self.heap = []
        for pos in range(len(tasks)):
            self.refresh(pos, bump=False)

    def refresh(self, pos: int, bump: bool = True) -> None:
        if bump:
            self.version[pos] += 1
        ratio = _ratio(self.tasks[pos], self.states[pos])
        if ratio is not None:
            heapq.heappush(self.heap, (-ratio, self.tasks[pos].id, pos, self.version[pos]))

    def pop(self) -> Optional[Candidate]:
        while self.heap:
            neg_ratio, task_id, pos, version = heapq.heappop(self.heap)
            if version == self.version[pos]:
                return Candidate(pos, task_id, -neg_ratio)
        return None


def _switch_to_alternative(task: Task, state: AllocationState) -> None:
    # Next candidate: the cheapest mitigated job that beats the current utility.
    state.active_list = ListKind.ALTERNATIVE
    for j, job in enumerate(task.job_list(ListKind.ALTERNATIVE)):
        if j > 0 and job.utility > state.utility:
            state.current_index = j - 1
            return
    state.blocked = True


def _step(task: Task, state: AllocationState, r_i, r_ni, aware: bool):
    """Try the task's next job; returns the new budget and the upgrade, if any."""
    index = state.current_index + 1
    job = task.job_list(state.active_list)[index]
    r = job.resource
    free_i, free_ni = r_i + state.draw_i, r_ni + state.draw_ni

    if aware and task.prone and state.active_list is ListKind.STANDARD:
        if r > free_ni + TOL:
            _switch_to_alternative(task, state)
            return r_i, r_ni, None
        draw_i, draw_ni = 0 * r, r
        flag = True
    else:
        if r > free_i + free_ni + TOL:
            # The combined budget never grows, so this task is done.
            state.blocked = True
            return r_i, r_ni, None
        draw_i = min(r, free_i)
        draw_ni = r - draw_i
        flag = False

    upgrade = Upgrade(
        task.id,
        state.selected_list,
        state.selected_index,
        state.active_list,
        index,
        job.utility - state.utility,
        r - state.resource,
    )
    state.selected = job
    state.selected_list = state.active_list
    state.selected_index = state.current_index = index
    state.draw_i, state.draw_ni = draw_i, draw_ni
    state.flag_non_interfered = flag
    return _clamp(free_i - draw_i), _clamp(free_ni - draw_ni), upgrade


def _greedy(
    tasks: Sequence[Task],
    budget: ResourceBudget,
    *,
    aware: bool,
    use_alternative: bool = False,
    fast: bool = True,
) -> AllocationResult:
    tasks = tuple(tasks)
    ids = [t.id for t in tasks]
    if len(set(ids)) != len(ids):
        raise ValueError("task ids must be unique")
    states = initial_states(tasks)
    if use_alternative:
        for task, state in zip(tasks, states):
            if task.prone:
                state.active_list = state.selected_list = ListKind.ALTERNATIVE
    r_i, r_ni = budget.r_i, budget.r_ni
    upgrades: list[Upgrade] = []
    heap = _CandidateHeap(tasks, states) if fast else None

    while True:
        cand = heap.pop() if heap is not None else select_next_upgrade(states, tasks)
        if cand is None:
            break
        pos = cand.position
        r_i, r_ni, upgrade = _step(tasks[pos], states[pos], r_i, r_ni, aware)
        if upgrade is not None:
            upgrades.append(upgrade)
        if heap is not None:
            heap.refresh(pos)

    result = AllocationResult(tasks, states, budget, ResourceBudget(r_i, r_ni), upgrades)
    result.check()
    return result


def classic_allocate(
    tasks: Sequence[Task], budget: float = 1.0, *, use_alternative: bool = False
) -> AllocationResult:
    """Interference-blind greedy allocation against a single time budget.

    With ``use_alternative`` every prone task is restricted to its
    alternative (mitigated) list. The single budget is carried in the
    ``r_i`` slot of the result's budgets.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    return _greedy(tasks, ResourceBudget(budget, 0 * budget), aware=False,
                   use_alternative=use_alternative)


def allocate_interference_aware(
    tasks: Sequence[Task], budget: ResourceBudget
) -> AllocationResult:
    return _greedy(tasks, budget, aware=True)


def oracle_allocate(
    tasks: Sequence[Task], budget: ResourceBudget, *, max_combinations: int = 10**6
) -> AllocationResult:
    """Exhaustive optimum of the interference-aware problem.

    Each task may take any job from either list. Prone tasks in a standard
    non-base configuration must fit into ``r_ni`` together; everything
    else shares what is left of both budgets.
    """
    tasks = tuple(tasks)
    choices = []
    for task in tasks:
        opts = [(ListKind.STANDARD, k) for k in range(len(task.standard_list))]
        if task.prone:
            opts += [(ListKind.ALTERNATIVE, k) for k in range(1, len(task.alternative_list))]
        choices.append(opts)
    n_comb = int(np.prod([len(c) for c in choices], dtype=np.int64))
    if n_comb > max_combinations:
        raise ValueError(f"{n_comb} combinations exceed the oracle limit of {max_combinations}")

    util = np.zeros(1)
    res = np.zeros(1)
    res_std = np.zeros(1)
    for task, opts in zip(tasks, choices):
        jobs = [task.job_list(kind)[k] for kind, k in opts]
        u = np.array([float(j.utility) for j in jobs])
        r = np.array([float(j.resource) for j in jobs])
        rs = np.array([
            float(j.resource) if task.prone and kind is ListKind.STANDARD else 0.0
            for j, (kind, _) in zip(jobs, opts)
        ])
        util = np.add.outer(util, u).ravel()
        res = np.add.outer(res, r).ravel()
        res_std = np.add.outer(res_std, rs).ravel()

    feasible = (res_std <= budget.r_ni + TOL) & (res <= budget.total + TOL)
    best = int(np.argmax(np.where(feasible, util, -np.inf)))
    picks = np.unravel_index(best, [len(c) for c in choices]) if tasks else ()

    states = initial_states(tasks)
    r_i, r_ni = budget.r_i, budget.r_ni
    for task, state, opts, pick in zip(tasks, states, choices, picks):
        kind, k = opts[pick]
        state.selected = task.job_list(kind)[k]
        state.selected_list = state.active_list = kind
        state.selected_index = state.current_index = k
        if task.prone and kind is ListKind.STANDARD and k > 0:
            state.flag_non_interfered = True
            state.draw_ni = state.selected.resource
            r_ni = _clamp(r_ni - state.draw_ni)
    for state in states:
        if state.flag_non_interfered:
            continue
        r = state.selected.resource
        state.draw_i = min(r, r_i)
        state.draw_ni = r - state.draw_i
        r_i, r_ni = _clamp(r_i - state.draw_i), _clamp(r_ni - state.draw_ni)

    result = AllocationResult(tasks, states, budget, ResourceBudget(r_i, r_ni))
    result.check()
    return result
