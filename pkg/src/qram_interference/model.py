"""Domain types shared across the allocator, scheduler and simulator.

Resources are a single compound quantity: the fraction of radar time a
configuration occupies over the planning horizon.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Hashable, Optional, Sequence

TOL = 1e-9


class ListKind(str, enum.Enum):
    STANDARD = "standard"
    ALTERNATIVE = "alternative"


@dataclass(frozen=True)
class Configuration:
    """One operational-parameter choice with its time fraction and utility."""

    id: Hashable
    dwell_time: float
    revisit_interval: float
    resource: float
    utility: float

    def __post_init__(self):
        if not 0 <= self.resource <= 1:
            raise ValueError(f"resource must lie in [0, 1], got {self.resource}")
        if self.utility < 0:
            raise ValueError(f"utility must be non-negative, got {self.utility}")
        if self.dwell_time < 0 or (self.dwell_time == 0 and self.resource != 0):
            raise ValueError("dwell_time must be positive for executing configurations")
        if not self.revisit_interval > 0:
            raise ValueError("revisit_interval must be positive")

    @property
    def is_base(self) -> bool:
        return self.resource == 0 and self.utility == 0

    def scaled(self, factor: float) -> "Configuration":
        return replace(self, utility=self.utility * factor)


def base_configuration(id: Hashable = "base") -> Configuration:
    """The non-execution configuration: no time, no utility."""
    return Configuration(id, 0, math.inf, 0, 0)


@dataclass(frozen=True)
class JobList:
    """Configurations strictly increasing in both resource and utility, base first."""

    jobs: tuple[Configuration, ...]

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))
        if not self.jobs or not self.jobs[0].is_base:
            raise ValueError("a job list must start with the base configuration")
        for prev, nxt in zip(self.jobs, self.jobs[1:]):
            if not (nxt.resource > prev.resource and nxt.utility > prev.utility):
                raise ValueError(
                    f"job list not strictly increasing at {prev.id!r} -> {nxt.id!r}"
                )

    def __len__(self) -> int:
        return len(self.jobs)

    def __getitem__(self, index: int) -> Configuration:
        return self.jobs[index]

    def __iter__(self):
        return iter(self.jobs)

    def scaled(self, factor: float) -> "JobList":
        """Same resources, utilities multiplied by ``factor``.

        A non-positive factor leaves only the base configuration, since
        zero-utility jobs cannot form a strictly increasing list.
        """
        if factor <= 0:
            return JobList(self.jobs[:1])
        return JobList((self.jobs[0],) + tuple(c.scaled(factor) for c in self.jobs[1:]))


@dataclass(frozen=True)
class Task:
    """A radar task (here: tracking one target) with its job lists.

    Interference-prone tasks carry an alternative list holding
    mitigated variants of the standard configurations.
    """

    id: Hashable
    standard_list: JobList
    prone: bool = False
    alternative_list: Optional[JobList] = None
    weight: float = 1.0
    d_std: float = 0.0
    d_alt: float = 1.0

    def __post_init__(self):
        if self.prone != (self.alternative_list is not None):
            raise ValueError(f"task {self.id!r}: alternative list must exist iff prone")
        if self.weight <= 0:
            raise ValueError(f"task {self.id!r}: weight must be positive")
        if self.alternative_list is not None:
            alt, std = self.alternative_list, self.standard_list
            if len(alt) > len(std):
                raise ValueError(f"task {self.id!r}: alternative list longer than standard")
            for a, s in zip(alt, std):
                if abs(a.resource - s.resource) > TOL:
                    raise ValueError(
                        f"task {self.id!r}: alternative resources must mirror the standard list"
                    )

    def job_list(self, kind: ListKind) -> JobList:
        if kind is ListKind.ALTERNATIVE:
            if self.alternative_list is None:
                raise ValueError(f"task {self.id!r} has no alternative list")
            return self.alternative_list
        return self.standard_list

    def with_alternative(self, alternative_list: JobList) -> "Task":
        return replace(self, alternative_list=alternative_list)


@dataclass
class AllocationState:
    """Mutable per-task state for a single allocation run.

    ``current_index`` points into the active list; the candidate upgrade is
    the job right after it. ``selected`` is the configuration the task
    currently holds, which lags behind right after a switch to the
    alternative list.
    """

    selected: Configuration
    active_list: ListKind = ListKind.STANDARD
    current_index: int = 0
    selected_list: ListKind = ListKind.STANDARD
    selected_index: int = 0
    flag_non_interfered: bool = False
    draw_i: float = 0
    draw_ni: float = 0
    blocked: bool = False

    @property
    def utility(self) -> float:
        return self.selected.utility

    @property
    def resource(self) -> float:
        return self.selected.resource

    def check(self, task: Task) -> None:
        if self.flag_non_interfered:
            assert task.prone, "only prone tasks carry the non-interfered flag"
            assert self.selected_list is ListKind.STANDARD
            assert self.draw_i == 0
        if self.selected_list is ListKind.ALTERNATIVE:
            assert not self.flag_non_interfered
        assert abs(self.draw_i + self.draw_ni - self.selected.resource) <= TOL


@dataclass(frozen=True)
class ResourceBudget:
    """Remaining interference-possible (``r_i``) and interference-free (``r_ni``) time."""

    r_i: float
    r_ni: float

    def __post_init__(self):
        if self.r_i < 0 or self.r_ni < 0:
            raise ValueError(f"budget components must be non-negative, got {self}")

    @property
    def total(self) -> float:
        return self.r_i + self.r_ni


@dataclass(frozen=True)
class InterferencePattern:
    """Known on-intervals ``[start, end)`` of a single interferer."""

    horizon: float
    active_intervals: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        intervals = tuple((float(s), float(e)) for s, e in self.active_intervals)
        object.__setattr__(self, "active_intervals", intervals)
        prev_end = 0.0
        for start, end in intervals:
            if start < prev_end or end <= start or end > self.horizon:
                raise ValueError(
                    "active intervals must be sorted, disjoint, non-empty and inside the horizon"
                )
            prev_end = end

    def free_intervals(self) -> list[tuple[float, float]]:
        """Complement of the active intervals within ``[0, horizon)``."""
        gaps = []
        cursor = 0.0
        for start, end in self.active_intervals:
            if start > cursor:
                gaps.append((cursor, start))
            cursor = end
        if cursor < self.horizon:
            gaps.append((cursor, self.horizon))
        return gaps


def duty(pattern: InterferencePattern) -> float:
    """Fraction of the horizon during which the interferer is active."""
    return sum(end - start for start, end in pattern.active_intervals) / pattern.horizon


def partition_budget(pattern: InterferencePattern) -> ResourceBudget:
    share = duty(pattern)
    return ResourceBudget(r_i=share, r_ni=1.0 - share)


def initial_states(tasks: Sequence[Task]) -> list[AllocationState]:
    return [AllocationState(selected=t.standard_list[0]) for t in tasks]
