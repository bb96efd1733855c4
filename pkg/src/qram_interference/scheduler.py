"""Timeline placement of allocated jobs around a known interference pattern.

Each executing task owes ``resource * horizon`` seconds of radar time,
which is cut into dwells of at most ``chunk`` seconds. Dwells are handed
out round-robin over tasks so every task's time spreads across the
horizon, and each dwell goes to the earliest open time in its pool
(first fit). A dwell that reaches the end of a hole is cut short and the
rest of the task's time continues in a later round.
"""

from __future__ import annotations

import bisect
import enum
import json
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable

from .model import AllocationState, InterferencePattern, ListKind, Task
from .optimizer import AllocationResult

EPS = 1e-12
DEFAULT_CHUNK = 0.005


class DwellClass(str, enum.Enum):
    NON_PRONE = "non_prone"
    STANDARD_FLAGGED = "standard_flagged"
    ALTERNATIVE = "alternative"
    STANDARD_UNAWARE = "standard_unaware"


@dataclass(frozen=True)
class Dwell:
    task: Hashable
    start: float
    duration: float
    kind: DwellClass

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass
class Schedule:
    horizon: float
    active: tuple[tuple[float, float], ...]
    dwells: list[Dwell] = field(default_factory=list)
    unplaced: list[tuple[Hashable, float]] = field(default_factory=list)

    def placed_time(self, task_id: Hashable) -> float:
        return sum(d.duration for d in self.dwells if d.task == task_id)

    def unplaced_time(self, task_id: Hashable) -> float:
        return sum(s for t, s in self.unplaced if t == task_id)

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "active": [list(iv) for iv in self.active],
            "dwells": [
                {"task": d.task, "start": d.start, "duration": d.duration, "class": d.kind.value}
                for d in self.dwells
            ],
            "unplaced": [[t, s] for t, s in self.unplaced],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "Schedule":
        return cls(
            horizon=data["horizon"],
            active=tuple(tuple(iv) for iv in data["active"]),
            dwells=[
                Dwell(d["task"], d["start"], d["duration"], DwellClass(d["class"]))
                for d in data["dwells"]
            ],
            unplaced=[(t, s) for t, s in data["unplaced"]],
        )


def dwell_class(task: Task, state: AllocationState) -> DwellClass:
    if not task.prone:
        return DwellClass.NON_PRONE
    if state.selected_list is ListKind.ALTERNATIVE:
        return DwellClass.ALTERNATIVE
    if state.flag_non_interfered:
        return DwellClass.STANDARD_FLAGGED
    return DwellClass.STANDARD_UNAWARE


class _Pool:
    """Open time holes consumed front to back."""

    def __init__(self, holes: Iterable[tuple[float, float]]):
        self.holes = [[s, e] for s, e in holes if e - s > EPS]
        self.pos = 0

    def take(self, length: float):
        while self.pos < len(self.holes):
            hole = self.holes[self.pos]
            room = hole[1] - hole[0]
            if room > EPS:
                piece = min(length, room)
                start = hole[0]
                hole[0] = start + piece
                return start, piece
            self.pos += 1
        return None

    def remaining(self) -> list[tuple[float, float]]:
        return [(s, e) for s, e in self.holes[self.pos:] if e - s > EPS]


def _merge(holes: list[tuple[float, float]]) -> list[tuple[float, float]]:
    merged: list[list[float]] = []
    for s, e in sorted(holes):
        if merged and abs(merged[-1][1] - s) <= EPS:
            merged[-1][1] = e
        else:
            merged.append([s, e])
    return [(s, e) for s, e in merged]


def _place(pools, items, owed, chunk, dwells):
    queue = deque(items)
    for pool in pools:
        while queue:
            task_id, kind = queue[0]
            piece = pool.take(min(chunk, owed[task_id]))
            if piece is None:
                break
            queue.popleft()
            start, length = piece
            dwells.append(Dwell(task_id, start, length, kind))
            owed[task_id] -= length
            if owed[task_id] > EPS:
                queue.append((task_id, kind))


def build_schedule(
    result: AllocationResult,
    pattern: InterferencePattern,
    chunk: float = DEFAULT_CHUNK,
    *,
    interference_aware: bool = True,
) -> Schedule:
    """Place every executing task's time on the horizon.

    Flagged standard-configuration tasks only ever use interference-free
    time. With ``interference_aware`` the remaining tasks fill the
    interferer's on-time first to keep free time available; without it
    they are packed in time order as if the pattern were unknown.
    Time that does not fit is reported in ``Schedule.unplaced``.
    """
    if chunk <= 0:
        raise ValueError("chunk must be positive")
    free = pattern.free_intervals()
    if free and chunk > min(e - s for s, e in free):
        warnings.warn("chunk exceeds the shortest interference-free segment", stacklevel=2)

    owed: dict[Hashable, float] = {}
    flagged, others = [], []
    for task, state in zip(result.tasks, result.states):
        if state.selected.is_base:
            continue
        owed[task.id] = float(state.resource) * pattern.horizon
        kind = dwell_class(task, state)
        (flagged if kind is DwellClass.STANDARD_FLAGGED else others).append((task.id, kind))

    dwells: list[Dwell] = []
    free_pool, active_pool = _Pool(free), _Pool(pattern.active_intervals)
    _place([free_pool], flagged, owed, chunk, dwells)
    if interference_aware:
        _place([active_pool, free_pool], others, owed, chunk, dwells)
    else:
        anywhere = _Pool(_merge(free_pool.remaining() + active_pool.remaining()))
        _place([anywhere], others, owed, chunk, dwells)

    dwells.sort(key=lambda d: d.start)
    unplaced = [(t, left) for t, left in owed.items() if left > EPS]
    return Schedule(pattern.horizon, pattern.active_intervals, dwells, unplaced)


def overlap_report(schedule: Schedule, pattern: InterferencePattern) -> list[bool]:
    """Per dwell: does it overlap the interferer's on-time by more than 1e-12 s?"""
    intervals = pattern.active_intervals
    ends = [e for _, e in intervals]
    report = []
    for d in schedule.dwells:
        overlap = 0.0
        k = bisect.bisect_right(ends, d.start)
        while k < len(intervals) and intervals[k][0] < d.end:
            s, e = intervals[k]
            overlap += max(0.0, min(e, d.end) - max(s, d.start))
            k += 1
        report.append(overlap > EPS)
    return report


def interfered_tasks(schedule: Schedule, pattern: InterferencePattern) -> set:
    return {d.task for d, hit in zip(schedule.dwells, overlap_report(schedule, pattern)) if hit}


def interference_overlap(schedule: Schedule, pattern: InterferencePattern,
                         kinds=(DwellClass.STANDARD_FLAGGED,)) -> float:
    """Total seconds that dwells of the given classes spend under interference."""
    total = 0.0
    for d in schedule.dwells:
        if d.kind not in kinds:
            continue
        for s, e in pattern.active_intervals:
            total += max(0.0, min(e, d.end) - max(s, d.start))
    return total
