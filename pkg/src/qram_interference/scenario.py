"""Tracking scenario with a single sector interferer and strategy comparison.

Targets are spread uniformly over a 90 degree field of view; those inside
the interferer's sector are prone to interference. Utilities come from a
parametric stand-in tracking model (see :func:`config_utility`).
"""

from __future__ import annotations

import csv
import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional, Sequence

import numpy as np

from .joblist import ConfigGrid, concave_majorant, enumerate_configs
from .model import (
    TOL,
    Configuration,
    InterferencePattern,
    JobList,
    ListKind,
    ResourceBudget,
    Task,
    base_configuration,
    partition_budget,
)
from .optimizer import AllocationResult, allocate_interference_aware, classic_allocate
from .scheduler import DEFAULT_CHUNK, Schedule, build_schedule, interfered_tasks

GENERATOR_ID = f"numpy.random.Generator(PCG64) numpy=={np.__version__}"


@dataclass(frozen=True)
class TargetType:
    name: str
    tau: float
    weight: float


# Time constants set the load: top configurations of 100 targets ask for
# about 1.9 times the available radar time.
DEFAULT_TYPES = (
    TargetType("agile", 1.0, 2.0),
    TargetType("medium", 2.0, 1.5),
    TargetType("slow", 4.0, 1.0),
)


class Strategy(str, enum.Enum):
    UNAWARE_NO_MITIGATION = "unaware_no_mitigation"
    AWARE_NO_MITIGATION = "aware_no_mitigation"
    STANDARD_MITIGATION = "standard_mitigation"
    COGNITIVE_MITIGATION = "cognitive_mitigation"


@dataclass
class ScenarioParams:
    target_count: int = 100
    fov_deg: float = 90.0
    sector_lo: float = 20.0
    sector_hi: float = 70.0
    duty: float = 0.7
    min_segment_ms: float = 50.0
    max_segment_ms: float = 200.0
    horizon: float = 2.0
    chunk: float = DEFAULT_CHUNK
    dwell_choices_ms: list = field(default_factory=lambda: [1.0, 2.0, 4.0, 8.0])
    revisit_factors: list = field(default_factory=lambda: [0.25, 0.5, 1.0, 2.0])
    delta_ms: float = 2.0
    target_types: list = field(default_factory=lambda: [asdict(t) for t in DEFAULT_TYPES])
    d_std_range: list = field(default_factory=lambda: [0.0, 0.3])
    d_alt_range: list = field(default_factory=lambda: [0.3, 0.9])

    def validate(self) -> None:
        """Raise ``ValueError("<key>: ...")`` naming the first bad field."""
        def bad(key, msg):
            raise ValueError(f"{key}: {msg}")

        if not isinstance(self.target_count, int) or self.target_count < 1:
            bad("target_count", "must be a positive integer")
        if not self.fov_deg > 0:
            bad("fov_deg", "must be positive")
        if not 0 <= self.sector_lo <= self.sector_hi <= self.fov_deg:
            bad("sector_lo", "need 0 <= sector_lo <= sector_hi <= fov_deg")
        if not 0 <= self.duty <= 1:
            bad("duty", "must lie in [0, 1]")
        if not 0 < self.min_segment_ms <= self.max_segment_ms:
            bad("min_segment_ms", "need 0 < min_segment_ms <= max_segment_ms")
        for key in ("horizon", "chunk", "delta_ms"):
            if not getattr(self, key) > 0:
                bad(key, "must be positive")
        for key in ("dwell_choices_ms", "revisit_factors"):
            values = getattr(self, key)
            if not values or any(not v > 0 for v in values):
                bad(key, "must be a non-empty list of positive numbers")
        if not self.target_types:
            bad("target_types", "must not be empty")
        for t in self.target_types:
            if set(t) != {"name", "tau", "weight"} or not (t["tau"] > 0 and t["weight"] > 0):
                bad("target_types", "entries need name, positive tau and positive weight")
        for key in ("d_std_range", "d_alt_range"):
            lo_hi = getattr(self, key)
            if len(lo_hi) != 2 or not 0 <= lo_hi[0] <= lo_hi[1] <= 1:
                bad(key, "must be [lo, hi] with 0 <= lo <= hi <= 1")

    def types(self) -> list[TargetType]:
        return [TargetType(**t) for t in self.target_types]


def config_utility(dwell: float, revisit: float, tau: float, weight: float,
                   delta: float = 0.002) -> float:
    """Weighted tracking quality of one (dwell, revisit) choice.

    Longer dwells saturate detection quality on the scale ``delta``;
    revisiting slower than the target's time constant ``tau`` costs
    quality quadratically.
    """
    if dwell <= 0 or revisit <= 0:
        raise ValueError("dwell and revisit must be positive")
    return weight * (1.0 - math.exp(-dwell / delta)) / (1.0 + (revisit / tau) ** 2)


def type_job_list(params: ScenarioParams, ttype: TargetType) -> JobList:
    grid = ConfigGrid(
        tuple(d / 1000.0 for d in params.dwell_choices_ms),
        tuple(f * ttype.tau for f in params.revisit_factors),
    )
    delta = params.delta_ms / 1000.0
    configs = enumerate_configs(
        grid, lambda d, r: config_utility(d, r, ttype.tau, ttype.weight, delta)
    )
    return concave_majorant(configs)


def _bounded_lengths(rng, n: int, total: float, lo: float, hi: float) -> np.ndarray:
    """``n`` random lengths in ``[lo, hi]`` summing to ``total``."""
    x = rng.uniform(lo, hi, n)
    if not n * lo <= total <= n * hi:
        return x * (total / x.sum())
    s = x.sum()
    if s > total:
        x = lo + (x - lo) * ((total - n * lo) / (s - n * lo))
    elif s < total:
        x = hi - (hi - x) * ((n * hi - total) / (n * hi - s))
    return x


def generate_pattern(rng, horizon: float, duty: float, min_segment: float,
                     max_segment: float) -> InterferencePattern:
    """Alternating free/active segments with exact duty.

    Segment lengths are drawn in ``[min_segment, max_segment]`` and pulled
    toward the nearer bound until both totals match the duty.
    """
    if duty <= 0:
        return InterferencePattern(horizon, ())
    if duty >= 1:
        return InterferencePattern(horizon, ((0.0, horizon),))
    on_total, off_total = duty * horizon, (1.0 - duty) * horizon
    n_lo = max(1, math.ceil(on_total / max_segment), math.ceil(off_total / max_segment))
    n_hi = min(math.floor(on_total / min_segment), math.floor(off_total / min_segment))
    n = int(rng.integers(n_lo, n_hi + 1)) if n_lo <= n_hi else max(1, n_hi)
    on = _bounded_lengths(rng, n, on_total, min_segment, max_segment)
    off = _bounded_lengths(rng, n, off_total, min_segment, max_segment)
    active_first = bool(rng.integers(0, 2))

    segments = []
    for k in range(n):
        pair = [(on[k], True), (off[k], False)]
        segments += pair if active_first else pair[::-1]

    intervals = []
    t = 0.0
    for k, (length, active) in enumerate(segments):
        end = horizon if k == len(segments) - 1 else min(t + float(length), horizon)
        if active:
            intervals.append((t, end))
        t = end
    return InterferencePattern(horizon, tuple(intervals))


@dataclass(frozen=True)
class Target:
    azimuth: float
    range_km: float
    speed: float
    type_index: int


@dataclass(frozen=True)
class Scenario:
    params: ScenarioParams
    targets: tuple[Target, ...]
    sector: tuple[float, float]
    pattern: InterferencePattern
    tasks: tuple[Task, ...]
    seed: int


def generate_scenario(seed: int, params: Optional[ScenarioParams] = None) -> Scenario:
    params = params or ScenarioParams()
    params.validate()
    rng = np.random.Generator(np.random.PCG64(seed))
    types = params.types()
    lists = [type_job_list(params, t) for t in types]
    n = params.target_count

    azimuth = rng.uniform(0.0, params.fov_deg, n)
    kind = rng.integers(0, len(types), n)
    range_km = rng.uniform(10.0, 100.0, n)
    speed = rng.uniform(50.0, 300.0, n)
    d_std = rng.uniform(*params.d_std_range, n)
    d_alt = rng.uniform(*params.d_alt_range, n)
    pattern = generate_pattern(
        rng, params.horizon, params.duty,
        params.min_segment_ms / 1000.0, params.max_segment_ms / 1000.0,
    )

    targets, tasks = [], []
    for k in range(n):
        ti = int(kind[k])
        targets.append(Target(float(azimuth[k]), float(range_km[k]), float(speed[k]), ti))
        # A silent interferer exposes nobody.
        prone = params.duty > 0 and params.sector_lo <= azimuth[k] <= params.sector_hi
        std = lists[ti]
        tasks.append(Task(
            id=k,
            standard_list=std,
            prone=bool(prone),
            alternative_list=std.scaled(float(d_alt[k])) if prone else None,
            weight=types[ti].weight,
            d_std=float(d_std[k]),
            d_alt=float(d_alt[k]),
        ))
    return Scenario(params, tuple(targets), (params.sector_lo, params.sector_hi), pattern,
                    tuple(tasks), seed)


@dataclass(frozen=True)
class RunResult:
    strategy: Strategy
    allocated_utility: float
    realized_utility: float
    baseline_utility: float

    @property
    def normalized(self) -> float:
        return self.realized_utility / self.baseline_utility


@dataclass
class StrategyOutcome:
    result: RunResult
    allocation: AllocationResult
    schedule: Schedule


def allocate(tasks: Sequence[Task], pattern: InterferencePattern,
             strategy: Strategy) -> AllocationResult:
    if strategy is Strategy.UNAWARE_NO_MITIGATION:
        return classic_allocate(tasks, 1.0)
    if strategy is Strategy.STANDARD_MITIGATION:
        return classic_allocate(tasks, 1.0, use_alternative=True)
    if strategy is Strategy.AWARE_NO_MITIGATION:
        return classic_allocate(degraded_tasks(tasks), 1.0)
    return allocate_interference_aware(tasks, partition_budget(pattern))


def degraded_tasks(tasks: Sequence[Task]) -> list[Task]:
    """Prone tasks valued at the utility their standard jobs keep under interference."""
    out = []
    for t in tasks:
        if t.prone:
            degraded = t.standard_list.scaled(t.d_std)
            t = replace(t, standard_list=degraded, alternative_list=degraded)
        out.append(t)
    return out


def realized_utility(allocation: AllocationResult, schedule: Schedule,
                     pattern: InterferencePattern,
                     tasks: Optional[Sequence[Task]] = None) -> float:
    """Utility actually delivered once the schedule meets the interferer.

    ``tasks`` supplies the true job values when the allocation was computed
    on re-valued copies (defaults to the allocation's own tasks). A prone
    task in a standard configuration is degraded by ``d_std`` if any of
    its dwells is interfered. Time the scheduler could not place scales a
    task's utility down proportionally.
    """
    hit = interfered_tasks(schedule, pattern)
    total = 0.0
    for task, state in zip(tasks or allocation.tasks, allocation.states):
        if state.selected.is_base:
            continue
        u = float(task.job_list(state.selected_list)[state.selected_index].utility)
        if task.prone and state.selected_list is ListKind.STANDARD and task.id in hit:
            u *= task.d_std
        owed = float(state.resource) * pattern.horizon
        missing = schedule.unplaced_time(task.id)
        if missing > TOL:
            u *= max(0.0, owed - missing) / owed
        total += u
    return total


def baseline_utility(scenario: Scenario) -> float:
    return float(classic_allocate(scenario.tasks, 1.0).total_utility)


def run_strategy(scenario: Scenario, strategy: Strategy,
                 baseline: Optional[float] = None) -> StrategyOutcome:
    if baseline is None:
        baseline = baseline_utility(scenario)
    allocation = allocate(scenario.tasks, scenario.pattern, strategy)
    aware = strategy is Strategy.COGNITIVE_MITIGATION
    schedule = build_schedule(allocation, scenario.pattern, scenario.params.chunk,
                              interference_aware=aware)
    realized = realized_utility(allocation, schedule, scenario.pattern, scenario.tasks)
    result = RunResult(strategy, float(allocation.total_utility), realized, baseline)
    return StrategyOutcome(result, allocation, schedule)


def run_all(scenario: Scenario) -> dict[Strategy, StrategyOutcome]:
    baseline = baseline_utility(scenario)
    return {s: run_strategy(scenario, s, baseline) for s in Strategy}


@dataclass(frozen=True)
class Stats:
    mean: float
    std: float
    min: float
    max: float


@dataclass
class MonteCarloResult:
    records: list[tuple[int, RunResult]]
    summary: dict[Strategy, Stats]

    def normalized(self, strategy: Strategy) -> np.ndarray:
        return np.array([r.normalized for _, r in self.records if r.strategy is strategy])


def _one_run(args) -> tuple[int, list[RunResult]]:
    run, seed, params = args
    outcomes = run_all(generate_scenario(seed, params))
    return run, [outcomes[s].result for s in Strategy]


def summarize(records: Sequence[tuple[int, RunResult]]) -> dict[Strategy, Stats]:
    summary = {}
    for strategy in Strategy:
        x = np.array([r.normalized for _, r in records if r.strategy is strategy])
        # population standard deviation over the fixed run set
        summary[strategy] = Stats(float(x.mean()), float(x.std(ddof=0)),
                                  float(x.min()), float(x.max()))
    return summary


def monte_carlo(params: Optional[ScenarioParams] = None, n_runs: int = 100,
                base_seed: int = 0, workers: int = 1) -> MonteCarloResult:
    """Run ``n_runs`` scenarios (run ``k`` uses seed ``base_seed + k``) under all strategies."""
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    params = params or ScenarioParams()
    params.validate()
    jobs = [(k, base_seed + k, params) for k in range(n_runs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_one_run, jobs))
    else:
        runs = [_one_run(j) for j in jobs]
    runs.sort(key=lambda item: item[0])
    records = [(k, r) for k, results in runs for r in results]
    return MonteCarloResult(records, summarize(records))


RUN_COLUMNS = ("run", "strategy", "allocated", "realized", "baseline", "normalized")
SUMMARY_COLUMNS = ("strategy", "mean", "std", "min", "max")


def write_runs_csv(path, records: Sequence[tuple[int, RunResult]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RUN_COLUMNS)
        for run, r in records:
            w.writerow([run, r.strategy.value, repr(r.allocated_utility),
                        repr(r.realized_utility), repr(r.baseline_utility),
                        repr(r.normalized)])


def write_summary_csv(path, summary: dict[Strategy, Stats]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for strategy, s in summary.items():
            w.writerow([strategy.value, repr(s.mean), repr(s.std), repr(s.min), repr(s.max)])


def params_from_dict(data: dict) -> ScenarioParams:
    known = {f.name for f in fields(ScenarioParams)}
    return ScenarioParams(**{k: v for k, v in data.items() if k in known})


# Three tasks, one jammer on 60% of the time; T1 and T2 are exposed.
EXAMPLE_ONE_TABLE = {
    "c1": (0.3, 0.6),
    "c1a": (0.3, 0.4),
    "c2": (0.3, 0.9),
    "c2a": (0.3, 0.6),
    "c3": (0.3, 0.8),
}


def example_one_tasks(number=float) -> list[Task]:
    """The three-task instance; pass ``fractions.Fraction`` for exact arithmetic."""

    def one_job(name):
        r, u = (number(str(v)) for v in EXAMPLE_ONE_TABLE[name])
        return JobList((base_configuration(), Configuration(name, r, number(1), r, u)))

    return [
        Task("T1", one_job("c1"), True, one_job("c1a"), d_alt=2 / 3),
        Task("T2", one_job("c2"), True, one_job("c2a"), d_alt=2 / 3),
        Task("T3", one_job("c3")),
    ]


def example_one_budget(number=float) -> ResourceBudget:
    return ResourceBudget(number("0.6"), number("0.4"))


def example_one_pattern() -> InterferencePattern:
    return InterferencePattern(1.0, ((0.0, 0.6),))
