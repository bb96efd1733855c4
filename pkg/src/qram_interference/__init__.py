"""Q-RAM radar resource management with interference-aware allocation."""

__version__ = "0.1.0"

from .model import (
    AllocationState,
    Configuration,
    InterferencePattern,
    JobList,
    ListKind,
    ResourceBudget,
    Task,
    base_configuration,
    duty,
    partition_budget,
)
from .joblist import ConfigGrid, concave_majorant, enumerate_configs
from .optimizer import (
    AllocationResult,
    allocate_interference_aware,
    classic_allocate,
    oracle_allocate,
    select_next_upgrade,
)
from .scheduler import Schedule, build_schedule, overlap_report
from .scenario import (
    ScenarioParams,
    Strategy,
    generate_scenario,
    monte_carlo,
    run_all,
    run_strategy,
)

__all__ = [
    "AllocationResult",
    "AllocationState",
    "ConfigGrid",
    "Configuration",
    "InterferencePattern",
    "JobList",
    "ListKind",
    "ResourceBudget",
    "Schedule",
    "ScenarioParams",
    "Strategy",
    "Task",
    "allocate_interference_aware",
    "base_configuration",
    "build_schedule",
    "classic_allocate",
    "concave_majorant",
    "duty",
    "enumerate_configs",
    "generate_scenario",
    "monte_carlo",
    "oracle_allocate",
    "overlap_report",
    "partition_budget",
    "run_all",
    "run_strategy",
    "select_next_upgrade",
]
