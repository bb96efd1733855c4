"""Candidate configuration enumeration and job-list construction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .model import Configuration, JobList, base_configuration


@dataclass(frozen=True)
class ConfigGrid:
    dwell_choices: tuple[float, ...]
    revisit_choices: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "dwell_choices", tuple(self.dwell_choices))
        object.__setattr__(self, "revisit_choices", tuple(self.revisit_choices))
        if not self.dwell_choices or not self.revisit_choices:
            raise ValueError("grid choices must be non-empty")
        if min(self.dwell_choices) <= 0 or min(self.revisit_choices) <= 0:
            raise ValueError("grid choices must be positive")


def enumerate_configs(
    grid: ConfigGrid, utility: Callable[[float, float], float]
) -> list[Configuration]:
    """All (dwell, revisit) pairs plus the base configuration.

    ``utility(dwell, revisit)`` evaluates a configuration. Pairs whose
    time fraction exceeds 1 cannot be executed and are dropped.
    """
    configs = [base_configuration()]
    for dwell in grid.dwell_choices:
        for revisit in grid.revisit_choices:
            r = dwell / revisit
            if r > 1:
                continue
            configs.append(
                Configuration((dwell, revisit), dwell, revisit, r, utility(dwell, revisit))
            )
    return configs


def _cross(o: Configuration, a: Configuration, b: Configuration) -> float:
    return (a.resource - o.resource) * (b.utility - o.utility) - (a.utility - o.utility) * (
        b.resource - o.resource
    )


def concave_majorant(configs: Iterable[Configuration]) -> JobList:
    """Trim configurations to the rising part of their upper convex hull.

    Within equal resource only the best utility survives; collinear points
    are dropped, so marginal utility per resource strictly decreases along
    the returned list.
    """
    best: dict[float, Configuration] = {}
    for c in configs:
        kept = best.get(c.resource)
        if kept is None or c.utility > kept.utility:
            best[c.resource] = c
    points = [best[r] for r in sorted(best)]
    if not points or not points[0].is_base:
        raise ValueError("configurations must include the base configuration")

    hull: list[Configuration] = []
    for p in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0:
            hull.pop()
        hull.append(p)

    rising = [hull[0]]
    for p in hull[1:]:
        if p.utility <= rising[-1].utility:
            break
        rising.append(p)
    return JobList(tuple(rising))


def marginal_ratios(jobs: Sequence[Configuration]) -> list[float]:
    return [
        (b.utility - a.utility) / (b.resource - a.resource) for a, b in zip(jobs, jobs[1:])
    ]
