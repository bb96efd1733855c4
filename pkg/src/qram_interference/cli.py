"""Command-line front end.

Subcommands::

    qram-sim example
    qram-sim run --config cfg.json --seed 7 --out out/
    qram-sim montecarlo --config cfg.json --out out/ --workers 4

Exit codes: 0 success, 1 golden-check failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .optimizer import AllocationResult, allocate_interference_aware, classic_allocate
from .scenario import (
    GENERATOR_ID,
    ScenarioParams,
    Strategy,
    example_one_budget,
    example_one_tasks,
    generate_scenario,
    monte_carlo,
    run_all,
    write_runs_csv,
    write_summary_csv,
)


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class ExperimentConfig(ScenarioParams):
    n_runs: int = 100
    base_seed: int = 0
    workers: int = 1

    def validate(self) -> None:
        try:
            super().validate()
        except ValueError as exc:
            key, _, msg = str(exc).partition(": ")
            raise ConfigError(key, msg) from None
        for key, low in (("n_runs", 1), ("base_seed", 0), ("workers", 1)):
            value = getattr(self, key)
            if not isinstance(value, int) or isinstance(value, bool) or value < low:
                raise ConfigError(key, f"must be an integer >= {low}")

    def scenario_params(self) -> ScenarioParams:
        names = {f.name for f in fields(ScenarioParams)}
        return ScenarioParams(**{k: v for k, v in asdict(self).items() if k in names})

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown configuration key")
        defaults = asdict(cls())
        for key, value in data.items():
            expected = defaults[key]
            numeric = isinstance(value, (int, float)) and not isinstance(value, bool)
            if isinstance(expected, (int, float)) and not numeric:
                raise ConfigError(key, f"expected a number, got {value!r}")
            if isinstance(expected, list) and not isinstance(value, list):
                raise ConfigError(key, f"expected a list, got {value!r}")
        config = cls(**data)
        config.validate()
        return config

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def load_config(path: Optional[str]) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("<file>", str(exc)) from None
    if not isinstance(data, dict):
        raise ConfigError("<file>", "configuration must be a JSON object")
    return ExperimentConfig.from_dict(data)


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _metadata(command: str, config: ExperimentConfig, **extra) -> dict:
    return {
        "command": command,
        "generator": GENERATOR_ID,
        "config_sha256": config.digest(),
        "config": config.to_dict(),
        "version": __version__,
        **extra,
    }


def _format_log(result: AllocationResult) -> list[str]:
    lines = []
    for u in result.upgrade_log:
        lines.append(
            f"  upgrade {u.task}: {u.from_list.value}[{u.from_index}] -> "
            f"{u.to_list.value}[{u.to_index}]  du={float(u.delta_utility):.2f} "
            f"dr={float(u.delta_resource):.2f} ratio={float(u.delta_utility / u.delta_resource):.3f}"
        )
    return lines


def cmd_example(out=None) -> int:
    """Golden three-task run; returns 0 when the known totals are reproduced."""
    out = out or sys.stdout
    budget = example_one_budget()
    result = allocate_interference_aware(example_one_tasks(), budget)
    traditional = classic_allocate(example_one_tasks(), 1.0, use_alternative=True)

    print(f"budget (R_i, R_ni) = ({budget.r_i:.1f}, {budget.r_ni:.1f})", file=out)
    for line in _format_log(result):
        print(line, file=out)
    for task, state in zip(result.tasks, result.states):
        flag = " non-interfered" if state.flag_non_interfered else ""
        print(f"  {task.id}: {state.selected.id} ({state.selected_list.value}){flag} "
              f"draws R_i={float(state.draw_i):.1f} R_ni={float(state.draw_ni):.1f}", file=out)
    rem = result.remaining
    print(f"total utility {float(result.total_utility):.1f}", file=out)
    print(f"remaining budget ({float(rem.r_i):.1f}, {float(rem.r_ni):.1f})", file=out)
    print(f"traditional {float(traditional.total_utility):.1f}", file=out)

    checks = {
        "total utility": (result.total_utility, 2.1),
        "traditional": (traditional.total_utility, 1.8),
        "remaining R_i": (rem.r_i, 0.0),
        "remaining R_ni": (rem.r_ni, 0.1),
    }
    failed = [f"{name}: got {got!r}, expected {want!r}"
              for name, (got, want) in checks.items()
              if not math.isclose(got, want, abs_tol=1e-12)]
    t1, t2 = result.state_of("T1"), result.state_of("T2")
    if not t2.flag_non_interfered:
        failed.append("T2 should be flagged non-interfered")
    if t1.selected_list.value != "alternative":
        failed.append("T1 should run its alternative configuration")
    for line in failed:
        print(f"MISMATCH {line}", file=out)
    return 1 if failed else 0


def cmd_run(config: ExperimentConfig, seed: int, out_dir: Path, out=None) -> int:
    out = out or sys.stdout
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario = generate_scenario(seed, config.scenario_params())
    outcomes = run_all(scenario)
    records = []
    for strategy, outcome in outcomes.items():
        _write_json(out_dir / f"allocation_{strategy.value}.json", outcome.allocation.to_dict())
        _write_json(out_dir / f"schedule_{strategy.value}.json", outcome.schedule.to_dict())
        records.append((0, outcome.result))
    write_runs_csv(out_dir / "runs.csv", records)
    _write_json(out_dir / "metadata.json", _metadata("run", config, seed=seed))
    for _, r in records:
        print(f"{r.strategy.value:24s} allocated={r.allocated_utility:.4f} "
              f"realized={r.realized_utility:.4f} normalized={r.normalized:.4f}", file=out)
    return 0


def cmd_montecarlo(config: ExperimentConfig, out_dir: Path, workers: Optional[int] = None,
                   out=None) -> int:
    out = out or sys.stdout
    out_dir.mkdir(parents=True, exist_ok=True)
    result = monte_carlo(config.scenario_params(), config.n_runs, config.base_seed,
                         workers or config.workers)
    write_runs_csv(out_dir / "runs.csv", result.records)
    write_summary_csv(out_dir / "summary.csv", result.summary)
    _write_json(out_dir / "metadata.json",
                _metadata("montecarlo", config, base_seed=config.base_seed,
                          n_runs=config.n_runs))
    print(f"{'strategy':24s} {'mean':>6s} {'std':>6s} {'min':>6s} {'max':>6s}", file=out)
    for strategy in Strategy:
        s = result.summary[strategy]
        print(f"{strategy.value:24s} {s.mean:6.3f} {s.std:6.3f} {s.min:6.3f} {s.max:6.3f}",
              file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qram-sim",
        description="Interference-aware Q-RAM radar resource allocation simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("example", help="reproduce the three-task golden example")

    run = sub.add_parser("run", help="one scenario under all four strategies")
    run.add_argument("--config", help="JSON config (defaults when omitted)")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", required=True, type=Path)

    mc = sub.add_parser("montecarlo", help="Monte-Carlo strategy comparison")
    mc.add_argument("--config", help="JSON config (defaults when omitted)")
    mc.add_argument("--out", required=True, type=Path)
    mc.add_argument("--workers", type=int, help="parallel processes (overrides config)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "example":
        return cmd_example()
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.command == "run":
        return cmd_run(config, args.seed, args.out)
    if args.workers is not None and args.workers < 1:
        print("config error: workers: must be an integer >= 1", file=sys.stderr)
        return 2
    return cmd_montecarlo(config, args.out, args.workers)


if __name__ == "__main__":
    sys.exit(main())
