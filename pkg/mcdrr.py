#!/usr/bin/env python3
"""
mcdrr-linksim - Multi-Channel Deficit Round-Robin simulator

Runs fairness experiments on a hybrid TDM/WDM link with tunable transmitters
and fixed receivers, and writes per-flow CSV plus a JSON summary.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv
from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict
from rich.console import Console
from rich.logging import RichHandler

from linksim.display import ReportConsole
from linksim.engine import seconds_to_ps
from linksim.errors import (
    InvariantViolation,
    LinkSimError,
    ReportWriteError,
    ScenarioParseError,
    ScenarioValidationError,
)
from linksim.metrics import offered_load_bps
from linksim.models import LinkParams, ScenarioConfig, SchedulerParams
from linksim.report import emit_report, emit_sweep, summarize_sweep
from linksim.runner import ScriptedSimulation, run_scenario, run_sweep
from linksim.scenario import DEFAULT_DURATION_S, FULL_DURATION_S, PRESETS, load_scenario
from linksim.scheduler import SCHEDULERS
from linksim.traffic import WORKED_EXAMPLE_QUANTUM, worked_example_arrivals

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_INVARIANT = 4
EXIT_IO = 5


class Settings(BaseSettings):
    """Application settings loaded from .env file."""

    output_dir: str = "results"
    default_seed: int = 1
    default_duration_s: float = DEFAULT_DURATION_S
    full_duration_s: float = FULL_DURATION_S
    check_invariants: bool = False
    jobs: int = 1
    report_format: str = "both"
    log_level: str = "INFO"

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", extra="ignore")


class SimulatorApp:
    """Command-line application around the simulator library."""

    def __init__(self, settings: Settings, console: Optional[Console] = None):
        self.settings = settings
        self.console = console or Console()
        self.display = ReportConsole(self.console)

    def _resolve(self, args: argparse.Namespace) -> ScenarioConfig:
        """Load the scenario and apply command-line overrides."""
        duration_s = args.duration
        if args.full:
            duration_s = self.settings.full_duration_s
        seed = args.seed[0] if args.seed else self.settings.default_seed

        config = load_scenario(
            args.scenario,
            duration_s=duration_s if duration_s is not None else self.settings.default_duration_s,
            seed=seed,
        )

        # Command-line flags win over the file and .env
        changes = {}
        if duration_s is not None:
            changes["duration_ps"] = seconds_to_ps(duration_s)
        if args.seed:
            changes["seed"] = seed
        if args.warmup is not None:
            changes["warmup_ps"] = seconds_to_ps(args.warmup)
        if args.scheduler:
            changes["scheduler"] = SchedulerParams(
                **{**config.scheduler.model_dump(), "name": args.scheduler}
            )
        if args.check_invariants or self.settings.check_invariants:
            changes["check_invariants"] = True
        if args.output_dir:
            changes["output_dir"] = args.output_dir
        elif args.scenario in PRESETS:
            changes["output_dir"] = self.settings.output_dir

        if not changes:
            return config
        try:
            return config.with_changes(**changes)
        except ValidationError as e:
            raise ScenarioValidationError(str(e)) from e

    def run(self, args: argparse.Namespace) -> int:
        config = self._resolve(args)
        fmt = args.format or self.settings.report_format
        jobs = args.jobs or self.settings.jobs

        # Show what is about to run
        self.display.display_banner()
        self.display.display_config(config)

        # Simulate
        if args.seed and len(args.seed) > 1:
            self.display.display_status(
                f"Sweeping {len(args.seed)} seeds with {jobs} worker(s)...", "yellow"
            )
            reports = run_sweep(config, args.seed, jobs=jobs)
            self.display.display_sweep(summarize_sweep(reports, config.prefix))
            written = emit_sweep(reports, config.output_dir, config.prefix)
        else:
            self.display.display_status(f"Simulating {config.duration_s:g} s...", "yellow")
            report = run_scenario(config)
            self.display.display_report(report)
            written = emit_report(report, config.output_dir, config.prefix, fmt=fmt)

        # Report files
        for path in written:
            self.display.display_status(f"Wrote {path}", "green")
        return EXIT_OK

    def offered(self, args: argparse.Namespace) -> int:
        config = load_scenario(args.scenario)
        self.display.display_offered(
            config,
            offered_load_bps(config.flows, config.link.ifg_bytes),
            offered_load_bps(config.flows, 0),
        )
        return EXIT_OK

    def example(self, args: argparse.Namespace) -> int:
        """Replay the four-flow, three-round example and print every decision."""
        simulation = ScriptedSimulation(
            worked_example_arrivals(),
            LinkParams(channels=4, transmitters=2),
            SchedulerParams(quantum=WORKED_EXAMPLE_QUANTUM, max_packets_per_visit=1),
        )
        simulation.execute()
        self.display.display_decisions(simulation.decisions)
        return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcdrr.py",
        description="Multi-channel deficit round-robin simulator for hybrid TDM/WDM links",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a preset or scenario file")
    run.add_argument("scenario", help=f"preset ({', '.join(PRESETS)}) or scenario file")
    run.add_argument("--duration", type=float, help="simulated seconds")
    run.add_argument("--full", action="store_true", help="use the full 600 s horizon")
    run.add_argument("--seed", type=int, nargs="+", help="one seed, or several for a sweep")
    run.add_argument("--scheduler", choices=sorted(SCHEDULERS), help="override the scheduler")
    run.add_argument("--warmup", type=float, help="seconds excluded from throughput")
    run.add_argument("--output-dir", help="directory for reports")
    run.add_argument("--format", choices=("csv", "json", "both"), help="report format")
    run.add_argument("--jobs", type=int, help="worker processes for sweeps")
    run.add_argument("--check-invariants", action="store_true", help="check after every event")

    offered = commands.add_parser("offered", help="print offered load for both IFG conventions")
    offered.add_argument("scenario")

    commands.add_parser("example", help="replay the four-flow worked example")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point."""
    # Load configuration
    load_dotenv()
    settings = Settings()

    # Setup logging
    logging.basicConfig(
        level=settings.log_level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=True, show_path=False)],
    )

    # Dispatch the subcommand
    args = build_parser().parse_args(argv)
    app = SimulatorApp(settings)
    handler = {"run": app.run, "offered": app.offered, "example": app.example}[args.command]

    try:
        return handler(args)
    except ScenarioParseError as e:
        app.display.display_status(f"Scenario parse error: {e}", "red")
        return EXIT_PARSE
    except ScenarioValidationError as e:
        app.display.display_status(f"Invalid scenario: {e}", "red")
        return EXIT_VALIDATION
    except InvariantViolation as e:
        logging.getLogger(__name__).exception("internal invariant violated")
        app.display.display_status(f"Internal invariant violated: {e}", "bold red")
        return EXIT_INVARIANT
    except ReportWriteError as e:
        app.display.display_status(f"Cannot write report: {e}", "red")
        return EXIT_IO
    except LinkSimError as e:
        app.display.display_status(f"Error: {e}", "red")
        return EXIT_FAILURE
    except KeyboardInterrupt:
        app.display.display_status("Interrupted", "yellow")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
