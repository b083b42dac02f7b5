#!/usr/bin/env python3
"""
Acceptance runner for mcdrr-linksim - runs the fairness experiments end to end
and prints a pass/fail summary. The pytest suite covers the same ground at
short horizons; this script runs the full 30 s scenarios.
"""

import sys
import tempfile
import time
from pathlib import Path

from dotenv import load_dotenv
from rich.console import Console
from rich.panel import Panel
from rich.prompt import Confirm, FloatPrompt, IntPrompt

from linksim.display import ReportConsole
from linksim.errors import LinkSimError
from linksim.metrics import offered_load_bps
from linksim.models import LinkParams, SchedulerParams
from linksim.reference import reference_drr_trace
from linksim.report import emit_report
from linksim.runner import ScriptedSimulation, run_scenario
from linksim.scenario import preset
from linksim.traffic import (
    Arrival,
    RngStream,
    WORKED_EXAMPLE_QUANTUM,
    scenario_a_flows,
    scenario_b_flows,
    worked_example_arrivals,
)

# Load environment
load_dotenv()

console = Console()
display = ReportConsole(console)


def print_header():
    """Print test header."""
    console.print()
    console.print(Panel(
        "[bold green]mcdrr-linksim Acceptance Suite[/bold green]\n"
        "Fairness, oracle equivalence, baseline contrast and determinism",
        expand=False
    ))
    console.print()


def _timed(label: str, fn):
    started = time.perf_counter()
    result = fn()
    console.print(f"  [dim]{label} took {time.perf_counter() - started:.1f} s[/dim]")
    return result


def test_scenario_a(duration_s: float, seed: int) -> bool:
    """Scenario A: Jain >= 0.999 and max/min <= 1.05."""
    console.print("[yellow]1. Scenario A fairness...[/yellow]")
    config = preset("paper-a", duration_s=duration_s, seed=seed).with_changes(check_invariants=True)
    report = _timed("scenario A", lambda: run_scenario(config))
    display.display_report(report)

    if report.jain_index >= 0.999 and report.max_min_ratio <= 1.05:
        console.print("[green]✓ Scenario A is fair[/green]")
        return True
    console.print("[red]✗ Scenario A below the fairness threshold[/red]")
    return False


def test_scenario_b(duration_s: float, seed: int) -> bool:
    """Scenario B: Jain >= 0.999 and goodput within [1.90, 2.00] Gb/s."""
    console.print("\n[yellow]2. Scenario B fairness and goodput...[/yellow]")
    config = preset("paper-b", duration_s=duration_s, seed=seed).with_changes(check_invariants=True)
    report = _timed("scenario B", lambda: run_scenario(config))
    display.display_report(report)

    goodput_ok = 1.90e9 <= report.aggregate_throughput_bps <= 2.00e9
    if report.jain_index >= 0.999 and goodput_ok:
        console.print("[green]✓ Scenario B is fair and near capacity[/green]")
        return True
    console.print("[red]✗ Scenario B failed fairness or goodput bounds[/red]")
    return False


def test_offered_load() -> bool:
    """Offered load with and without the inter-frame gap."""
    console.print("\n[yellow]3. Offered load...[/yellow]")
    a = offered_load_bps(scenario_a_flows(), 12)
    b = offered_load_bps(scenario_b_flows(), 0)
    console.print(f"  Scenario A with IFG: {a / 1e9:.4f} Gb/s")
    console.print(f"  Scenario B without IFG: {b / 1e9:.4f} Gb/s")

    if abs(a - 2.409e9) <= 2.409e6 and b == 2.375e9:
        console.print("[green]✓ Offered loads reproduced[/green]")
        return True
    console.print("[red]✗ Offered loads differ[/red]")
    return False


def test_worked_example() -> bool:
    """Four-flow example: the 800-byte frame goes out with a double quantum."""
    console.print("\n[yellow]4. Worked example...[/yellow]")
    simulation = ScriptedSimulation(
        worked_example_arrivals(),
        LinkParams(channels=4, transmitters=2),
        SchedulerParams(quantum=WORKED_EXAMPLE_QUANTUM, max_packets_per_visit=1),
    )
    simulation.execute()
    display.display_decisions(simulation.decisions)

    first = simulation.decisions[0]
    big = next(d for d in simulation.decisions if d.action == "serve" and d.size_bytes == 800)
    drained = all(voq.dc == 0 for voq in simulation.scheduler.voqs)
    if first.dc == 390 and big.dc + big.size_bytes == 2 * WORKED_EXAMPLE_QUANTUM and drained:
        console.print("[green]✓ Decisions match the hand trace[/green]")
        return True
    console.print("[red]✗ Decision trace differs[/red]")
    return False


def test_oracle(instances: int = 50) -> bool:
    """Single-transmitter MCDRR against the reference DRR loop."""
    console.print("\n[yellow]5. Single-server oracle equivalence...[/yellow]")
    passed = 0
    for seed in range(instances):
        rng = RngStream(seed, 0)
        now = 0
        arrivals = []
        for _ in range(200):
            now += rng.integer(0, 10_000_000)
            arrivals.append(Arrival(now, rng.integer(0, 3), rng.integer(64, 1518)))
        expected = [s.frame for s in reference_drr_trace(4, 1518, arrivals)]
        simulation = ScriptedSimulation(
            arrivals, LinkParams(channels=4, transmitters=1), SchedulerParams()
        )
        simulation.execute()
        if simulation.served_arrivals() == expected:
            passed += 1
        else:
            console.print(f"  [red]✗[/red] instance {seed} diverges")

    console.print(f"\n  Results: {passed}/{instances} identical")
    if passed == instances:
        console.print("[green]✓ MCDRR with one transmitter is classic DRR[/green]")
        return True
    return False


def test_baseline_contrast(duration_s: float, seed: int) -> bool:
    """Deficit-free round robin is unfair with unequal frame sizes."""
    console.print("\n[yellow]6. Baseline contrast...[/yellow]")
    config = preset("paper-b", duration_s=duration_s, seed=seed)
    baseline = config.with_changes(scheduler=SchedulerParams(name="rr-baseline"))
    mcdrr_report = _timed("mcdrr", lambda: run_scenario(config))
    rr_report = _timed("rr-baseline", lambda: run_scenario(baseline))
    console.print(f"  mcdrr Jain: {mcdrr_report.jain_index:.7f}")
    console.print(f"  rr-baseline Jain: {rr_report.jain_index:.7f}")

    if mcdrr_report.jain_index >= 0.999 and rr_report.jain_index <= 0.99:
        console.print("[green]✓ Deficit counters restore fairness[/green]")
        return True
    console.print("[red]✗ Contrast not observed[/red]")
    return False


def test_determinism(duration_s: float, seed: int) -> bool:
    """Two runs with the same seed write byte-identical files."""
    console.print("\n[yellow]7. Determinism...[/yellow]")
    with tempfile.TemporaryDirectory() as tmp:
        outputs = []
        for run in ("first", "second"):
            report = run_scenario(preset("paper-a", duration_s=duration_s, seed=seed))
            outputs.append(emit_report(report, Path(tmp) / run, "paper-a"))
        identical = all(a.read_bytes() == b.read_bytes() for a, b in zip(*outputs))

    if identical:
        console.print("[green]✓ Outputs are byte-identical[/green]")
        return True
    console.print("[red]✗ Outputs differ between runs[/red]")
    return False


def main():
    """Run all checks."""
    print_header()

    duration_s = FloatPrompt.ask("Simulated seconds per scenario", default=30.0)
    seed = IntPrompt.ask("Seed", default=1)
    console.print()

    results = []
    try:
        results.append(("Scenario A Fairness", test_scenario_a(duration_s, seed)))
        results.append(("Scenario B Fairness", test_scenario_b(duration_s, seed)))
        results.append(("Offered Load", test_offered_load()))
        results.append(("Worked Example", test_worked_example()))
        results.append(("Oracle Equivalence", test_oracle()))
        if Confirm.ask("\nRun the baseline contrast (two more full runs)?", default=True):
            results.append(("Baseline Contrast", test_baseline_contrast(duration_s, seed)))
        results.append(("Determinism", test_determinism(min(duration_s, 1.0), seed)))
    except LinkSimError as e:
        console.print(f"[red]✗ Error: {e}[/red]")
        return 1

    # Summary
    console.print("\n" + "="*60)
    console.print("[bold]Acceptance Summary:[/bold]\n")

    all_passed = True
    for name, passed in results:
        status = "[green]✓ PASS[/green]" if passed else "[red]✗ FAIL[/red]"
        console.print(f"  {status} - {name}")
        if not passed:
            all_passed = False

    console.print()

    if all_passed:
        console.print("[bold green]All checks passed! ✓[/bold green]")
        return 0
    console.print("[bold red]Some checks failed[/bold red]")
    return 1


if __name__ == "__main__":
    sys.exit(main())
