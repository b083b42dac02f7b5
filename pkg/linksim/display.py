"""
Terminal output for runs, sweeps and decision traces.
"""

from datetime import datetime
from typing import Optional, Sequence

from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from linksim.engine import PS_PER_NS
from linksim.models import Report, ScenarioConfig, SweepSummary
from linksim.scheduler import Decision

JAIN_TARGET = 0.999


class ReportConsole:
    """Renders simulator results with rich."""

    def __init__(self, console: Optional[Console] = None):
        self.console = console or Console()

    def display_status(self, status: str, style: str = "green") -> None:
        """Display a status message."""
        timestamp = datetime.now().strftime("%H:%M:%S")
        self.console.print(f"[dim]{timestamp}[/dim] [{style}]{status}[/{style}]")

    def display_banner(self) -> None:
        banner = Text()
        banner.append("mcdrr-linksim", style="bold green")
        banner.append("\n")
        banner.append("Multi-channel deficit round-robin on a hybrid TDM/WDM link", style="dim")
        self.console.print()
        self.console.print(Panel(banner, border_style="green", expand=False))
        self.console.print()

    def display_config(self, config: ScenarioConfig) -> None:
        link, sched = config.link, config.scheduler
        quantum = sched.quantum if isinstance(sched.quantum, int) else "per-queue"
        lines = [
            f"Scenario: {config.name}",
            f"Link: W={link.channels}, M={link.transmitters}, "
            f"{link.line_rate_bps / 1e9:g} Gb/s, IFG {link.ifg_bytes} B",
            f"Scheduler: {sched.name} (quantum {quantum}, "
            f"max/visit {sched.max_packets_per_visit or 'unlimited'}, "
            f"accrue when busy {sched.accrue_quantum_when_busy})",
            f"VOQ capacity: {sched.voq_capacity} frames",
            f"Duration: {config.duration_s:g} s (warm-up {config.warmup_s:g} s)",
        ]
        self.console.print("[bold]Configuration:[/bold]")
        for line in lines:
            self.console.print(f"  [dim]{line}[/dim]")
        self.console.print()

    def display_report(self, report: Report) -> None:
        # Per-flow table
        table = Table(title=f"{report.scenario} / {report.scheduler.name} / seed {report.seed}")
        table.add_column("flow", justify="right")
        table.add_column("generated", justify="right")
        table.add_column("delivered", justify="right")
        table.add_column("dropped", justify="right")
        table.add_column("Mb/s", justify="right")
        table.add_column("mean delay (us)", justify="right")
        for flow in report.flows:
            table.add_row(
                str(flow.flow_id),
                str(flow.frames_generated),
                str(flow.frames_delivered),
                str(flow.frames_dropped),
                f"{flow.throughput_bps / 1e6:.3f}",
                f"{flow.mean_delay_ns / 1e3:.1f}",
            )
        self.console.print(table)

        # Summary panel, green when the fairness target is met
        jain = report.jain_index
        color = "green" if jain is not None and jain >= JAIN_TARGET else "red"
        content = Text()
        content.append("Jain index: ", style="bold")
        content.append(f"{jain:.7f}" if jain is not None else "n/a", style=f"bold {color}")
        content.append("\n")
        content.append(f"Aggregate goodput: {report.aggregate_throughput_bps / 1e9:.4f} Gb/s\n")
        content.append(
            f"Offered load: {report.offered_load_bps / 1e9:.4f} Gb/s with IFG, "
            f"{report.offered_load_no_ifg_bps / 1e9:.4f} Gb/s without\n"
        )
        if report.max_min_ratio is not None:
            content.append(f"Max/min throughput: {report.max_min_ratio:.4f}\n")
        content.append(
            f"Scans: {report.scan.scans}, mean {report.scan.mean_visited:.2f} "
            f"and max {report.scan.max_visited} queues visited",
            style="dim",
        )
        self.console.print(Panel(content, title="Summary", border_style=color, expand=False))

    def display_sweep(self, summary: SweepSummary) -> None:
        table = Table(title=f"{summary.scenario} / {summary.scheduler.name} sweep")
        table.add_column("seed", justify="right")
        table.add_column("Gb/s", justify="right")
        table.add_column("Jain", justify="right")
        table.add_column("max/min", justify="right")
        for run in summary.runs:
            table.add_row(
                str(run.seed),
                f"{run.aggregate_throughput_bps / 1e9:.4f}",
                f"{run.jain_index:.7f}" if run.jain_index is not None else "n/a",
                f"{run.max_min_ratio:.4f}" if run.max_min_ratio is not None else "n/a",
            )
        self.console.print(table)

    def display_decisions(self, decisions: Sequence[Decision]) -> None:
        table = Table(title="Scheduler decisions")
        table.add_column("t (ns)", justify="right")
        table.add_column("action")
        table.add_column("flow", justify="right")
        table.add_column("tx", justify="right")
        table.add_column("bytes", justify="right")
        table.add_column("DC", justify="right")
        # Selections in green, skips in yellow or red
        styles = {"serve": "green", "continue": "cyan", "skip-deficit": "yellow", "skip-busy": "red"}
        for d in decisions:
            style = styles.get(d.action, "white")
            table.add_row(
                f"{d.time / PS_PER_NS:.0f}",
                f"[{style}]{d.action}[/{style}]",
                str(d.channel_id + 1),
                "-" if d.transmitter_id is None else str(d.transmitter_id + 1),
                str(d.size_bytes),
                str(d.dc),
            )
        self.console.print(table)

    def display_offered(self, config: ScenarioConfig, with_ifg: float, without_ifg: float) -> None:
        self.console.print(f"[bold]{config.name}[/bold]")
        self.console.print(f"  with IFG ({config.link.ifg_bytes} B): {with_ifg / 1e9:.4f} Gb/s")
        self.console.print(f"  without IFG: {without_ifg / 1e9:.4f} Gb/s")
        self.console.print(f"  link capacity: {config.link.capacity_bps / 1e9:.4f} Gb/s")
