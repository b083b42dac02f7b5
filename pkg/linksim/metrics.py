"""
Per-flow counters, throughput, offered load and Jain's fairness index.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from linksim.engine import PS_PER_NS, PS_PER_SECOND, SimTime
from linksim.errors import UsageError
from linksim.link import Frame
from linksim.models import FlowReport, FlowSpec, Report, ScanReport, ScenarioConfig


@dataclass(slots=True)
class FlowStats:
    flow_id: int
    frames_generated: int = 0
    frames_delivered: int = 0
    frames_dropped: int = 0
    frames_queued: int = 0
    frames_in_flight: int = 0
    bytes_delivered: int = 0
    # Deliveries at or after the warm-up instant
    bytes_measured: int = 0
    sum_delay: SimTime = 0
    max_delay: SimTime = 0

    @property
    def mean_delay(self) -> float:
        return self.sum_delay / self.frames_delivered if self.frames_delivered else 0.0

    @property
    def accounted(self) -> int:
        return self.frames_delivered + self.frames_dropped + self.frames_queued + self.frames_in_flight


def throughput_bps(stats: FlowStats, duration: SimTime, measured_only: bool = False) -> float:
    """
    Goodput of one flow: delivered frame bytes (no IFG) over `duration` ps.

    Raises:
        UsageError: if duration is not positive
    """
    if duration <= 0:
        raise UsageError(f"throughput over a duration of {duration} ps")
    delivered = stats.bytes_measured if measured_only else stats.bytes_delivered
    return delivered * 8 * PS_PER_SECOND / duration


def jain_index(values: Iterable[float]) -> float:
    """
    Jain's fairness index (sum x)^2 / (n * sum x^2).

    Raises:
        UsageError: for empty, negative or all-zero input
    """
    x = np.asarray(list(values), dtype=float)
    if x.size == 0 or (x < 0).any() or not (x > 0).any():
        raise UsageError("Jain index needs non-negative values with at least one positive")
    index = x.sum() ** 2 / (x.size * np.square(x).sum())
    return min(1.0, float(index))


def offered_load_bps(flows: Iterable[FlowSpec], ifg_bytes: int) -> float:
    """Mean offered rate of all flows, counting `ifg_bytes` per frame."""
    return float(sum(flow.offered_bps(ifg_bytes) for flow in flows))


class MetricsRecorder:
    """Counters for every flow of one simulation instance."""

    def __init__(self, flows: int, warmup: SimTime = 0):
        self.flows = [FlowStats(flow_id=i) for i in range(flows)]
        self.warmup = warmup

    def record_generated(self, frame: Frame, now: SimTime) -> None:
        self.flows[frame.channel_id].frames_generated += 1

    def record_dropped(self, frame: Frame, now: SimTime) -> None:
        self.flows[frame.channel_id].frames_dropped += 1

    def record_delivered(self, frame: Frame, now: SimTime) -> None:
        stats = self.flows[frame.channel_id]
        stats.frames_delivered += 1
        stats.bytes_delivered += frame.size_bytes
        if now >= self.warmup:
            stats.bytes_measured += frame.size_bytes
        delay = now - frame.t_created
        stats.sum_delay += delay
        if delay > stats.max_delay:
            stats.max_delay = delay

    def drain(self, queued: Sequence[int], in_flight: Sequence[int]) -> None:
        """Record frames still held by the scheduler when the run stops."""
        for stats, waiting, sending in zip(self.flows, queued, in_flight):
            stats.frames_queued = waiting
            stats.frames_in_flight = sending

    def conservation_violations(self) -> list[int]:
        """Flows whose generated count disagrees with where their frames ended up."""
        return [s.flow_id for s in self.flows if s.frames_generated != s.accounted]

    def throughputs(self, window: SimTime) -> list[float]:
        if window <= 0:
            return [0.0] * len(self.flows)
        return [throughput_bps(s, window, measured_only=True) for s in self.flows]

    def build_report(
        self,
        config: ScenarioConfig,
        utilization: list[float],
        scan: ScanReport,
        events_dispatched: int,
    ) -> Report:
        window = config.duration_ps - config.warmup_ps
        rates = self.throughputs(window)
        jain: Optional[float] = jain_index(rates) if any(r > 0 for r in rates) else None
        low, high = min(rates), max(rates)
        flows = [
            FlowReport(
                flow_id=s.flow_id,
                frames_generated=s.frames_generated,
                frames_delivered=s.frames_delivered,
                frames_dropped=s.frames_dropped,
                frames_queued=s.frames_queued,
                frames_in_flight=s.frames_in_flight,
                bytes_delivered=s.bytes_delivered,
                bytes_measured=s.bytes_measured,
                throughput_bps=rate,
                mean_delay_ns=s.mean_delay / PS_PER_NS,
                max_delay_ns=s.max_delay / PS_PER_NS,
            )
            for s, rate in zip(self.flows, rates)
        ]
        return Report(
            scenario=config.name,
            seed=config.seed,
            duration_s=config.duration_s,
            warmup_s=config.warmup_s,
            link=config.link,
            scheduler=config.scheduler,
            flow_specs=config.flows_by_id(),
            check_invariants=config.check_invariants,
            flows=flows,
            aggregate_throughput_bps=float(sum(rates)),
            jain_index=jain,
            max_min_ratio=high / low if low > 0 else None,
            offered_load_bps=offered_load_bps(config.flows, config.link.ifg_bytes),
            offered_load_no_ifg_bps=offered_load_bps(config.flows, 0),
            channel_utilization=utilization,
            scan=scan,
            events_dispatched=events_dispatched,
        )
