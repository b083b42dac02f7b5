"""
Simulation orchestration: wires engine, link, scheduler, traffic and metrics.
"""

import logging
from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

from linksim.engine import PS_PER_SECOND, Event, EventKind, RunSummary, SimTime, Simulator
from linksim.errors import InvariantViolation
from linksim.link import Frame, LinkState
from linksim.metrics import MetricsRecorder
from linksim.models import LinkParams, Report, ScanReport, ScenarioConfig, SchedulerParams
from linksim.scheduler import Decision, build_scheduler
from linksim.traffic import Arrival, FlowGenerator, frame_id_allocator

logger = logging.getLogger(__name__)


class Simulation(ABC):
    """
    One independent simulation instance. Single-threaded; shares nothing
    mutable with other instances.
    """

    def __init__(
        self,
        link_params: LinkParams,
        scheduler_params: SchedulerParams,
        warmup: SimTime = 0,
        check_invariants: bool = False,
        trace: bool = False,
        record_decisions: bool = False,
    ):
        # Initialize components
        self.sim = Simulator(trace=trace)
        self.link = LinkState(link_params)
        self.metrics = MetricsRecorder(link_params.channels, warmup=warmup)
        self.scheduler = build_scheduler(
            scheduler_params,
            self.link,
            on_transmit=self._on_transmit,
            on_delivered=self.metrics.record_delivered,
            on_dropped=self.metrics.record_dropped,
            record_decisions=record_decisions,
        )
        self.check = check_invariants
        # Frame ids in the order transmissions started, kept with the decision log
        self.service_order: Optional[list[int]] = [] if record_decisions else None
        self.handlers = {
            EventKind.TX_COMPLETION: self._on_completion,
            EventKind.FLOW_ARRIVAL: self._on_arrival,
        }

    @property
    def decisions(self) -> Optional[list[Decision]]:
        return self.scheduler.decisions

    def _on_transmit(self, completion: SimTime, transmitter_id: int, channel_id: int) -> None:
        if self.service_order is not None:
            self.service_order.append(self.link.channels[channel_id].current_frame.id)
        self.sim.schedule(completion, EventKind.TX_COMPLETION, transmitter_id, channel_id)

    def _admit(self, frame: Frame, now: SimTime) -> None:
        self.metrics.record_generated(frame, now)
        self.scheduler.on_arrival(frame.channel_id, frame, now)

    @abstractmethod
    def _on_arrival(self, event: Event) -> None:
        """Admit the frame an arrival event carries and line up the next one."""

    def _on_completion(self, event: Event) -> None:
        self.scheduler.on_departure(event.b, event.a, event.time)
        if self.check:
            self.check_invariants()

    def run(self, until: SimTime) -> RunSummary:
        return self.sim.run(until, self.handlers)

    def check_invariants(self) -> None:
        self.link.check_invariants()
        self.scheduler.check_invariants()

    def drain(self) -> None:
        """Move the scheduler's leftover frames into the per-flow accounting."""
        in_flight = [0] * len(self.scheduler.voqs)
        for frame in self.link.in_flight():
            in_flight[frame.channel_id] += 1
        # A frame on the wire is still the head of its VOQ
        queued = [len(voq.frames) - sending for voq, sending in zip(self.scheduler.voqs, in_flight)]
        self.metrics.drain(queued, in_flight)

    def check_final(self, duration: SimTime, warmup: SimTime) -> None:
        """Frame conservation, event conservation and the capacity bound."""
        broken = self.metrics.conservation_violations()
        if broken:
            raise InvariantViolation(f"frame conservation fails for flows {broken}")
        held = sum(s.frames_queued + s.frames_in_flight for s in self.metrics.flows)
        if held != self.scheduler.queued_frames():
            raise InvariantViolation(
                f"accounting holds {held} frames, VOQs hold {self.scheduler.queued_frames()}"
            )
        summary = self.sim.summary()
        if summary.events_scheduled != summary.total_dispatched + summary.events_pending:
            raise InvariantViolation(
                f"{summary.events_scheduled} events scheduled, "
                f"{summary.total_dispatched} dispatched, {summary.events_pending} pending"
            )
        if duration > 0 and warmup == 0:
            capacity = self.link.params.capacity_bps
            delivered = sum(s.bytes_delivered for s in self.metrics.flows) * 8 * PS_PER_SECOND / duration
            if delivered > capacity:
                raise InvariantViolation(
                    f"delivered {delivered:.0f} b/s exceeds link capacity {capacity} b/s"
                )

    def scan_report(self) -> ScanReport:
        s = self.scheduler
        return ScanReport(
            scans=s.scans,
            failed_scans=s.failed_scans,
            queues_visited=s.queues_visited,
            max_visited=s.max_visited,
        )


class ScenarioSimulation(Simulation):
    """Simulation driven by the renewal traffic of a ScenarioConfig."""

    def __init__(self, config: ScenarioConfig, trace: bool = False, record_decisions: bool = False):
        super().__init__(
            config.link,
            config.scheduler,
            warmup=config.warmup_ps,
            check_invariants=config.check_invariants,
            trace=trace,
            record_decisions=record_decisions,
        )
        self.config = config
        for flow_id, quantum, largest in config.undersized_quanta():
            logger.warning(
                "quantum %d for flow %d is below its largest frame (%d bytes); "
                "the link can stall until the next arrival",
                quantum,
                flow_id,
                largest,
            )

        # Seed the first arrival of every flow
        ids = frame_id_allocator()
        self.generators = [
            FlowGenerator(spec, config.seed, ids, config.duration_ps)
            for spec in config.flows_by_id()
        ]
        for generator in self.generators:
            first = generator.first_arrival()
            if first is not None:
                self.sim.schedule(first, EventKind.FLOW_ARRIVAL, generator.spec.flow_id)

    def _on_arrival(self, event: Event) -> None:
        now = event.time
        generator = self.generators[event.a]
        self._admit(generator.make_frame(now), now)
        following = generator.next_arrival(now)
        if following is not None:
            self.sim.schedule(following, EventKind.FLOW_ARRIVAL, event.a)
        if self.check:
            self.check_invariants()

    def execute(self) -> Report:
        """Run to the configured duration, drain accounting and build the report."""
        # Run, then move what is still queued or on the wire into the accounting
        config = self.config
        summary = self.run(config.duration_ps)
        self.drain()
        if config.check_invariants:
            self.check_final(config.duration_ps, config.warmup_ps)
        return self.metrics.build_report(
            config,
            utilization=self.link.utilization(config.duration_ps),
            scan=self.scan_report(),
            events_dispatched=summary.total_dispatched,
        )


class ScriptedSimulation(Simulation):
    """Simulation driven by a fixed list of arrivals."""

    def __init__(
        self,
        arrivals: Sequence[Arrival],
        link_params: LinkParams,
        scheduler_params: SchedulerParams,
        check_invariants: bool = True,
        record_decisions: bool = True,
    ):
        super().__init__(
            link_params,
            scheduler_params,
            check_invariants=check_invariants,
            record_decisions=record_decisions,
        )
        self.arrivals = list(arrivals)
        # frame id -> index into `arrivals`; ids follow dispatch order
        self.arrival_index: list[int] = []
        for index, arrival in sorted(enumerate(self.arrivals), key=lambda item: item[1].time):
            self.sim.schedule(arrival.time, EventKind.FLOW_ARRIVAL, index)

    def _on_arrival(self, event: Event) -> None:
        arrival = self.arrivals[event.a]
        frame = Frame(
            id=len(self.arrival_index),
            channel_id=arrival.queue,
            size_bytes=arrival.size_bytes,
            t_created=event.time,
            t_enqueued=event.time,
        )
        self.arrival_index.append(event.a)
        self._admit(frame, event.time)
        if self.check:
            self.check_invariants()

    def execute(self, until: Optional[SimTime] = None) -> RunSummary:
        """Run until every event is dispatched (or until `until`)."""
        horizon = until if until is not None else 2**62
        summary = self.run(horizon)
        self.drain()
        if self.check:
            self.check_final(0, 0)
        return summary

    def served_arrivals(self) -> list[int]:
        """Service order as indexes into the arrival list."""
        return [self.arrival_index[frame_id] for frame_id in self.service_order]


def run_scenario(config: ScenarioConfig) -> Report:
    """Build, run and report one scenario instance."""
    logger.info(
        "running %s with %s, seed %d, %.3f s",
        config.name,
        config.scheduler.name,
        config.seed,
        config.duration_s,
    )
    report = ScenarioSimulation(config).execute()
    logger.info(
        "%s seed %d: %d events, aggregate %.4f Gb/s, Jain %s",
        config.name,
        config.seed,
        report.events_dispatched,
        report.aggregate_throughput_bps / 1e9,
        f"{report.jain_index:.7f}" if report.jain_index is not None else "n/a",
    )
    return report


def run_sweep(config: ScenarioConfig, seeds: Sequence[int], jobs: int = 1) -> list[Report]:
    """
    Run one instance per seed, serially or in worker processes.

    Reports come back in `seeds` order either way.
    """
    configs = [config.with_changes(seed=seed) for seed in seeds]
    if jobs <= 1 or len(configs) <= 1:
        return [run_scenario(c) for c in configs]
    # Each worker gets a pickled config and builds its own instance
    with ProcessPoolExecutor(max_workers=min(jobs, len(configs))) as pool:
        return list(pool.map(run_scenario, configs))
