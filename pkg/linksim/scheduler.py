"""
Multi-Channel Deficit Round-Robin over per-channel virtual output queues,
plus a deficit-free round-robin baseline.

Frames stay at the head of their VOQ while they are on the wire and are popped
when their transmission completes, so the frames committed to a channel are
always the first `num_pkts_scheduled` frames of its queue.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from linksim.engine import SimTime
from linksim.errors import InvariantViolation, ScenarioValidationError
from linksim.link import Frame, LinkState
from linksim.models import SchedulerParams

logger = logging.getLogger(__name__)


class EnqueueOutcome(Enum):
    ACCEPTED = "accepted"
    DROPPED = "dropped"


@dataclass(slots=True)
class VoqState:
    """One virtual output queue and its MCDRR counters."""

    channel_id: int
    quantum: int
    capacity: int = 1000
    frames: deque = field(default_factory=deque)
    dc: int = 0
    num_pkts_scheduled: int = 0
    drops: int = 0
    last_delivered_id: int = -1


@dataclass(frozen=True, slots=True)
class DequeueResult:
    selected_channel: int
    frames_scheduled: int


@dataclass(frozen=True, slots=True)
class Decision:
    """One entry of the optional decision log."""

    time: SimTime
    action: str  # serve | continue | skip-deficit | skip-busy
    channel_id: int
    transmitter_id: Optional[int]
    size_bytes: int
    dc: int


TransmitHook = Callable[[SimTime, int, int], None]
FrameHook = Callable[[Frame, SimTime], None]


class MCDRRScheduler:
    """
    MCDRR: round-robin over W VOQs with deficit counters, served by whichever
    tunable transmitter is free, with rounds overlapping across channels.
    """

    name = "mcdrr"

    def __init__(
        self,
        link: LinkState,
        quanta: list[int],
        capacity: int = 1000,
        max_packets_per_visit: Optional[int] = None,
        accrue_quantum_when_busy: bool = True,
        on_transmit: Optional[TransmitHook] = None,
        on_delivered: Optional[FrameHook] = None,
        on_dropped: Optional[FrameHook] = None,
        record_decisions: bool = False,
    ):
        if len(quanta) != len(link.channels):
            raise ScenarioValidationError(
                f"{len(quanta)} quanta for {len(link.channels)} channels"
            )
        self.link = link
        self.voqs = [
            VoqState(channel_id=i, quantum=q, capacity=capacity) for i, q in enumerate(quanta)
        ]
        # First scan starts at queue 0
        self.current_queue_index = len(self.voqs) - 1
        self.max_packets_per_visit = max_packets_per_visit
        self.accrue_quantum_when_busy = accrue_quantum_when_busy

        self.on_transmit = on_transmit
        self.on_delivered = on_delivered
        self.on_dropped = on_dropped

        self.decisions: Optional[list[Decision]] = [] if record_decisions else None
        self._now: SimTime = 0

        # Scan cost
        self.scans = 0
        self.failed_scans = 0
        self.queues_visited = 0
        self.max_visited = 0

    # Queue operations

    def enqueue(self, channel_id: int, frame: Frame) -> EnqueueOutcome:
        """Append to the VOQ tail, or tail-drop when the VOQ is full."""
        voq = self.voqs[channel_id]
        if len(voq.frames) >= voq.capacity:
            voq.drops += 1
            return EnqueueOutcome.DROPPED
        voq.frames.append(frame)
        return EnqueueOutcome.ACCEPTED

    def on_arrival(self, channel_id: int, frame: Frame, now: SimTime) -> EnqueueOutcome:
        """
        Arrival of a frame for `channel_id`.

        An accepted frame triggers a single dequeue if a transmitter is idle;
        the selected queue's HOL frame goes out on that transmitter.
        """
        outcome = self.enqueue(channel_id, frame)
        if outcome is EnqueueOutcome.DROPPED:
            if self.on_dropped:
                self.on_dropped(frame, now)
            return outcome

        transmitter_id = self.link.acquire_transmitter()
        if transmitter_id is None:
            return outcome

        self._now = now
        result = self.dequeue()
        if result is not None:
            self._send(result.selected_channel, transmitter_id, now, "serve")
        return outcome

    def on_departure(self, channel_id: int, transmitter_id: int, now: SimTime) -> None:
        """
        End of transmission on `channel_id`. The transmitter either keeps
        sending the channel's scheduled batch or starts the next selection.
        """
        voq = self.voqs[channel_id]
        if voq.num_pkts_scheduled == 0 or not voq.frames:
            raise InvariantViolation(
                f"departure on channel {channel_id} with {voq.num_pkts_scheduled} scheduled "
                f"and {len(voq.frames)} queued"
            )

        frame = self.link.end_transmission(transmitter_id, channel_id, now)
        head = voq.frames.popleft()
        if head is not frame:
            raise InvariantViolation(
                f"channel {channel_id} delivered frame {frame.id} but VOQ head was {head.id}"
            )
        if frame.id <= voq.last_delivered_id:
            raise InvariantViolation(
                f"channel {channel_id} delivered frame {frame.id} after {voq.last_delivered_id}"
            )
        voq.last_delivered_id = frame.id
        voq.num_pkts_scheduled -= 1
        self.frame_popped_is_delivered(frame, now)

        if voq.num_pkts_scheduled > 0:
            self._send(channel_id, transmitter_id, now, "continue")
            return

        if not voq.frames:
            voq.dc = 0

        self._now = now
        result = self.dequeue()
        if result is not None:
            self._send(result.selected_channel, transmitter_id, now, "serve")

    def frame_popped_is_delivered(self, frame: Frame, now: SimTime) -> None:
        """Forward a delivered frame to the metrics recorder."""
        if self.on_delivered:
            self.on_delivered(frame, now)

    # Selection

    def dequeue(self) -> Optional[DequeueResult]:
        """
        Scan up to W queues from one past the round pointer.

        Every non-empty queue visited accrues its quantum (busy queues only
        when accrue_quantum_when_busy). The first queue with nothing in flight
        whose deficit covers its HOL frame is selected and a batch is
        scheduled from its head while the deficit lasts. Skipped queues keep
        their deficit.
        """
        voqs = self.voqs
        count = len(voqs)
        start = (self.current_queue_index + 1) % count
        accrue_busy = self.accrue_quantum_when_busy
        log = self.decisions

        for step in range(count):
            idx = start + step
            if idx >= count:
                idx -= count
            voq = voqs[idx]
            frames = voq.frames
            if not frames:
                continue

            eligible = voq.num_pkts_scheduled == 0
            if eligible or accrue_busy:
                voq.dc += voq.quantum
            if not eligible:
                if log is not None:
                    self._log("skip-busy", idx, None, frames[0].size_bytes, voq.dc)
                continue
            if voq.dc < frames[0].size_bytes:
                if log is not None:
                    self._log("skip-deficit", idx, None, frames[0].size_bytes, voq.dc)
                continue

            self.current_queue_index = idx
            scheduled = self._schedule_batch(voq)
            self._count_scan(step + 1, failed=False)
            return DequeueResult(selected_channel=idx, frames_scheduled=scheduled)

        self._count_scan(count, failed=True)
        return None

    def _schedule_batch(self, voq: VoqState) -> int:
        """Commit frames from the head while the deficit covers them."""
        limit = self.max_packets_per_visit or len(voq.frames)
        dc = voq.dc
        scheduled = 0
        for frame in voq.frames:
            if scheduled >= limit or frame.size_bytes > dc:
                break
            dc -= frame.size_bytes
            scheduled += 1
        voq.dc = dc
        voq.num_pkts_scheduled = scheduled
        return scheduled

    def _count_scan(self, visited: int, failed: bool) -> None:
        self.scans += 1
        self.queues_visited += visited
        if visited > self.max_visited:
            self.max_visited = visited
        if failed:
            self.failed_scans += 1

    def _send(self, channel_id: int, transmitter_id: int, now: SimTime, action: str) -> None:
        voq = self.voqs[channel_id]
        frame = voq.frames[0]
        completion = self.link.begin_transmission(frame, channel_id, transmitter_id, now)
        if self.decisions is not None:
            self._now = now
            self._log(action, channel_id, transmitter_id, frame.size_bytes, voq.dc)
        if self.on_transmit:
            self.on_transmit(completion, transmitter_id, channel_id)

    def _log(
        self,
        action: str,
        channel_id: int,
        transmitter_id: Optional[int],
        size_bytes: int,
        dc: int,
    ) -> None:
        decision = Decision(self._now, action, channel_id, transmitter_id, size_bytes, dc)
        self.decisions.append(decision)
        logger.debug("%s", decision)

    # Checks

    def queued_frames(self) -> int:
        return sum(len(voq.frames) for voq in self.voqs)

    def check_invariants(self) -> None:
        """Raise InvariantViolation unless every VOQ is consistent with the link."""
        for voq in self.voqs:
            ch = voq.channel_id
            queued = len(voq.frames)
            if voq.dc < 0:
                raise InvariantViolation(f"VOQ {ch}: negative deficit {voq.dc}")
            if queued > voq.capacity:
                raise InvariantViolation(f"VOQ {ch}: {queued} frames over capacity {voq.capacity}")
            if not 0 <= voq.num_pkts_scheduled <= queued:
                raise InvariantViolation(
                    f"VOQ {ch}: {voq.num_pkts_scheduled} scheduled with {queued} queued"
                )
            if not voq.frames and voq.dc != 0:
                raise InvariantViolation(f"VOQ {ch}: empty with deficit {voq.dc}")
            channel = self.link.channels[ch]
            if channel.busy != (voq.num_pkts_scheduled > 0):
                raise InvariantViolation(
                    f"VOQ {ch}: channel busy={channel.busy} with "
                    f"{voq.num_pkts_scheduled} scheduled"
                )
            if channel.busy and channel.current_frame is not voq.frames[0]:
                raise InvariantViolation(f"VOQ {ch}: frame on the wire is not the HOL frame")
            if voq.frames and voq.frames[0].id > voq.frames[-1].id:
                raise InvariantViolation(f"VOQ {ch}: frames out of FIFO order")


class RoundRobinScheduler(MCDRRScheduler):
    """Baseline: same scan order, no deficit, exactly one frame per visit."""

    name = "rr-baseline"

    def dequeue(self) -> Optional[DequeueResult]:
        return self.baseline_rr_dequeue()

    def baseline_rr_dequeue(self) -> Optional[DequeueResult]:
        voqs = self.voqs
        count = len(voqs)
        start = (self.current_queue_index + 1) % count
        for step in range(count):
            idx = (start + step) % count
            voq = voqs[idx]
            if not voq.frames:
                continue
            if voq.num_pkts_scheduled:
                if self.decisions is not None:
                    self._log("skip-busy", idx, None, voq.frames[0].size_bytes, voq.dc)
                continue
            self.current_queue_index = idx
            voq.num_pkts_scheduled = 1
            self._count_scan(step + 1, failed=False)
            return DequeueResult(selected_channel=idx, frames_scheduled=1)

        self._count_scan(count, failed=True)
        return None


SCHEDULERS: dict[str, type[MCDRRScheduler]] = {
    MCDRRScheduler.name: MCDRRScheduler,
    RoundRobinScheduler.name: RoundRobinScheduler,
}


def build_scheduler(
    params: SchedulerParams,
    link: LinkState,
    **hooks,
) -> MCDRRScheduler:
    """Instantiate the scheduler named in `params` over `link`."""
    try:
        cls = SCHEDULERS[params.name]
    except KeyError:
        raise ScenarioValidationError(
            f"unknown scheduler {params.name!r}; choose one of {', '.join(SCHEDULERS)}"
        ) from None
    return cls(
        link,
        quanta=params.quanta(len(link.channels)),
        capacity=params.voq_capacity,
        max_packets_per_visit=params.max_packets_per_visit,
        accrue_quantum_when_busy=params.accrue_quantum_when_busy,
        **hooks,
    )
